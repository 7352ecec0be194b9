#include "nldelay/scenario.hpp"

#include <catch2/catch_test_macros.hpp>

#include <filesystem>
#include <fstream>
#include <string>

using namespace nldelay;

namespace {

const char* kMinimal = R"(
# Riemann problem on the unit interval
[domain]
dx = 0.005

[time]
horizon = 0.5
tau = 0.01    # delay

[kernel]
length = 0.015

[initial]
datum = riemann-up
right = 0.9
)";

std::string key_of(const std::string& text)
{
    try {
        parse_scenario(text);
    } catch (const ConfigError& e) {
        return e.key();
    }
    return "<accepted>";
}

std::string with(const std::string& extra)
{
    return std::string(kMinimal) + extra;
}

}  // namespace

TEST_CASE("minimal scenario and defaults")
{
    const Scenario s = parse_scenario(kMinimal);
    CHECK(s.dx == 0.005);
    CHECK(s.x_min == 0.0);
    CHECK(s.x_max == 1.0);
    CHECK(s.boundary == Boundary::FreeFlow);
    CHECK(s.scheme == SchemeKind::HilligesWeidlich);
    CHECK(s.saturation.kind == SaturationKind::None);
    CHECK(s.velocity.kind == VelocityKind::NormalizedGreenshields);
    CHECK(s.kernel.kind == KernelKind::Constant);
    CHECK(s.tau == 0.01);
    CHECK(s.safety == 1.0);
    CHECK(s.stride == 1);
    CHECK(s.initial.param("right") == 0.9);
    CHECK(s.initial.param("left") == 0.3);
    const Model m = s.model();
    CHECK(m.max_density() == 1.0);
}

TEST_CASE("config errors name the offending key")
{
    CHECK(key_of("[domain]\ndx = 0.01\n") == "time.horizon");
    CHECK(key_of(with("[output]\nstride = 0\n")) == "output.stride");
    CHECK(key_of(with("[output]\nstride = 2.5\n")) == "output.stride");
    CHECK(key_of(with("[output]\nsnapshots = 0.1, 0.7\n")) == "output.snapshots");
    CHECK(key_of(with("[scheme]\nkind = upwind\n")) == "scheme.kind");
    CHECK(key_of(with("[velocity]\nkind = cubic\n")) == "velocity.kind");
    CHECK(key_of(with("[velocity]\nvmax = 2\n")) == "velocity.vmax");
    CHECK(key_of(with("[velocity]\nkind = greenshields\nvmax = -1\nrmax = 2\n")) == "velocity.vmax");
    CHECK(key_of(with("[saturation]\nkind = exponential\nepsilon = 0\n")) == "saturation.epsilon");
    CHECK(key_of(with("[saturation]\nkind = linear\nsteepness = 2\n")) == "saturation.steepness");
    CHECK(key_of(with("[weather]\nrain = 1\n")) == "weather");
    CHECK(key_of(std::string(kMinimal) + "[domain]\ndx = 0.01\n") == "domain.dx");
    CHECK(key_of(with("[domain]\nboundary = wall\n")) == "domain.boundary");

    // the datum reaches 1.5 while R = 1
    std::string text = kMinimal;
    text.replace(text.find("right = 0.9"), 11, "right = 1.5");
    CHECK(key_of(text) == "initial.datum");
    text = kMinimal;
    text.replace(text.find("right = 0.9"), 11, "width = 2");
    CHECK(key_of(text) == "initial.width");
    text = kMinimal;
    text.replace(text.find("dx = 0.005"), 10, "dx = 0.003");
    CHECK(key_of(text) == "domain.dx");
    text = kMinimal;
    text.replace(text.find("length = 0.015"), 14, "length = 0.0175");
    CHECK(key_of(text) == "kernel.length");
    text = kMinimal;
    text.replace(text.find("tau = 0.01"), 10, "tau = -0.01");
    CHECK(key_of(text) == "time.tau");
    text = kMinimal;
    text.replace(text.find("datum = riemann-up"), 18, "datum = zigzag");
    CHECK(key_of(text) == "initial.datum");

    CHECK_THROWS_AS(parse_scenario("dx = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_scenario("[domain\n"), ConfigError);
    CHECK_THROWS_AS(parse_scenario("[domain]\njust words\n"), ConfigError);
    CHECK_THROWS_AS(load_scenario("/nonexistent/scenario.cfg"), ConfigError);
}

TEST_CASE("presets validate and round-trip through the file format")
{
    const auto names = preset_names();
    CHECK(names.size() == 12);
    for (const auto& name : names) {
        const Scenario s = preset(name);
        CHECK(s.name == name);
        CHECK_NOTHROW(s.validate());
        const std::string text = write_scenario(s);
        const Scenario back = parse_scenario(text);
        CHECK(write_scenario(back) == text);
        CHECK(back.dx == s.dx);
        CHECK(back.tau == s.tau);
        CHECK(back.snapshots == s.snapshots);
        CHECK(back.initial.params == s.initial.params);
    }
    CHECK_THROWS_AS(preset("no-such-preset"), std::invalid_argument);
}

TEST_CASE("preset parameters")
{
    const Scenario shock = preset("shock");
    CHECK(shock.velocity.kind == VelocityKind::Greenshields);
    CHECK(shock.velocity.max_speed == 0.9);
    CHECK(shock.velocity.max_density == 1.7);
    CHECK(shock.kernel.length == 0.015);

    const Scenario sat = preset("saturation-sin");
    CHECK(sat.dx == 1e-3);
    CHECK(sat.tau == 0.12);
    CHECK(sat.kernel.length == 0.1);
    CHECK(preset("saturation-cos-half").tau == 0.08);
    CHECK(preset("saturation-cos-quarter").initial.param("rho_bar") == 0.25);

    const Scenario dl = preset("delay-limit-box");
    CHECK(dl.x_max == 5.0);
    CHECK(dl.dx == 5e-3);
    CHECK(dl.kernel.kind == KernelKind::LinearDecreasing);
    CHECK(dl.kernel.length == 0.15);
    CHECK(dl.saturation.kind == SaturationKind::Exponential);
    CHECK(dl.initial.param("height") == 0.75);

    CHECK(preset("stop-go-cos-nosat").velocity.kind == VelocityKind::Cropped);
    CHECK(preset("stop-go-cos-nosat").saturation.kind == SaturationKind::None);
    CHECK(preset("box-refine").initial.param("height") == 1.5);
}

TEST_CASE("scenario files on disk")
{
    const auto path = std::filesystem::temp_directory_path() / "nldelay_test_scenario.cfg";
    std::ofstream(path) << write_scenario(preset("rarefaction"));
    const Scenario s = load_scenario(path);
    CHECK(s.name == "rarefaction");
    CHECK(s.initial.param("left") == 1.5);
    std::filesystem::remove(path);
}
