#include "nldelay/scenario.hpp"

#include "nldelay/discretization.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace nldelay {

namespace {

std::string trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

using Entries = std::map<std::string, std::map<std::string, std::string>>;

const std::map<std::string, std::set<std::string>>& known_keys()
{
    static const std::map<std::string, std::set<std::string>> keys{
        {"scenario", {"name"}},
        {"domain", {"x_min", "x_max", "dx", "boundary"}},
        {"time", {"horizon", "tau", "safety"}},
        {"scheme", {"kind"}},
        {"velocity", {"kind", "vmax", "rmax"}},
        {"saturation", {"kind", "epsilon"}},
        {"kernel", {"kind", "length"}},
        {"initial", {}},  // datum plus datum-specific parameters
        {"output", {"snapshots", "directory", "stride"}},
    };
    return keys;
}

class Reader {
public:
    explicit Reader(Entries entries) : entries_(std::move(entries)) {}

    const std::string* find(const std::string& section, const std::string& key)
    {
        auto s = entries_.find(section);
        if (s == entries_.end()) return nullptr;
        auto k = s->second.find(key);
        return k == s->second.end() ? nullptr : &k->second;
    }

    const std::string& require(const std::string& section, const std::string& key)
    {
        const std::string* v = find(section, key);
        if (!v) throw ConfigError(section + "." + key, "required key missing");
        return *v;
    }

    double number(const std::string& section, const std::string& key, double fallback)
    {
        const std::string* v = find(section, key);
        return v ? to_number(section, key, *v) : fallback;
    }

    double number(const std::string& section, const std::string& key)
    {
        return to_number(section, key, require(section, key));
    }

    static double to_number(const std::string& section, const std::string& key, const std::string& v)
    {
        try {
            return parse_number(v);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(section + "." + key, e.what());
        }
    }

    const Entries& entries() const { return entries_; }

private:
    Entries entries_;
};

VelocityKind parse_velocity_kind(const std::string& v)
{
    if (v == "greenshields") return VelocityKind::Greenshields;
    if (v == "normalized-greenshields") return VelocityKind::NormalizedGreenshields;
    if (v == "cropped") return VelocityKind::Cropped;
    throw ConfigError("velocity.kind", "unknown velocity '" + v + "'");
}

SaturationKind parse_saturation_kind(const std::string& v)
{
    if (v == "none") return SaturationKind::None;
    if (v == "linear") return SaturationKind::Linear;
    if (v == "exponential") return SaturationKind::Exponential;
    throw ConfigError("saturation.kind", "unknown saturation '" + v + "'");
}

KernelKind parse_kernel_kind(const std::string& v)
{
    if (v == "constant") return KernelKind::Constant;
    if (v == "linear-decreasing") return KernelKind::LinearDecreasing;
    throw ConfigError("kernel.kind", "unknown kernel '" + v + "'");
}

std::vector<double> parse_list(const std::string& key, const std::string& text)
{
    std::vector<double> out;
    std::string_view rest = text;
    while (true) {
        const auto comma = rest.find(',');
        const std::string item = trim(rest.substr(0, comma));
        if (!item.empty()) out.push_back(Reader::to_number("output", key, item));
        if (comma == std::string_view::npos) break;
        rest = rest.substr(comma + 1);
    }
    return out;
}

std::string num(double v)
{
    return fmt::format("{}", v);
}

}  // namespace

Model Scenario::model() const
{
    Velocity v = velocity.kind == VelocityKind::Greenshields
                     ? Velocity::greenshields(velocity.max_speed, velocity.max_density)
                 : velocity.kind == VelocityKind::NormalizedGreenshields
                     ? Velocity::normalized_greenshields()
                     : Velocity::cropped();
    const double R = v.max_density();
    Saturation f = saturation.kind == SaturationKind::None     ? Saturation::none()
                   : saturation.kind == SaturationKind::Linear ? Saturation::linear(R)
                                                               : Saturation::exponential(R, saturation.epsilon);
    Kernel w = kernel.kind == KernelKind::Constant ? Kernel::constant(kernel.length)
                                                   : Kernel::linear_decreasing(kernel.length);
    return Model{v, f, w};
}

void Scenario::validate() const
{
    auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
    if (!positive(dx)) throw ConfigError("domain.dx", "must be positive");
    if (!(x_max > x_min)) throw ConfigError("domain.x_max", "must exceed domain.x_min");
    if (!positive(horizon)) throw ConfigError("time.horizon", "must be positive");
    if (!(tau >= 0.0) || !std::isfinite(tau)) throw ConfigError("time.tau", "must be >= 0");
    if (!(safety > 0.0 && safety <= 1.0)) throw ConfigError("time.safety", "must lie in (0, 1]");
    if (velocity.kind == VelocityKind::Greenshields) {
        if (!positive(velocity.max_speed)) throw ConfigError("velocity.vmax", "must be positive");
        if (!positive(velocity.max_density)) throw ConfigError("velocity.rmax", "must be positive");
    } else {
        if (velocity.max_speed != 1.0) throw ConfigError("velocity.vmax", "must be 1 for this velocity");
        if (velocity.max_density != 1.0) throw ConfigError("velocity.rmax", "must be 1 for this velocity");
    }
    if (saturation.kind == SaturationKind::Exponential && !positive(saturation.epsilon)) {
        throw ConfigError("saturation.epsilon", "must be positive");
    }
    if (!positive(kernel.length)) throw ConfigError("kernel.length", "must be positive");
    try {
        make_spatial_grid(x_min, x_max, dx, 1.0 * dx);
    } catch (const std::invalid_argument& e) {
        throw ConfigError("domain.dx", e.what());
    }
    try {
        kernel_cell_count(kernel.length, dx);
    } catch (const std::invalid_argument& e) {
        throw ConfigError("kernel.length", e.what());
    }
    for (double s : snapshots) {
        if (!(s >= 0.0 && s <= horizon)) {
            throw ConfigError("output.snapshots", fmt::format("time {} outside [0, horizon]", s));
        }
    }
    if (stride == 0) throw ConfigError("output.stride", "must be >= 1");

    const double R = velocity.max_density;
    std::pair<double, double> range;
    try {
        range = datum_range(initial, x_min, x_max);
    } catch (const std::invalid_argument& e) {
        throw ConfigError("initial.datum", e.what());
    }
    if (range.first < 0.0 || range.second > R) {
        throw ConfigError("initial.datum", fmt::format("values [{}, {}] leave [0, {}]", range.first,
                                                       range.second, R));
    }
}

Scenario parse_scenario(std::string_view text, std::string_view origin)
{
    Entries entries;
    std::string section;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        const std::string body = trim(hash == std::string::npos ? line : line.substr(0, hash));
        if (body.empty()) continue;
        const std::string where = fmt::format("{}:{}", origin, lineno);
        if (body.front() == '[') {
            if (body.back() != ']') throw ConfigError("", where + ": malformed section header");
            section = trim(std::string_view(body).substr(1, body.size() - 2));
            if (!known_keys().count(section)) throw ConfigError(section, where + ": unknown section");
            continue;
        }
        const auto eq = body.find('=');
        if (eq == std::string::npos) throw ConfigError("", where + ": expected key = value");
        if (section.empty()) throw ConfigError("", where + ": key outside of a section");
        const std::string key = trim(std::string_view(body).substr(0, eq));
        const std::string value = trim(std::string_view(body).substr(eq + 1));
        const auto& allowed = known_keys().at(section);
        if (section != "initial" && !allowed.count(key)) {
            throw ConfigError(section + "." + key, where + ": unknown key");
        }
        if (entries[section].count(key)) throw ConfigError(section + "." + key, where + ": duplicate key");
        entries[section][key] = value;
    }

    Reader r(std::move(entries));
    Scenario s;
    if (const auto* v = r.find("scenario", "name")) s.name = *v;

    s.x_min = r.number("domain", "x_min", 0.0);
    s.x_max = r.number("domain", "x_max", 1.0);
    s.dx = r.number("domain", "dx");
    if (const auto* v = r.find("domain", "boundary")) {
        const auto b = parse_boundary(*v);
        if (!b) throw ConfigError("domain.boundary", "unknown boundary '" + *v + "'");
        s.boundary = *b;
    }

    s.horizon = r.number("time", "horizon");
    s.tau = r.number("time", "tau", 0.0);
    s.safety = r.number("time", "safety", 1.0);

    if (const auto* v = r.find("scheme", "kind")) {
        const auto k = parse_scheme(*v);
        if (!k) throw ConfigError("scheme.kind", "unknown scheme '" + *v + "'");
        s.scheme = *k;
    }

    if (const auto* v = r.find("velocity", "kind")) s.velocity.kind = parse_velocity_kind(*v);
    s.velocity.max_speed = r.number("velocity", "vmax", 1.0);
    s.velocity.max_density = r.number("velocity", "rmax", 1.0);

    if (const auto* v = r.find("saturation", "kind")) s.saturation.kind = parse_saturation_kind(*v);
    s.saturation.epsilon = r.number("saturation", "epsilon", 1.0 / 50.0);

    if (const auto* v = r.find("kernel", "kind")) s.kernel.kind = parse_kernel_kind(*v);
    s.kernel.length = r.number("kernel", "length");

    const std::string& datum = r.require("initial", "datum");
    try {
        s.initial = datum_defaults(datum);
    } catch (const std::invalid_argument& e) {
        throw ConfigError("initial.datum", e.what());
    }
    for (const auto& [key, value] : r.entries().at("initial")) {
        if (key == "datum") continue;
        try {
            set_datum_param(s.initial, key, parse_number(value));
        } catch (const std::invalid_argument& e) {
            throw ConfigError("initial." + key, e.what());
        }
    }

    if (const auto* v = r.find("output", "snapshots")) s.snapshots = parse_list("snapshots", *v);
    if (const auto* v = r.find("output", "directory")) s.output_dir = *v;
    const double stride = r.number("output", "stride", 1.0);
    if (!(stride >= 1.0) || stride != std::floor(stride)) {
        throw ConfigError("output.stride", "must be a positive integer");
    }
    s.stride = static_cast<std::size_t>(stride);

    s.validate();
    return s;
}

Scenario load_scenario(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("", "cannot open scenario file " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str(), path.string());
}

std::string write_scenario(const Scenario& s)
{
    std::string out;
    auto line = [&](std::string_view key, const std::string& value) {
        out += fmt::format("{} = {}\n", key, value);
    };
    out += "[scenario]\n";
    line("name", s.name);
    out += "\n[domain]\n";
    line("x_min", num(s.x_min));
    line("x_max", num(s.x_max));
    line("dx", num(s.dx));
    line("boundary", std::string(to_string(s.boundary)));
    out += "\n[time]\n";
    line("horizon", num(s.horizon));
    line("tau", num(s.tau));
    line("safety", num(s.safety));
    out += "\n[scheme]\n";
    line("kind", std::string(to_string(s.scheme)));
    out += "\n[velocity]\n";
    line("kind", std::string(to_string(s.velocity.kind)));
    line("vmax", num(s.velocity.max_speed));
    line("rmax", num(s.velocity.max_density));
    out += "\n[saturation]\n";
    line("kind", std::string(to_string(s.saturation.kind)));
    line("epsilon", num(s.saturation.epsilon));
    out += "\n[kernel]\n";
    line("kind", std::string(to_string(s.kernel.kind)));
    line("length", num(s.kernel.length));
    out += "\n[initial]\n";
    line("datum", s.initial.name);
    for (const auto& [k, v] : s.initial.params) line(k, num(v));
    out += "\n[output]\n";
    std::string snaps;
    for (double t : s.snapshots) snaps += (snaps.empty() ? "" : ", ") + num(t);
    if (!snaps.empty()) line("snapshots", snaps);
    line("directory", s.output_dir);
    line("stride", std::to_string(s.stride));
    return out;
}

// ------------------------------------------------------------- presets

namespace {

Scenario riemann_preset(const char* name, const char* datum)
{
    Scenario s;
    s.name = name;
    s.x_min = 0.0;
    s.x_max = 1.0;
    s.dx = 5e-3;
    s.horizon = 0.5;
    s.tau = 0.01;
    s.scheme = SchemeKind::HilligesWeidlich;
    s.velocity = {VelocityKind::Greenshields, 0.9, 1.7};
    s.saturation = {SaturationKind::Linear, 1.0 / 50.0};
    s.kernel = {KernelKind::Constant, 0.015};
    s.initial = datum_defaults(datum);
    s.snapshots = {0.0, 0.25, 0.5};
    s.stride = 10;
    return s;
}

Scenario saturation_preset(const char* name, InitialDatumSpec datum, double tau)
{
    Scenario s;
    s.name = name;
    s.x_min = 0.0;
    s.x_max = 1.0;
    s.dx = 1e-3;
    s.horizon = 0.5;
    s.tau = tau;
    s.velocity = {VelocityKind::NormalizedGreenshields, 1.0, 1.0};
    s.saturation = {SaturationKind::Linear, 1.0 / 50.0};
    s.kernel = {KernelKind::Constant, 0.1};
    s.initial = std::move(datum);
    s.snapshots = {0.0, 0.5};
    s.stride = 100;
    return s;
}

Scenario delay_limit_preset(const char* name, InitialDatumSpec datum)
{
    Scenario s;
    s.name = name;
    s.x_min = 0.0;
    s.x_max = 5.0;
    s.dx = 5e-3;
    s.horizon = 0.5;
    s.tau = 0.1;
    s.velocity = {VelocityKind::NormalizedGreenshields, 1.0, 1.0};
    s.saturation = {SaturationKind::Exponential, 1.0 / 50.0};
    s.kernel = {KernelKind::LinearDecreasing, 0.15};
    s.initial = std::move(datum);
    s.snapshots = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5};
    s.stride = 50;
    return s;
}

Scenario stop_go_preset(const char* name, InitialDatumSpec datum, bool saturated)
{
    Scenario s;
    s.name = name;
    s.x_min = 0.0;
    s.x_max = 0.8;
    s.dx = 0.1 / 43.0;  // closest to 2.3e-3 with L = 0.1 and the domain both exact multiples
    s.horizon = 0.5;
    s.tau = 0.1;
    s.velocity = saturated ? VelocitySpec{VelocityKind::NormalizedGreenshields, 1.0, 1.0}
                           : VelocitySpec{VelocityKind::Cropped, 1.0, 1.0};
    s.saturation = {saturated ? SaturationKind::Exponential : SaturationKind::None, 1.0 / 50.0};
    s.kernel = {KernelKind::LinearDecreasing, 0.1};
    s.initial = std::move(datum);
    s.snapshots = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5};
    s.stride = 50;
    return s;
}

InitialDatumSpec with(InitialDatumSpec spec, const std::string& key, double value)
{
    set_datum_param(spec, key, value);
    return spec;
}

}  // namespace

std::vector<std::string> preset_names()
{
    return {"shock",
            "rarefaction",
            "box-refine",
            "saturation-sin",
            "saturation-cos-quarter",
            "saturation-cos-half",
            "delay-limit-sin",
            "delay-limit-box",
            "stop-go-riemann",
            "stop-go-riemann-nosat",
            "stop-go-cos",
            "stop-go-cos-nosat"};
}

Scenario preset(std::string_view name)
{
    Scenario s;
    if (name == "shock") {
        s = riemann_preset("shock", "riemann-up");
    } else if (name == "rarefaction") {
        s = riemann_preset("rarefaction", "riemann-down");
    } else if (name == "box-refine") {
        s.name = "box-refine";
        s.x_min = 0.0;
        s.x_max = 5.0;
        s.dx = 1e-2;
        s.horizon = 0.5;
        s.tau = 0.1;
        s.velocity = {VelocityKind::Greenshields, 0.9, 1.7};
        s.saturation = {SaturationKind::Exponential, 1.0 / 50.0};
        s.kernel = {KernelKind::LinearDecreasing, 0.15};
        s.initial = datum_defaults("box");
        s.snapshots = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5};
        s.stride = 20;
    } else if (name == "saturation-sin") {
        s = saturation_preset("saturation-sin", datum_defaults("osc-sin"), 0.12);
    } else if (name == "saturation-cos-quarter") {
        s = saturation_preset("saturation-cos-quarter",
                              with(datum_defaults("osc-cos"), "rho_bar", 0.25), 0.12);
    } else if (name == "saturation-cos-half") {
        s = saturation_preset("saturation-cos-half", datum_defaults("osc-cos"), 0.08);
    } else if (name == "delay-limit-sin") {
        s = delay_limit_preset("delay-limit-sin", with(datum_defaults("osc-sin"), "shift", 0.5));
    } else if (name == "delay-limit-box") {
        s = delay_limit_preset("delay-limit-box", with(datum_defaults("box"), "height", 0.75));
    } else if (name == "stop-go-riemann") {
        s = stop_go_preset("stop-go-riemann", datum_defaults("riemann-small"), true);
    } else if (name == "stop-go-riemann-nosat") {
        s = stop_go_preset("stop-go-riemann-nosat", datum_defaults("riemann-small"), false);
    } else if (name == "stop-go-cos") {
        s = stop_go_preset("stop-go-cos", datum_defaults("osc-cos"), true);
    } else if (name == "stop-go-cos-nosat") {
        s = stop_go_preset("stop-go-cos-nosat", datum_defaults("osc-cos"), false);
    } else {
        throw std::invalid_argument("unknown preset '" + std::string(name) + "'");
    }
    s.output_dir = "out/" + s.name;
    return s;
}

}  // namespace nldelay
