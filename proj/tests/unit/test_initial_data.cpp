#include "nldelay/initial_data.hpp"

#include <catch2/catch_test_macros.hpp>
#include <catch2/matchers/catch_matchers_floating_point.hpp>

#include <cmath>
#include <numbers>
#include <stdexcept>

using namespace nldelay;
using Catch::Matchers::WithinAbs;

TEST_CASE("numbers and fractions")
{
    CHECK(parse_number("0.25") == 0.25);
    CHECK(parse_number(" 1/50 ") == 1.0 / 50.0);
    CHECK(parse_number("27/80") == 27.0 / 80.0);
    CHECK(parse_number("-3e-2") == -0.03);
    CHECK_THROWS_AS(parse_number("abc"), std::invalid_argument);
    CHECK_THROWS_AS(parse_number("1/0"), std::invalid_argument);
    CHECK_THROWS_AS(parse_number(""), std::invalid_argument);
    CHECK_THROWS_AS(parse_number("0.5x"), std::invalid_argument);
}

TEST_CASE("datum specs")
{
    auto s = parse_datum("box:height=0.75,a=1,b=2");
    CHECK(s.kind == DatumKind::Box);
    CHECK(s.param("height") == 0.75);
    CHECK(parse_datum(format_datum(s)).params == s.params);

    s = parse_datum("osc-cos:rho_bar=1/4");
    CHECK(s.param("rho_bar") == 0.25);
    CHECK(s.param("a") == 27.0 / 80.0);

    CHECK(parse_datum("riemann-small").param("at") == 0.2);
    CHECK(parse_datum("riemann").param("right") == 1.5);
    CHECK(parse_datum("riemann-down").param("left") == 1.5);

    CHECK_THROWS_AS(parse_datum("wave"), std::invalid_argument);
    CHECK_THROWS_AS(parse_datum("box:width=2"), std::invalid_argument);
    CHECK_THROWS_AS(parse_datum("box:height"), std::invalid_argument);
    auto c = datum_defaults("constant");
    CHECK_THROWS_AS(set_datum_param(c, "value", std::nan("")), std::invalid_argument);
}

TEST_CASE("profiles follow their closed forms")
{
    constexpr double pi = std::numbers::pi;
    const auto sin_p = make_profile(datum_defaults("osc-sin"));
    for (double x : {0.3, 0.41, 0.5}) {
        const double y = x - 0.4;
        CHECK_THAT(sin_p.value(x),
                   WithinAbs(0.5 + 3.0 / 16 * std::sin(8 * pi * y) - 1.0 / 16 * std::sin(24 * pi * y), 1e-15));
    }
    CHECK(sin_p.value(0.1) == 0.5);
    CHECK(sin_p.value(0.9) == 0.5);

    const auto cos_p = make_profile(parse_datum("osc-cos:rho_bar=0.25"));
    CHECK_THAT(cos_p.value(0.4), WithinAbs(0.75, 1e-15));
    CHECK(cos_p.value(0.2) == 0.25);

    const auto box = make_profile(datum_defaults("box"));
    CHECK(box.value(1.5) == 1.5);
    CHECK(box.value(0.5) == 0.0);
    CHECK(box.breakpoints == std::vector<double>{1.0, 2.0});
    CHECK_THROWS_AS(make_profile(parse_datum("box:a=2,b=1")), std::invalid_argument);

    const auto up = make_profile(datum_defaults("riemann-up"));
    CHECK(up.value(0.2) == 0.3);
    CHECK(up.value(0.8) == 1.5);
}

TEST_CASE("datum ranges")
{
    // 3/16 sin t - 1/16 sin 3t = sin^3 t / 4, one full period on [a, b]
    auto r = datum_range(datum_defaults("osc-sin"), 0.0, 1.0);
    CHECK_THAT(r.first, WithinAbs(0.25, 1e-6));
    CHECK_THAT(r.second, WithinAbs(0.75, 1e-6));

    // 3/8 cos t + 1/8 cos 3t = cos^3 t / 2 on half a period around the peak
    r = datum_range(parse_datum("osc-cos:rho_bar=0.25"), 0.0, 1.0);
    CHECK_THAT(r.first, WithinAbs(0.25, 1e-12));
    CHECK_THAT(r.second, WithinAbs(0.75, 1e-6));

    r = datum_range(datum_defaults("box"), 0.0, 5.0);
    CHECK(r.first == 0.0);
    CHECK(r.second == 1.5);

    r = datum_range(datum_defaults("riemann-small"), 0.0, 0.8);
    CHECK(r.first == 0.25);
    CHECK(r.second == 0.5);
}
