#include "nldelay/initial_data.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace nldelay {

namespace {

std::string trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

double parse_plain(std::string_view text, std::string_view whole)
{
    double value = 0.0;
    const auto* first = text.data();
    const auto* last = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last || text.empty()) {
        throw std::invalid_argument("not a number: '" + std::string(whole) + "'");
    }
    return value;
}

}  // namespace

double parse_number(std::string_view text)
{
    const std::string t = trim(text);
    const auto slash = t.find('/');
    if (slash == std::string::npos) return parse_plain(t, text);
    const double num = parse_plain(trim(std::string_view(t).substr(0, slash)), text);
    const double den = parse_plain(trim(std::string_view(t).substr(slash + 1)), text);
    if (den == 0.0) throw std::invalid_argument("zero denominator in '" + std::string(text) + "'");
    return num / den;
}

double InitialDatumSpec::param(const std::string& key) const
{
    const auto it = params.find(key);
    if (it == params.end()) throw std::invalid_argument("datum '" + name + "' has no parameter " + key);
    return it->second;
}

InitialDatumSpec datum_defaults(std::string_view name)
{
    InitialDatumSpec s;
    s.name = std::string(name);
    if (name == "riemann-up" || name == "riemann") {
        s.kind = DatumKind::Riemann;
        s.params = {{"left", 0.3}, {"right", 1.5}, {"at", 0.5}};
    } else if (name == "riemann-down") {
        s.kind = DatumKind::Riemann;
        s.params = {{"left", 1.5}, {"right", 0.3}, {"at", 0.5}};
    } else if (name == "riemann-small") {
        s.kind = DatumKind::Riemann;
        s.params = {{"left", 0.25}, {"right", 0.5}, {"at", 0.2}};
    } else if (name == "box") {
        s.kind = DatumKind::Box;
        s.params = {{"height", 1.5}, {"a", 1.0}, {"b", 2.0}};
    } else if (name == "osc-sin") {
        s.kind = DatumKind::OscSin;
        s.params = {{"base", 0.5}, {"shift", 0.4}, {"a", 11.0 / 40.0}, {"b", 21.0 / 40.0}};
    } else if (name == "osc-cos") {
        s.kind = DatumKind::OscCos;
        s.params = {{"rho_bar", 0.5}, {"shift", 0.4}, {"a", 27.0 / 80.0}, {"b", 37.0 / 80.0}};
    } else if (name == "constant") {
        s.kind = DatumKind::Constant;
        s.params = {{"value", 0.5}};
    } else {
        throw std::invalid_argument("unknown initial datum '" + std::string(name) + "'");
    }
    return s;
}

void set_datum_param(InitialDatumSpec& spec, const std::string& key, double value)
{
    auto it = spec.params.find(key);
    if (it == spec.params.end()) {
        throw std::invalid_argument("datum '" + spec.name + "' has no parameter '" + key + "'");
    }
    if (!std::isfinite(value)) throw std::invalid_argument("datum parameter '" + key + "' not finite");
    it->second = value;
}

InitialDatumSpec parse_datum(std::string_view text)
{
    const auto colon = text.find(':');
    InitialDatumSpec spec = datum_defaults(trim(text.substr(0, colon)));
    if (colon == std::string_view::npos) return spec;
    std::string_view rest = text.substr(colon + 1);
    while (!rest.empty()) {
        const auto comma = rest.find(',');
        const std::string_view item = rest.substr(0, comma);
        const auto eq = item.find('=');
        if (eq == std::string_view::npos) {
            throw std::invalid_argument("datum parameter needs key=value: '" + std::string(item) + "'");
        }
        set_datum_param(spec, trim(item.substr(0, eq)), parse_number(item.substr(eq + 1)));
        if (comma == std::string_view::npos) break;
        rest = rest.substr(comma + 1);
    }
    return spec;
}

std::string format_datum(const InitialDatumSpec& spec)
{
    std::string out = spec.name;
    char sep = ':';
    for (const auto& [k, v] : spec.params) {
        out += fmt::format("{}{}={}", sep, k, v);
        sep = ',';
    }
    return out;
}

PiecewiseProfile make_profile(const InitialDatumSpec& spec)
{
    constexpr double pi = std::numbers::pi;
    switch (spec.kind) {
    case DatumKind::Riemann: {
        const double l = spec.param("left"), r = spec.param("right"), at = spec.param("at");
        return {[=](double x) { return x < at ? l : r; }, {at}};
    }
    case DatumKind::Box: {
        const double h = spec.param("height"), a = spec.param("a"), b = spec.param("b");
        if (!(b > a)) throw std::invalid_argument("box datum needs b > a");
        return {[=](double x) { return x >= a && x <= b ? h : 0.0; }, {a, b}};
    }
    case DatumKind::OscSin: {
        const double base = spec.param("base"), s = spec.param("shift");
        const double a = spec.param("a"), b = spec.param("b");
        return {[=](double x) {
                    if (x < a || x > b) return base;
                    const double y = x - s;
                    return base + (3.0 / 16.0 * std::sin(8.0 * pi * y) -
                                   1.0 / 16.0 * std::sin(24.0 * pi * y));
                },
                {a, b}};
    }
    case DatumKind::OscCos: {
        const double rb = spec.param("rho_bar"), s = spec.param("shift");
        const double a = spec.param("a"), b = spec.param("b");
        return {[=](double x) {
                    if (x < a || x > b) return rb;
                    const double y = x - s;
                    return rb + (3.0 / 8.0 * std::cos(8.0 * pi * y) +
                                 1.0 / 8.0 * std::cos(24.0 * pi * y));
                },
                {a, b}};
    }
    case DatumKind::Constant: {
        const double c = spec.param("value");
        return {[=](double) { return c; }, {}};
    }
    }
    throw std::logic_error("unhandled datum kind");
}

std::pair<double, double> datum_range(const InitialDatumSpec& spec, double x_min, double x_max)
{
    const PiecewiseProfile p = make_profile(spec);
    std::vector<double> knots{x_min};
    for (double b : p.breakpoints) {
        if (b > x_min && b < x_max) knots.push_back(b);
    }
    knots.push_back(x_max);
    std::sort(knots.begin(), knots.end());

    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    constexpr int samples = 4096;
    for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
        const double a = knots[i], b = knots[i + 1];
        // sample the open piece so jump values are not attributed to the wrong side
        for (int k = 0; k <= samples; ++k) {
            double x = a + (b - a) * static_cast<double>(k) / samples;
            if (k == 0) x = a + (b - a) * 1e-9;
            if (k == samples) x = b - (b - a) * 1e-9;
            const double v = p.value(x);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    return {lo, hi};
}

}  // namespace nldelay
