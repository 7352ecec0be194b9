#ifndef NLDELAY_INITIAL_DATA_HPP
#define NLDELAY_INITIAL_DATA_HPP

#include "nldelay/discretization.hpp"

#include <map>
#include <string>
#include <string_view>
#include <utility>

namespace nldelay {

/**
 * Built-in initial data.
 *
 *   riemann        left for x < at, right for x > at
 *   box            height on [a, b], 0 elsewhere
 *   osc-sin        base + [3/16 sin(8 pi (x-s)) - 1/16 sin(24 pi (x-s))] on [a, b]
 *   osc-cos        rho_bar + [3/8 cos(8 pi (x-s)) + 1/8 cos(24 pi (x-s))] on [a, b]
 *   constant       value
 *
 * The named variants riemann-up, riemann-down and riemann-small only differ
 * in their default parameters. The value at a jump point is irrelevant for
 * cell averages.
 */
enum class DatumKind { Riemann, Box, OscSin, OscCos, Constant };

struct InitialDatumSpec {
    std::string name = "constant";
    DatumKind kind = DatumKind::Constant;
    std::map<std::string, double> params;

    double param(const std::string& key) const;
};

/// Spec for a named datum with its default parameters. Throws on unknown names.
InitialDatumSpec datum_defaults(std::string_view name);

/// Overrides one parameter, rejecting keys the datum does not have.
void set_datum_param(InitialDatumSpec& spec, const std::string& key, double value);

/// Parses `name` or `name:key=value,key=value`.
InitialDatumSpec parse_datum(std::string_view text);

/// Inverse of parse_datum with every parameter spelled out.
std::string format_datum(const InitialDatumSpec& spec);

PiecewiseProfile make_profile(const InitialDatumSpec& spec);

/// Min and max of the profile over [x_min, x_max], by dense sampling of each piece.
std::pair<double, double> datum_range(const InitialDatumSpec& spec, double x_min, double x_max);

/// Accepts decimal numbers and fractions such as "1/50". Throws std::invalid_argument.
double parse_number(std::string_view text);

}  // namespace nldelay

#endif  // NLDELAY_INITIAL_DATA_HPP
