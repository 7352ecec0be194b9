#ifndef NLDELAY_COMMON_HPP
#define NLDELAY_COMMON_HPP

#include <optional>
#include <string_view>
#include <vector>

namespace nldelay {

/// Cell densities at one time level, cells indexed 0..J-1.
using Level = std::vector<double>;

enum class SchemeKind { LaxFriedrichs, HilligesWeidlich };

/**
 * Treatment of cells outside the computational domain.
 *
 * FreeFlow replicates the first/last cell (zero-order extrapolation) for both
 * the scheme stencil and the look-ahead convolution window. Periodic wraps
 * indices; it exists for exact conservation tests.
 */
enum class Boundary { FreeFlow, Periodic };

std::string_view to_string(SchemeKind kind);
std::string_view to_string(Boundary boundary);

std::optional<SchemeKind> parse_scheme(std::string_view text);
std::optional<Boundary> parse_boundary(std::string_view text);

}  // namespace nldelay

#endif  // NLDELAY_COMMON_HPP
