#ifndef NLDELAY_DISCRETIZATION_HPP
#define NLDELAY_DISCRETIZATION_HPP

#include "nldelay/common.hpp"
#include "nldelay/model.hpp"

#include <cstddef>
#include <functional>
#include <vector>

namespace nldelay {

/**
 * Uniform space-time mesh.
 *
 * Cells are indexed 0..J-1 with centers x_min + (j + 1/2) dx. The look-ahead
 * distance spans exactly N cells and the delay exactly h time steps.
 */
struct Grid {
    double x_min = 0.0;
    double x_max = 0.0;
    double dx = 0.0;
    std::size_t cells = 0;         // J
    std::size_t kernel_cells = 0;  // N, L = N dx
    double dt = 0.0;
    std::size_t delay_steps = 0;   // h, tau = h dt
    double alpha = 0.0;            // LF viscosity, 0 for HW

    double lambda() const { return dt / dx; }
    double tau() const { return static_cast<double>(delay_steps) * dt; }
    double center(std::size_t j) const { return x_min + (static_cast<double>(j) + 0.5) * dx; }
    double edge(std::size_t j) const { return x_min + static_cast<double>(j) * dx; }
};

/**
 * Builds the spatial part of the grid. Throws std::invalid_argument when the
 * domain length or the look-ahead distance is not an integer multiple of dx
 * (relative tolerance 1e-9).
 */
Grid make_spatial_grid(double x_min, double x_max, double dx, double look_ahead);

/// Number of cells covering the kernel support; throws if L / dx is not integral.
std::size_t kernel_cell_count(double look_ahead, double dx);

/// Cell-averaged kernel values w^k, k = 0..N-1.
struct KernelWeights {
    std::vector<double> values;

    std::size_t size() const { return values.size(); }
    double operator[](std::size_t k) const { return k < values.size() ? values[k] : 0.0; }
};

KernelWeights discretize_kernel(const Kernel& kernel, const Grid& grid);

/**
 * A function known in closed form on the pieces between its breakpoints.
 * Cell averages are integrated piece by piece so discontinuities never fall
 * inside a quadrature interval.
 */
struct PiecewiseProfile {
    std::function<double(double)> value;
    std::vector<double> breakpoints;
};

/// Cell averages by composite 10-point Gauss-Legendre quadrature.
Level project_initial_datum(const PiecewiseProfile& profile, const Grid& grid);

struct LaxFriedrichsStep {
    double alpha;
    double dt;
};

/**
 * alpha = V(1 + R||f'||) and dt = safety dx / (alpha + V(1 + R||f'||)).
 * Throws std::invalid_argument unless safety is in (0, 1].
 */
LaxFriedrichsStep cfl_dt_lf(const BoundSet& bounds, double max_density, double dx, double safety);

/// dt = safety dx / (V(1 + R||f'||)).
double cfl_dt_hw(const BoundSet& bounds, double max_density, double dx, double safety);

struct DelayFit {
    std::size_t delay_steps;
    double dt;
};

/**
 * Smallest h with tau / h <= dt, and dt shrunk to tau / h so the delay is an
 * exact number of steps. dt is returned unchanged when tau == 0.
 */
DelayFit fit_delay_steps(double tau, double dt);

/// Fills dt, delay_steps and alpha of a spatial grid for the given scheme.
struct TimeStepping {
    double alpha = 0.0;
    double dt_cfl = 0.0;
    double dt = 0.0;
    std::size_t delay_steps = 0;

    bool adjusted() const { return dt != dt_cfl; }
};

TimeStepping resolve_time_step(SchemeKind scheme,
                               const BoundSet& bounds,
                               double dx,
                               double safety,
                               double tau);

/// Largest lambda allowed by the scheme's CFL condition.
double cfl_lambda_limit(SchemeKind scheme, const BoundSet& bounds, double alpha);

}  // namespace nldelay

#endif  // NLDELAY_DISCRETIZATION_HPP
