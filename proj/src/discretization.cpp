#include "nldelay/discretization.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <optional>
#include <cmath>
#include <stdexcept>
#include <string>

namespace nldelay {

namespace {

std::size_t integral_ratio(double length, double dx, const char* what)
{
    if (!(dx > 0.0) || !std::isfinite(dx)) throw std::invalid_argument("dx must be positive");
    if (!(length > 0.0) || !std::isfinite(length)) {
        throw std::invalid_argument(std::string(what) + " must be positive");
    }
    const double ratio = length / dx;
    const double n = std::round(ratio);
    if (n < 1.0 || std::abs(n * dx - length) > 1e-9 * dx) {
        throw std::invalid_argument(std::string(what) + " (" + std::to_string(length) +
                                    ") is not an integer multiple of dx (" + std::to_string(dx) +
                                    "), ratio " + std::to_string(ratio));
    }
    return static_cast<std::size_t>(n);
}

void check_safety(double safety)
{
    if (!(safety > 0.0 && safety <= 1.0)) {
        throw std::invalid_argument("CFL safety factor must lie in (0, 1], got " +
                                    std::to_string(safety));
    }
}

}  // namespace

std::size_t kernel_cell_count(double look_ahead, double dx)
{
    return integral_ratio(look_ahead, dx, "kernel look-ahead distance");
}

Grid make_spatial_grid(double x_min, double x_max, double dx, double look_ahead)
{
    if (!(x_max > x_min)) throw std::invalid_argument("domain needs x_max > x_min");
    Grid g;
    g.x_min = x_min;
    g.x_max = x_max;
    g.dx = dx;
    g.cells = integral_ratio(x_max - x_min, dx, "domain length");
    g.kernel_cells = kernel_cell_count(look_ahead, dx);
    return g;
}

KernelWeights discretize_kernel(const Kernel& kernel, const Grid& grid)
{
    KernelWeights w;
    w.values.resize(grid.kernel_cells);
    const double dx = grid.dx;
    const double L = kernel.look_ahead();
    for (std::size_t k = 0; k < grid.kernel_cells; ++k) {
        if (kernel.kind() == KernelKind::Constant) {
            w.values[k] = 1.0 / L;
        } else {
            const double mid = (static_cast<double>(k) + 0.5) * dx;
            w.values[k] = 2.0 / L * (1.0 - mid / L);
        }
    }
    return w;
}

Level project_initial_datum(const PiecewiseProfile& profile, const Grid& grid)
{
    using Rule = boost::math::quadrature::gauss<double, 10>;
    std::vector<double> breaks = profile.breakpoints;
    std::sort(breaks.begin(), breaks.end());

    Level out(grid.cells);
    for (std::size_t j = 0; j < grid.cells; ++j) {
        const double a = grid.edge(j);
        const double b = grid.edge(j + 1);
        // a cell where every node sees the same value keeps it exactly
        std::optional<double> first;
        bool uniform = true;
        auto f = [&](double x) {
            const double v = profile.value(x);
            if (!first) first = v;
            uniform = uniform && v == *first;
            return v;
        };
        double lo = a;
        double sum = 0.0;
        auto piece = [&](double hi) {
            if (hi > lo) sum += Rule::integrate(f, lo, hi);
            lo = hi;
        };
        for (double p : breaks) {
            // breakpoints within rounding of a cell edge would only create slivers
            if (p > a + 1e-12 * grid.dx && p < b - 1e-12 * grid.dx) piece(p);
        }
        piece(b);
        out[j] = uniform && first ? *first : sum / grid.dx;
    }
    return out;
}

LaxFriedrichsStep cfl_dt_lf(const BoundSet& bounds, double max_density, double dx, double safety)
{
    check_safety(safety);
    const double wave = bounds.max_speed * (1.0 + max_density * bounds.saturation_derivative);
    const double alpha = wave;
    return {alpha, safety * dx / (alpha + wave)};
}

double cfl_dt_hw(const BoundSet& bounds, double max_density, double dx, double safety)
{
    check_safety(safety);
    const double wave = bounds.max_speed * (1.0 + max_density * bounds.saturation_derivative);
    return safety * dx / wave;
}

DelayFit fit_delay_steps(double tau, double dt)
{
    if (!(tau >= 0.0) || !std::isfinite(tau)) throw std::invalid_argument("delay must be >= 0");
    if (!(dt > 0.0)) throw std::invalid_argument("time step must be positive");
    if (tau == 0.0) return {0, dt};

    auto h = static_cast<std::size_t>(std::ceil(tau / dt));
    // tau / dt may land one ulp above an integer
    if (h > 1 && tau / static_cast<double>(h - 1) <= dt * (1.0 + 1e-12)) --h;
    h = std::max<std::size_t>(h, 1);
    return {h, std::min(dt, tau / static_cast<double>(h))};
}

TimeStepping resolve_time_step(SchemeKind scheme,
                               const BoundSet& bounds,
                               double dx,
                               double safety,
                               double tau)
{
    TimeStepping ts;
    if (scheme == SchemeKind::LaxFriedrichs) {
        const auto lf = cfl_dt_lf(bounds, bounds.max_density, dx, safety);
        ts.alpha = lf.alpha;
        ts.dt_cfl = lf.dt;
    } else {
        ts.dt_cfl = cfl_dt_hw(bounds, bounds.max_density, dx, safety);
    }
    const auto fit = fit_delay_steps(tau, ts.dt_cfl);
    ts.dt = fit.dt;
    ts.delay_steps = fit.delay_steps;
    return ts;
}

double cfl_lambda_limit(SchemeKind scheme, const BoundSet& bounds, double alpha)
{
    const double wave =
        bounds.max_speed * (1.0 + bounds.max_density * bounds.saturation_derivative);
    return scheme == SchemeKind::LaxFriedrichs ? 1.0 / (alpha + wave) : 1.0 / wave;
}

}  // namespace nldelay
