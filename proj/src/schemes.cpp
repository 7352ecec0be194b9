#include "nldelay/schemes.hpp"

#include <cmath>
#include <vector>

namespace nldelay {

namespace {

void check_sizes(std::span<const double> rho, const SpeedField& speeds, std::span<double> out)
{
    if (speeds.cells() != rho.size() || out.size() != rho.size()) {
        throw std::invalid_argument("scheme step: level, speed and output sizes differ");
    }
}

void check_finite(std::span<const double> out)
{
    for (std::size_t j = 0; j < out.size(); ++j) {
        if (!std::isfinite(out[j])) {
            throw StepError("non-finite density in cell " + std::to_string(j), j, 0);
        }
    }
}

}  // namespace

void lf_step(std::span<const double> rho,
             const SpeedField& speeds,
             double lambda,
             double alpha,
             const Saturation& saturation,
             Boundary boundary,
             std::span<double> out)
{
    check_sizes(rho, speeds, out);
    const auto J = static_cast<std::ptrdiff_t>(rho.size());

    // q[i] = F(rho_{i-1}) V_{i-1}, i = 0..J+1
    std::vector<double> q(static_cast<std::size_t>(J + 2));
    std::vector<double> r(static_cast<std::size_t>(J + 2));
    for (std::ptrdiff_t i = 0; i < J + 2; ++i) {
        const double value = extended_value(rho, i - 1, boundary);
        r[static_cast<std::size_t>(i)] = value;
        q[static_cast<std::size_t>(i)] = saturation.flux(value) * speeds.at(i - 1);
    }
    const double visc = 0.5 * lambda * alpha;
    const double half = 0.5 * lambda;
    for (std::ptrdiff_t j = 0; j < J; ++j) {
        const auto c = static_cast<std::size_t>(j + 1);
        out[static_cast<std::size_t>(j)] =
            r[c] + visc * (r[c + 1] - 2.0 * r[c] + r[c - 1]) - half * (q[c + 1] - q[c - 1]);
    }
    check_finite(out);
}

Level lf_step(std::span<const double> rho,
              const SpeedField& speeds,
              double lambda,
              double alpha,
              const Saturation& saturation,
              Boundary boundary)
{
    Level out(rho.size());
    lf_step(rho, speeds, lambda, alpha, saturation, boundary, out);
    return out;
}

double hw_flux(double left, double right, double speed_right, const Saturation& saturation)
{
    return left * saturation(right) * speed_right;
}

void hw_step(std::span<const double> rho,
             const SpeedField& speeds,
             double lambda,
             const Saturation& saturation,
             Boundary boundary,
             std::span<double> out)
{
    check_sizes(rho, speeds, out);
    const auto J = static_cast<std::ptrdiff_t>(rho.size());

    // g[i] is the flux through the right edge of cell i-1, i = 0..J
    std::vector<double> g(static_cast<std::size_t>(J + 1));
    for (std::ptrdiff_t i = 0; i <= J; ++i) {
        const double left = extended_value(rho, i - 1, boundary);
        const double right = extended_value(rho, i, boundary);
        g[static_cast<std::size_t>(i)] = hw_flux(left, right, speeds.at(i), saturation);
    }
    for (std::ptrdiff_t j = 0; j < J; ++j) {
        const auto e = static_cast<std::size_t>(j);
        out[e] = rho[e] - lambda * (g[e + 1] - g[e]);
    }
    check_finite(out);
}

Level hw_step(std::span<const double> rho,
              const SpeedField& speeds,
              double lambda,
              const Saturation& saturation,
              Boundary boundary)
{
    Level out(rho.size());
    hw_step(rho, speeds, lambda, saturation, boundary, out);
    return out;
}

std::size_t step_count(double horizon, double dt)
{
    if (!(dt > 0.0)) throw std::invalid_argument("time step must be positive");
    if (!(horizon >= 0.0)) throw std::invalid_argument("horizon must be >= 0");
    return static_cast<std::size_t>(std::floor(horizon / dt + 1e-9));
}

RunResult run(const RunSetup& setup, std::span<Observer* const> observers)
{
    const Grid& grid = setup.grid;
    if (setup.initial.size() != grid.cells) {
        throw std::invalid_argument("initial level size does not match the grid");
    }
    const std::size_t steps = step_count(setup.horizon, grid.dt);
    const double lambda = grid.lambda();

    DelayedState state(setup.initial, grid.delay_steps);
    SpeedField speeds(grid.cells);
    Level next(grid.cells);

    for (Observer* obs : observers) obs->on_start(setup, setup.initial);

    for (std::size_t n = 0; n < steps; ++n) {
        compute_speeds(state.lagged(), setup.weights, setup.model.velocity, grid.dx,
                       setup.boundary, speeds);
        try {
            if (setup.scheme == SchemeKind::LaxFriedrichs) {
                lf_step(state.current(), speeds, lambda, grid.alpha, setup.model.saturation,
                        setup.boundary, next);
            } else {
                hw_step(state.current(), speeds, lambda, setup.model.saturation, setup.boundary,
                        next);
            }
        } catch (const StepError& e) {
            throw StepError(std::string(e.what()) + " at step " + std::to_string(n + 1),
                            e.cell(), n + 1);
        }
        const double t = static_cast<double>(n + 1) * grid.dt;
        if (!observers.empty()) {
            const StepView view{n + 1, t, state.current(), next, state.lagged(), speeds, setup};
            for (Observer* obs : observers) obs->on_step(view);
        }
        state.push(next);
    }

    RunResult result;
    result.final_level = state.current();
    result.steps = steps;
    result.final_time = static_cast<double>(steps) * grid.dt;
    for (Observer* obs : observers) obs->on_finish(setup, result.final_level, result.final_time);
    return result;
}

}  // namespace nldelay
