#ifndef NLDELAY_SCHEMES_HPP
#define NLDELAY_SCHEMES_HPP

#include "nldelay/common.hpp"
#include "nldelay/delay_state.hpp"
#include "nldelay/discretization.hpp"
#include "nldelay/model.hpp"

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>

namespace nldelay {

/// A step produced a non-finite density.
class StepError : public std::runtime_error {
public:
    StepError(const std::string& what, std::size_t cell, std::size_t step)
        : std::runtime_error(what), cell_(cell), step_(step)
    {
    }

    std::size_t cell() const { return cell_; }
    std::size_t step() const { return step_; }

private:
    std::size_t cell_;
    std::size_t step_;
};

/**
 * One Lax-Friedrichs update:
 * rho_j + (lambda alpha / 2)(rho_{j+1} - 2 rho_j + rho_{j-1})
 *       - (lambda / 2)(F(rho_{j+1}) V_{j+1} - F(rho_{j-1}) V_{j-1}).
 * `out` must not alias `rho`.
 */
void lf_step(std::span<const double> rho,
             const SpeedField& speeds,
             double lambda,
             double alpha,
             const Saturation& saturation,
             Boundary boundary,
             std::span<double> out);

Level lf_step(std::span<const double> rho,
              const SpeedField& speeds,
              double lambda,
              double alpha,
              const Saturation& saturation,
              Boundary boundary);

/**
 * One Hilliges-Weidlich update:
 * rho_j - lambda (rho_j f(rho_{j+1}) V_{j+1} - rho_{j-1} f(rho_j) V_j).
 */
void hw_step(std::span<const double> rho,
             const SpeedField& speeds,
             double lambda,
             const Saturation& saturation,
             Boundary boundary,
             std::span<double> out);

Level hw_step(std::span<const double> rho,
              const SpeedField& speeds,
              double lambda,
              const Saturation& saturation,
              Boundary boundary);

/// HW interface flux rho_j f(rho_{j+1}) V_{j+1}.
double hw_flux(double left, double right, double speed_right, const Saturation& saturation);

/// Everything the time loop needs, fully resolved.
struct RunSetup {
    Grid grid;
    Model model;
    SchemeKind scheme = SchemeKind::HilligesWeidlich;
    Boundary boundary = Boundary::FreeFlow;
    KernelWeights weights;
    Level initial;
    double horizon = 0.0;
};

/// Largest N_T with N_T dt <= T (up to 1e-9 steps of rounding).
std::size_t step_count(double horizon, double dt);

struct StepView {
    std::size_t n;  // index of the level just produced
    double t;
    std::span<const double> before;
    std::span<const double> after;
    std::span<const double> lagged;  // level n - h the speeds were built from
    const SpeedField& speeds;        // lagged speeds used for this step
    const RunSetup& setup;
};

class Observer {
public:
    virtual ~Observer() = default;
    virtual void on_start(const RunSetup& setup, std::span<const double> initial) = 0;
    virtual void on_step(const StepView& view) = 0;
    virtual void on_finish(const RunSetup& /*setup*/, std::span<const double> /*last*/, double /*t*/) {}
};

struct RunResult {
    Level final_level;
    std::size_t steps = 0;
    double final_time = 0.0;
};

/// Advances the delayed scheme from t = 0 to N_T dt.
RunResult run(const RunSetup& setup, std::span<Observer* const> observers = {});

}  // namespace nldelay

#endif  // NLDELAY_SCHEMES_HPP
