#ifndef NLDELAY_DELAY_STATE_HPP
#define NLDELAY_DELAY_STATE_HPP

#include "nldelay/common.hpp"
#include "nldelay/discretization.hpp"
#include "nldelay/model.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace nldelay {

/**
 * Rolling history of the h+1 most recent density levels.
 *
 * At construction every slot holds the initial level, which realizes the
 * constant extension of the datum on [-tau, 0]. Storage stays (h+1) J.
 */
class DelayedState {
public:
    DelayedState(Level initial, std::size_t delay_steps);

    const Level& current() const { return slots_[index(step_)]; }
    /// Level n - h.
    const Level& lagged() const;

    /// Appends level n+1, evicting level n-h. Throws on length mismatch.
    void push(std::span<const double> next);

    std::size_t step() const { return step_; }
    std::size_t delay_steps() const { return delay_steps_; }
    std::size_t cells() const { return cells_; }
    std::size_t stored_cells() const { return slots_.size() * cells_; }

private:
    std::size_t index(std::size_t n) const { return n % slots_.size(); }

    std::vector<Level> slots_;
    std::size_t delay_steps_;
    std::size_t cells_;
    std::size_t step_ = 0;
};

/**
 * Convolution speeds V_j for j = -1..J, ghosts included so both schemes can
 * read V_{j-1} and V_{j+1} at the boundary cells.
 */
class SpeedField {
public:
    SpeedField() = default;
    explicit SpeedField(std::size_t cells) : values_(cells + 2, 0.0) {}

    double at(std::ptrdiff_t j) const { return values_[static_cast<std::size_t>(j + 1)]; }
    double& at(std::ptrdiff_t j) { return values_[static_cast<std::size_t>(j + 1)]; }

    std::size_t cells() const { return values_.empty() ? 0 : values_.size() - 2; }
    const std::vector<double>& raw() const { return values_; }

private:
    std::vector<double> values_;
};

/// Density at index j (any integer) after applying the boundary rule.
double extended_value(std::span<const double> level, std::ptrdiff_t j, Boundary boundary);

/**
 * V_j = v(dx sum_k w^k rho_{j+k}) for j = -1..J, with rho extended beyond the
 * domain by the boundary rule.
 */
void compute_speeds(std::span<const double> level,
                    const KernelWeights& weights,
                    const Velocity& velocity,
                    double dx,
                    Boundary boundary,
                    SpeedField& out);

SpeedField compute_speeds(std::span<const double> level,
                          const KernelWeights& weights,
                          const Velocity& velocity,
                          double dx,
                          Boundary boundary);

/// Speeds built from level n - h of the history.
SpeedField lagged_speeds(const DelayedState& state,
                         const KernelWeights& weights,
                         const Velocity& velocity,
                         double dx,
                         Boundary boundary);

}  // namespace nldelay

#endif  // NLDELAY_DELAY_STATE_HPP
