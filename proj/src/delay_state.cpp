#include "nldelay/delay_state.hpp"

#include <stdexcept>
#include <string>

namespace nldelay {

DelayedState::DelayedState(Level initial, std::size_t delay_steps)
    : delay_steps_(delay_steps), cells_(initial.size())
{
    slots_.assign(delay_steps + 1, std::move(initial));
}

const Level& DelayedState::lagged() const
{
    // Before h pushes, the older slots still hold the extended datum.
    return slots_[index(step_ + slots_.size() - delay_steps_)];
}

void DelayedState::push(std::span<const double> next)
{
    if (next.size() != cells_) {
        throw std::invalid_argument("pushed level has " + std::to_string(next.size()) +
                                    " cells, history expects " + std::to_string(cells_));
    }
    ++step_;
    Level& slot = slots_[index(step_)];
    slot.assign(next.begin(), next.end());
}

double extended_value(std::span<const double> level, std::ptrdiff_t j, Boundary boundary)
{
    const auto n = static_cast<std::ptrdiff_t>(level.size());
    if (boundary == Boundary::Periodic) {
        std::ptrdiff_t r = j % n;
        if (r < 0) r += n;
        return level[static_cast<std::size_t>(r)];
    }
    if (j < 0) return level.front();
    if (j >= n) return level.back();
    return level[static_cast<std::size_t>(j)];
}

void compute_speeds(std::span<const double> level,
                    const KernelWeights& weights,
                    const Velocity& velocity,
                    double dx,
                    Boundary boundary,
                    SpeedField& out)
{
    const auto J = static_cast<std::ptrdiff_t>(level.size());
    const auto N = static_cast<std::ptrdiff_t>(weights.size());
    if (out.cells() != level.size()) out = SpeedField(level.size());

    // ext[i] holds rho_{i-1}, i = 0..J+N
    std::vector<double> ext(static_cast<std::size_t>(J + N + 1));
    for (std::ptrdiff_t i = 0; i < J + N + 1; ++i) {
        ext[static_cast<std::size_t>(i)] = extended_value(level, i - 1, boundary);
    }
    const double* w = weights.values.data();
    for (std::ptrdiff_t j = -1; j <= J; ++j) {
        const double* r = ext.data() + (j + 1);
        double sum = 0.0;
        for (std::ptrdiff_t k = 0; k < N; ++k) sum += w[k] * r[k];
        out.at(j) = velocity(dx * sum);
    }
}

SpeedField compute_speeds(std::span<const double> level,
                          const KernelWeights& weights,
                          const Velocity& velocity,
                          double dx,
                          Boundary boundary)
{
    SpeedField out(level.size());
    compute_speeds(level, weights, velocity, dx, boundary, out);
    return out;
}

SpeedField lagged_speeds(const DelayedState& state,
                         const KernelWeights& weights,
                         const Velocity& velocity,
                         double dx,
                         Boundary boundary)
{
    return compute_speeds(state.lagged(), weights, velocity, dx, boundary);
}

}  // namespace nldelay
