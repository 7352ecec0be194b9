#include "nldelay/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nldelay {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double safe_log(double x)
{
    return x > 0.0 ? std::log(x) : kNegInf;
}

double sgn(double x)
{
    return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0);
}

// Neumaier summation keeps the mass measurement well below the drift tolerance.
double compensated_sum(std::span<const double> values)
{
    double sum = 0.0;
    double comp = 0.0;
    for (double v : values) {
        const double t = sum + v;
        if (std::abs(sum) >= std::abs(v)) {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    return sum + comp;
}

bool within(std::span<const double> level, double lo, double hi)
{
    return std::all_of(level.begin(), level.end(), [&](double x) { return x >= lo && x <= hi; });
}

}  // namespace

double total_variation(std::span<const double> level, Boundary boundary)
{
    if (level.size() < 2) return 0.0;
    double tv = 0.0;
    for (std::size_t j = 0; j + 1 < level.size(); ++j) tv += std::abs(level[j + 1] - level[j]);
    if (boundary == Boundary::Periodic) tv += std::abs(level.front() - level.back());
    return tv;
}

double l1_norm(std::span<const double> level, double dx)
{
    double s = 0.0;
    for (double x : level) s += std::abs(x);
    return dx * s;
}

double l1_distance(std::span<const double> a, std::span<const double> b, double dx)
{
    if (a.size() != b.size()) {
        throw std::invalid_argument("l1_distance: levels have " + std::to_string(a.size()) +
                                    " and " + std::to_string(b.size()) + " cells");
    }
    double s = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) s += std::abs(a[j] - b[j]);
    return dx * s;
}

LevelStats level_stats(std::span<const double> level, double dx, Boundary boundary)
{
    LevelStats st;
    if (level.empty()) return st;
    st.min = level.front();
    st.max = level.front();
    for (double x : level) {
        st.min = std::min(st.min, x);
        st.max = std::max(st.max, x);
        st.linf = std::max(st.linf, std::abs(x));
    }
    st.l1 = l1_norm(level, dx);
    st.tv = total_variation(level, boundary);
    return st;
}

double log_two_exp_minus_one(double x)
{
    if (x < 0.0) throw std::invalid_argument("log_two_exp_minus_one needs x >= 0");
    if (x < 30.0) return std::log1p(2.0 * std::expm1(x));
    return x + std::log(2.0 - std::exp(-x));
}

double log_add(double a, double b)
{
    if (a == kNegInf) return b;
    if (b == kNegInf) return a;
    const double m = std::max(a, b);
    return m + std::log1p(std::exp(-std::abs(a - b)));
}

double log_tv_factor(double t, double tau, double M)
{
    if (t < 0.0 || tau < 0.0) throw std::invalid_argument("log_tv_factor needs t, tau >= 0");
    if (tau == 0.0) return 2.0 * M * t;
    const double windows = std::floor(t / tau + 1e-9);
    const double rest = std::max(0.0, t - windows * tau);
    return log_two_exp_minus_one(M * rest) + windows * log_two_exp_minus_one(M * tau);
}

double tv_bound(double t, double tau, double M, double tv0)
{
    if (tv0 == 0.0) return 0.0;
    return std::exp(std::log(tv0) + log_tv_factor(t, tau, M));
}

BoundConstants bound_constants(const BoundSet& bounds,
                               SchemeKind scheme,
                               double alpha,
                               double horizon,
                               double tau,
                               double tv0,
                               double l1_0)
{
    const double R = bounds.max_density;
    const double V = bounds.max_speed;
    const double vp = bounds.velocity_derivative;
    const double fp = bounds.saturation_derivative;
    const double w = bounds.kernel_sup;

    BoundConstants c;
    c.G = 2.0 * vp * w * R * (1.0 + R * fp);
    if (!bounds.smooth_velocity()) return c;

    c.available = true;
    c.H = R * w * (6.0 * *bounds.velocity_second_derivative * bounds.kernel_mass * R + 2.0 * vp);
    c.M = std::max(c.H, c.G);
    c.log_C = log_tv_factor(horizon, tau, c.M);
    c.C = std::exp(c.log_C);

    const double wave = (1.0 + R * fp) * V;
    const double bracket = scheme == SchemeKind::LaxFriedrichs ? alpha + wave : wave;
    const double first = safe_log(bracket) + c.log_C + safe_log(tv0);
    const double second = safe_log(2.0 * R * w * vp * l1_0);
    c.log_K = log_add(std::isnan(first) ? kNegInf : first, second);
    c.K = std::exp(c.log_K);
    return c;
}

StabilityConstants stability_constants(const BoundSet& bounds,
                                       const BoundConstants& constants,
                                       double sup_bv,
                                       double sigma0_l1,
                                       double tau1,
                                       double tau2,
                                       double horizon)
{
    if (!constants.available || !bounds.smooth_velocity()) {
        throw std::invalid_argument("stability constants need a C^2 velocity");
    }
    const double R = bounds.max_density;
    const double vp = bounds.velocity_derivative;
    const double vpp = *bounds.velocity_second_derivative;
    StabilityConstants s;
    s.K1 = bounds.kernel_sup * vp * (1.0 + R * bounds.saturation_derivative) * sup_bv +
           R * (vp * bounds.kernel_derivative_l1 +
                vpp * sigma0_l1 * bounds.kernel_derivative_sup * bounds.kernel_mass);
    s.log_K2 = safe_log(s.K1) + constants.log_K + safe_log(horizon);
    s.K2 = std::exp(s.log_K2);
    s.K3 = 1.0 + s.K1 * std::min(tau1, tau2);
    return s;
}

double log_stability_bound(const StabilityConstants& c, double t, double d0, double dtau)
{
    const double delay_term = dtau == 0.0 ? kNegInf : c.log_K2 + std::log(std::abs(dtau));
    return c.K1 * t + log_add(safe_log(c.K3 * d0), delay_term);
}

std::vector<double> default_kappas(double max_density,
                                   std::span<const double> before,
                                   std::span<const double> after)
{
    std::vector<double> k;
    k.reserve(21);
    for (int i = 0; i <= 16; ++i) k.push_back(max_density * static_cast<double>(i) / 16.0);
    for (auto level : {before, after}) {
        if (level.empty()) continue;
        const auto [lo, hi] = std::minmax_element(level.begin(), level.end());
        k.push_back(*lo);
        k.push_back(*hi);
    }
    return k;
}

double entropy_residual(std::span<const double> before,
                        std::span<const double> after,
                        const SpeedField& speeds,
                        double lambda,
                        double alpha,
                        const Saturation& saturation,
                        Boundary boundary,
                        std::span<const double> kappas)
{
    const auto J = static_cast<std::ptrdiff_t>(before.size());
    if (after.size() != before.size() || speeds.cells() != before.size()) {
        throw std::invalid_argument("entropy_residual: size mismatch");
    }
    // r[i] = rho_{i-1}, i = 0..J+1
    std::vector<double> r(static_cast<std::size_t>(J + 2));
    std::vector<double> F(r.size());
    for (std::ptrdiff_t i = 0; i < J + 2; ++i) {
        r[static_cast<std::size_t>(i)] = extended_value(before, i - 1, boundary);
        F[static_cast<std::size_t>(i)] = saturation.flux(r[static_cast<std::size_t>(i)]);
    }
    std::vector<double> edge(static_cast<std::size_t>(J + 1));
    double worst = kNegInf;
    for (double kappa : kappas) {
        const double Fk = saturation.flux(kappa);
        // edge e separates cells e-1 and e, speeds V_{e-1} and V_e
        for (std::ptrdiff_t e = 0; e <= J; ++e) {
            const auto i = static_cast<std::size_t>(e);
            const double u = r[i];
            const double w = r[i + 1];
            const double Vl = speeds.at(e - 1);
            const double Vr = speeds.at(e);
            const double uh = std::max(u, kappa), wh = std::max(w, kappa);
            const double ul = std::min(u, kappa), wl = std::min(w, kappa);
            const double Fuh = u >= kappa ? F[i] : Fk;
            const double Fwh = w >= kappa ? F[i + 1] : Fk;
            const double Ful = u <= kappa ? F[i] : Fk;
            const double Fwl = w <= kappa ? F[i + 1] : Fk;
            const double g_hi = 0.5 * Fuh * Vl + 0.5 * Fwh * Vr - 0.5 * alpha * (wh - uh);
            const double g_lo = 0.5 * Ful * Vl + 0.5 * Fwl * Vr - 0.5 * alpha * (wl - ul);
            edge[i] = g_hi - g_lo;
        }
        for (std::ptrdiff_t j = 0; j < J; ++j) {
            const auto e = static_cast<std::size_t>(j);
            const double res = std::abs(after[e] - kappa) - std::abs(before[e] - kappa) +
                               lambda * (edge[e + 1] - edge[e]) +
                               0.5 * lambda * sgn(after[e] - kappa) * Fk *
                                   (speeds.at(j + 1) - speeds.at(j - 1));
            worst = std::max(worst, res);
        }
    }
    return worst;
}

double entropy_residual_hw(std::span<const double> before,
                           std::span<const double> after,
                           const SpeedField& speeds,
                           double lambda,
                           const Saturation& saturation,
                           Boundary boundary,
                           std::span<const double> kappas)
{
    const auto J = static_cast<std::ptrdiff_t>(before.size());
    if (after.size() != before.size() || speeds.cells() != before.size()) {
        throw std::invalid_argument("entropy_residual_hw: size mismatch");
    }
    std::vector<double> r(static_cast<std::size_t>(J + 2));
    std::vector<double> f(r.size());
    for (std::ptrdiff_t i = 0; i < J + 2; ++i) {
        r[static_cast<std::size_t>(i)] = extended_value(before, i - 1, boundary);
        f[static_cast<std::size_t>(i)] = saturation(r[static_cast<std::size_t>(i)]);
    }
    std::vector<double> edge(static_cast<std::size_t>(J + 1));
    double worst = kNegInf;
    for (double kappa : kappas) {
        const double fk = saturation(kappa);
        const double Fk = kappa * fk;
        for (std::ptrdiff_t e = 0; e <= J; ++e) {
            const auto i = static_cast<std::size_t>(e);
            const double u = r[i];
            const double w = r[i + 1];
            const double fw = f[i + 1];
            const double V = speeds.at(e);
            const double g_hi = std::max(u, kappa) * (w >= kappa ? fw : fk) * V;
            const double g_lo = std::min(u, kappa) * (w <= kappa ? fw : fk) * V;
            edge[i] = g_hi - g_lo;
        }
        for (std::ptrdiff_t j = 0; j < J; ++j) {
            const auto e = static_cast<std::size_t>(j);
            const double res = std::abs(after[e] - kappa) - std::abs(before[e] - kappa) +
                               lambda * (edge[e + 1] - edge[e]) +
                               lambda * sgn(after[e] - kappa) * Fk *
                                   (speeds.at(j + 1) - speeds.at(j));
            worst = std::max(worst, res);
        }
    }
    return worst;
}

LipschitzCheck lipschitz_in_time_check(std::span<const TimedLevel> snapshots,
                                       double log_K,
                                       double dx)
{
    if (std::isnan(log_K)) throw std::invalid_argument("Lipschitz constant unavailable");
    LipschitzCheck out;
    for (std::size_t a = 0; a < snapshots.size(); ++a) {
        for (std::size_t b = a + 1; b < snapshots.size(); ++b) {
            const double span_t = std::abs(snapshots[b].t - snapshots[a].t);
            if (span_t <= 0.0) continue;
            const double d = l1_distance(snapshots[a].level, snapshots[b].level, dx);
            ++out.pairs;
            out.worst_distance = std::max(out.worst_distance, d);
            if (d <= 1e-10) continue;
            const double margin = std::log(d - 1e-10) - (log_K + std::log(span_t));
            out.worst_log_margin = std::max(out.worst_log_margin, margin);
            if (margin > 0.0) out.pass = false;
        }
    }
    return out;
}

Conformity assess_conformity(const Model& model, std::span<const double> initial)
{
    Conformity c;
    c.smooth_velocity = model.velocity.is_smooth();
    c.saturated = model.saturation.kind() != SaturationKind::None;
    const double R = model.max_density();
    c.datum_nonnegative = within(initial, 0.0, std::numeric_limits<double>::infinity());
    c.datum_in_range = within(initial, 0.0, R);
    return c;
}

// ------------------------------------------------------------- monitor

DiagnosticsMonitor::DiagnosticsMonitor(MonitorOptions options) : options_(options)
{
    if (options_.stride == 0) options_.stride = 1;
}

void DiagnosticsMonitor::on_start(const RunSetup& setup, std::span<const double> initial)
{
    setup_ = &setup;
    const Grid& g = setup.grid;
    conformity_ = assess_conformity(setup.model, initial);
    const LevelStats st = level_stats(initial, g.dx, setup.boundary);
    tv0_ = st.tv;
    l1_0_ = st.l1;
    mass0_ = g.dx * compensated_sum(initial);
    sup_tv_ = st.tv;
    sup_l1_ = st.l1;
    sup_bv_ = st.tv + st.l1;
    global_min_ = st.min;
    global_max_ = st.max;
    horizon_ = setup.horizon;
    constants_ = bound_constants(derivative_bounds(setup.model), setup.scheme, g.alpha,
                                 setup.horizon, g.tau(), tv0_, l1_0_);

    check_positivity_ = conformity_.datum_nonnegative;
    check_max_ = conformity_.max_principle_expected();
    check_mass_ = setup.boundary == Boundary::Periodic;
    check_tv_ = conformity_.conforming() && constants_.available;
    check_entropy_ = options_.entropy && setup.scheme == SchemeKind::LaxFriedrichs &&
                     conformity_.conforming();
    active_.clear();
    if (check_positivity_) active_.emplace_back("positivity");
    if (check_max_) active_.emplace_back("max_principle");
    if (check_mass_) active_.emplace_back("conservation");
    if (check_tv_) active_.emplace_back("tv_bound");
    if (check_entropy_) active_.emplace_back("entropy");
    active_.emplace_back("speed_bounds");

    records_.clear();
    violations_.clear();
    counts_.clear();
    window_entropy_ = 0.0;
    max_entropy_ = 0.0;
    max_entropy_hw_ = kNegInf;
    max_drift_ = 0.0;
    max_jump_ratio_ = 0.0;
    space_time_tv_ = 0.0;
    last_recorded_ = 0;
    last_step_ = 0;
    record(0.0, st);
}

void DiagnosticsMonitor::flag(const std::string& check,
                              std::size_t step,
                              double t,
                              double value,
                              double limit)
{
    ++counts_[check];
    if (violations_.size() < options_.max_violations) {
        violations_.push_back({check, step, t, value, limit});
    }
}

void DiagnosticsMonitor::record(double t, const LevelStats& stats)
{
    DiagnosticsRecord rec;
    rec.t = t;
    rec.l1 = stats.l1;
    rec.linf = stats.linf;
    rec.min = stats.min;
    rec.max = stats.max;
    rec.tv = stats.tv;
    rec.tv_bound = constants_.available ? tv_bound(t, setup_->grid.tau(), constants_.M, tv0_)
                                        : std::numeric_limits<double>::quiet_NaN();
    rec.entropy_residual_max = window_entropy_;
    records_.push_back(rec);
    window_entropy_ = 0.0;
}

void DiagnosticsMonitor::on_step(const StepView& view)
{
    const RunSetup& setup = view.setup;
    const Grid& g = setup.grid;
    const double R = setup.model.max_density();
    const LevelStats st = level_stats(view.after, g.dx, setup.boundary);

    global_min_ = std::min(global_min_, st.min);
    global_max_ = std::max(global_max_, st.max);
    sup_tv_ = std::max(sup_tv_, st.tv);
    sup_l1_ = std::max(sup_l1_, st.l1);
    sup_bv_ = std::max(sup_bv_, st.tv + st.l1);
    space_time_tv_ += g.dt * total_variation(view.before, setup.boundary) +
                      l1_distance(view.after, view.before, g.dx);

    if (check_positivity_ && st.min < -1e-12) flag("positivity", view.n, view.t, st.min, -1e-12);
    if (check_max_ && st.max > R + 1e-12) flag("max_principle", view.n, view.t, st.max, R + 1e-12);
    if (check_mass_) {
        const double mass = g.dx * compensated_sum(view.after);
        const double scale = std::max(std::abs(mass0_), std::numeric_limits<double>::min());
        const double drift = std::abs(mass - mass0_) / scale;
        max_drift_ = std::max(max_drift_, drift);
        if (drift > 1e-12 && std::abs(mass - mass0_) > 1e-300) {
            flag("conservation", view.n, view.t, drift, 1e-12);
        }
    }
    if (check_tv_ && st.tv > tv0_) {
        const double log_bound = (tv0_ > 0.0 ? std::log(tv0_) : kNegInf) +
                                 log_tv_factor(view.t, g.tau(), constants_.M);
        if (std::log(st.tv) > log_bound + 1e-12) {
            flag("tv_bound", view.n, view.t, st.tv, std::exp(log_bound));
        }
    }

    const bool need_kappas = check_entropy_ || options_.entropy_hw;
    if (need_kappas) {
        const auto kappas = default_kappas(R, view.before, view.after);
        if (check_entropy_) {
            const double res = entropy_residual(view.before, view.after, view.speeds, g.lambda(),
                                                g.alpha, setup.model.saturation, setup.boundary,
                                                kappas);
            window_entropy_ = std::max(window_entropy_, res);
            max_entropy_ = std::max(max_entropy_, res);
            if (res > 1e-10) flag("entropy", view.n, view.t, res, 1e-10);
        }
        if (options_.entropy_hw && setup.scheme == SchemeKind::HilligesWeidlich) {
            const double res = entropy_residual_hw(view.before, view.after, view.speeds,
                                                   g.lambda(), setup.model.saturation,
                                                   setup.boundary, kappas);
            window_entropy_ = std::max(window_entropy_, res);
            max_entropy_hw_ = std::max(max_entropy_hw_, res);
        }
    }

    if (within(view.lagged, 0.0, R)) {
        const BoundSet b = derivative_bounds(setup.model);
        const double jump_limit = 2.0 * b.velocity_derivative * b.kernel_sup * R * g.dx;
        const auto J = static_cast<std::ptrdiff_t>(g.cells);
        double worst_jump = 0.0;
        double vmin = view.speeds.at(-1);
        double vmax = vmin;
        for (std::ptrdiff_t j = -1; j < J; ++j) {
            worst_jump = std::max(worst_jump, std::abs(view.speeds.at(j + 1) - view.speeds.at(j)));
            vmin = std::min(vmin, view.speeds.at(j + 1));
            vmax = std::max(vmax, view.speeds.at(j + 1));
        }
        if (jump_limit > 0.0) max_jump_ratio_ = std::max(max_jump_ratio_, worst_jump / jump_limit);
        if (worst_jump > jump_limit * (1.0 + 1e-12) + 1e-12) {
            flag("speed_jump", view.n, view.t, worst_jump, jump_limit);
        }
        const double vcap = setup.model.max_speed();
        if (vmin < -1e-12 || vmax > vcap + 1e-12) {
            flag("speed_range", view.n, view.t, vmin < -1e-12 ? vmin : vmax, vcap);
        }
    }

    last_step_ = view.n;
    if (view.n % options_.stride == 0) {
        record(view.t, st);
        last_recorded_ = view.n;
    }
}

void DiagnosticsMonitor::on_finish(const RunSetup& setup, std::span<const double> last, double t)
{
    if (last_step_ != last_recorded_) {
        record(t, level_stats(last, setup.grid.dx, setup.boundary));
        last_recorded_ = last_step_;
    }
}

double DiagnosticsMonitor::log_space_time_bound() const
{
    if (!constants_.available) return std::numeric_limits<double>::quiet_NaN();
    return log_add(safe_log(horizon_ * sup_tv_), constants_.log_K + safe_log(horizon_));
}

}  // namespace nldelay
