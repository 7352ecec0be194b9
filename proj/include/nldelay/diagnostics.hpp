#ifndef NLDELAY_DIAGNOSTICS_HPP
#define NLDELAY_DIAGNOSTICS_HPP

#include "nldelay/common.hpp"
#include "nldelay/delay_state.hpp"
#include "nldelay/model.hpp"
#include "nldelay/schemes.hpp"

#include <cstddef>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace nldelay {

/// Sum of |rho_{j+1} - rho_j| over interior edges, plus the wrap edge when periodic.
double total_variation(std::span<const double> level, Boundary boundary);

double l1_norm(std::span<const double> level, double dx);

/// dx sum |a_j - b_j|. Throws std::invalid_argument on length mismatch.
double l1_distance(std::span<const double> a, std::span<const double> b, double dx);

struct LevelStats {
    double l1 = 0.0;
    double linf = 0.0;
    double min = 0.0;
    double max = 0.0;
    double tv = 0.0;
};

LevelStats level_stats(std::span<const double> level, double dx, Boundary boundary);

/// log(2 e^x - 1) for x >= 0 without overflow.
double log_two_exp_minus_one(double x);

/// log(e^a + e^b), accepting -inf for either term.
double log_add(double a, double b);

/**
 * Logarithm of the TV amplification factor
 * (2e^{M r} - 1)(2e^{M tau} - 1)^{floor(t/tau)}, r = t - floor(t/tau) tau,
 * or 2 M t when tau == 0.
 */
double log_tv_factor(double t, double tau, double M);

/// TV(rho0) times the amplification factor. May be +inf in double precision.
double tv_bound(double t, double tau, double M, double tv0);

/**
 * A-priori constants. The products C and K overflow double precision for
 * most realistic parameters, so their logarithms are kept alongside.
 */
struct BoundConstants {
    bool available = false;  // false when v is not C^2 (H, M, C, K undefined)
    double G = 0.0;
    double H = std::numeric_limits<double>::quiet_NaN();
    double M = std::numeric_limits<double>::quiet_NaN();
    double log_C = std::numeric_limits<double>::quiet_NaN();
    double C = std::numeric_limits<double>::quiet_NaN();
    double log_K = std::numeric_limits<double>::quiet_NaN();
    double K = std::numeric_limits<double>::quiet_NaN();
};

BoundConstants bound_constants(const BoundSet& bounds,
                               SchemeKind scheme,
                               double alpha,
                               double horizon,
                               double tau,
                               double tv0,
                               double l1_0);

struct StabilityConstants {
    double K1 = 0.0;
    double K2 = 0.0;
    double log_K2 = 0.0;
    double K3 = 0.0;
};

/**
 * K1 from the BV supremum of the first solution and the L1 norm of the
 * second datum, K2 = K1 K T and K3 = 1 + K1 min(tau1, tau2).
 */
StabilityConstants stability_constants(const BoundSet& bounds,
                                       const BoundConstants& constants,
                                       double sup_bv,
                                       double sigma0_l1,
                                       double tau1,
                                       double tau2,
                                       double horizon);

/// log of e^{K1 t}(K3 d0 + K2 |tau1 - tau2|).
double log_stability_bound(const StabilityConstants& c, double t, double d0, double dtau);

/// 17 equispaced values in [0, R] followed by the extremes of both levels.
std::vector<double> default_kappas(double max_density,
                                   std::span<const double> before,
                                   std::span<const double> after);

/**
 * Largest left-hand side of the discrete entropy inequality for one LF step,
 * over all cells and the given kappa values (sgn(0) = 0).
 */
double entropy_residual(std::span<const double> before,
                        std::span<const double> after,
                        const SpeedField& speeds,
                        double lambda,
                        double alpha,
                        const Saturation& saturation,
                        Boundary boundary,
                        std::span<const double> kappas);

/// Same quantity built on the HW flux. No inequality is known for it.
double entropy_residual_hw(std::span<const double> before,
                           std::span<const double> after,
                           const SpeedField& speeds,
                           double lambda,
                           const Saturation& saturation,
                           Boundary boundary,
                           std::span<const double> kappas);

struct TimedLevel {
    double t;
    Level level;
};

struct LipschitzCheck {
    bool pass = true;
    std::size_t pairs = 0;
    double worst_distance = 0.0;  // largest measured distance
    double worst_log_margin = -std::numeric_limits<double>::infinity();  // max log(dist / (K dt))
};

/// Checks ||rho(s) - rho(r)||_1 <= K (s - r) + 1e-10 for every snapshot pair.
LipschitzCheck lipschitz_in_time_check(std::span<const TimedLevel> snapshots,
                                       double log_K,
                                       double dx);

/// Which hypotheses of the theory a run satisfies.
struct Conformity {
    bool smooth_velocity = false;
    bool saturated = false;
    bool datum_nonnegative = false;
    bool datum_in_range = false;

    /// Full set of hypotheses behind the bounds.
    bool conforming() const { return smooth_velocity && saturated && datum_in_range; }
    /// Maximum principle is only claimed with a saturation factor.
    bool max_principle_expected() const { return saturated && datum_in_range; }
};

Conformity assess_conformity(const Model& model, std::span<const double> initial);

struct DiagnosticsRecord {
    double t = 0.0;
    double l1 = 0.0;
    double linf = 0.0;
    double min = 0.0;
    double max = 0.0;
    double tv = 0.0;
    double tv_bound = 0.0;
    double entropy_residual_max = 0.0;
};

struct Violation {
    std::string check;
    std::size_t step;
    double t;
    double value;
    double limit;
};

struct MonitorOptions {
    std::size_t stride = 1;         // record every stride steps (and the last)
    bool entropy = true;            // LF entropy residual at every step
    bool entropy_hw = false;        // log the HW analogue
    std::size_t max_violations = 32;
};

/**
 * Observer running the invariant suite at every step and recording
 * DiagnosticsRecord rows at the requested stride.
 *
 * Asserted checks depend on the conformity of the run: positivity for a
 * non-negative datum, maximum principle with saturation, conservation on
 * periodic domains, TV bound and LF entropy for conforming runs, speed
 * bounds whenever the lagged level lies in [0, R].
 */
class DiagnosticsMonitor : public Observer {
public:
    explicit DiagnosticsMonitor(MonitorOptions options = {});

    void on_start(const RunSetup& setup, std::span<const double> initial) override;
    void on_step(const StepView& view) override;
    void on_finish(const RunSetup& setup, std::span<const double> last, double t) override;

    const std::vector<DiagnosticsRecord>& records() const { return records_; }
    const std::vector<Violation>& violations() const { return violations_; }
    const std::map<std::string, std::size_t>& violation_counts() const { return counts_; }
    bool passed() const { return counts_.empty(); }

    const Conformity& conformity() const { return conformity_; }
    const BoundConstants& constants() const { return constants_; }

    double tv0() const { return tv0_; }
    double l1_0() const { return l1_0_; }
    double sup_tv() const { return sup_tv_; }
    double sup_l1() const { return sup_l1_; }
    double sup_bv() const { return sup_bv_; }
    double global_min() const { return global_min_; }
    double global_max() const { return global_max_; }
    double max_entropy_residual() const { return max_entropy_; }
    double max_entropy_residual_hw() const { return max_entropy_hw_; }
    double max_conservation_drift() const { return max_drift_; }
    double max_speed_jump_ratio() const { return max_jump_ratio_; }
    /// sum dt TV^n + sum dx |rho^{n+1} - rho^n|.
    double space_time_tv() const { return space_time_tv_; }
    /// T sup TV + K T, reported in log form since K may overflow.
    double log_space_time_bound() const;

    /// Checks that were evaluated (asserted) during the run.
    const std::vector<std::string>& active_checks() const { return active_; }

private:
    void flag(const std::string& check, std::size_t step, double t, double value, double limit);
    void record(double t, const LevelStats& stats);

    MonitorOptions options_;
    const RunSetup* setup_ = nullptr;
    Conformity conformity_;
    BoundConstants constants_;
    std::vector<DiagnosticsRecord> records_;
    std::vector<Violation> violations_;
    std::map<std::string, std::size_t> counts_;
    std::vector<std::string> active_;

    bool check_positivity_ = false;
    bool check_max_ = false;
    bool check_mass_ = false;
    bool check_tv_ = false;
    bool check_entropy_ = false;

    double tv0_ = 0.0;
    double l1_0_ = 0.0;
    double mass0_ = 0.0;
    double sup_tv_ = 0.0;
    double sup_l1_ = 0.0;
    double sup_bv_ = 0.0;
    double global_min_ = 0.0;
    double global_max_ = 0.0;
    double max_entropy_ = 0.0;
    double max_entropy_hw_ = -std::numeric_limits<double>::infinity();
    double window_entropy_ = 0.0;
    double max_drift_ = 0.0;
    double max_jump_ratio_ = 0.0;
    double space_time_tv_ = 0.0;
    double horizon_ = 0.0;
    std::size_t last_recorded_ = 0;
    std::size_t last_step_ = 0;
};

}  // namespace nldelay

#endif  // NLDELAY_DIAGNOSTICS_HPP
