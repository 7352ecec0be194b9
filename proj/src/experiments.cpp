#include "nldelay/experiments.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <future>
#include <stdexcept>

namespace nldelay {

namespace fs = std::filesystem;

namespace {

std::string num(double v)
{
    return fmt::format("{:.17g}", v);
}

void write_text(const fs::path& path, const std::string& text)
{
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

class SnapshotCollector : public Observer {
public:
    SnapshotCollector(std::vector<double> requested, std::size_t stride, bool keep_stride)
        : requested_(std::move(requested)), stride_(stride == 0 ? 1 : stride), keep_stride_(keep_stride)
    {
    }

    void on_start(const RunSetup& setup, std::span<const double> initial) override
    {
        const std::size_t total = step_count(setup.horizon, setup.grid.dt);
        steps_.clear();
        for (double t : requested_) {
            const auto n = static_cast<std::size_t>(std::llround(t / setup.grid.dt));
            steps_.push_back(std::min(n, total));
        }
        snapshots.assign(requested_.size(), TimedLevel{0.0, {}});
        stride_levels.clear();
        last_ = 0;
        capture(0, 0.0, initial);
        if (keep_stride_) stride_levels.push_back({0.0, Level(initial.begin(), initial.end())});
    }

    void on_step(const StepView& view) override
    {
        capture(view.n, view.t, view.after);
        if (keep_stride_ && view.n % stride_ == 0) {
            stride_levels.push_back({view.t, Level(view.after.begin(), view.after.end())});
        }
        last_ = view.n;
    }

    void on_finish(const RunSetup&, std::span<const double> last, double t) override
    {
        if (keep_stride_ && last_ % stride_ != 0) {
            stride_levels.push_back({t, Level(last.begin(), last.end())});
        }
    }

    std::vector<TimedLevel> snapshots;
    std::vector<TimedLevel> stride_levels;

private:
    void capture(std::size_t n, double t, std::span<const double> level)
    {
        for (std::size_t i = 0; i < steps_.size(); ++i) {
            if (steps_[i] == n) snapshots[i] = {t, Level(level.begin(), level.end())};
        }
    }

    std::vector<double> requested_;
    std::vector<std::size_t> steps_;
    std::size_t stride_;
    bool keep_stride_;
    std::size_t last_ = 0;
};

ResolvedScenario resolve_grid(const Scenario& s)
{
    s.validate();
    ResolvedScenario r;
    r.scenario = s;
    r.setup.model = s.model();
    r.setup.scheme = s.scheme;
    r.setup.boundary = s.boundary;
    r.setup.horizon = s.horizon;
    r.setup.grid = make_spatial_grid(s.x_min, s.x_max, s.dx, s.kernel.length);
    r.setup.weights = discretize_kernel(r.setup.model.kernel, r.setup.grid);
    r.setup.initial = project_initial_datum(make_profile(s.initial), r.setup.grid);
    return r;
}

bool near_integer(double q)
{
    return std::abs(q - std::round(q)) <= 1e-9 * std::max(1.0, q);
}

std::vector<double> snapshot_times_or_final(const Scenario& s)
{
    return s.snapshots.empty() ? std::vector<double>{s.horizon} : s.snapshots;
}

bool within_bound(double measured, double log_bound)
{
    if (measured <= 1e-12) return true;
    return std::log(measured - 1e-12) <= log_bound + 1e-12;
}

}  // namespace

ResolvedScenario resolve(const Scenario& s)
{
    ResolvedScenario r = resolve_grid(s);
    r.stepping = resolve_time_step(s.scheme, derivative_bounds(r.setup.model), s.dx, s.safety, s.tau);
    r.setup.grid.dt = r.stepping.dt;
    r.setup.grid.delay_steps = r.stepping.delay_steps;
    r.setup.grid.alpha = r.stepping.alpha;
    return r;
}

ResolvedScenario resolve_with_step(const Scenario& s, double dt, std::size_t delay_steps)
{
    ResolvedScenario r = resolve(s);
    if (dt > r.stepping.dt_cfl) {
        throw std::invalid_argument(fmt::format("dt {} exceeds the CFL step {}", dt, r.stepping.dt_cfl));
    }
    if (std::abs(static_cast<double>(delay_steps) * dt - s.tau) > 1e-12 * std::max(s.tau, dt)) {
        throw std::invalid_argument("delay is not an integer number of the given steps");
    }
    r.stepping.dt = dt;
    r.stepping.delay_steps = delay_steps;
    r.setup.grid.dt = dt;
    r.setup.grid.delay_steps = delay_steps;
    return r;
}

DelayFit common_time_step(const std::vector<double>& taus, double dt_cfl)
{
    std::vector<double> positive;
    for (double t : taus) {
        if (t < 0.0) throw std::invalid_argument("delays must be >= 0");
        if (t > 0.0) positive.push_back(t);
    }
    if (positive.empty()) return {0, dt_cfl};
    const double smallest = *std::min_element(positive.begin(), positive.end());
    const DelayFit first = fit_delay_steps(smallest, dt_cfl);
    for (std::size_t h = first.delay_steps; h < first.delay_steps + 1000000; ++h) {
        const double dt = std::min(dt_cfl, smallest / static_cast<double>(h));
        const bool ok = std::all_of(positive.begin(), positive.end(),
                                    [&](double t) { return near_integer(t / dt); });
        if (ok) return {h, dt};
    }
    throw std::invalid_argument("no common time step makes every delay an integer number of steps");
}

Simulation simulate(const ResolvedScenario& r, const SimulationOptions& options)
{
    Simulation sim{RunResult{}, DiagnosticsMonitor(options.monitor), options.snapshot_times, {}, {}};
    SnapshotCollector collector(options.snapshot_times, options.monitor.stride, options.keep_stride_levels);
    Observer* observers[] = {&sim.monitor, &collector};
    sim.result = run(r.setup, observers);
    sim.snapshots = std::move(collector.snapshots);
    sim.stride_levels = std::move(collector.stride_levels);
    return sim;
}

Level restrict_level(std::span<const double> fine, std::size_t factor)
{
    if (factor == 0 || fine.size() % factor != 0) {
        throw std::invalid_argument("restriction factor must divide the fine cell count");
    }
    Level coarse(fine.size() / factor);
    for (std::size_t i = 0; i < coarse.size(); ++i) {
        double s = 0.0;
        for (std::size_t k = 0; k < factor; ++k) s += fine[i * factor + k];
        coarse[i] = s / static_cast<double>(factor);
    }
    return coarse;
}

std::string snapshot_filename(double t)
{
    return fmt::format("snapshot_t{}.csv", t);
}

void write_level_csv(const fs::path& path, const Grid& grid, std::span<const double> level)
{
    std::string text = "x,rho\n";
    for (std::size_t j = 0; j < level.size(); ++j) {
        text += fmt::format("{:.17g},{:.17g}\n", grid.center(j), level[j]);
    }
    write_text(path, text);
}

void write_diagnostics_csv(const fs::path& path, const std::vector<DiagnosticsRecord>& records)
{
    std::string text = "t,l1,linf,min,max,tv,tv_bound,entropy_residual_max\n";
    for (const auto& r : records) {
        text += fmt::format("{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", r.t,
                            r.l1, r.linf, r.min, r.max, r.tv, r.tv_bound, r.entropy_residual_max);
    }
    write_text(path, text);
}

void write_manifest(const fs::path& path, const ResolvedScenario& r, const Simulation& sim)
{
    const Scenario& s = r.scenario;
    const Grid& g = r.setup.grid;
    const DiagnosticsMonitor& m = sim.monitor;
    const BoundConstants& c = m.constants();
    const BoundSet b = derivative_bounds(r.setup.model);
    std::string text;
    auto kv = [&](std::string_view k, const std::string& v) { text += fmt::format("{} = {}\n", k, v); };
    auto log10_of = [](double ln) { return num(ln / std::log(10.0)); };

    kv("name", s.name);
    kv("scheme", std::string(to_string(s.scheme)));
    kv("boundary", std::string(to_string(s.boundary)));
    kv("velocity", std::string(to_string(s.velocity.kind)));
    kv("vmax", num(b.max_speed));
    kv("rmax", num(b.max_density));
    kv("saturation", std::string(to_string(s.saturation.kind)));
    if (s.saturation.kind == SaturationKind::Exponential) kv("epsilon", num(s.saturation.epsilon));
    kv("kernel", std::string(to_string(s.kernel.kind)));
    kv("kernel_length", num(s.kernel.length));
    kv("initial", format_datum(s.initial));
    kv("x_min", num(g.x_min));
    kv("x_max", num(g.x_max));
    kv("dx", num(g.dx));
    kv("cells", std::to_string(g.cells));
    kv("kernel_cells", std::to_string(g.kernel_cells));
    kv("safety", num(s.safety));
    kv("dt_cfl", num(r.stepping.dt_cfl));
    kv("dt", num(g.dt));
    kv("dt_adjusted", r.stepping.dt != r.stepping.dt_cfl ? "true" : "false");
    kv("lambda", num(g.lambda()));
    kv("alpha", num(g.alpha));
    kv("tau", num(s.tau));
    kv("delay_steps", std::to_string(g.delay_steps));
    kv("horizon", num(s.horizon));
    kv("steps", std::to_string(sim.result.steps));
    kv("final_time", num(sim.result.final_time));
    kv("norm_v1", num(b.velocity_derivative));
    kv("norm_v2", b.velocity_second_derivative ? num(*b.velocity_second_derivative) : "unavailable");
    kv("norm_f1", num(b.saturation_derivative));
    kv("norm_w", num(b.kernel_sup));
    kv("norm_dw_l1", num(b.kernel_derivative_l1));
    kv("norm_dw_sup", num(b.kernel_derivative_sup));
    kv("constants_available", c.available ? "true" : "false");
    kv("G", num(c.G));
    kv("H", num(c.H));
    kv("M", num(c.M));
    kv("C", num(c.C));
    kv("log10_C", log10_of(c.log_C));
    kv("K", num(c.K));
    kv("log10_K", log10_of(c.log_K));
    if (c.available) {
        const StabilityConstants measured =
            stability_constants(b, c, m.sup_bv(), m.l1_0(), s.tau, s.tau, s.horizon);
        kv("K1_measured_bv", num(measured.K1));
        kv("K3_measured_bv", num(measured.K3));
        kv("log10_K2_measured_bv", log10_of(measured.log_K2));
        // a-priori BV: C TV(rho0) + ||rho0||_1 (mass does not grow)
        const double log_bv = log_add(c.log_C + std::log(std::max(m.tv0(), 1e-300)),
                                      std::log(std::max(m.l1_0(), 1e-300)));
        const double K1_rest = stability_constants(b, c, 0.0, m.l1_0(), 0.0, 0.0, 1.0).K1;
        const double slope = b.kernel_sup * b.velocity_derivative *
                             (1.0 + b.max_density * b.saturation_derivative);
        kv("log10_K1_apriori_bv", log10_of(log_add(std::log(slope) + log_bv, std::log(K1_rest))));
    } else {
        kv("K1_measured_bv", "unavailable");
    }
    const Conformity& cf = m.conformity();
    kv("conforming", cf.conforming() ? "true" : "false");
    kv("smooth_velocity", cf.smooth_velocity ? "true" : "false");
    kv("saturated", cf.saturated ? "true" : "false");
    kv("datum_in_range", cf.datum_in_range ? "true" : "false");
    std::string checks;
    for (const auto& a : m.active_checks()) checks += (checks.empty() ? "" : ",") + a;
    kv("checks", checks);
    kv("tv0", num(m.tv0()));
    kv("l1_0", num(m.l1_0()));
    kv("sup_tv", num(m.sup_tv()));
    kv("sup_bv", num(m.sup_bv()));
    kv("min_density", num(m.global_min()));
    kv("max_density", num(m.global_max()));
    kv("entropy_residual_max", num(m.max_entropy_residual()));
    kv("conservation_drift_max", num(m.max_conservation_drift()));
    kv("speed_jump_ratio_max", num(m.max_speed_jump_ratio()));
    kv("space_time_tv", num(m.space_time_tv()));
    kv("log10_space_time_bound", log10_of(m.log_space_time_bound()));
    std::string counts;
    for (const auto& [k, v] : m.violation_counts()) {
        counts += fmt::format("{}{}:{}", counts.empty() ? "" : ",", k, v);
    }
    kv("violations", counts.empty() ? "none" : counts);
    kv("passed", m.passed() ? "true" : "false");
    for (std::size_t i = 0; i < sim.snapshot_requested.size(); ++i) {
        kv(fmt::format("snapshot_{}", i),
           fmt::format("requested={} actual={:.17g}", sim.snapshot_requested[i], sim.snapshots[i].t));
    }
    write_text(path, text);
}

RunReport run_scenario(const Scenario& s)
{
    RunReport rep;
    rep.resolved = resolve(s);
    SimulationOptions opt;
    opt.monitor.stride = s.stride;
    opt.snapshot_times = snapshot_times_or_final(s);
    rep.simulation = simulate(rep.resolved, opt);
    rep.directory = s.output_dir;
    fs::create_directories(rep.directory);
    for (std::size_t i = 0; i < rep.simulation.snapshots.size(); ++i) {
        write_level_csv(rep.directory / snapshot_filename(opt.snapshot_times[i]),
                        rep.resolved.setup.grid, rep.simulation.snapshots[i].level);
    }
    write_diagnostics_csv(rep.directory / "diagnostics.csv", rep.simulation.monitor.records());
    write_manifest(rep.directory / "manifest.txt", rep.resolved, rep.simulation);
    rep.passed = rep.simulation.monitor.passed();
    return rep;
}

CompareReport compare_schemes(const Scenario& s, double ref_dx)
{
    const double ratio = s.dx / ref_dx;
    if (!(ref_dx > 0.0) || !near_integer(ratio) || std::round(ratio) < 1.0) {
        throw std::invalid_argument(fmt::format("reference dx {} must divide dx {}", ref_dx, s.dx));
    }
    CompareReport rep;
    rep.refinement = static_cast<std::size_t>(std::round(ratio));

    Scenario lf = s;
    lf.scheme = SchemeKind::LaxFriedrichs;
    Scenario hw = s;
    hw.scheme = SchemeKind::HilligesWeidlich;
    Scenario ref = lf;
    ref.dx = ref_dx;

    auto go = [](Scenario sc, bool entropy) {
        const ResolvedScenario r = resolve(sc);
        SimulationOptions opt;
        opt.monitor.stride = sc.stride;
        opt.monitor.entropy = entropy;
        Simulation sim = simulate(r, opt);
        return std::make_pair(r, std::move(sim));
    };
    auto f_ref = std::async(std::launch::async, go, ref, false);
    auto f_lf = std::async(std::launch::async, go, lf, true);
    auto f_hw = std::async(std::launch::async, go, hw, true);
    auto [r_ref, sim_ref] = f_ref.get();
    auto [r_lf, sim_lf] = f_lf.get();
    auto [r_hw, sim_hw] = f_hw.get();

    const Level ref_coarse = restrict_level(sim_ref.result.final_level, rep.refinement);
    rep.lf_error = l1_distance(sim_lf.result.final_level, ref_coarse, s.dx);
    rep.hw_error = l1_distance(sim_hw.result.final_level, ref_coarse, s.dx);
    rep.passed = sim_ref.monitor.passed() && sim_lf.monitor.passed() && sim_hw.monitor.passed();

    const fs::path dir = s.output_dir;
    const Grid& g = r_lf.setup.grid;
    std::string text = "x,reference,lf,hw\n";
    for (std::size_t j = 0; j < g.cells; ++j) {
        text += fmt::format("{:.17g},{:.17g},{:.17g},{:.17g}\n", g.center(j), ref_coarse[j],
                            sim_lf.result.final_level[j], sim_hw.result.final_level[j]);
    }
    write_text(dir / "compare.csv", text);
    write_level_csv(dir / "reference_fine.csv", r_ref.setup.grid, sim_ref.result.final_level);
    write_text(dir / "compare.txt",
               fmt::format("dx = {:.17g}\nref_dx = {:.17g}\nrefinement = {}\nlf_error_l1 = {:.17g}\n"
                           "hw_error_l1 = {:.17g}\nhw_closer = {}\nfinal_time_lf = {:.17g}\n"
                           "final_time_hw = {:.17g}\nfinal_time_ref = {:.17g}\npassed = {}\n",
                           s.dx, ref_dx, rep.refinement, rep.lf_error, rep.hw_error,
                           rep.hw_closer(), sim_lf.result.final_time, sim_hw.result.final_time,
                           sim_ref.result.final_time, rep.passed));
    return rep;
}

TauSweepReport tau_sweep(const Scenario& s, std::vector<double> taus)
{
    for (double t : taus) {
        if (!(t >= 0.0)) throw std::invalid_argument("delays must be >= 0");
    }
    if (std::find(taus.begin(), taus.end(), 0.0) == taus.end()) taus.push_back(0.0);

    struct Out {
        ResolvedScenario r;
        Simulation sim;
    };
    std::vector<std::future<Out>> jobs;
    for (double tau : taus) {
        Scenario sc = s;
        sc.tau = tau;
        jobs.push_back(std::async(std::launch::async, [sc] {
            ResolvedScenario r = resolve(sc);
            SimulationOptions opt;
            opt.monitor.stride = sc.stride;
            Simulation sim = simulate(r, opt);
            return Out{std::move(r), std::move(sim)};
        }));
    }
    std::vector<Out> outs;
    for (auto& j : jobs) outs.push_back(j.get());

    const auto zero = static_cast<std::size_t>(
        std::find(taus.begin(), taus.end(), 0.0) - taus.begin());
    const Level& reference = outs[zero].sim.result.final_level;

    TauSweepReport rep;
    rep.passed = true;
    const fs::path dir = s.output_dir;
    std::string table = "tau,dt,delay_steps,final_time,distance_l1,tv_final\n";
    for (std::size_t i = 0; i < taus.size(); ++i) {
        const Out& o = outs[i];
        TauEntry e;
        e.tau = taus[i];
        e.dt = o.r.setup.grid.dt;
        e.delay_steps = o.r.setup.grid.delay_steps;
        e.distance = l1_distance(o.sim.result.final_level, reference, s.dx);
        e.final_tv = total_variation(o.sim.result.final_level, s.boundary);
        std::string series = "t,tv\n";
        for (const auto& rec : o.sim.monitor.records()) {
            e.tv_series.emplace_back(rec.t, rec.tv);
            series += fmt::format("{:.17g},{:.17g}\n", rec.t, rec.tv);
        }
        rep.passed = rep.passed && o.sim.monitor.passed();
        table += fmt::format("{:.17g},{:.17g},{},{:.17g},{:.17g},{:.17g}\n", e.tau, e.dt,
                             e.delay_steps, o.sim.result.final_time, e.distance, e.final_tv);
        write_text(dir / fmt::format("tv_tau{}.csv", e.tau), series);
        write_level_csv(dir / fmt::format("final_tau{}.csv", e.tau), o.r.setup.grid,
                        o.sim.result.final_level);
        rep.entries.push_back(std::move(e));
    }
    write_text(dir / "tau_sweep.csv", table);
    return rep;
}

RefineReport grid_refine(const Scenario& s,
                         std::size_t levels,
                         std::optional<std::pair<double, double>> window)
{
    if (levels < 2) throw std::invalid_argument("grid refinement needs at least 2 levels");
    const auto [wa, wb] = window.value_or(std::make_pair(s.x_min, s.x_max));

    struct Out {
        ResolvedScenario r;
        Simulation sim;
    };
    std::vector<std::future<Out>> jobs;
    for (std::size_t k = 0; k < levels; ++k) {
        Scenario sc = s;
        sc.dx = s.dx / std::pow(2.0, static_cast<double>(k));
        sc.stride = s.stride << k;
        jobs.push_back(std::async(std::launch::async, [sc] {
            ResolvedScenario r = resolve(sc);
            SimulationOptions opt;
            opt.monitor.stride = sc.stride;
            Simulation sim = simulate(r, opt);
            return Out{std::move(r), std::move(sim)};
        }));
    }
    std::vector<Out> outs;
    for (auto& j : jobs) outs.push_back(j.get());

    RefineReport rep;
    rep.passed = true;
    const double R = outs.front().r.setup.model.max_density();
    const fs::path dir = s.output_dir;
    std::string table = "dx,cells,final_time,max_density,amplitude,difference_to_next_l1\n";
    for (std::size_t k = 0; k < levels; ++k) {
        const Out& o = outs[k];
        const Grid& g = o.r.setup.grid;
        RefineLevel lv;
        lv.dx = g.dx;
        lv.max_density = o.sim.monitor.global_max();
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (std::size_t j = 0; j < g.cells; ++j) {
            const double x = g.center(j);
            if (x < wa || x > wb) continue;
            lo = std::min(lo, o.sim.result.final_level[j]);
            hi = std::max(hi, o.sim.result.final_level[j]);
        }
        lv.amplitude = hi - lo;
        if (k + 1 < levels) {
            const Level coarse = restrict_level(outs[k + 1].sim.result.final_level, 2);
            lv.difference_to_next = l1_distance(o.sim.result.final_level, coarse, g.dx);
        } else {
            lv.difference_to_next = std::numeric_limits<double>::quiet_NaN();
        }
        rep.passed = rep.passed && o.sim.monitor.passed() && lv.max_density <= R + 1e-12;
        table += fmt::format("{:.17g},{},{:.17g},{:.17g},{:.17g},{:.17g}\n", lv.dx, g.cells,
                             o.sim.result.final_time, lv.max_density, lv.amplitude,
                             lv.difference_to_next);
        write_level_csv(dir / fmt::format("final_dx{}.csv", lv.dx), g, o.sim.result.final_level);
        rep.levels.push_back(lv);
    }
    write_text(dir / "refine.csv", table);
    return rep;
}

StabilityReport stability_experiment(const Scenario& s,
                                     double tau2,
                                     const std::optional<InitialDatumSpec>& perturbed)
{
    if (!(tau2 >= 0.0)) throw std::invalid_argument("tau2 must be >= 0");
    Scenario first = s;
    Scenario second = s;
    second.tau = tau2;
    if (perturbed) second.initial = *perturbed;
    second.validate();

    const ResolvedScenario probe = resolve(first);
    const DelayFit common = common_time_step({first.tau, second.tau}, probe.stepping.dt_cfl);
    auto steps_for = [&](double tau) {
        return static_cast<std::size_t>(std::llround(tau / common.dt));
    };

    auto go = [&](const Scenario& sc) {
        ResolvedScenario r = resolve_with_step(sc, common.dt, steps_for(sc.tau));
        SimulationOptions opt;
        opt.monitor.stride = sc.stride;
        opt.keep_stride_levels = true;
        Simulation sim = simulate(r, opt);
        return std::make_pair(std::move(r), std::move(sim));
    };
    auto f1 = std::async(std::launch::async, go, first);
    auto f2 = std::async(std::launch::async, go, second);
    auto [r1, sim1] = f1.get();
    auto [r2, sim2] = f2.get();

    StabilityReport rep;
    rep.tau1 = first.tau;
    rep.tau2 = second.tau;
    rep.initial_distance = l1_distance(r1.setup.initial, r2.setup.initial, s.dx);
    rep.passed = sim1.monitor.passed() && sim2.monitor.passed();

    // The solution with the larger delay plays the role whose Lipschitz constant enters K2.
    const bool swap = second.tau > first.tau;
    const Simulation& rho = swap ? sim2 : sim1;
    const ResolvedScenario& sigma_r = swap ? r1 : r2;
    const BoundSet b = derivative_bounds(r1.setup.model);
    rep.bound_available = rho.monitor.constants().available;
    if (rep.bound_available) {
        rep.constants = stability_constants(b, rho.monitor.constants(), rho.monitor.sup_bv(),
                                            l1_norm(sigma_r.setup.initial, s.dx), first.tau,
                                            second.tau, s.horizon);
        rep.log_K = rho.monitor.constants().log_K;
    }

    const std::size_t rows = std::min(sim1.stride_levels.size(), sim2.stride_levels.size());
    std::string text = "t,measured_l1,bound,log10_bound\n";
    for (std::size_t i = 0; i < rows; ++i) {
        StabilityRow row;
        row.t = sim1.stride_levels[i].t;
        row.measured = l1_distance(sim1.stride_levels[i].level, sim2.stride_levels[i].level, s.dx);
        if (rep.bound_available) {
            row.log_bound = log_stability_bound(rep.constants, row.t, rep.initial_distance,
                                                first.tau - second.tau);
            row.ok = within_bound(row.measured, row.log_bound);
            rep.passed = rep.passed && row.ok;
        } else {
            row.log_bound = std::numeric_limits<double>::quiet_NaN();
        }
        text += fmt::format("{:.17g},{:.17g},{:.17g},{:.17g}\n", row.t, row.measured,
                            std::exp(row.log_bound), row.log_bound / std::log(10.0));
        rep.rows.push_back(row);
    }
    const fs::path dir = s.output_dir;
    write_text(dir / "stability.csv", text);
    write_text(dir / "stability.txt",
               fmt::format("tau1 = {:.17g}\ntau2 = {:.17g}\ndt = {:.17g}\ninitial_distance_l1 = {:.17g}\n"
                           "bound_available = {}\nK1 = {:.17g}\nK3 = {:.17g}\nlog10_K2 = {:.17g}\n"
                           "log10_K = {:.17g}\npassed = {}\n",
                           rep.tau1, rep.tau2, common.dt, rep.initial_distance, rep.bound_available,
                           rep.constants.K1, rep.constants.K3,
                           rep.constants.log_K2 / std::log(10.0), rep.log_K / std::log(10.0),
                           rep.passed));
    return rep;
}

SaturationReport saturation_study(const Scenario& s)
{
    struct Variant {
        const char* label;
        SaturationKind sat;
        VelocityKind vel;
    };
    const Variant variants[] = {
        {"none", SaturationKind::None, VelocityKind::Cropped},
        {"linear", SaturationKind::Linear, VelocityKind::NormalizedGreenshields},
        {"exponential", SaturationKind::Exponential, VelocityKind::NormalizedGreenshields},
    };
    std::vector<std::future<std::pair<ResolvedScenario, Simulation>>> jobs;
    for (const auto& v : variants) {
        Scenario sc = s;
        sc.velocity = {v.vel, 1.0, 1.0};
        sc.saturation.kind = v.sat;
        jobs.push_back(std::async(std::launch::async, [sc] {
            ResolvedScenario r = resolve(sc);
            SimulationOptions opt;
            opt.monitor.stride = sc.stride;
            Simulation sim = simulate(r, opt);
            return std::make_pair(std::move(r), std::move(sim));
        }));
    }

    SaturationReport rep;
    rep.passed = true;
    rep.R = 1.0;
    const fs::path dir = s.output_dir;
    std::string table = "variant,velocity,max_density,exceeds_R\n";
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        auto [r, sim] = jobs[i].get();
        SaturationVariant out;
        out.label = variants[i].label;
        out.saturation = variants[i].sat;
        out.velocity = variants[i].vel;
        out.max_density = sim.monitor.global_max();
        out.exceeded = out.max_density > rep.R + 1e-12;
        if (out.saturation != SaturationKind::None) rep.passed = rep.passed && !out.exceeded;
        rep.passed = rep.passed && sim.monitor.passed();
        table += fmt::format("{},{},{:.17g},{}\n", out.label, to_string(out.velocity),
                             out.max_density, out.exceeded);
        write_level_csv(dir / fmt::format("final_{}.csv", out.label), r.setup.grid,
                        sim.result.final_level);
        rep.variants.push_back(out);
    }
    write_text(dir / "saturation.csv", table);
    return rep;
}

}  // namespace nldelay
