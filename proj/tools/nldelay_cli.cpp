// Batch driver for scenario runs and the numerical studies.

#include "nldelay/experiments.hpp"
#include "nldelay/scenario.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace {

constexpr int kOk = 0;
constexpr int kError = 1;
constexpr int kViolation = 2;

struct Globals {
    std::optional<std::string> out;
    std::optional<std::size_t> stride;
    std::optional<double> safety;
};

nldelay::Scenario load(const std::string& ref, const Globals& g)
{
    nldelay::Scenario s;
    if (ref.rfind("preset:", 0) == 0) {
        s = nldelay::preset(ref.substr(7));
    } else {
        s = nldelay::load_scenario(ref);
    }
    if (g.out) s.output_dir = *g.out;
    if (g.stride) s.stride = *g.stride;
    if (g.safety) s.safety = *g.safety;
    s.validate();
    return s;
}

std::vector<double> parse_list(const std::string& text)
{
    std::vector<double> out;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        if (item.find_first_not_of(" \t") == std::string::npos) continue;
        out.push_back(nldelay::parse_number(item));
    }
    return out;
}

int verdict(bool passed)
{
    fmt::print("invariants: {}\n", passed ? "pass" : "VIOLATED");
    return passed ? kOk : kViolation;
}

int cmd_run(const nldelay::Scenario& s)
{
    const auto rep = nldelay::run_scenario(s);
    const auto& m = rep.simulation.monitor;
    const auto& g = rep.resolved.setup.grid;
    fmt::print("{}: {} cells, dt = {:.6g}, h = {}, steps = {}, final time = {:.6g}\n", s.name, g.cells,
               g.dt, g.delay_steps, rep.simulation.result.steps, rep.simulation.result.final_time);
    fmt::print("density range [{:.6g}, {:.6g}], sup TV {:.6g}, entropy residual max {:.3g}\n",
               m.global_min(), m.global_max(), m.sup_tv(), m.max_entropy_residual());
    for (const auto& [check, count] : m.violation_counts()) {
        fmt::print("violation {}: {} steps\n", check, count);
    }
    fmt::print("output: {}\n", rep.directory.string());
    return verdict(rep.passed);
}

int cmd_compare(const nldelay::Scenario& s, double ref_dx)
{
    const auto rep = nldelay::compare_schemes(s, ref_dx);
    fmt::print("L1 error vs reference: LF {:.6g}, HW {:.6g} ({} closer)\n", rep.lf_error, rep.hw_error,
               rep.hw_closer() ? "HW" : "LF");
    return verdict(rep.passed);
}

int cmd_tau_sweep(const nldelay::Scenario& s, const std::string& taus)
{
    const auto rep = nldelay::tau_sweep(s, parse_list(taus));
    for (const auto& e : rep.entries) {
        fmt::print("tau {:<8g} h {:<5} distance {:.6g}  TV(T) {:.6g}\n", e.tau, e.delay_steps,
                   e.distance, e.final_tv);
    }
    return verdict(rep.passed);
}

int cmd_refine(const nldelay::Scenario& s, std::size_t levels)
{
    const auto rep = nldelay::grid_refine(s, levels);
    for (const auto& l : rep.levels) {
        fmt::print("dx {:<10g} max {:.6g}  amplitude {:.6g}  diff to next {:.6g}\n", l.dx,
                   l.max_density, l.amplitude, l.difference_to_next);
    }
    return verdict(rep.passed);
}

int cmd_stability(const nldelay::Scenario& s, double tau2, const std::optional<std::string>& perturb)
{
    std::optional<nldelay::InitialDatumSpec> sigma;
    if (perturb) sigma = nldelay::parse_datum(*perturb);
    const auto rep = nldelay::stability_experiment(s, tau2, sigma);
    fmt::print("tau1 {:g}, tau2 {:g}, initial distance {:.6g}\n", rep.tau1, rep.tau2,
               rep.initial_distance);
    if (rep.bound_available) {
        fmt::print("K1 {:.6g}, K3 {:.6g}, log10 K2 {:.6g}\n", rep.constants.K1, rep.constants.K3,
                   rep.constants.log_K2 / std::log(10.0));
    } else {
        fmt::print("bound unavailable (velocity is not C^2), measured distances only\n");
    }
    if (!rep.rows.empty()) {
        const auto& last = rep.rows.back();
        fmt::print("t {:g}: measured {:.6g}, log10 bound {:.6g}\n", last.t, last.measured,
                   last.log_bound / std::log(10.0));
    }
    return verdict(rep.passed);
}

int cmd_saturation(const nldelay::Scenario& s)
{
    const auto rep = nldelay::saturation_study(s);
    for (const auto& v : rep.variants) {
        fmt::print("{:<12} max density {:.6g}{}\n", v.label, v.max_density,
                   v.exceeded ? "  (exceeds R)" : "");
    }
    return verdict(rep.passed);
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Finite-volume solver for the delayed non-local traffic model"};
    app.require_subcommand(1);
    Globals g;
    app.add_option("--out", g.out, "Output directory (overrides the scenario)");
    app.add_option("--stride", g.stride, "Diagnostics stride in steps")->check(CLI::PositiveNumber);
    app.add_option("--safety", g.safety, "CFL safety factor in (0, 1]");

    std::string config;
    const std::string config_help = "Scenario file, or preset:<name>";

    auto* run = app.add_subcommand("run", "Run one scenario");
    run->add_option("config", config, config_help)->required();

    double ref_dx = 0.0;
    auto* compare = app.add_subcommand("compare-schemes", "LF and HW against a fine LF reference");
    compare->add_option("config", config, config_help)->required();
    compare->add_option("--ref-dx", ref_dx, "Reference space step")->required();

    std::string taus;
    auto* sweep = app.add_subcommand("tau-sweep", "Distance to the non-delayed solution per delay");
    sweep->add_option("config", config, config_help)->required();
    sweep->add_option("--taus", taus, "Comma separated delays")->required();

    std::size_t levels = 3;
    auto* refine = app.add_subcommand("grid-refine", "Successive halving of dx");
    refine->add_option("config", config, config_help)->required();
    refine->add_option("--levels", levels, "Number of grids")->check(CLI::Range(2, 12));

    double tau2 = 0.0;
    std::optional<std::string> perturb;
    auto* stability = app.add_subcommand("stability", "L1 stability in datum and delay");
    stability->add_option("config", config, config_help)->required();
    stability->add_option("--tau2", tau2, "Delay of the second run")->required();
    stability->add_option("--perturb", perturb, "Second datum, name:key=value,...");

    auto* saturation = app.add_subcommand("saturation-study", "None, linear and exponential saturation");
    saturation->add_option("config", config, config_help)->required();

    std::string preset_dir;
    auto* presets = app.add_subcommand("presets", "List built-in scenarios");
    presets->add_option("--write", preset_dir, "Write each preset as <dir>/<name>.cfg");

    // parse errors and invalid input share exit code 1
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kError;
    }

    try {
        if (presets->parsed()) {
            for (const auto& name : nldelay::preset_names()) {
                fmt::print("{}\n", name);
                if (!preset_dir.empty()) {
                    std::filesystem::create_directories(preset_dir);
                    std::ofstream(std::filesystem::path(preset_dir) / (name + ".cfg"))
                        << nldelay::write_scenario(nldelay::preset(name));
                }
            }
            return kOk;
        }
        const nldelay::Scenario s = load(config, g);
        if (run->parsed()) return cmd_run(s);
        if (compare->parsed()) return cmd_compare(s, ref_dx);
        if (sweep->parsed()) return cmd_tau_sweep(s, taus);
        if (refine->parsed()) return cmd_refine(s, levels);
        if (stability->parsed()) return cmd_stability(s, tau2, perturb);
        if (saturation->parsed()) return cmd_saturation(s);
    } catch (const nldelay::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return kError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kError;
    }
    return kError;
}
