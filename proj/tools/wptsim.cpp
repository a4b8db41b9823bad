// Command-line front end: derive, run, table2, sweep.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wpt/errors.hpp"
#include "wpt/harness.hpp"
#include "wpt/model.hpp"

namespace fs = std::filesystem;

namespace {

struct Overrides {
    std::optional<std::string> engine;
    std::optional<double> dt;
    std::optional<double> t_end;
    std::optional<double> phase_offset;

    void add_to(CLI::App& app, bool with_engine = true) {
        if (with_engine)
            app.add_option("--engine", engine, "simulation engine")->check(CLI::IsMember({"envelope", "switched"}));
        app.add_option("--dt", dt, "integration step [s]");
        app.add_option("--t-end", t_end, "simulation horizon [s]");
        if (with_engine) app.add_option("--phase-offset", phase_offset, "gate phase shift [rad] (switched engine)");
    }

    void apply(wpt::ScenarioConfig& cfg) const {
        if (engine) {
            cfg.engine = wpt::parse_engine(*engine);
            if (!dt) cfg.dt = 0.0;  // engine default
        }
        if (dt) cfg.dt = *dt;
        if (t_end) cfg.t_end = *t_end;
        if (phase_offset) cfg.phase_offset = *phase_offset;
        cfg.controller.t_end = cfg.t_end;
        wpt::validate(cfg);
    }
};

wpt::ScenarioConfig load_or_default(const std::string& path) {
    return path.empty() ? wpt::reference_scenario(wpt::ReferenceKind::proposed) : wpt::load_scenario(path);
}

void print_metrics(std::ostream& out, const wpt::Metrics& m) {
    out << std::setprecision(6) << "i2_max        " << m.i2_max << " A\n"
        << "i2_final      " << m.i2_final << " A\n"
        << "overshoot     " << m.overshoot_pct << " %\n"
        << "settle_time   " << m.settle_time << " s\n"
        << "clamp_events  " << m.clamp_events << "\n";
}

int cmd_derive(const std::string& config) {
    const auto cfg = load_or_default(config);
    const auto d = wpt::derive_params(cfg.circuit);
    const auto g = wpt::g22(d);
    const auto [i1_rect, i2_rect] = wpt::steady_state(d, d.V1_amp, wpt::f_duty(0.0, cfg.circuit.Vl));
    const auto [i1_short, i2_short] = wpt::steady_state(d, d.V1_amp, 0.0);
    std::cout << std::setprecision(10) << "omega      " << d.omega << " rad/s\n"
              << "C1         " << d.C1 << " F\n"
              << "C2         " << d.C2 << " F\n"
              << "zeta       " << d.zeta << "\n"
              << "omega_n    " << d.omega_n << " rad/s\n"
              << "alpha1     " << d.alpha1 << "\n"
              << "beta1      " << d.beta1 << "\n"
              << "alpha2     " << d.alpha2 << "\n"
              << "beta2      " << d.beta2 << "\n"
              << "gamma      " << d.gamma << "\n"
              << "V1_amp     " << d.V1_amp << " V\n"
              << "G22(0)     " << g.dc_gain() << " S\n"
              << "I_rect     I1 = " << i1_rect << " A, I2 = " << i2_rect << " A\n"
              << "I_short    I1 = " << i1_short << " A, I2 = " << i2_short << " A\n";
    return wpt::kExitOk;
}

int cmd_run(const std::string& config, const Overrides& ov, const std::string& out) {
    auto cfg = wpt::load_scenario(config);
    ov.apply(cfg);
    const auto result = wpt::run_scenario(cfg);
    fs::path path = !out.empty() ? fs::path(out) : !cfg.output_path.empty() ? cfg.output_path : fs::path(cfg.name + ".csv");
    wpt::emit_csv(result.series, path);
    if (result.bandwidth_warning)
        std::cerr << "warning: commanded V2 changes faster than a tenth of the carrier frequency; "
                     "the envelope model is only approximate\n";
    std::cout << "scenario      " << cfg.name << " (" << wpt::to_string(cfg.controller.ref_kind) << ", "
              << wpt::to_string(cfg.engine) << ")\n";
    print_metrics(std::cout, result.metrics);
    std::cout << "csv           " << path.string() << "\n";
    return wpt::kExitOk;
}

int cmd_table2(const std::string& config, const Overrides& ov, const std::string& out, bool no_assert) {
    auto cfg = load_or_default(config);
    ov.apply(cfg);
    const auto report = wpt::reproduce_table2(cfg);
    const fs::path dir = out.empty() ? fs::path("table2_out") : fs::path(out);
    fs::create_directories(dir);
    for (const auto& row : report.rows)
        wpt::emit_csv(row.series, dir / ("table2_" + std::string(wpt::to_string(row.kind)) + ".csv"));
    std::cout << wpt::render(report);
    if (!report.pass() && !no_assert) return wpt::kExitTolerance;
    return wpt::kExitOk;
}

std::vector<double> sweep_values(const std::vector<double>& list, std::optional<double> from, std::optional<double> to,
                                 int steps) {
    if (!list.empty()) return list;
    if (!from || !to || steps < 1) throw wpt::ValidationError("sweep", "give --values or --from/--to/--steps");
    std::vector<double> v;
    for (int i = 0; i < steps; ++i)
        v.push_back(steps == 1 ? *from : *from + (*to - *from) * static_cast<double>(i) / (steps - 1));
    return v;
}

int cmd_sweep(const std::string& config, const Overrides& ov, const std::string& param,
              const std::vector<double>& values, const std::string& out, unsigned workers) {
    auto cfg = wpt::load_scenario(config);
    ov.apply(cfg);
    const auto points = wpt::sweep(cfg, param, values, workers);

    std::ostringstream summary;
    summary << std::setprecision(17) << param << ",i2_max,i2_final,overshoot_pct,settle_time,clamp_events\n";
    std::cout << std::left << std::setw(16) << param << std::right << std::setw(12) << "i2_max" << std::setw(12)
              << "i2_final" << std::setw(14) << "overshoot %" << std::setw(14) << "settle [s]" << "\n";
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto& m = points[i].result.metrics;
        std::cout << std::left << std::setw(16) << std::setprecision(6) << points[i].value << std::right
                  << std::setw(12) << m.i2_max << std::setw(12) << m.i2_final << std::setw(14) << m.overshoot_pct
                  << std::setw(14) << m.settle_time << "\n";
        summary << points[i].value << "," << m.i2_max << "," << m.i2_final << "," << m.overshoot_pct << ","
                << m.settle_time << "," << m.clamp_events << "\n";
        if (!out.empty()) {
            fs::create_directories(out);
            wpt::emit_csv(points[i].result.series, fs::path(out) / (cfg.name + "_" + param + "_" + std::to_string(i) + ".csv"));
        }
    }
    if (!out.empty()) {
        std::ofstream f(fs::path(out) / "sweep.csv", std::ios::binary);
        if (!f) throw wpt::IoError("cannot write sweep summary in '" + out + "'");
        f << summary.str();
    }
    return wpt::kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Wireless power transfer link: envelope and switched simulation, overshoot-suppression feedforward"};
    app.require_subcommand(1);

    std::string config, out, param;
    bool no_assert = false;
    Overrides ov;

    auto* derive = app.add_subcommand("derive", "print derived plant constants for a scenario");
    derive->add_option("config", config, "scenario file (defaults to the reference circuit)");

    auto* run = app.add_subcommand("run", "simulate one scenario, write CSV and print metrics");
    run->add_option("config", config, "scenario file")->required();
    ov.add_to(*run);
    run->add_option("--out", out, "CSV output path");

    auto* table2 = app.add_subcommand("table2", "step / ramp / proposed overshoot comparison");
    table2->add_option("config", config, "scenario file supplying circuit and controller settings");
    Overrides table_ov;
    table_ov.add_to(*table2, false);
    table2->add_option("--out", out, "directory for the per-trajectory CSVs");
    table2->add_flag("--no-assert", no_assert, "report tolerance misses without failing");

    auto* sweep = app.add_subcommand("sweep", "grid over one named parameter");
    sweep->add_option("config", config, "scenario file")->required();
    Overrides sweep_ov;
    sweep_ov.add_to(*sweep);
    std::vector<double> values;
    std::optional<double> from, to;
    int steps = 0;
    unsigned workers = 0;
    sweep->add_option("--param", param, "parameter name (L1, Lm, lpf_tau, ...)")->required();
    sweep->add_option("--values", values, "explicit values")->delimiter(',');
    sweep->add_option("--from", from, "first grid value");
    sweep->add_option("--to", to, "last grid value");
    sweep->add_option("--steps", steps, "grid points");
    sweep->add_option("--workers", workers, "concurrent scenarios (0 = hardware threads)");
    sweep->add_option("--out", out, "directory for per-point CSVs and sweep.csv");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return wpt::kExitValidation;
    }

    try {
        if (*derive) return cmd_derive(config);
        if (*run) return cmd_run(config, ov, out);
        if (*table2) return cmd_table2(config, table_ov, out, no_assert);
        if (*sweep) return cmd_sweep(config, sweep_ov, param, sweep_values(values, from, to, steps), out, workers);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return wpt::exit_code_for(e);
    }
    return wpt::kExitOk;
}
