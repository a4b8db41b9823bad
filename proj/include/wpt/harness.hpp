#pragma once

#include <cstddef>
#include <exception>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "wpt/controller.hpp"
#include "wpt/model.hpp"
#include "wpt/switched.hpp"
#include "wpt/time_series.hpp"

namespace wpt {

enum class Engine { envelope, switched };
std::string_view to_string(Engine engine);
Engine parse_engine(std::string_view name);

/// Where a run starts: at the rectification-mode equilibrium, or with all currents
/// and charges at zero.
enum class InitialCondition { rectifying, zero };
std::string_view to_string(InitialCondition ic);
InitialCondition parse_initial_condition(std::string_view name);

std::string_view to_string(GateAlignment alignment);
GateAlignment parse_gate_alignment(std::string_view name);

/// One experiment. A zero dt or output_dt selects the engine default
/// (envelope: 1 us / 1 us; switched: 1/(1000 f_res) / 0.1 us).
struct ScenarioConfig {
    std::string name = "scenario";
    Circuit circuit = Circuit::reference();
    ControllerConfig controller;
    Engine engine = Engine::envelope;
    double dt = 0.0;
    double t_end = 20e-3;
    double phase_offset = 0.0;  ///< gate shift [rad], switched engine only
    GateAlignment gate_alignment = GateAlignment::centered;  ///< switched engine only
    InitialCondition initial = InitialCondition::rectifying;
    double output_dt = 0.0;
    std::filesystem::path output_path;
};

double effective_dt(const ScenarioConfig& cfg);
double effective_output_dt(const ScenarioConfig& cfg);
void validate(const ScenarioConfig& cfg);

/// Secondary-current transient figures over [t_switch, t_end].
struct Metrics {
    double i2_max = 0.0;
    double i2_final = 0.0;       ///< envelope at t_end
    double overshoot_pct = 0.0;  ///< 100 (i2_max - i2_final) / i2_final
    double settle_time = 0.0;    ///< after t_switch, until I2 stays within 2 % of i2_final
    std::size_t clamp_events = 0;
};

double overshoot_pct(double i2_max, double i2_final);

Metrics compute_metrics(const TimeSeries& ts, std::string_view channel, double t_switch, std::size_t clamp_events = 0);

struct ScenarioResult {
    /// Envelope engine: I1_env, I2_env, V2_cmd, d_short.
    /// Switched engine: i1, i2, v2, i_load, I2_env, d_short (decimated to output_dt).
    TimeSeries series;
    Metrics metrics;
    bool bandwidth_warning = false;
};

/// Command chain + selected engine + metrics. Errors are re-raised with the scenario name attached.
ScenarioResult run_scenario(const ScenarioConfig& cfg);

/// Baseline scenario of the overshoot comparison: reference circuit, 4 ms switch,
/// 20 ms horizon, lpf_tau = ramp_duration = 2 ms.
ScenarioConfig reference_scenario(ReferenceKind kind, Engine engine = Engine::envelope);

struct Table2Row {
    ReferenceKind kind{};
    std::string label;
    Metrics metrics;
    double published_max = 0.0;
    double published_overshoot = 0.0;
    double max_lo = 0.0, max_hi = 0.0;  ///< accepted i2_max band [A]
    bool check_overshoot = false;
    double overshoot_lo = 0.0, overshoot_hi = 0.0;  ///< accepted overshoot band [%]
    bool max_ok = false;
    bool overshoot_ok = true;
    TimeSeries series;

    bool pass() const { return max_ok && overshoot_ok; }
};

struct Table2Report {
    std::vector<Table2Row> rows;
    bool pass() const;
};

/// Runs step, ramp and proposed scenarios (envelope engine) on `base` and scores them
/// against the published maxima and overshoots. Only kind-specific fields of `base`
/// are overridden.
Table2Report reproduce_table2(const ScenarioConfig& base = reference_scenario(ReferenceKind::proposed));
std::string render(const Table2Report& report);

/// Sets a named scalar field (circuit, controller or engine) on a scenario.
void set_parameter(ScenarioConfig& cfg, std::string_view name, double value);
double get_parameter(const ScenarioConfig& cfg, std::string_view name);

struct SweepPoint {
    double value = 0.0;
    ScenarioResult result;
};

/// Runs one scenario per value of the named parameter, up to `workers` at a time.
std::vector<SweepPoint> sweep(const ScenarioConfig& base, std::string_view parameter, const std::vector<double>& values,
                              unsigned workers = 0);

/// Scenario file (TOML): top-level name/output, sections [circuit], [controller], [engine].
ScenarioConfig parse_scenario(std::string_view text, std::string_view source = "<string>");
ScenarioConfig load_scenario(const std::filesystem::path& path);
std::string to_toml(const ScenarioConfig& cfg);

/// Process exit code for an error: 1 validation/I-O, 3 numerical divergence.
int exit_code_for(const std::exception& e);

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitTolerance = 2;
inline constexpr int kExitDivergence = 3;

}  // namespace wpt
