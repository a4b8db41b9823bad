#include <fstream>
#include <iomanip>
#include <limits>
#include <set>
#include <sstream>

#include <toml.hpp>

#include "wpt/errors.hpp"
#include "wpt/harness.hpp"

namespace wpt {

namespace {

void reject_unknown(const toml::table& table, const std::set<std::string_view>& known, const std::string& where) {
    for (const auto& [key, node] : table) {
        if (!known.contains(key.str())) throw ValidationError(where + std::string(key.str()), "unknown key");
    }
}

double read_number(const toml::table& table, std::string_view key, const std::string& where, double fallback) {
    const toml::node* node = table.get(key);
    if (node == nullptr) return fallback;
    if (auto v = node->value<double>()) return *v;
    throw ValidationError(where + std::string(key), "expected a number");
}

std::string read_string(const toml::table& table, std::string_view key, const std::string& where,
                        std::string fallback) {
    const toml::node* node = table.get(key);
    if (node == nullptr) return fallback;
    if (auto v = node->value<std::string>()) return *v;
    throw ValidationError(where + std::string(key), "expected a string");
}

const toml::table* section(const toml::table& root, std::string_view name) {
    const toml::node* node = root.get(name);
    if (node == nullptr) return nullptr;
    if (!node->is_table()) throw ValidationError(std::string(name), "expected a table");
    return node->as_table();
}

}  // namespace

ScenarioConfig parse_scenario(std::string_view text, std::string_view source) {
    toml::table root;
    try {
        root = toml::parse(text, source);
    } catch (const toml::parse_error& e) {
        std::ostringstream msg;
        msg << e.description() << " at line " << e.source().begin.line;
        throw ValidationError(std::string(source), msg.str());
    }
    reject_unknown(root, {"name", "output", "circuit", "controller", "engine"}, "");

    ScenarioConfig cfg;
    cfg.name = read_string(root, "name", "", cfg.name);
    cfg.output_path = read_string(root, "output", "", "");

    if (const auto* c = section(root, "circuit")) {
        const std::string w = "circuit.";
        reject_unknown(*c, {"L1", "L2", "Lm", "R1", "R2", "Vdc", "Vl", "f_res"}, w);
        auto& p = cfg.circuit;
        p.L1 = read_number(*c, "L1", w, p.L1);
        p.L2 = read_number(*c, "L2", w, p.L2);
        p.Lm = read_number(*c, "Lm", w, p.Lm);
        p.R1 = read_number(*c, "R1", w, p.R1);
        p.R2 = read_number(*c, "R2", w, p.R2);
        p.Vdc = read_number(*c, "Vdc", w, p.Vdc);
        p.Vl = read_number(*c, "Vl", w, p.Vl);
        p.f_res = read_number(*c, "f_res", w, p.f_res);
    }
    if (const auto* c = section(root, "controller")) {
        const std::string w = "controller.";
        reject_unknown(*c, {"reference", "lpf_tau", "ramp_duration", "t_switch", "dt_ctrl"}, w);
        auto& k = cfg.controller;
        k.ref_kind = parse_reference_kind(read_string(*c, "reference", w, std::string(to_string(k.ref_kind))));
        k.lpf_tau = read_number(*c, "lpf_tau", w, k.lpf_tau);
        // The ramp spans one filter time constant unless stated otherwise.
        k.ramp_duration = read_number(*c, "ramp_duration", w, k.lpf_tau);
        k.t_switch = read_number(*c, "t_switch", w, k.t_switch);
        k.dt_ctrl = read_number(*c, "dt_ctrl", w, k.dt_ctrl);
    }
    if (const auto* c = section(root, "engine")) {
        const std::string w = "engine.";
        reject_unknown(*c, {"kind", "dt", "t_end", "phase_offset", "gate", "initial", "output_dt"}, w);
        cfg.engine = parse_engine(read_string(*c, "kind", w, std::string(to_string(cfg.engine))));
        cfg.dt = read_number(*c, "dt", w, cfg.dt);
        cfg.t_end = read_number(*c, "t_end", w, cfg.t_end);
        cfg.phase_offset = read_number(*c, "phase_offset", w, cfg.phase_offset);
        cfg.gate_alignment = parse_gate_alignment(read_string(*c, "gate", w, std::string(to_string(cfg.gate_alignment))));
        cfg.initial = parse_initial_condition(read_string(*c, "initial", w, std::string(to_string(cfg.initial))));
        cfg.output_dt = read_number(*c, "output_dt", w, cfg.output_dt);
    }
    cfg.controller.t_end = cfg.t_end;
    validate(cfg);
    return cfg;
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    std::ostringstream text;
    text << in.rdbuf();
    return parse_scenario(text.str(), path.string());
}

std::string to_toml(const ScenarioConfig& cfg) {
    std::ostringstream out;
    out << std::setprecision(std::numeric_limits<double>::max_digits10);
    out << "name = " << std::quoted(cfg.name) << "\n";
    if (!cfg.output_path.empty()) out << "output = " << std::quoted(cfg.output_path.string()) << "\n";
    const auto& p = cfg.circuit;
    out << "\n[circuit]\n"
        << "L1 = " << p.L1 << "\nL2 = " << p.L2 << "\nLm = " << p.Lm << "\nR1 = " << p.R1 << "\nR2 = " << p.R2
        << "\nVdc = " << p.Vdc << "\nVl = " << p.Vl << "\nf_res = " << p.f_res << "\n";
    const auto& k = cfg.controller;
    out << "\n[controller]\n"
        << "reference = " << std::quoted(std::string(to_string(k.ref_kind))) << "\nlpf_tau = " << k.lpf_tau
        << "\nramp_duration = " << k.ramp_duration << "\nt_switch = " << k.t_switch << "\ndt_ctrl = " << k.dt_ctrl
        << "\n";
    out << "\n[engine]\n"
        << "kind = " << std::quoted(std::string(to_string(cfg.engine))) << "\ndt = " << cfg.dt
        << "\nt_end = " << cfg.t_end << "\nphase_offset = " << cfg.phase_offset
        << "\ngate = " << std::quoted(std::string(to_string(cfg.gate_alignment))) << "\ninitial = "
        << std::quoted(std::string(to_string(cfg.initial))) << "\noutput_dt = " << cfg.output_dt << "\n";
    return out.str();
}

}  // namespace wpt
