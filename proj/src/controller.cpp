#include "wpt/controller.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "wpt/errors.hpp"

namespace wpt {

using std::numbers::pi;

std::string_view to_string(ReferenceKind kind) {
    switch (kind) {
        case ReferenceKind::step: return "step";
        case ReferenceKind::ramp: return "ramp";
        case ReferenceKind::proposed: return "proposed";
    }
    return "unknown";
}

ReferenceKind parse_reference_kind(std::string_view name) {
    if (name == "step") return ReferenceKind::step;
    if (name == "ramp") return ReferenceKind::ramp;
    if (name == "proposed") return ReferenceKind::proposed;
    throw ValidationError("ref_kind", "unknown reference kind '" + std::string(name) + "'");
}

void validate(const ControllerConfig& cfg) {
    const auto positive = [](const char* name, double v) {
        if (!(v > 0.0) || !std::isfinite(v)) throw ValidationError(name, "must be a finite positive value");
    };
    positive("lpf_tau", cfg.lpf_tau);
    positive("ramp_duration", cfg.ramp_duration);
    positive("dt_ctrl", cfg.dt_ctrl);
    positive("t_end", cfg.t_end);
    if (!(cfg.t_switch >= 0.0) || !(cfg.t_switch < cfg.t_end))
        throw ValidationError("t_switch", "must lie in [0, t_end)");
}

double max_secondary_amplitude(double Vl) { return 4.0 / pi * Vl; }

// Past d = 1/3 (V2 below half range), 1 - sin(pi d / 2) is evaluated as
// 2 sin^2(pi (1 - d) / 4) so V2 keeps full relative precision as it approaches 0.
double f_duty(double d_short, double Vl) {
    if (!(d_short >= 0.0 && d_short <= 1.0)) throw ValidationError("d_short", "must lie in [0, 1]");
    if (d_short <= 1.0 / 3.0) return max_secondary_amplitude(Vl) * (1.0 - std::sin(pi * d_short / 2.0));
    const double s = std::sin(pi * (1.0 - d_short) / 4.0);
    return max_secondary_amplitude(Vl) * 2.0 * s * s;
}

DutyCommand f_inv(double V2, double Vl) {
    const double vmax = max_secondary_amplitude(Vl);
    DutyCommand out;
    if (V2 < 0.0 || V2 > vmax || std::isnan(V2)) {
        out.clamped = true;
        V2 = std::isnan(V2) ? 0.0 : std::clamp(V2, 0.0, vmax);
    }
    const double ratio = V2 / vmax;
    const double d = ratio >= 0.5 ? 2.0 / pi * std::asin(1.0 - ratio) : 1.0 - 4.0 / pi * std::asin(std::sqrt(ratio / 2.0));
    out.d_short = std::clamp(d, 0.0, 1.0);
    return out;
}

Biquad bilinear(const Eigen::Vector3d& num, const Eigen::Vector3d& den, double T) {
    const double K = 2.0 / T;
    const double K2 = K * K;
    const auto map = [&](const Eigen::Vector3d& p) {
        return Eigen::Vector3d(p[0] * K2 + p[1] * K + p[2], 2.0 * (p[2] - p[0] * K2), p[0] * K2 - p[1] * K + p[2]);
    };
    Biquad q;
    q.b = map(num);
    q.a = map(den);
    if (q.a[0] == 0.0) throw ValidationError("den", "bilinear image has a zero leading coefficient");
    q.b /= q.a[0];
    q.a /= q.a[0];
    return q;
}

InversePlant::InversePlant(const ControllerConfig& cfg, const Derived& d) {
    validate(cfg);
    const double tau = cfg.lpf_tau;
    num_ << -1.0, -2.0 * d.zeta * d.omega_n, -d.omega_n * d.omega_n;
    den_ << d.alpha2 * tau, d.alpha2 + d.beta2 * tau, d.beta2;
    section_ = bilinear(num_, den_, cfg.dt_ctrl);
}

std::pair<FilterState, double> inverse_plant_step(const FilterState& state, double i2_ref, const InversePlant& plant) {
    const auto& q = plant.section();
    const double y = q.b[0] * i2_ref + state.z[0];
    FilterState next;
    next.z[0] = q.b[1] * i2_ref - q.a[1] * y + state.z[1];
    next.z[1] = q.b[2] * i2_ref - q.a[2] * y;
    return {next, y};
}

std::pair<FilterState, double> inverse_plant_step(const FilterState& state, double i2_ref, const ControllerConfig& cfg,
                                                  const Derived& d) {
    return inverse_plant_step(state, i2_ref, InversePlant(cfg, d));
}

namespace {

Eigen::Index sample_count(const ControllerConfig& cfg) {
    return static_cast<Eigen::Index>(std::llround(cfg.t_end / cfg.dt_ctrl)) + 1;
}

Eigen::Index switch_index(const ControllerConfig& cfg) {
    return static_cast<Eigen::Index>(std::ceil(cfg.t_switch / cfg.dt_ctrl - 1e-9));
}

}  // namespace

TimeSeries make_reference(const ControllerConfig& cfg, const Derived& d) {
    validate(cfg);
    const Eigen::Index n = sample_count(cfg);
    const Eigen::Index k_switch = switch_index(cfg);
    const double v_rect = f_duty(0.0, d.circuit.Vl);

    TimeSeries ts(cfg.dt_ctrl);
    Eigen::VectorXd v2(n);
    switch (cfg.ref_kind) {
        case ReferenceKind::step:
            for (Eigen::Index k = 0; k < n; ++k) v2[k] = k < k_switch ? v_rect : 0.0;
            break;
        case ReferenceKind::ramp:
            for (Eigen::Index k = 0; k < n; ++k) {
                const double elapsed = static_cast<double>(k - k_switch) * cfg.dt_ctrl;
                v2[k] = k < k_switch ? v_rect : v_rect * std::max(0.0, 1.0 - elapsed / cfg.ramp_duration);
            }
            break;
        case ReferenceKind::proposed: {
            // The chain runs on the deviation from the rectification equilibrium; the
            // plant is linear, so V2* = V2_rect + H (I2_ref - I2_rect).
            const double i2_rect = steady_state(d, d.V1_amp, v_rect).second;
            const double i2_short = steady_state(d, d.V1_amp, 0.0).second;
            const InversePlant plant(cfg, d);
            // Tustin image of 1 / (tau s + 1); the plant output the chain is designed to produce.
            const double tk = 2.0 * cfg.lpf_tau / cfg.dt_ctrl;
            const double lpf_gain = 1.0 / (tk + 1.0);
            const double lpf_pole = (tk - 1.0) / (tk + 1.0);

            Eigen::VectorXd i2_ref(n), i2_star(n);
            FilterState state;
            double lpf = 0.0;
            double prev_target = 0.0;
            for (Eigen::Index k = 0; k < n; ++k) {
                const double target = k < k_switch ? 0.0 : i2_short - i2_rect;
                auto [next, y] = inverse_plant_step(state, target, plant);
                state = next;
                v2[k] = v_rect + y;
                lpf = lpf_gain * (target + prev_target) + lpf_pole * lpf;
                prev_target = target;
                i2_ref[k] = i2_rect + target;
                i2_star[k] = i2_rect + lpf;
            }
            ts.add("I2_ref", std::move(i2_ref));
            ts.add("I2_star", std::move(i2_star));
            break;
        }
    }
    ts.add("V2_ref", std::move(v2));
    return ts;
}

CommandChain command_chain(const ControllerConfig& cfg, const Derived& d) {
    CommandChain chain{make_reference(cfg, d)};
    const Eigen::VectorXd& v2_ref = chain.series["V2_ref"];
    const double vmax = max_secondary_amplitude(d.circuit.Vl);
    const Eigen::Index n = v2_ref.size();

    Eigen::VectorXd v2_star(n), duty(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const DutyCommand cmd = f_inv(v2_ref[k], d.circuit.Vl);
        chain.clamp_events += cmd.clamped ? 1 : 0;
        v2_star[k] = std::clamp(v2_ref[k], 0.0, vmax);
        duty[k] = cmd.d_short;
    }
    chain.series.add("V2_star", std::move(v2_star));
    chain.series.add("d_short_star", std::move(duty));
    return chain;
}

}  // namespace wpt
