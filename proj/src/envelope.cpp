#include "wpt/envelope.hpp"

#include <cmath>
#include <numbers>

#include "wpt/errors.hpp"
#include "wpt/rk4.hpp"

namespace wpt {

double max_envelope_step(const Derived& d) { return 2.0 * std::numbers::pi / (50.0 * d.omega_n); }

namespace {

double command_bandwidth(const SampledSignal& v) {
    if (v.values.size() < 2) return 0.0;
    const double range = v.values.maxCoeff() - v.values.minCoeff();
    if (range <= 0.0) return 0.0;
    const Eigen::Index n = v.values.size();
    const double slew = (v.values.tail(n - 1) - v.values.head(n - 1)).cwiseAbs().maxCoeff() / v.dt;
    return slew / range;
}

}  // namespace

EnvelopeRun simulate_envelope(const Derived& d, const SampledSignal& v2_cmd, const EnvelopeState<double>& I0,
                              double dt, double t_end) {
    if (!(dt > 0.0)) throw ValidationError("dt", "must be positive");
    if (dt > max_envelope_step(d) * (1.0 + 1e-12))
        throw ValidationError("dt", "exceeds " + std::to_string(max_envelope_step(d)) +
                                        " s (fewer than 50 steps per envelope period)");
    if (!(t_end > I0.t)) throw ValidationError("t_end", "must exceed the initial time");
    if (v2_cmd.values.size() == 0) throw ValidationError("v2_cmd", "empty command");
    if (v2_cmd.t0 > I0.t + 1e-12 || v2_cmd.end_time() < t_end - 1e-12)
        throw ValidationError("v2_cmd", "command does not cover the simulated interval");

    const auto steps = static_cast<Eigen::Index>(std::llround((t_end - I0.t) / dt));
    const Eigen::Matrix2d A = envelope_matrix(d);
    const Eigen::Matrix2d B = input_matrix(d);

    Eigen::VectorXd i1(steps + 1), i2(steps + 1), v2(steps + 1);
    Eigen::Vector2d x = I0.vec();
    for (Eigen::Index k = 0;; ++k) {
        const double t = I0.t + static_cast<double>(k) * dt;
        const double u2 = v2_cmd.at(t);
        i1[k] = x[0];
        i2[k] = x[1];
        v2[k] = u2;
        if (k == steps) break;

        const Eigen::Vector2d forcing = B * Eigen::Vector2d(d.V1_amp, u2);
        x = rk4_step(x, dt, [&](const Eigen::Vector2d& s) -> Eigen::Vector2d { return A * s + forcing; });
        if (!x.allFinite()) throw DivergenceError(static_cast<std::size_t>(k + 1), t + dt);
    }

    EnvelopeRun run{TimeSeries(dt, I0.t)};
    run.series.add("I1_env", std::move(i1));
    run.series.add("I2_env", std::move(i2));
    run.series.add("V2_cmd", std::move(v2));
    run.v2_bandwidth = command_bandwidth(v2_cmd);
    run.bandwidth_warning = run.v2_bandwidth > d.omega / 10.0;
    return run;
}

}  // namespace wpt
