#include "wpt/switched.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "wpt/errors.hpp"
#include "wpt/rk4.hpp"

namespace wpt {

SwitchedState state_from_envelope(const Derived& d, double I1, double I2) {
    SwitchedState s;
    s.i2 = I2;
    s.q1 = -I1 / d.omega;
    return s;
}

TimeSeries simulate_switched(const Circuit& p, const GateSchedule& g, double dt, double t_end,
                             const SwitchedState& initial) {
    const Derived d = derive_params(p);
    if (!(dt > 0.0)) throw ValidationError("dt", "must be positive");
    if (dt > 1.0 / (kMinStepsPerCarrierPeriod * p.f_res) * (1.0 + 1e-12))
        throw ValidationError("dt", "fewer than 200 steps per carrier period");
    if (!(t_end > initial.t)) throw ValidationError("t_end", "must exceed the initial time");
    if (g.d_short.values.size() == 0) throw ValidationError("d_short", "empty gate schedule");
    if (!((g.d_short.values.array() >= 0.0).all() && (g.d_short.values.array() <= 1.0).all()))
        throw ValidationError("d_short", "duty must lie in [0, 1]");
    if (!std::isfinite(g.phase_offset)) throw ValidationError("phase_offset", "must be finite");

    const double coupling_det = p.L1 * p.L2 - p.Lm * p.Lm;
    if (!(coupling_det > 1e-12 * p.L1 * p.L2)) throw DegeneratePlantError("unity coupling: inductance matrix is singular");
    Eigen::Matrix2d inv_l;
    inv_l << p.L2, p.Lm, p.Lm, p.L1;
    inv_l /= coupling_det;

    const double half_period = 1.0 / (2.0 * p.f_res);
    // Gate periods run from window_origin + n T; the short window sits at their start
    // (leading) or centred on their midpoint (centered).
    const bool centered = g.alignment == GateAlignment::centered;
    const double window_origin = g.phase_offset / d.omega - (centered ? half_period / 2.0 : 0.0);
    const auto steps = static_cast<Eigen::Index>(std::llround((t_end - initial.t) / dt));

    Eigen::VectorXd i1(steps + 1), i2(steps + 1), v2(steps + 1), i_load(steps + 1);
    Eigen::Vector4d x = initial.vec();
    double current_sign = x[1] < 0.0 ? -1.0 : 1.0;

    for (Eigen::Index k = 0;; ++k) {
        const double t = initial.t + static_cast<double>(k) * dt;

        const auto carrier_half = static_cast<long long>(std::floor(t / half_period + 1e-9));
        const double v1 = (carrier_half % 2 == 0) ? p.Vdc : -p.Vdc;

        const double shifted = t - window_origin;
        const double gate_index = std::floor(shifted / half_period + 1e-9);
        const double position = std::max(0.0, shifted - gate_index * half_period);
        const double duty = g.d_short.at(gate_index * half_period + window_origin);
        const double window = duty * half_period;
        const double window_start = centered ? (half_period - window) / 2.0 : 0.0;
        const bool shorted = duty >= 1.0 || (position >= window_start && position < window_start + window);

        if (x[1] > 0.0) current_sign = 1.0;
        else if (x[1] < 0.0) current_sign = -1.0;
        const double u2 = shorted ? 0.0 : current_sign * p.Vl;

        i1[k] = x[0];
        i2[k] = x[1];
        v2[k] = u2;
        i_load[k] = shorted ? 0.0 : std::abs(x[1]);
        if (k == steps) break;

        const auto rhs = [&](const Eigen::Vector4d& s) -> Eigen::Vector4d {
            const Eigen::Vector2d drive(v1 - p.R1 * s[0] - s[2] / d.C1, -u2 - p.R2 * s[1] - s[3] / d.C2);
            const Eigen::Vector2d di = inv_l * drive;
            return {di[0], di[1], s[0], s[1]};
        };
        x = rk4_step(x, dt, rhs);
        if (!x.allFinite()) throw DivergenceError(static_cast<std::size_t>(k + 1), t + dt);
    }

    TimeSeries ts(dt, initial.t);
    ts.add("i1", std::move(i1));
    ts.add("i2", std::move(i2));
    ts.add("v2", std::move(v2));
    ts.add("i_load", std::move(i_load));
    return ts;
}

TimeSeries extract_envelope(const TimeSeries& ts, double f_res) {
    if (!(f_res > 0.0)) throw ValidationError("f_res", "must be positive");
    const Eigen::VectorXd& i2 = ts["i2"];
    const auto n = i2.size();
    const double half_period = 1.0 / (2.0 * f_res);
    if (n < 2 || static_cast<double>(n - 1) * ts.dt() < 4.0 * half_period * (1.0 - 1e-9))
        throw ValidationError("i2", "record shorter than two carrier periods");

    const double samples_per_half = half_period / ts.dt();
    const auto min_len = std::max<Eigen::Index>(1, static_cast<Eigen::Index>(samples_per_half / 4.0));
    const auto max_len = std::max<Eigen::Index>(2, static_cast<Eigen::Index>(std::ceil(2.0 * samples_per_half)));

    struct Lobe {
        Eigen::Index begin, end;
        double peak;
    };
    std::vector<Lobe> lobes;
    Eigen::Index begin = 0;
    double sign = 0.0;
    for (Eigen::Index k = 0; k < n; ++k) {
        const double s = i2[k] > 0.0 ? 1.0 : (i2[k] < 0.0 ? -1.0 : 0.0);
        const bool flipped = s != 0.0 && sign != 0.0 && s != sign;
        if ((flipped && k - begin >= min_len) || k - begin >= max_len) {
            lobes.push_back({begin, k, 0.0});
            begin = k;
        }
        if (s != 0.0) sign = s;
    }
    lobes.push_back({begin, n, 0.0});
    for (auto& lobe : lobes) lobe.peak = i2.segment(lobe.begin, lobe.end - lobe.begin).cwiseAbs().maxCoeff();

    // An edge lobe cut by the record boundary holds its crest only if it spans at
    // least half a current half-cycle; otherwise borrow the neighbour's crest.
    const auto short_edge = [&](const Lobe& lobe) {
        return static_cast<double>(lobe.end - lobe.begin) < 0.5 * samples_per_half;
    };
    if (lobes.size() > 1) {
        if (short_edge(lobes.front())) lobes.front().peak = std::max(lobes.front().peak, lobes[1].peak);
        if (short_edge(lobes.back()))
            lobes.back().peak = std::max(lobes.back().peak, lobes[lobes.size() - 2].peak);
    }

    Eigen::VectorXd env(n);
    for (const auto& lobe : lobes) env.segment(lobe.begin, lobe.end - lobe.begin).setConstant(lobe.peak);

    TimeSeries out(ts.dt(), ts.t0());
    out.add("I2_env", std::move(env));
    return out;
}

}  // namespace wpt
