#pragma once

#include <cmath>

#include <Eigen/Core>

#include "wpt/model.hpp"
#include "wpt/time_series.hpp"

namespace wpt {

/// Slowly varying coil current amplitudes: i1 = I1(t) sin wt, i2 = I2(t) cos wt.
template <typename Scalar>
struct EnvelopeState {
    Scalar I1{};
    Scalar I2{};
    Scalar t{};

    Eigen::Matrix<Scalar, 2, 1> vec() const { return {I1, I2}; }
};

/// (dI1/dt, dI2/dt) of the envelope ODE at state s under amplitudes V1, V2.
template <typename Scalar>
Eigen::Matrix<Scalar, 2, 1> envelope_rhs(const EnvelopeState<Scalar>& s, Scalar V1, Scalar V2,
                                         const DerivedParams<Scalar>& d) {
    const auto& p = d.circuit;
    const Scalar coupling = d.omega * p.Lm;
    return {(V1 - p.R1 * s.I1 - coupling * s.I2) / (Scalar(2) * p.L1),
            (-V2 - p.R2 * s.I2 + coupling * s.I1) / (Scalar(2) * p.L2)};
}

/// exp(A t) of a real 2x2 matrix via its characteristic roots sigma +/- sqrt(sigma^2 - det).
/// Covers complex, real-distinct and repeated roots; the latter uses the limiting form
/// e^{sigma t} (I + t (A - sigma I)).
template <typename Scalar>
Eigen::Matrix<Scalar, 2, 2> expm2(const Eigen::Matrix<Scalar, 2, 2>& A, Scalar t) {
    using std::abs, std::cos, std::cosh, std::exp, std::sin, std::sinh, std::sqrt;
    const Scalar sigma = A.trace() / Scalar(2);
    const Scalar disc = sigma * sigma - A.determinant();
    const Eigen::Matrix<Scalar, 2, 2> I = Eigen::Matrix<Scalar, 2, 2>::Identity();
    const Eigen::Matrix<Scalar, 2, 2> M = A - sigma * I;

    Scalar c, s;  // c = cos/cosh(rt), s = sin(rt)/r or sinh(rt)/r
    const Scalar x = disc * t * t;
    if (abs(x) < Scalar(1e-10)) {
        c = Scalar(1) + x / Scalar(2);
        s = t * (Scalar(1) + x / Scalar(6));
    } else if (disc < Scalar(0)) {
        const Scalar w = sqrt(-disc);
        c = cos(w * t);
        s = sin(w * t) / w;
    } else {
        const Scalar mu = sqrt(disc);
        c = cosh(mu * t);
        s = sinh(mu * t) / mu;
    }
    return exp(sigma * t) * (c * I + s * M);
}

/// Closed-form envelope for constant V1, V2 over [I0.t, t]:
/// x(t) = x_ss + exp(A (t - t0)) (x0 - x_ss).
template <typename Scalar>
EnvelopeState<Scalar> analytic_envelope(const DerivedParams<Scalar>& d, Scalar V1, Scalar V2,
                                        const EnvelopeState<Scalar>& I0, Scalar t) {
    if (t == I0.t) return I0;
    const auto [I1ss, I2ss] = steady_state(d, V1, V2);
    const Eigen::Matrix<Scalar, 2, 1> xss(I1ss, I2ss);
    const Eigen::Matrix<Scalar, 2, 1> x = xss + expm2(envelope_matrix(d), t - I0.t) * (I0.vec() - xss);
    return {x[0], x[1], t};
}

struct EnvelopeRun {
    TimeSeries series;  ///< channels I1_env, I2_env, V2_cmd
    /// Largest normalised slew of the command, max|dV2/dt| / (max V2 - min V2) [rad/s].
    double v2_bandwidth = 0.0;
    /// Set when v2_bandwidth exceeds a tenth of the carrier frequency; the
    /// fundamental-harmonic envelope is then a rough approximation.
    bool bandwidth_warning = false;
};

/// Largest step (s) accepted by simulate_envelope: 50 steps per envelope oscillation.
double max_envelope_step(const Derived& d);

/// Fixed-step RK4 integration of the envelope ODE from I0 to t_end, V1 held at
/// d.V1_amp and V2 read from v2_cmd with a zero-order hold at the start of each step.
/// Samples are t_k = I0.t + k dt. Bit-identical for identical inputs.
EnvelopeRun simulate_envelope(const Derived& d, const SampledSignal& v2_cmd, const EnvelopeState<double>& I0,
                              double dt, double t_end);

}  // namespace wpt
