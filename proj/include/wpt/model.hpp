#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "wpt/errors.hpp"

namespace wpt {

/// Series-series compensated link with a semi-bridgeless active rectifier.
/// All quantities in SI units.
template <typename Scalar>
struct CircuitParams {
    Scalar L1{};     ///< primary self-inductance [H]
    Scalar L2{};     ///< secondary self-inductance [H]
    Scalar Lm{};     ///< mutual inductance [H]
    Scalar R1{};     ///< primary internal resistance [ohm]
    Scalar R2{};     ///< secondary internal resistance [ohm]
    Scalar Vdc{};    ///< inverter DC supply [V]
    Scalar Vl{};     ///< battery (load) voltage [V]
    Scalar f_res{};  ///< resonance and inverter frequency [Hz]

    /// Prototype values: 236 uH / 18.9 uH / 6.25 uH, 108 mOhm / 32.5 mOhm, 30 V / 30 V, 85 kHz.
    static CircuitParams reference() {
        return {Scalar(236e-6), Scalar(18.9e-6), Scalar(6.25e-6), Scalar(0.108),
                Scalar(0.0325), Scalar(30), Scalar(30), Scalar(85e3)};
    }
};

/// Constants of the envelope plant at resonance.
///
/// The envelope plant is
///   I1(s) = [(alpha1 s + beta1) V1 + gamma V2] / D(s)
///   I2(s) = [gamma V1 - (alpha2 s + beta2) V2] / D(s)
/// with D(s) = s^2 + 2 zeta omega_n s + omega_n^2.
template <typename Scalar>
struct DerivedParams {
    CircuitParams<Scalar> circuit;
    Scalar omega{};    ///< 2 pi f_res [rad/s]
    Scalar C1{}, C2{};  ///< resonance capacitances [F]
    Scalar zeta{};
    Scalar omega_n{};  ///< envelope natural frequency [rad/s]
    Scalar alpha1{}, beta1{};
    Scalar alpha2{}, beta2{};
    Scalar gamma{};
    Scalar V1_amp{};  ///< fundamental of the full-bridge square wave, (4/pi) Vdc [V]
};

/// Numerator/denominator pair of a strictly proper second-order SISO transfer function,
/// sign * (num[0] s + num[1]) / (s^2 + den[1] s + den[2]).
template <typename Scalar>
struct TransferFn2x1 {
    Eigen::Matrix<Scalar, 2, 1> num;
    Eigen::Matrix<Scalar, 3, 1> den;  // monic, den[0] == 1
    int sign = 1;

    Scalar dc_gain() const { return Scalar(sign) * num[1] / den[2]; }

    std::complex<Scalar> operator()(std::complex<Scalar> s) const {
        return Scalar(sign) * (num[0] * s + num[1]) / (den[0] * s * s + den[1] * s + den[2]);
    }
};

template <typename Scalar>
void validate(const CircuitParams<Scalar>& p) {
    using std::isfinite;
    const auto positive = [](const char* name, Scalar v) {
        if (!(v > Scalar(0)) || !isfinite(v)) throw ValidationError(name, "must be a finite positive value");
    };
    const auto non_negative = [](const char* name, Scalar v) {
        if (!(v >= Scalar(0)) || !isfinite(v)) throw ValidationError(name, "must be a finite non-negative value");
    };
    positive("L1", p.L1);
    positive("L2", p.L2);
    positive("Lm", p.Lm);
    non_negative("R1", p.R1);
    non_negative("R2", p.R2);
    positive("Vdc", p.Vdc);
    positive("Vl", p.Vl);
    positive("f_res", p.f_res);
    if (p.Lm * p.Lm > p.L1 * p.L2) throw ValidationError("Lm", "coupling coefficient exceeds 1 (Lm > sqrt(L1 L2))");
}

template <typename Scalar>
DerivedParams<Scalar> derive_params(const CircuitParams<Scalar>& p) {
    using std::sqrt;
    validate(p);
    constexpr Scalar pi = std::numbers::pi_v<Scalar>;

    DerivedParams<Scalar> d;
    d.circuit = p;
    d.omega = Scalar(2) * pi * p.f_res;
    d.C1 = Scalar(1) / (d.omega * d.omega * p.L1);
    d.C2 = Scalar(1) / (d.omega * d.omega * p.L2);

    const Scalar coupling = d.omega * p.Lm;
    const Scalar det = p.R1 * p.R2 + coupling * coupling;
    d.zeta = (p.L1 * p.R2 + p.L2 * p.R1) / sqrt(Scalar(4) * p.L1 * p.L2) / sqrt(det);
    d.omega_n = Scalar(0.5) * sqrt(det / (p.L1 * p.L2));

    const Scalar four_l1l2 = Scalar(4) * p.L1 * p.L2;
    d.alpha1 = Scalar(1) / (Scalar(2) * p.L1);
    d.beta1 = p.R2 / four_l1l2;
    d.alpha2 = Scalar(1) / (Scalar(2) * p.L2);
    d.beta2 = p.R1 / four_l1l2;
    d.gamma = coupling / four_l1l2;
    d.V1_amp = Scalar(4) / pi * p.Vdc;
    return d;
}

/// State matrix A of the envelope ODE x' = A x + B [V1, V2]^T, x = [I1, I2]^T.
///
/// Fundamental-harmonic balance of the coupled RLC loop, with V2 the voltage
/// the rectifier presents to the secondary coil (opposing I2):
///   2 L1 I1' = V1 - R1 I1 - w Lm I2
///   2 L2 I2' = -V2 - R2 I2 + w Lm I1
template <typename Scalar>
Eigen::Matrix<Scalar, 2, 2> envelope_matrix(const DerivedParams<Scalar>& d) {
    const auto& p = d.circuit;
    const Scalar coupling = d.omega * p.Lm;
    Eigen::Matrix<Scalar, 2, 2> A;
    A << -p.R1 / (Scalar(2) * p.L1), -coupling / (Scalar(2) * p.L1),
          coupling / (Scalar(2) * p.L2), -p.R2 / (Scalar(2) * p.L2);
    return A;
}

template <typename Scalar>
Eigen::Matrix<Scalar, 2, 2> input_matrix(const DerivedParams<Scalar>& d) {
    const auto& p = d.circuit;
    Eigen::Matrix<Scalar, 2, 2> B;
    B << Scalar(1) / (Scalar(2) * p.L1), Scalar(0),
         Scalar(0), Scalar(-1) / (Scalar(2) * p.L2);
    return B;
}

/// Equilibrium amplitudes (I1, I2) for constant V1, V2:
///   R1 I1 + w Lm I2 = V1,  R2 I2 - w Lm I1 = -V2.
template <typename Scalar>
std::pair<Scalar, Scalar> steady_state(const DerivedParams<Scalar>& d, Scalar V1, Scalar V2) {
    const auto& p = d.circuit;
    const Scalar coupling = d.omega * p.Lm;
    const Scalar det = p.R1 * p.R2 + coupling * coupling;
    if (det == Scalar(0)) throw DegeneratePlantError("envelope plant is singular: R1 R2 + (w Lm)^2 = 0");
    const Scalar I1 = (p.R2 * V1 + coupling * V2) / det;
    const Scalar I2 = (coupling * V1 - p.R1 * V2) / det;
    return {I1, I2};
}

/// Secondary-voltage to secondary-current transfer function,
/// G22(s) = -(alpha2 s + beta2) / (s^2 + 2 zeta omega_n s + omega_n^2).
template <typename Scalar>
TransferFn2x1<Scalar> g22(const DerivedParams<Scalar>& d) {
    TransferFn2x1<Scalar> g;
    g.num << d.alpha2, d.beta2;
    g.den << Scalar(1), Scalar(2) * d.zeta * d.omega_n, d.omega_n * d.omega_n;
    g.sign = -1;
    return g;
}

using Circuit = CircuitParams<double>;
using Derived = DerivedParams<double>;

}  // namespace wpt
