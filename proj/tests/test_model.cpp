#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include <Eigen/Eigenvalues>

#include "wpt/model.hpp"

using namespace wpt;

namespace {

// Values below were computed independently (numpy eigen-solver and linear solve on
// the 2x2 envelope system) for the reference circuit and frozen here.
constexpr double kOmega = 534070.7511102648;
constexpr double kOmegaN = 24993.68597225268;
constexpr double kZeta = 0.021777538541512657;
constexpr double kRmI1 = 11.5511132, kRmI2 = 11.06959437;
constexpr double kSmI1 = 0.11138336, kSmI2 = 11.43972984;
constexpr double kDcGain = -0.009690124103104979;

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

Circuit random_circuit(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> log_l(std::log(1e-6), std::log(1e-3));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Circuit p;
    p.L1 = std::exp(log_l(rng));
    p.L2 = std::exp(log_l(rng));
    p.Lm = (0.01 + 0.9 * unit(rng)) * std::sqrt(p.L1 * p.L2);
    p.R1 = 1e-3 + 0.5 * unit(rng);
    p.R2 = 1e-3 + 0.5 * unit(rng);
    p.Vdc = 1.0 + 100.0 * unit(rng);
    p.Vl = 1.0 + 100.0 * unit(rng);
    p.f_res = 1e4 + 2e5 * unit(rng);
    return p;
}

}  // namespace

TEST_CASE("derived constants of the reference circuit") {
    const Derived d = derive_params(Circuit::reference());
    CHECK(rel(d.omega, 2.0 * std::numbers::pi * 85e3) < 1e-15);
    CHECK(rel(d.omega, kOmega) < 1e-12);
    CHECK(rel(d.omega_n, kOmegaN) < 1e-9);
    CHECK(rel(d.zeta, kZeta) < 1e-9);
    CHECK(d.zeta == doctest::Approx(0.0218).epsilon(0.01));
    CHECK(d.omega_n == doctest::Approx(2.500e4).epsilon(0.001));
    CHECK(rel(d.V1_amp, 120.0 / std::numbers::pi) < 1e-15);
}

TEST_CASE("lossless symmetric toy circuit") {
    Circuit p{1.0, 1.0, 1.0, 0.0, 0.0, 1.0, 1.0, 1.0 / (2.0 * std::numbers::pi)};
    const Derived d = derive_params(p);
    CHECK(d.omega_n == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(d.zeta == 0.0);
    CHECK(d.beta1 == 0.0);
    CHECK(d.beta2 == 0.0);
}

TEST_CASE("validation names the offending field") {
    const auto field_of = [](Circuit p) -> std::string {
        try {
            derive_params(p);
        } catch (const ValidationError& e) {
            return e.field();
        }
        return "";
    };
    auto p = Circuit::reference();
    p.L1 = 0.0;
    CHECK(field_of(p) == "L1");
    p = Circuit::reference();
    p.L2 = -1e-6;
    CHECK(field_of(p) == "L2");
    p = Circuit::reference();
    p.R2 = -0.1;
    CHECK(field_of(p) == "R2");
    p = Circuit::reference();
    p.f_res = std::nan("");
    CHECK(field_of(p) == "f_res");
    p = Circuit::reference();
    p.Vl = 0.0;
    CHECK(field_of(p) == "Vl");
    p = Circuit::reference();
    p.Lm = 1e-3;
    CHECK(field_of(p) == "Lm");
    p = Circuit::reference();
    p.R1 = 0.0;
    CHECK(field_of(p).empty());
}

TEST_CASE("resonance round trip on random circuits") {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 500; ++i) {
        const Derived d = derive_params(random_circuit(rng));
        CHECK(rel(1.0 / std::sqrt(d.circuit.L1 * d.C1), d.omega) < 1e-12);
        CHECK(rel(1.0 / std::sqrt(d.circuit.L2 * d.C2), d.omega) < 1e-12);
    }
}

TEST_CASE("envelope matrix eigenvalues match the damping form") {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 500; ++i) {
        const Derived d = derive_params(random_circuit(rng));
        Eigen::EigenSolver<Eigen::Matrix2d> es(envelope_matrix(d));
        const std::complex<double> root =
            -d.zeta * d.omega_n + std::complex<double>(0.0, 1.0) * d.omega_n *
                                      std::sqrt(std::complex<double>(1.0 - d.zeta * d.zeta));
        const std::complex<double> other = std::conj(root);
        // overdamped draws give two real roots; compare as a set
        const std::complex<double> alt = -d.zeta * d.omega_n - (root + d.zeta * d.omega_n);
        for (int k = 0; k < 2; ++k) {
            const auto ev = es.eigenvalues()[k];
            const double err =
                std::min({std::abs(ev - root), std::abs(ev - other), std::abs(ev - alt)}) / std::abs(ev);
            CHECK(err < 1e-9);
        }
    }
}

TEST_CASE("steady state of the reference circuit") {
    const Derived d = derive_params(Circuit::reference());
    const double V1 = d.V1_amp;

    const auto [rm1, rm2] = steady_state(d, V1, V1);
    CHECK(rel(rm1, kRmI1) < 1e-7);
    CHECK(rel(rm2, kRmI2) < 1e-7);
    CHECK(rm2 == doctest::Approx(11.07).epsilon(0.001));
    CHECK(rm1 == doctest::Approx(11.55).epsilon(0.001));

    const auto [sm1, sm2] = steady_state(d, V1, 0.0);
    CHECK(rel(sm1, kSmI1) < 1e-6);
    CHECK(rel(sm2, kSmI2) < 1e-7);

    const auto [z1, z2] = steady_state(d, 0.0, 0.0);
    CHECK(z1 == 0.0);
    CHECK(z2 == 0.0);
}

TEST_CASE("steady state solves the envelope equilibrium") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> volts(-50.0, 50.0);
    for (int i = 0; i < 300; ++i) {
        const Derived d = derive_params(random_circuit(rng));
        const double V1 = volts(rng), V2 = volts(rng);
        const auto [I1, I2] = steady_state(d, V1, V2);
        const Eigen::Vector2d x(I1, I2);
        const Eigen::Vector2d r = envelope_matrix(d) * x + input_matrix(d) * Eigen::Vector2d(V1, V2);
        const double scale = (input_matrix(d) * Eigen::Vector2d(V1, V2)).norm() + 1e-30;
        CHECK(r.norm() / scale < 1e-9);
    }
}

TEST_CASE("degenerate plant") {
    Derived d = derive_params(Circuit::reference());
    d.circuit.R1 = 0.0;
    d.circuit.Lm = 0.0;
    CHECK_THROWS_AS(steady_state(d, 1.0, 1.0), DegeneratePlantError);
}

TEST_CASE("secondary transfer function") {
    const Derived d = derive_params(Circuit::reference());
    const auto g = g22(d);
    CHECK(g.num.size() == 2);
    CHECK(g.den.size() == 3);
    CHECK(g.den[0] == 1.0);
    CHECK(g.num[0] != 0.0);
    CHECK(rel(g.dc_gain(), -d.beta2 / (d.omega_n * d.omega_n)) < 1e-12);
    CHECK(rel(g.dc_gain(), kDcGain) < 1e-9);
    CHECK(g.dc_gain() == doctest::Approx(-9.69e-3).epsilon(1e-3));
    // dI2/dV2 at DC from the equilibrium solve
    const auto [a1, a2] = steady_state(d, 0.0, 1.0);
    CHECK(rel(g.dc_gain(), a2) < 1e-12);

    auto p = Circuit::reference();
    p.R1 = 0.0;
    const Derived lossless = derive_params(p);
    CHECK(lossless.beta2 == 0.0);
    CHECK(g22(lossless).dc_gain() == 0.0);
}

TEST_CASE("transfer function agrees with the state-space model") {
    const Derived d = derive_params(Circuit::reference());
    const auto g = g22(d);
    const Eigen::Matrix2cd A = envelope_matrix(d).cast<std::complex<double>>();
    const Eigen::Matrix2cd B = input_matrix(d).cast<std::complex<double>>();
    for (double w : {0.0, 1e3, 2.5e4, 1e5}) {
        const std::complex<double> s(0.0, w);
        const Eigen::Matrix2cd H = (s * Eigen::Matrix2cd::Identity() - A).inverse() * B;
        CHECK(std::abs(g(s) - H(1, 1)) / std::abs(H(1, 1)) < 1e-9);
    }
}

TEST_CASE("single precision instantiation") {
    const auto d = derive_params(CircuitParams<float>::reference());
    CHECK(d.omega_n == doctest::Approx(kOmegaN).epsilon(1e-5));
}
