#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <utility>

#include <Eigen/Core>

#include "wpt/model.hpp"
#include "wpt/time_series.hpp"

namespace wpt {

enum class ReferenceKind { step, ramp, proposed };

std::string_view to_string(ReferenceKind kind);
ReferenceKind parse_reference_kind(std::string_view name);

/// Feedforward chain settings: reference shape, mode-switch instant and the
/// discrete controller rate. The command horizon runs from 0 to t_end.
struct ControllerConfig {
    ReferenceKind ref_kind = ReferenceKind::proposed;
    double lpf_tau = 2e-3;        ///< first-order low-pass time constant [s]
    double ramp_duration = 2e-3;  ///< ramp descent time [s]
    double t_switch = 4e-3;       ///< rectification -> short transition [s]
    double dt_ctrl = 10e-6;       ///< controller sample interval [s]
    double t_end = 20e-3;         ///< command horizon [s]
};

void validate(const ControllerConfig& cfg);

/// Fundamental secondary-voltage amplitude seen by the coil when the rectifier
/// shorts for a fraction d_short of each half-period: (4/pi) Vl (1 - sin(pi d / 2)).
double f_duty(double d_short, double Vl);

struct DutyCommand {
    double d_short = 0.0;
    bool clamped = false;  ///< V2 was outside [0, (4/pi) Vl]
};

/// Inverse of f_duty, (2/pi) asin(1 - (pi/4) V2 / Vl), with V2 clamped to the realizable range.
DutyCommand f_inv(double V2, double Vl);

/// Largest realizable secondary amplitude, f_duty(0, Vl).
double max_secondary_amplitude(double Vl);

/// Discrete second-order section y/u = (b0 + b1 z^-1 + b2 z^-2) / (1 + a1 z^-1 + a2 z^-2).
struct Biquad {
    Eigen::Vector3d b = Eigen::Vector3d::Zero();
    Eigen::Vector3d a = Eigen::Vector3d(1.0, 0.0, 0.0);
};

/// Tustin image of (n0 s^2 + n1 s + n2) / (d0 s^2 + d1 s + d2) at sample interval T.
Biquad bilinear(const Eigen::Vector3d& num, const Eigen::Vector3d& den, double T);

/// Delay line of the transposed direct-form II realization.
struct FilterState {
    Eigen::Vector2d z = Eigen::Vector2d::Zero();
};

/// Discretized low-pass filter cascaded with the inverse of G22,
///   -(s^2 + 2 zeta w_n s + w_n^2) / ((alpha2 s + beta2)(tau s + 1)).
/// The cascade is biproper, with poles at -beta2/alpha2 = -R1/(2 L1) and -1/tau.
class InversePlant {
public:
    InversePlant(const ControllerConfig& cfg, const Derived& d);

    const Biquad& section() const noexcept { return section_; }
    /// Continuous-time numerator and denominator, highest power first.
    const Eigen::Vector3d& num() const noexcept { return num_; }
    const Eigen::Vector3d& den() const noexcept { return den_; }

    /// Steady-state gain, 1 / G22(0).
    double dc_gain() const { return num_[2] / den_[2]; }

private:
    Eigen::Vector3d num_, den_;
    Biquad section_;
};

/// Advances the cascade by one controller period with input i2_ref; returns the new state and V2*.
std::pair<FilterState, double> inverse_plant_step(const FilterState& state, double i2_ref, const InversePlant& plant);

/// Same, building the cascade from its configuration.
std::pair<FilterState, double> inverse_plant_step(const FilterState& state, double i2_ref, const ControllerConfig& cfg,
                                                  const Derived& d);

/// Secondary-voltage reference on the controller grid, channel "V2_ref".
/// The proposed kind also carries "I2_ref" (current target) and "I2_star" (after the low-pass).
TimeSeries make_reference(const ControllerConfig& cfg, const Derived& d);

struct CommandChain {
    TimeSeries series;  ///< V2_ref, V2_star, d_short_star (plus reference extras)
    std::size_t clamp_events = 0;
};

/// Reference -> clamp to the realizable range -> f_inv.
CommandChain command_chain(const ControllerConfig& cfg, const Derived& d);

}  // namespace wpt
