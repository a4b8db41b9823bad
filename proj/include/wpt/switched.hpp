#pragma once

#include <Eigen/Core>

#include "wpt/model.hpp"
#include "wpt/time_series.hpp"

namespace wpt {

/// Instantaneous state of the coupled resonant tanks.
struct SwitchedState {
    double i1 = 0.0;  ///< primary coil current [A]
    double i2 = 0.0;  ///< secondary coil current [A]
    double q1 = 0.0;  ///< primary resonant capacitor charge [C]
    double q2 = 0.0;  ///< secondary resonant capacitor charge [C]
    double t = 0.0;

    Eigen::Vector4d vec() const { return {i1, i2, q1, q2}; }
};

/// Carrier-synchronous state at t = 0 matching envelope amplitudes (I1, I2):
/// i1 = I1 sin wt, i2 = I2 cos wt and the capacitor charges that go with them.
SwitchedState state_from_envelope(const Derived& d, double I1, double I2);

/// Placement of the short interval inside each rectifier period.
enum class GateAlignment {
    centered,  ///< centred on the carrier half-period boundary (the secondary current crest)
    leading,   ///< starts at the carrier half-period boundary
};

/// Lower-arm gate command of the rectifier. The rectifier period is T = 1/(2 f_res);
/// the switches conduct (short mode) for d_short T of each period, placed per
/// `alignment` relative to the carrier half-period boundaries shifted by phase_offset/w.
/// d_short is latched once per period.
///
/// With the centred placement the in-phase fundamental of v2 is (4/pi) Vl (1 - sin(pi d / 2))
/// and the quadrature fundamental vanishes.
struct GateSchedule {
    SampledSignal d_short;
    double phase_offset = 0.0;  ///< [rad] of the carrier
    GateAlignment alignment = GateAlignment::centered;
};

/// Smallest number of integration steps per carrier period accepted by simulate_switched.
inline constexpr double kMinStepsPerCarrierPeriod = 200.0;

/// Fixed-step RK4 integration of the coupled series-series RLC loops with an ideal
/// full-bridge square wave (amplitude Vdc) on the primary and an ideal semi-bridgeless
/// rectifier on the secondary:
///   rectifying: v2 = sign(i2) Vl, i_load = |i2|  (sign of a zero current is the previous sign)
///   shorted:    v2 = 0,           i_load = 0
/// Sources are evaluated at the start of each step and held across it.
/// Output channels: i1, i2, v2, i_load on t_k = k dt, 0 <= t_k <= t_end.
TimeSeries simulate_switched(const Circuit& p, const GateSchedule& g, double dt, double t_end,
                             const SwitchedState& initial = {});

/// Secondary-current envelope of a carrier-frequency record: the peak |i2| of each
/// current half-cycle, held over that half-cycle. Half-cycles are delimited by sign
/// changes of i2 (at least a quarter carrier half-period apart) and capped at two
/// carrier half-periods. Output channel: I2_env on the input grid.
TimeSeries extract_envelope(const TimeSeries& ts, double f_res);

}  // namespace wpt
