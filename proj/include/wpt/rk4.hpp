#pragma once

#include <Eigen/Core>

namespace wpt {

/// One classical fourth-order Runge-Kutta step for an autonomous right-hand side
/// (inputs are held constant across the step by the caller).
template <typename Derived, typename Rhs>
typename Derived::PlainObject rk4_step(const Eigen::MatrixBase<Derived>& x, typename Derived::Scalar h, Rhs&& rhs) {
    using Vec = typename Derived::PlainObject;
    using Scalar = typename Derived::Scalar;
    const Scalar half = h / Scalar(2);
    const Vec k1 = rhs(x);
    const Vec k2 = rhs((x + half * k1).eval());
    const Vec k3 = rhs((x + half * k2).eval());
    const Vec k4 = rhs((x + h * k3).eval());
    return x + (h / Scalar(6)) * (k1 + Scalar(2) * k2 + Scalar(2) * k3 + k4);
}

}  // namespace wpt
