#pragma once

#include <utility>

namespace fluorospec::detail {

// Classical fourth-order Runge-Kutta step for an autonomous right-hand side.
template <class State, class Rhs>
State rk4_step(const State& y, double h, Rhs&& f) {
    const State k1 = f(y);
    const State k2 = f(y + k1 * (0.5 * h));
    const State k3 = f(y + k2 * (0.5 * h));
    const State k4 = f(y + k3 * h);
    return y + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
}

}  // namespace fluorospec::detail
