#pragma once

namespace dynalloc {

/// One classical fourth-order Runge-Kutta step of ẋ = f(x) with inputs held
/// over the step. State must support `x + h * dx` with scalar h.
template <class State, class Derivative>
State rk4_step(const State& x, double h, Derivative&& f) {
  const State k1 = f(x);
  const State k2 = f(State(x + (0.5 * h) * k1));
  const State k3 = f(State(x + (0.5 * h) * k2));
  const State k4 = f(State(x + h * k3));
  return State(x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
}

/// RK4 step of ẋ = f(s, x) where s is the time into the step.
template <class State, class Derivative>
State rk4_step_timed(const State& x, double h, Derivative&& f) {
  const State k1 = f(0.0, x);
  const State k2 = f(0.5 * h, State(x + (0.5 * h) * k1));
  const State k3 = f(0.5 * h, State(x + (0.5 * h) * k2));
  const State k4 = f(h, State(x + h * k3));
  return State(x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
}

}  // namespace dynalloc
