#pragma once

#include <cmath>
#include <string>

#include "qb/errors.hpp"

namespace qb {

/// Fixed-step integration parameters. Both engines use the same classic
/// fourth-order Runge-Kutta stepper; there is no adaptive stepping so that
/// identical inputs yield bit-identical trajectories.
struct IntegratorConfig {
  double dt = 0.01;      // step, units 1/delta_a
  double t_end = 1.0;    // final time
  int sample_every = 1;  // record every k-th step

  void validate() const {
    if (!(dt > 0.0)) throw validation_error("integrator dt must be positive");
    if (!(t_end >= dt))
      throw validation_error("integrator t_end must be at least dt");
    if (sample_every < 1)
      throw validation_error("integrator sample_every must be >= 1");
  }

  // Number of full steps actually taken; t_end is rounded to a whole number
  // of steps.
  long n_steps() const {
    long n = std::lround(t_end / dt);
    return n < 1 ? 1 : n;
  }
};

/// One classic RK4 step, in place. State must support Eigen-style linear
/// arithmetic; deriv(y, t, dydt) writes the derivative. Workspace arguments
/// avoid per-step allocation.
template <class State, class Deriv>
void rk4_step(Deriv&& deriv, double t, double dt, State& y, State& k1,
              State& k2, State& k3, State& k4, State& tmp) {
  deriv(y, t, k1);
  tmp = y + (0.5 * dt) * k1;
  deriv(tmp, t + 0.5 * dt, k2);
  tmp = y + (0.5 * dt) * k2;
  deriv(tmp, t + 0.5 * dt, k3);
  tmp = y + dt * k3;
  deriv(tmp, t + dt, k4);
  y += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace qb
