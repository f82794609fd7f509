// Copyright 2026 The qsync Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Fixed-step classical Runge-Kutta (RK4) shared by the dense, orbit and
// classical integrators so that all three produce comparable trajectories.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>

#include "qsync/errors.hpp"

namespace qsync {

/// Requested integration window. A step of 0 means "use the default 0.1 / L".
struct IntegrationOptions {
  double step = 0.0;
  double horizon = 20.0;
  double stride = 0.05;
};

/// Stability heuristic: step * L <= kStabilityFactor.
inline constexpr double kStabilityFactor = 0.1;

/// Resolved grid: `steps` equal steps of `step` cover [0, horizon]; a sample
/// is recorded every `sample_every` steps and always at the horizon.
struct TimeGrid {
  double step = 0.0;
  double horizon = 0.0;
  std::size_t steps = 0;
  std::size_t sample_every = 1;

  double time_at(std::size_t k) const {
    return k == steps ? horizon : static_cast<double>(k) * step;
  }
};

/// Resolve options against the spectral bound L of the generator. The step
/// is shrunk (never grown) so that an integer number of steps hits the
/// horizon exactly, and, when the stride divides the horizon, every stride.
inline TimeGrid make_time_grid(const IntegrationOptions &opt, double bound) {
  if (!(opt.horizon > 0.0) || !std::isfinite(opt.horizon)) {
    throw ValidationError("horizon must be positive and finite");
  }
  if (!(opt.stride > 0.0) || !std::isfinite(opt.stride)) {
    throw ValidationError("stride must be positive and finite");
  }
  if (opt.step < 0.0 || !std::isfinite(opt.step)) {
    throw ValidationError("step must be positive and finite");
  }
  const double max_step =
      bound > 0.0 ? kStabilityFactor / bound : opt.horizon;
  double requested = opt.step == 0.0 ? max_step : opt.step;
  if (requested > max_step * (1.0 + 1e-12)) {
    throw StepTooLargeError(requested, max_step);
  }
  requested = std::min(requested, opt.horizon);
  TimeGrid grid;
  grid.horizon = opt.horizon;
  const double samples = opt.horizon / opt.stride;
  const double whole = std::round(samples);
  if (whole >= 1.0 && std::abs(samples - whole) <= 1e-9 * samples) {
    // Stride divides the horizon: put an integer number of steps in each
    // stride so samples land on multiples of it.
    grid.sample_every = static_cast<std::size_t>(
        std::ceil(opt.stride / requested * (1.0 - 1e-12)));
    grid.steps = grid.sample_every * static_cast<std::size_t>(whole);
  } else {
    grid.steps = static_cast<std::size_t>(
        std::ceil(opt.horizon / requested * (1.0 - 1e-12)));
    grid.steps = std::max<std::size_t>(grid.steps, 1);
    grid.sample_every = static_cast<std::size_t>(std::max(
        1.0, std::round(opt.stride / (opt.horizon / grid.steps))));
  }
  grid.step = opt.horizon / static_cast<double>(grid.steps);
  return grid;
}

/// One classical RK4 step for an autonomous linear-space ODE y' = f(y).
template <class State, class Rhs>
State rk4_step(const State &y, double h, Rhs &&f) {
  const State k1 = f(y);
  const State k2 = f(State(y + (0.5 * h) * k1));
  const State k3 = f(State(y + (0.5 * h) * k2));
  const State k4 = f(State(y + h * k3));
  return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

/// March `y` across the grid, calling record(k, t, y) at sample points
/// (including k = 0). `finite(y)` guards against divergence at samples.
template <class State, class Rhs, class Record, class Finite>
State march(State y, const TimeGrid &grid, Rhs &&f, Record &&record,
            Finite &&finite) {
  record(std::size_t{0}, 0.0, y);
  for (std::size_t k = 1; k <= grid.steps; ++k) {
    y = rk4_step(y, grid.step, f);
    if (k % grid.sample_every == 0 || k == grid.steps) {
      if (!finite(y)) {
        throw DivergenceError("state became non-finite at t = " +
                              std::to_string(grid.time_at(k)));
      }
      record(k, grid.time_at(k), y);
    }
  }
  return y;
}

} // namespace qsync
