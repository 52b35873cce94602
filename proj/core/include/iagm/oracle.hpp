// Copyright 2026 The iagm Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <optional>
#include <variant>

#include "iagm/problem.hpp"
#include "iagm/rng.hpp"
#include "iagm/vector.hpp"

namespace iagm {

/// How the radius of additive noise is drawn.
enum class NoiseRadius {
  Sphere,   ///< exactly the nominal radius (worst case of the error bound)
  Uniform,  ///< nominal radius times u, u ~ U[0, 1]
};

namespace oracle {

struct Exact {};

/// ||g - grad f(x)|| <= delta.
struct Absolute {
  double delta = 0.0;
  NoiseRadius radius = NoiseRadius::Sphere;
};

/// ||g - grad f(x)|| <= alpha * ||grad f(x)||, alpha in [0, 1].
struct Relative {
  double alpha = 0.0;
  NoiseRadius radius = NoiseRadius::Sphere;
};

/// Zero-mean noise with E||g - grad f(x)||^2 <= delta^2 (radius u * delta).
struct Stochastic {
  double delta = 0.0;
};

/// Average of `batch` component gradients sampled with replacement.
struct MiniBatch {
  std::size_t batch = 1;
};

/// Central differences of f + U[-delta_f, delta_f].
struct FiniteDifference {
  double h = 1e-4;
  double delta_f = 0.0;
};

/// Deterministic error: g = grad f(x) + offset.
struct Bias {
  Vector offset;
};

}  // namespace oracle

using GradientOracle = std::variant<oracle::Exact, oracle::Absolute, oracle::Relative,
                                    oracle::Stochastic, oracle::MiniBatch,
                                    oracle::FiniteDifference, oracle::Bias>;

/// Throws std::invalid_argument for out-of-range parameters.
void validate(const GradientOracle& oracle);

/// Uniform direction on the unit sphere (normalized Gaussian) scaled to `magnitude`.
/// A zero magnitude returns the zero vector without consuming randomness.
Vector sphere_noise(RngStream& rng, int dim, double magnitude);

struct GradientSample {
  Vector grad;
  /// ||grad - grad f(x)||, when it is known without extra work (or was requested).
  std::optional<double> error;
};

/// Inexact gradient at x for the given noise model (see oracle:: types).
Vector oracle_gradient(const GradientOracle& oracle, const Problem& problem, const Vector& x,
                       RngStream& rng);

/// Same as oracle_gradient, also reporting the realized error. With
/// `need_error`, oracles that do not know their error compute the exact gradient.
GradientSample sample_gradient(const GradientOracle& oracle, const Problem& problem,
                               const Vector& x, RngStream& rng, bool need_error);

Vector finite_difference_gradient(const Problem& problem, const Vector& x, double h,
                                  double delta_f, RngStream& rng);

/// Monte-Carlo estimate of E||g - grad f(x)||^2 for the size-m mini-batch oracle.
double minibatch_variance_estimate(const Problem& problem, const Vector& x, std::size_t m,
                                   int trials, RngStream& rng);

/// Uniform bound on the gradient error when the model has one (delta of the
/// absolute model, or the stochastic standard deviation bound).
std::optional<double> noise_bound(const GradientOracle& oracle);

/// Objective bound used by value-based stop rules: f itself, or f plus
/// value noise in finite-difference mode.
double observed_value(const GradientOracle& oracle, const Problem& problem, const Vector& x,
                      RngStream& rng);

/// Half-width of the value noise (delta_f) in finite-difference mode, else 0.
double value_noise(const GradientOracle& oracle);

}  // namespace iagm
