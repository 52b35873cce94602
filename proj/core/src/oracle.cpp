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

#include "iagm/oracle.hpp"

#include <cmath>
#include <stdexcept>
#include <type_traits>

namespace iagm {
namespace {

double radius_draw(NoiseRadius mode, double nominal, RngStream& rng) {
  if (nominal == 0.0) return 0.0;
  return mode == NoiseRadius::Uniform ? nominal * rng.uniform() : nominal;
}

Vector minibatch_gradient(const Problem& problem, const Vector& x, std::size_t m, RngStream& rng) {
  if (!problem.finite_sum) {
    throw std::invalid_argument("mini-batch oracle requires a finite-sum problem");
  }
  const std::size_t count = problem.finite_sum->count;
  if (m < 1 || m > count) throw std::invalid_argument("mini-batch size must lie in [1, M]");
  if (m == count) return problem.grad(x);
  Vector g = Vector::Zero(problem.dim);
  for (std::size_t j = 0; j < m; ++j) g += problem.finite_sum->component_grad(rng.below(count), x);
  return g / static_cast<double>(m);
}

}  // namespace

void validate(const GradientOracle& oracle) {
  std::visit(
      [](const auto& o) {
        using T = std::decay_t<decltype(o)>;
        if constexpr (std::is_same_v<T, oracle::Absolute>) {
          if (!(o.delta >= 0.0) || !std::isfinite(o.delta)) {
            throw std::invalid_argument("absolute oracle: delta must be finite and >= 0");
          }
        } else if constexpr (std::is_same_v<T, oracle::Relative>) {
          if (!(o.alpha >= 0.0 && o.alpha <= 1.0)) {
            throw std::invalid_argument("relative oracle: alpha must lie in [0, 1]");
          }
        } else if constexpr (std::is_same_v<T, oracle::Stochastic>) {
          if (!(o.delta >= 0.0) || !std::isfinite(o.delta)) {
            throw std::invalid_argument("stochastic oracle: delta must be finite and >= 0");
          }
        } else if constexpr (std::is_same_v<T, oracle::MiniBatch>) {
          if (o.batch < 1) throw std::invalid_argument("mini-batch oracle: batch must be >= 1");
        } else if constexpr (std::is_same_v<T, oracle::FiniteDifference>) {
          if (!(o.h > 0.0)) throw std::invalid_argument("finite differences: h must be positive");
          if (!(o.delta_f >= 0.0)) throw std::invalid_argument("finite differences: delta_f < 0");
        } else if constexpr (std::is_same_v<T, oracle::Bias>) {
          if (!o.offset.allFinite()) throw std::invalid_argument("bias oracle: non-finite offset");
        }
      },
      oracle);
}

Vector sphere_noise(RngStream& rng, int dim, double magnitude) {
  if (dim < 1) throw std::invalid_argument("sphere_noise: dim must be >= 1");
  if (!(magnitude >= 0.0)) throw std::invalid_argument("sphere_noise: magnitude must be >= 0");
  if (magnitude == 0.0) return Vector::Zero(dim);
  Vector v(dim);
  double norm = 0.0;
  do {
    for (int i = 0; i < dim; ++i) v[i] = rng.normal();
    norm = v.norm();
  } while (norm == 0.0);
  return (magnitude / norm) * v;
}

GradientSample sample_gradient(const GradientOracle& oracle, const Problem& problem,
                               const Vector& x, RngStream& rng, bool need_error) {
  require_dim(x, problem.dim, "oracle");
  return std::visit(
      [&](const auto& o) -> GradientSample {
        using T = std::decay_t<decltype(o)>;
        if constexpr (std::is_same_v<T, oracle::Exact>) {
          return {problem.grad(x), 0.0};
        } else if constexpr (std::is_same_v<T, oracle::Absolute>) {
          const double r = radius_draw(o.radius, o.delta, rng);
          return {problem.grad(x) + sphere_noise(rng, problem.dim, r), r};
        } else if constexpr (std::is_same_v<T, oracle::Relative>) {
          const Vector g = problem.grad(x);
          const double r = radius_draw(o.radius, o.alpha * g.norm(), rng);
          return {g + sphere_noise(rng, problem.dim, r), r};
        } else if constexpr (std::is_same_v<T, oracle::Stochastic>) {
          const double r = o.delta == 0.0 ? 0.0 : o.delta * rng.uniform();
          return {problem.grad(x) + sphere_noise(rng, problem.dim, r), r};
        } else if constexpr (std::is_same_v<T, oracle::MiniBatch>) {
          GradientSample s{minibatch_gradient(problem, x, o.batch, rng), std::nullopt};
          if (need_error) s.error = (s.grad - problem.grad(x)).norm();
          return s;
        } else if constexpr (std::is_same_v<T, oracle::FiniteDifference>) {
          GradientSample s{finite_difference_gradient(problem, x, o.h, o.delta_f, rng),
                           std::nullopt};
          if (need_error) s.error = (s.grad - problem.grad(x)).norm();
          return s;
        } else {
          return {problem.grad(x) + o.offset, o.offset.norm()};
        }
      },
      oracle);
}

Vector oracle_gradient(const GradientOracle& oracle, const Problem& problem, const Vector& x,
                       RngStream& rng) {
  return sample_gradient(oracle, problem, x, rng, false).grad;
}

Vector finite_difference_gradient(const Problem& problem, const Vector& x, double h,
                                  double delta_f, RngStream& rng) {
  if (!(h > 0.0)) throw std::invalid_argument("finite_difference_gradient: h must be positive");
  require_dim(x, problem.dim, "finite_difference_gradient");
  auto noisy = [&](const Vector& p) {
    const double f = problem.value(p);
    return delta_f > 0.0 ? f + rng.uniform(-delta_f, delta_f) : f;
  };
  Vector g(problem.dim);
  Vector p = x;
  for (int i = 0; i < problem.dim; ++i) {
    p[i] = x[i] + h;
    const double fp = noisy(p);
    p[i] = x[i] - h;
    const double fm = noisy(p);
    p[i] = x[i];
    g[i] = (fp - fm) / (2.0 * h);
  }
  return g;
}

double minibatch_variance_estimate(const Problem& problem, const Vector& x, std::size_t m,
                                   int trials, RngStream& rng) {
  if (m < 1) throw std::invalid_argument("minibatch_variance_estimate: m must be >= 1");
  if (trials < 1) throw std::invalid_argument("minibatch_variance_estimate: trials must be >= 1");
  const Vector exact = problem.grad(x);
  double sum = 0.0;
  for (int t = 0; t < trials; ++t) {
    sum += (minibatch_gradient(problem, x, m, rng) - exact).squaredNorm();
  }
  return sum / trials;
}

std::optional<double> noise_bound(const GradientOracle& oracle) {
  if (std::holds_alternative<oracle::Exact>(oracle)) return 0.0;
  if (const auto* a = std::get_if<oracle::Absolute>(&oracle)) return a->delta;
  if (const auto* s = std::get_if<oracle::Stochastic>(&oracle)) return s->delta;
  if (const auto* b = std::get_if<oracle::Bias>(&oracle)) return b->offset.norm();
  return std::nullopt;
}

double observed_value(const GradientOracle& oracle, const Problem& problem, const Vector& x,
                      RngStream& rng) {
  const double f = evaluate(problem, x).total;
  const double df = value_noise(oracle);
  return df > 0.0 ? f + rng.uniform(-df, df) : f;
}

double value_noise(const GradientOracle& oracle) {
  if (const auto* fd = std::get_if<oracle::FiniteDifference>(&oracle)) return fd->delta_f;
  return 0.0;
}

}  // namespace iagm
