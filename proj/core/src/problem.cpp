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

#include "iagm/problem.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace iagm {

Evaluation evaluate(const Problem& problem, const Vector& x) {
  require_dim(x, problem.dim, "evaluate");
  Evaluation e;
  e.smooth = problem.value(x);
  if (problem.composite) e.composite = problem.composite->value(x);
  e.total = e.smooth + e.composite;
  return e;
}

std::optional<double> objective_gap(const Problem& problem, const Vector& x) {
  if (problem.gap) {
    require_dim(x, problem.dim, "objective_gap");
    return problem.gap(x);
  }
  if (!problem.known_min) return std::nullopt;
  return evaluate(problem, x).total - *problem.known_min;
}

void validate(const Problem& problem) {
  if (problem.dim < 1) throw std::invalid_argument("problem: dim must be positive");
  if (!problem.value || !problem.grad) throw std::invalid_argument("problem: value and grad required");
  if (!(problem.lips > 0.0) || !std::isfinite(problem.lips)) {
    throw std::invalid_argument("problem: lips must be positive and finite");
  }
  if (!(problem.mu >= 0.0)) throw std::invalid_argument("problem: mu must be non-negative");
  if (problem.mu > problem.lips) throw std::invalid_argument("problem: mu exceeds lips");
  if (problem.composite) {
    if (!problem.composite->value || !problem.composite->prox) {
      throw std::invalid_argument("problem: composite term needs value and prox");
    }
    if (has_projection(problem.feasible)) {
      throw std::invalid_argument(
          "problem: with a composite term the feasible set must be encoded in its prox (ViaProx)");
    }
  } else if (std::holds_alternative<ViaProx>(problem.feasible)) {
    throw std::invalid_argument("problem: ViaProx requires a composite term");
  }
  if (problem.finite_sum && (problem.finite_sum->count == 0 || !problem.finite_sum->component_grad)) {
    throw std::invalid_argument("problem: finite-sum structure needs components");
  }
  if (problem.known_argmin) {
    require_dim(*problem.known_argmin, problem.dim, "problem known_argmin");
    if (std::holds_alternative<Unconstrained>(problem.feasible) && !problem.composite) {
      constexpr double kTolOpt = 1e-7;
      const double scale = std::max(1.0, problem.lips * problem.known_argmin->norm());
      if (problem.grad(*problem.known_argmin).norm() > kTolOpt * scale) {
        throw std::invalid_argument("problem: known_argmin is not stationary");
      }
    }
  }
}

}  // namespace iagm
