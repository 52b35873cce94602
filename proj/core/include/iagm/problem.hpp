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
#include <functional>
#include <optional>
#include <string>

#include "iagm/feasible_set.hpp"
#include "iagm/vector.hpp"

namespace iagm {

/// Convex, prox-friendly term r of a composite objective L(x) + r(x).
struct CompositeTerm {
  std::function<double(const Vector&)> value;
  /// prox(v, t) = argmin_u { t * r(u) + 0.5 * ||u - v||^2 }, restricted to the feasible set.
  std::function<Vector(const Vector&, double)> prox;
};

/// Finite-sum structure f = (1/M) sum_i f_i, exposed to the mini-batch oracle.
struct FiniteSum {
  std::size_t count = 0;
  std::function<Vector(std::size_t, const Vector&)> component_grad;
};

/// Smooth (optionally composite) objective with its curvature constants.
///
/// `value` and `grad` describe the smooth part only. `gap`, when set, computes
/// the total excess F(x) - F* without cancellation (quadratics provide it).
struct Problem {
  std::string name;
  int dim = 0;
  std::function<double(const Vector&)> value;
  std::function<Vector(const Vector&)> grad;
  double lips = 1.0;
  double mu = 0.0;
  std::optional<double> known_min;
  std::optional<Vector> known_argmin;
  std::optional<CompositeTerm> composite;
  FeasibleSet feasible = Unconstrained{};
  std::optional<FiniteSum> finite_sum;
  std::function<double(const Vector&)> gap;
};

struct Evaluation {
  double smooth = 0.0;
  double composite = 0.0;
  double total = 0.0;
};

/// Evaluates f(x) and, when present, r(x). Throws on dimension mismatch; a
/// non-finite `total` is returned as is and means divergence to callers.
Evaluation evaluate(const Problem& problem, const Vector& x);

/// F(x) - F* when the minimum is known (uses `gap` if provided).
std::optional<double> objective_gap(const Problem& problem, const Vector& x);

/// Checks structural invariants (dim, mu <= lips, callbacks present, unified
/// Q/r rule). Throws std::invalid_argument on violation.
void validate(const Problem& problem);

}  // namespace iagm
