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

#include "iagm/oracle.hpp"
#include "iagm/problem.hpp"
#include "iagm/rng.hpp"
#include "iagm/trace.hpp"
#include "iagm/vector.hpp"

namespace iagm {

/// x_k = x_{k-1} - step * g(x_{k-1}).
Trace gd_run(const Problem& problem, const GradientOracle& oracle, double step,
             const Vector& x_start, long max_iters, RngStream& rng);

/// Triple Momentum parameters in the standard parameterization with
/// rho = 1 - 1 / sqrt(chi):
///   step = (1 + rho) / L_f, beta = rho^2 / (2 - rho),
///   gamma = rho^2 / ((1 + rho)(2 - rho)), delta_tm = rho^2 / (1 - rho^2).
struct TmmParams {
  double rho = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  double delta_tm = 0.0;
  double step = 0.0;
};

TmmParams tmm_params(double chi, double L_f);

/// xi_{k+1} = (1 + beta) xi_k - beta xi_{k-1} - step g(y_k),
/// y_k = (1 + gamma) xi_k - gamma xi_{k-1}, x_k = (1 + delta_tm) xi_k - delta_tm xi_{k-1}.
/// The trace reports x_k. Requires mu > 0 and Q = R^n.
Trace tmm_run(const Problem& problem, const GradientOracle& oracle, const Vector& x_start,
              long max_iters, RngStream& rng);

/// (sqrt(chi) + 1) / (4 chi - 3 sqrt(chi) + 1), chi > 1.
double tmm_alpha_threshold(double chi);

}  // namespace iagm
