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

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "iagm/problem.hpp"
#include "iagm/vector.hpp"

namespace iagm::tools {

enum class ThresholdSolver { Stm, Stm2, Tmm };

ThresholdSolver parse_solver(const std::string& name);
const char* to_string(ThresholdSolver solver);

/// Thrown when both ends of the bracket receive the same verdict.
class NoThresholdInRange : public std::runtime_error {
 public:
  NoThresholdInRange(bool diverges, double lo, double hi);
  bool diverges() const { return diverges_; }

 private:
  bool diverges_;
};

struct DivergenceVote {
  int diverged = 0;
  int total = 0;
  bool majority() const { return 2 * diverged > total; }
};

/// One relative-noise run per seed. A seed votes "diverged" if the run hit the
/// divergence guard or its best gap after `budget_iters` is still above the initial gap.
DivergenceVote classify_alpha(const Problem& problem, const Vector& x_start,
                              ThresholdSolver solver, double alpha, long budget_iters,
                              const std::vector<std::uint64_t>& seeds);

inline constexpr int kBisectionRounds = 12;

/// Bisection on the relative noise level; returns the midpoint of the last bracket.
double alpha_star_search(const Problem& problem, const Vector& x_start, ThresholdSolver solver,
                         double alpha_lo, double alpha_hi, long budget_iters,
                         const std::vector<std::uint64_t>& seeds);

}  // namespace iagm::tools
