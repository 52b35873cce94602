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


#include "iagm/tools/threshold.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>

#include "iagm/baselines.hpp"
#include "iagm/oracle.hpp"
#include "iagm/rng.hpp"
#include "iagm/stm.hpp"
#include "iagm/stm2.hpp"

namespace iagm::tools {
namespace {

std::string bracket_message(bool diverges, double lo, double hi) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "no threshold in [%g, %g]: both ends %s", lo, hi,
                diverges ? "diverge" : "converge");
  return buf;
}

Trace run_solver(const Problem& problem, const Vector& x_start, ThresholdSolver solver,
                 double alpha, long budget, RngStream& rng) {
  const GradientOracle oracle = oracle::Relative{alpha};
  switch (solver) {
    case ThresholdSolver::Stm:
      return run(problem, oracle, make_stm_params(problem, 1, budget), x_start, rng);
    case ThresholdSolver::Stm2:
      return run2(problem, oracle, x_start, budget, rng);
    case ThresholdSolver::Tmm:
      return tmm_run(problem, oracle, x_start, budget, rng);
  }
  throw std::logic_error("unhandled solver");
}

bool diverged(const Trace& trace) {
  if (trace.status == RunStatus::Diverged) return true;
  if (trace.empty() || !trace.records.front().f_gap) {
    throw std::invalid_argument("alpha_star_search: problem must report objective gaps");
  }
  const double initial = *trace.records.front().f_gap;
  double best = std::numeric_limits<double>::infinity();
  for (const auto& r : trace.records) best = std::min(best, *r.f_gap);
  return best > initial;
}

}  // namespace

ThresholdSolver parse_solver(const std::string& name) {
  if (name == "stm") return ThresholdSolver::Stm;
  if (name == "stm2") return ThresholdSolver::Stm2;
  if (name == "tmm") return ThresholdSolver::Tmm;
  throw std::invalid_argument("unknown solver '" + name + "'");
}

const char* to_string(ThresholdSolver solver) {
  switch (solver) {
    case ThresholdSolver::Stm: return "stm";
    case ThresholdSolver::Stm2: return "stm2";
    case ThresholdSolver::Tmm: return "tmm";
  }
  return "?";
}

NoThresholdInRange::NoThresholdInRange(bool diverges, double lo, double hi)
    : std::runtime_error(bracket_message(diverges, lo, hi)), diverges_(diverges) {}

DivergenceVote classify_alpha(const Problem& problem, const Vector& x_start,
                              ThresholdSolver solver, double alpha, long budget_iters,
                              const std::vector<std::uint64_t>& seeds) {
  if (seeds.empty()) throw std::invalid_argument("classify_alpha: seeds must be non-empty");
  if (budget_iters < 1) throw std::invalid_argument("classify_alpha: budget_iters must be >= 1");
  DivergenceVote vote;
  for (const auto seed : seeds) {
    RngStream rng(seed);
    vote.diverged += diverged(run_solver(problem, x_start, solver, alpha, budget_iters, rng));
    ++vote.total;
  }
  return vote;
}

double alpha_star_search(const Problem& problem, const Vector& x_start, ThresholdSolver solver,
                         double alpha_lo, double alpha_hi, long budget_iters,
                         const std::vector<std::uint64_t>& seeds) {
  if (!(alpha_lo < alpha_hi)) throw std::invalid_argument("alpha_star_search: need lo < hi");
  const bool lo_div = classify_alpha(problem, x_start, solver, alpha_lo, budget_iters, seeds).majority();
  const bool hi_div = classify_alpha(problem, x_start, solver, alpha_hi, budget_iters, seeds).majority();
  if (lo_div == hi_div) throw NoThresholdInRange(lo_div, alpha_lo, alpha_hi);
  if (lo_div) throw std::invalid_argument(
      "alpha_star_search: diverges at lo but converges at hi");
  double lo = alpha_lo, hi = alpha_hi;
  for (int round = 0; round < kBisectionRounds; ++round) {
    const double mid = 0.5 * (lo + hi);
    if (classify_alpha(problem, x_start, solver, mid, budget_iters, seeds).majority()) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace iagm::tools
