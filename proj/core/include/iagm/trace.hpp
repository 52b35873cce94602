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

#include <initializer_list>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "iagm/problem.hpp"
#include "iagm/vector.hpp"

namespace iagm {

enum class RunStatus { Completed, Stopped, Diverged };

const char* to_string(RunStatus status);

struct TraceRecord {
  long k = 0;
  double f_value = 0.0;
  std::optional<double> f_gap;
  double grad_norm = 0.0;
  std::optional<double> dist_to_opt;
  std::optional<double> A_k;
  std::optional<double> alpha_k;
  double r_tilde_k = 0.0;
  std::optional<double> bound;
  bool stopped = false;
};

/// Per-iteration history of one solver run.
///
/// When the problem's minimizer is unknown, distances are measured to the
/// best iterate seen so far and `reference_exact` is false; bound overlays
/// must not be drawn for such traces.
struct Trace {
  std::string solver;
  std::vector<TraceRecord> records;
  RunStatus status = RunStatus::Completed;
  bool reference_exact = false;
  Vector final_point;

  bool empty() const { return records.empty(); }
  const TraceRecord& back() const { return records.back(); }
};

/// Columns: iter,f_gap,grad_norm,dist_to_opt,A_k,alpha_k,r_tilde_k,bound,stopped.
/// Missing quantities are empty fields; reals use %.17g.
void write_csv(const Trace& trace, std::ostream& out);
std::string to_csv(const Trace& trace);

inline constexpr const char* kCsvHeader =
    "iter,f_gap,grad_norm,dist_to_opt,A_k,alpha_k,r_tilde_k,bound,stopped";

/// Distance bookkeeping shared by the solvers: tracks the running maximum
/// distance of all iterate families to x* (or to the best-seen iterate).
class DistanceTracker {
 public:
  explicit DistanceTracker(const Problem& problem);

  /// Feeds the iterates produced at one iteration; `primary` is the point the
  /// record reports (x_k for STM, y_k for STM2), `value` its objective.
  void observe(const Vector& primary, double value, std::initializer_list<const Vector*> others);

  bool reference_exact() const { return exact_; }
  double r_tilde() const { return r_tilde_; }
  std::optional<double> dist_primary() const { return dist_primary_; }

 private:
  bool exact_ = false;
  Vector reference_;
  double best_value_ = 0.0;
  bool have_best_ = false;
  double r_tilde_ = 0.0;
  std::optional<double> dist_primary_;
};

}  // namespace iagm
