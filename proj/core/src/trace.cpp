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

#include "iagm/trace.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <sstream>

namespace iagm {
namespace {

void put_real(std::ostream& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out << buf;
}

void put_optional(std::ostream& out, const std::optional<double>& v) {
  if (v) put_real(out, *v);
}

}  // namespace

const char* to_string(RunStatus status) {
  switch (status) {
    case RunStatus::Completed: return "completed";
    case RunStatus::Stopped: return "stopped";
    case RunStatus::Diverged: return "diverged";
  }
  return "unknown";
}

void write_csv(const Trace& trace, std::ostream& out) {
  out << kCsvHeader << '\n';
  for (const auto& r : trace.records) {
    out << r.k << ',';
    put_optional(out, r.f_gap);
    out << ',';
    put_real(out, r.grad_norm);
    out << ',';
    put_optional(out, r.dist_to_opt);
    out << ',';
    put_optional(out, r.A_k);
    out << ',';
    put_optional(out, r.alpha_k);
    out << ',';
    put_real(out, r.r_tilde_k);
    out << ',';
    put_optional(out, r.bound);
    out << ',' << (r.stopped ? 1 : 0) << '\n';
  }
}

std::string to_csv(const Trace& trace) {
  std::ostringstream out;
  write_csv(trace, out);
  return out.str();
}

DistanceTracker::DistanceTracker(const Problem& problem) {
  if (problem.known_argmin) {
    exact_ = true;
    reference_ = *problem.known_argmin;
  }
}

void DistanceTracker::observe(const Vector& primary, double value,
                              std::initializer_list<const Vector*> others) {
  if (!exact_ && (!have_best_ || value < best_value_)) {
    best_value_ = value;
    reference_ = primary;
    have_best_ = true;
  }
  const double d = (primary - reference_).norm();
  dist_primary_ = d;
  r_tilde_ = std::max(r_tilde_, d);
  for (const Vector* v : others) r_tilde_ = std::max(r_tilde_, (*v - reference_).norm());
}

}  // namespace iagm
