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

#include "iagm/feasible_set.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace iagm {
namespace {

Vector project_ball(const Ball& ball, const Vector& v) {
  require_dim(ball.center, v.size(), "project(Ball)");
  if (!(ball.radius > 0.0)) throw std::invalid_argument("project(Ball): radius must be positive");
  const Vector d = v - ball.center;
  const double norm = d.norm();
  if (norm <= ball.radius) return v;
  return ball.center + (ball.radius / norm) * d;
}

Vector project_box(const Box& box, const Vector& v) {
  require_dim(box.lo, v.size(), "project(Box) lo");
  require_dim(box.hi, v.size(), "project(Box) hi");
  Vector out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (box.lo[i] > box.hi[i]) throw std::invalid_argument("project(Box): lo > hi");
    out[i] = std::clamp(v[i], box.lo[i], box.hi[i]);
  }
  return out;
}

}  // namespace

Vector project(const FeasibleSet& set, const Vector& v) {
  if (const auto* ball = std::get_if<Ball>(&set)) return project_ball(*ball, v);
  if (const auto* box = std::get_if<Box>(&set)) return project_box(*box, v);
  return v;
}

bool has_projection(const FeasibleSet& set) {
  return std::holds_alternative<Ball>(set) || std::holds_alternative<Box>(set);
}

}  // namespace iagm
