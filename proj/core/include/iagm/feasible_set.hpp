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

#include <variant>

#include "iagm/vector.hpp"

namespace iagm {

struct Unconstrained {};

struct Ball {
  Vector center;
  double radius = 1.0;
};

struct Box {
  Vector lo;
  Vector hi;
};

/// The feasible set is encoded in the composite term's prox; projection is the identity.
struct ViaProx {};

using FeasibleSet = std::variant<Unconstrained, Ball, Box, ViaProx>;

/// Euclidean projection onto `set`.
///
/// Throws std::invalid_argument for a Box with lo > hi in some coordinate, a
/// non-positive ball radius, or mismatched dimensions.
Vector project(const FeasibleSet& set, const Vector& v);

/// True when projection is not the identity (Ball or Box).
bool has_projection(const FeasibleSet& set);

}  // namespace iagm
