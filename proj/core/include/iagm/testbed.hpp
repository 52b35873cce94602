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

#include <filesystem>
#include <functional>
#include <variant>
#include <vector>

#include "iagm/problem.hpp"
#include "iagm/rng.hpp"
#include "iagm/vector.hpp"

namespace iagm::testbed {

/// Original coordinates, or error coordinates d = x - x* in which a quadratic
/// becomes 0.5 d'Hd. The latter keeps f - f* accurate far below the double
/// rounding floor of f(x) - f(x*), which matters for long linear-rate runs.
enum class Coordinates { Original, ErrorCentered };

namespace spec {

/// L_f/8 (x_1^2 + sum_{j=1}^{k-1} (x_j - x_{j+1})^2 + x_k^2) - L_f/4 x_1, in R^n.
struct WorstCaseConvex {
  double L_f = 1.0;
  int k = 50;
  int n = 100;
};

/// mu(chi-1)/8 (x_1^2 + sum_{j=1}^{n-1} (x_j - x_{j+1})^2 - 2 x_1) + mu/2 ||x||^2.
struct WorstCaseStronglyConvex {
  double mu = 0.1;
  double chi = 100.0;
  int n = 100;
};

struct DiagonalQuadratic {
  Vector lambdas;
};

/// 0.5 ||Ax - b||^2.
struct LinearSystem {
  Matrix A;
  Vector b;
};

/// Logistic negative log-likelihood plus lambda1 ||x||_1.
struct LogRegL1 {
  Matrix features;  ///< one sample per row
  Vector labels;    ///< 0 / 1
  double lambda1 = 0.0;
};

struct FiniteSum {
  std::vector<Problem> components;
};

}  // namespace spec

using ProblemSpec = std::variant<spec::WorstCaseConvex, spec::WorstCaseStronglyConvex,
                                 spec::DiagonalQuadratic, spec::LinearSystem, spec::LogRegL1,
                                 spec::FiniteSum>;

Problem worst_case_convex(double L_f, int k, int n, Coordinates coords = Coordinates::Original);
Problem worst_case_strongly_convex(double mu, double chi, int n,
                                   Coordinates coords = Coordinates::Original);
Problem diagonal_quadratic(const Vector& lambdas);
Problem linear_system(const Matrix& A, const Vector& b);
Problem logreg_l1(const Matrix& features, const Vector& labels, double lambda1);
Problem finite_sum(std::vector<Problem> components);

/// (1/M) sum_i 0.5 ||x - c_i||^2 over the columns c_i of `centers`; the
/// component gradients have x-independent spread, so the mini-batch variance
/// is the same everywhere.
Problem anchored_quadratic_sum(const Matrix& centers);

Problem build(const ProblemSpec& spec, Coordinates coords = Coordinates::Original);

/// A problem together with the standard starting point (origin of the
/// original coordinates) and R = ||x_start - x*||.
struct Instance {
  Problem problem;
  Vector x_start;
  double R = 0.0;
};

Instance instance(const ProblemSpec& spec, Coordinates coords = Coordinates::Original);

/// sign(v) max(|v| - t, 0), coordinate-wise.
Vector soft_threshold(const Vector& v, double t);

/// Solves a tridiagonal system (Thomas algorithm). `sub` and `super` have n-1 entries.
Vector solve_tridiagonal(const Vector& sub, const Vector& diag, const Vector& super,
                         const Vector& rhs);

/// Largest eigenvalue of a symmetric PSD operator by power iteration.
double power_iteration(const std::function<Vector(const Vector&)>& apply, int dim, int max_iters,
                       double tol);

struct Dataset {
  Matrix features;
  Vector labels;
};

/// Plain-text delimited data (comma, semicolon, tab or space), one sample per
/// line, label in the last column. Lines starting with '#' are skipped.
Dataset read_delimited_dataset(const std::filesystem::path& path);

/// Gaussian features and labels drawn from a logistic model with a sparse
/// ground-truth weight vector.
Dataset synthetic_logreg_data(int samples, int features, RngStream& rng);

/// High-accuracy minimizer for problems without a closed-form solution
/// (restarted accelerated proximal steps, then proximal-gradient polishing).
/// Returns the problem with known_argmin / known_min filled in.
Problem with_reference_solution(Problem problem, const Vector& x_start, long iters = 20000);

}  // namespace iagm::testbed
