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

#include "iagm/testbed.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <type_traits>

#include "iagm/oracle.hpp"
#include "iagm/stm.hpp"

namespace iagm::testbed {
namespace {

constexpr double kSafety = 1e-6;

// (T v)_i = 2 v_i - v_{i-1} - v_{i+1} on the first k coordinates, with the
// last diagonal entry replaced by `last_diag`.
Vector chain_apply(const Vector& v, int k, double last_diag) {
  Vector out = Vector::Zero(v.size());
  for (int i = 0; i < k; ++i) {
    const double d = (i == k - 1) ? last_diag : 2.0;
    double s = d * v[i];
    if (i > 0) s -= v[i - 1];
    if (i + 1 < k) s -= v[i + 1];
    out[i] = s;
  }
  return out;
}

Problem centered_quadratic(std::string name, int dim, std::function<Vector(const Vector&)> hess,
                           double lips, double mu) {
  Problem p;
  p.name = std::move(name);
  p.dim = dim;
  p.value = [hess](const Vector& d) { return 0.5 * d.dot(hess(d)); };
  p.grad = hess;
  p.gap = p.value;
  p.lips = lips;
  p.mu = mu;
  p.known_min = 0.0;
  p.known_argmin = Vector::Zero(dim);
  return p;
}

double softplus(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

Vector strongly_convex_argmin(double c, double mu, int n) {
  Vector sub = Vector::Constant(std::max(n - 1, 0), -c);
  Vector diag = Vector::Constant(n, 2.0 * c + mu);
  diag[n - 1] = c + mu;
  Vector rhs = Vector::Zero(n);
  rhs[0] = c;
  return solve_tridiagonal(sub, diag, sub, rhs);
}

}  // namespace

Vector soft_threshold(const Vector& v, double t) {
  Vector out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double a = std::abs(v[i]) - t;
    out[i] = a > 0.0 ? std::copysign(a, v[i]) : 0.0;
  }
  return out;
}

Vector solve_tridiagonal(const Vector& sub, const Vector& diag, const Vector& super,
                         const Vector& rhs) {
  const Eigen::Index n = diag.size();
  if (n < 1 || rhs.size() != n || sub.size() != n - 1 || super.size() != n - 1) {
    throw std::invalid_argument("solve_tridiagonal: inconsistent sizes");
  }
  Vector c(n), d(n);
  double denom = diag[0];
  if (denom == 0.0) throw std::invalid_argument("solve_tridiagonal: zero pivot");
  c[0] = n > 1 ? super[0] / denom : 0.0;
  d[0] = rhs[0] / denom;
  for (Eigen::Index i = 1; i < n; ++i) {
    denom = diag[i] - sub[i - 1] * c[i - 1];
    if (denom == 0.0) throw std::invalid_argument("solve_tridiagonal: zero pivot");
    c[i] = i + 1 < n ? super[i] / denom : 0.0;
    d[i] = (rhs[i] - sub[i - 1] * d[i - 1]) / denom;
  }
  Vector x(n);
  x[n - 1] = d[n - 1];
  for (Eigen::Index i = n - 2; i >= 0; --i) x[i] = d[i] - c[i] * x[i + 1];
  return x;
}

double power_iteration(const std::function<Vector(const Vector&)>& apply, int dim, int max_iters,
                       double tol) {
  if (dim < 1) throw std::invalid_argument("power_iteration: dim must be >= 1");
  RngStream rng(0x9013ULL);
  Vector v(dim);
  for (int i = 0; i < dim; ++i) v[i] = rng.normal();
  v.normalize();
  double lambda = 0.0;
  for (int it = 0; it < max_iters; ++it) {
    Vector w = apply(v);
    const double next = v.dot(w);
    const double norm = w.norm();
    if (norm == 0.0) return 0.0;
    v = w / norm;
    if (it > 0 && std::abs(next - lambda) <= tol * std::abs(next)) return next;
    lambda = next;
  }
  return lambda;
}

Problem worst_case_convex(double L_f, int k, int n, Coordinates coords) {
  if (!(L_f > 0.0)) throw std::invalid_argument("worst_case_convex: L_f must be positive");
  if (k < 1 || k > n) throw std::invalid_argument("worst_case_convex: requires 1 <= k <= n");
  const double q = 0.25 * L_f;
  auto hess = [q, k](const Vector& v) -> Vector { return q * chain_apply(v, k, 2.0); };
  Vector xs = Vector::Zero(n);
  for (int i = 1; i <= k; ++i) xs[i - 1] = 1.0 - static_cast<double>(i) / (k + 1);
  if (coords == Coordinates::ErrorCentered) {
    return centered_quadratic("worst_case_convex(centered)", n, hess, L_f, 0.0);
  }
  Problem p;
  p.name = "worst_case_convex";
  p.dim = n;
  p.value = [L_f, k, n](const Vector& x) {
    require_dim(x, n, "worst_case_convex");
    double s = x[0] * x[0] + x[k - 1] * x[k - 1];
    for (int j = 0; j + 1 < k; ++j) {
      const double d = x[j] - x[j + 1];
      s += d * d;
    }
    return L_f / 8.0 * s - L_f / 4.0 * x[0];
  };
  p.grad = [hess, q](const Vector& x) -> Vector {
    Vector g = hess(x);
    g[0] -= q;
    return g;
  };
  p.lips = L_f;
  p.mu = 0.0;
  p.known_argmin = xs;
  p.known_min = -L_f / 8.0 * k / (k + 1.0);
  p.gap = [hess, xs](const Vector& x) {
    const Vector d = x - xs;
    return 0.5 * d.dot(hess(d));
  };
  return p;
}

Problem worst_case_strongly_convex(double mu, double chi, int n, Coordinates coords) {
  if (!(mu > 0.0)) throw std::invalid_argument("worst_case_strongly_convex: mu must be positive");
  if (!(chi > 1.0)) throw std::invalid_argument("worst_case_strongly_convex: chi must exceed 1");
  if (n < 1) throw std::invalid_argument("worst_case_strongly_convex: n must be >= 1");
  const double c = mu * (chi - 1.0) / 4.0;
  auto hess = [c, mu, n](const Vector& v) -> Vector {
    return c * chain_apply(v, n, 1.0) + mu * v;
  };
  const double lips = mu * chi;
  if (coords == Coordinates::ErrorCentered) {
    return centered_quadratic("worst_case_strongly_convex(centered)", n, hess, lips, mu);
  }
  const Vector xs = strongly_convex_argmin(c, mu, n);
  Problem p;
  p.name = "worst_case_strongly_convex";
  p.dim = n;
  p.value = [c, mu, n](const Vector& x) {
    require_dim(x, n, "worst_case_strongly_convex");
    double s = x[0] * x[0] - 2.0 * x[0];
    for (int j = 0; j + 1 < n; ++j) {
      const double d = x[j] - x[j + 1];
      s += d * d;
    }
    return 0.5 * c * s + 0.5 * mu * x.squaredNorm();
  };
  p.grad = [hess, c](const Vector& x) -> Vector {
    Vector g = hess(x);
    g[0] -= c;
    return g;
  };
  p.lips = lips;
  p.mu = mu;
  p.known_argmin = xs;
  p.known_min = -0.5 * c * xs[0];
  p.gap = [hess, xs](const Vector& x) {
    const Vector d = x - xs;
    return 0.5 * d.dot(hess(d));
  };
  return p;
}

Problem diagonal_quadratic(const Vector& lambdas) {
  if (lambdas.size() < 1) throw std::invalid_argument("diagonal_quadratic: empty spectrum");
  if ((lambdas.array() < 0.0).any() || !lambdas.allFinite()) {
    throw std::invalid_argument("diagonal_quadratic: eigenvalues must be finite and >= 0");
  }
  if (!(lambdas.maxCoeff() > 0.0)) throw std::invalid_argument("diagonal_quadratic: all zero");
  Problem p;
  p.name = "diagonal_quadratic";
  p.dim = static_cast<int>(lambdas.size());
  p.value = [lambdas](const Vector& x) { return 0.5 * (lambdas.array() * x.array().square()).sum(); };
  p.grad = [lambdas](const Vector& x) -> Vector { return lambdas.cwiseProduct(x); };
  p.gap = p.value;
  p.lips = lambdas.maxCoeff();
  p.mu = lambdas.minCoeff();
  p.known_min = 0.0;
  p.known_argmin = Vector::Zero(p.dim);
  return p;
}

Problem linear_system(const Matrix& A, const Vector& b) {
  if (A.rows() < 1 || A.rows() != A.cols()) throw std::invalid_argument("linear_system: A must be square");
  if (b.size() != A.rows()) throw std::invalid_argument("linear_system: dimension mismatch");
  const Matrix AtA = A.transpose() * A;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(AtA, Eigen::EigenvaluesOnly);
  const double lmax = eig.eigenvalues().maxCoeff();
  const double lmin = std::max(0.0, eig.eigenvalues().minCoeff());
  if (!(lmax > 0.0)) throw std::invalid_argument("linear_system: A is zero");
  Problem p;
  p.name = "linear_system";
  p.dim = static_cast<int>(A.cols());
  p.value = [A, b](const Vector& x) { return 0.5 * (A * x - b).squaredNorm(); };
  p.grad = [A, b](const Vector& x) -> Vector { return A.transpose() * (A * x - b); };
  p.gap = p.value;
  p.lips = lmax * (1.0 + kSafety);
  p.mu = lmin * (1.0 - kSafety);
  Eigen::FullPivLU<Matrix> lu(A);
  if (lu.isInvertible()) {
    p.known_argmin = lu.solve(b);
    p.known_min = 0.0;
  } else {
    p.gap = nullptr;
  }
  return p;
}

Problem logreg_l1(const Matrix& features, const Vector& labels, double lambda1) {
  if (features.rows() < 1 || features.cols() < 1) throw std::invalid_argument("logreg_l1: empty dataset");
  if (labels.size() != features.rows()) throw std::invalid_argument("logreg_l1: label count mismatch");
  for (Eigen::Index i = 0; i < labels.size(); ++i) {
    if (labels[i] != 0.0 && labels[i] != 1.0) throw std::invalid_argument("logreg_l1: labels must be 0/1");
  }
  if (!(lambda1 >= 0.0)) throw std::invalid_argument("logreg_l1: lambda1 must be >= 0");
  Eigen::SelfAdjointEigenSolver<Matrix> eig(features.transpose() * features, Eigen::EigenvaluesOnly);
  const double lmax = eig.eigenvalues().maxCoeff();
  if (!(lmax > 0.0)) throw std::invalid_argument("logreg_l1: features are zero");
  Problem p;
  p.name = "logreg_l1";
  p.dim = static_cast<int>(features.cols());
  p.value = [features, labels](const Vector& x) {
    const Vector z = features * x;
    double s = 0.0;
    for (Eigen::Index i = 0; i < z.size(); ++i) s += softplus(z[i]) - labels[i] * z[i];
    return s;
  };
  p.grad = [features, labels](const Vector& x) -> Vector {
    Vector z = features * x;
    for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = sigmoid(z[i]) - labels[i];
    return features.transpose() * z;
  };
  p.lips = 0.25 * lmax * (1.0 + kSafety);
  p.mu = 0.0;
  if (lambda1 > 0.0) {
    CompositeTerm r;
    r.value = [lambda1](const Vector& x) { return lambda1 * x.lpNorm<1>(); };
    r.prox = [lambda1](const Vector& v, double t) { return soft_threshold(v, t * lambda1); };
    p.composite = r;
  }
  return p;
}

Problem finite_sum(std::vector<Problem> components) {
  if (components.empty()) throw std::invalid_argument("finite_sum: no components");
  const int dim = components.front().dim;
  for (const auto& c : components) {
    if (c.dim != dim) throw std::invalid_argument("finite_sum: components differ in dimension");
    validate(c);
  }
  if (components.size() == 1) {
    Problem p = components.front();
    auto grad = p.grad;
    p.finite_sum = FiniteSum{1, [grad](std::size_t, const Vector& x) -> Vector { return grad(x); }};
    return p;
  }
  const double M = static_cast<double>(components.size());
  auto shared = std::make_shared<const std::vector<Problem>>(std::move(components));
  Problem p;
  p.name = "finite_sum";
  p.dim = dim;
  p.value = [shared, M](const Vector& x) {
    double s = 0.0;
    for (const auto& c : *shared) s += c.value(x);
    return s / M;
  };
  p.grad = [shared, M, dim](const Vector& x) -> Vector {
    Vector g = Vector::Zero(dim);
    for (const auto& c : *shared) g += c.grad(x);
    return g / M;
  };
  double lips = 0.0, mu = 0.0;
  for (const auto& c : *shared) {
    lips += c.lips;
    mu += c.mu;
  }
  p.lips = lips / M;
  p.mu = mu / M;
  p.finite_sum = FiniteSum{shared->size(), [shared](std::size_t i, const Vector& x) -> Vector {
                             return (*shared)[i].grad(x);
                           }};
  return p;
}

Problem anchored_quadratic_sum(const Matrix& centers) {
  if (centers.cols() < 1 || centers.rows() < 1) throw std::invalid_argument("anchored_quadratic_sum: no centers");
  std::vector<Problem> parts;
  const int dim = static_cast<int>(centers.rows());
  for (Eigen::Index i = 0; i < centers.cols(); ++i) {
    const Vector c = centers.col(i);
    Problem q;
    q.name = "anchor";
    q.dim = dim;
    q.value = [c](const Vector& x) { return 0.5 * (x - c).squaredNorm(); };
    q.grad = [c](const Vector& x) -> Vector { return x - c; };
    q.lips = 1.0;
    q.mu = 1.0;
    q.known_argmin = c;
    q.known_min = 0.0;
    parts.push_back(std::move(q));
  }
  Problem p = finite_sum(std::move(parts));
  const Vector mean = centers.rowwise().mean();
  p.name = "anchored_quadratic_sum";
  p.known_argmin = mean;
  p.known_min = 0.5 * (centers.colwise() - mean).squaredNorm() / static_cast<double>(centers.cols());
  p.gap = [mean](const Vector& x) { return 0.5 * (x - mean).squaredNorm(); };
  return p;
}

Problem build(const ProblemSpec& spec, Coordinates coords) {
  return std::visit(
      [coords](const auto& s) -> Problem {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, spec::WorstCaseConvex>) {
          return worst_case_convex(s.L_f, s.k, s.n, coords);
        } else if constexpr (std::is_same_v<T, spec::WorstCaseStronglyConvex>) {
          return worst_case_strongly_convex(s.mu, s.chi, s.n, coords);
        } else if constexpr (std::is_same_v<T, spec::DiagonalQuadratic>) {
          return diagonal_quadratic(s.lambdas);
        } else if constexpr (std::is_same_v<T, spec::LinearSystem>) {
          return linear_system(s.A, s.b);
        } else if constexpr (std::is_same_v<T, spec::LogRegL1>) {
          return logreg_l1(s.features, s.labels, s.lambda1);
        } else {
          return finite_sum(s.components);
        }
      },
      spec);
}

Instance instance(const ProblemSpec& spec, Coordinates coords) {
  Instance out;
  const Problem original = build(spec, Coordinates::Original);
  const Vector zero = Vector::Zero(original.dim);
  const std::optional<Vector>& xs = original.known_argmin;
  out.R = xs ? xs->norm() : 0.0;
  const bool centered_supported = std::holds_alternative<spec::WorstCaseConvex>(spec) ||
                                  std::holds_alternative<spec::WorstCaseStronglyConvex>(spec);
  if (coords == Coordinates::ErrorCentered && centered_supported) {
    out.problem = build(spec, coords);
    out.x_start = -*xs;
  } else {
    out.problem = original;
    out.x_start = zero;
  }
  return out;
}

Dataset read_delimited_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dataset " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::replace_if(line.begin(), line.end(), [](char ch) { return ch == ',' || ch == ';' || ch == '\t' || ch == '\r'; }, ' ');
    std::istringstream fields(line);
    std::vector<double> row;
    std::string tok;
    while (fields >> tok) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(tok, &used));
        if (used != tok.size()) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        throw std::runtime_error("dataset " + path.string() + ": bad field '" + tok + "' on line " +
                                 std::to_string(line_no));
      }
    }
    if (row.size() < 2) throw std::runtime_error("dataset: need features and a label on line " + std::to_string(line_no));
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw std::runtime_error("dataset: inconsistent column count on line " + std::to_string(line_no));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error("dataset " + path.string() + " is empty");
  Dataset d;
  const auto cols = static_cast<Eigen::Index>(rows.front().size());
  d.features.resize(static_cast<Eigen::Index>(rows.size()), cols - 1);
  d.labels.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (Eigen::Index j = 0; j + 1 < cols; ++j) d.features(static_cast<Eigen::Index>(i), j) = rows[i][j];
    d.labels[static_cast<Eigen::Index>(i)] = rows[i].back();
  }
  return d;
}

Dataset synthetic_logreg_data(int samples, int features, RngStream& rng) {
  if (samples < 1 || features < 1) throw std::invalid_argument("synthetic_logreg_data: empty shape");
  Vector w = Vector::Zero(features);
  for (int j = 0; j < features; j += 2) w[j] = rng.normal();
  Dataset d;
  d.features.resize(samples, features);
  d.labels.resize(samples);
  for (int i = 0; i < samples; ++i) {
    for (int j = 0; j < features; ++j) d.features(i, j) = rng.normal();
    const double p = sigmoid(d.features.row(i).dot(w));
    d.labels[i] = rng.uniform() < p ? 1.0 : 0.0;
  }
  return d;
}

Problem with_reference_solution(Problem problem, const Vector& x_start, long iters) {
  require_dim(x_start, problem.dim, "with_reference_solution");
  problem.known_min.reset();
  problem.known_argmin.reset();
  problem.gap = nullptr;
  const GradientOracle exact = oracle::Exact{};
  RngStream rng(0);
  auto F = [&](const Vector& x) { return evaluate(problem, x).total; };
  Vector x = problem.composite ? x_start : project(problem.feasible, x_start);
  double best = F(x);
  constexpr long kBlock = 500;
  for (long done = 0; done < iters; done += kBlock) {
    const StmParams params = make_stm_params(problem, 1, std::min(kBlock, iters - done), stop::None{}, 0.0);
    const Trace t = run(problem, exact, params, x, rng);
    if (t.status == RunStatus::Diverged) break;
    const double v = F(t.final_point);
    if (v < best) {
      best = v;
      x = t.final_point;
    }
  }
  const double step = 1.0 / problem.lips;
  for (long i = 0; i < iters / 4; ++i) {
    const Vector v = x - step * problem.grad(x);
    const Vector next = problem.composite ? problem.composite->prox(v, step) : project(problem.feasible, v);
    const double fv = F(next);
    if (!(fv < best)) break;
    best = fv;
    x = next;
  }
  problem.known_argmin = x;
  problem.known_min = best;
  return problem;
}

}  // namespace iagm::testbed
