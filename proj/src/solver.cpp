#include "otlimits/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

#include "otlimits/lp.hpp"

namespace otl {

namespace {

void require_finite_square(const Matrix& cost, std::size_t m) {
  if (cost.rows() != static_cast<Eigen::Index>(m) || cost.cols() != static_cast<Eigen::Index>(m)) {
    throw ValidationError("cost matrix must be " + std::to_string(m) + "x" + std::to_string(m));
  }
  if (cost.hasNaN()) throw ValidationError("cost matrix contains NaN");
  if (!cost.allFinite()) throw ValidationError("cost matrix contains infinite entries");
}

lp::Solution run(const lp::Problem& problem, const char* what) {
  lp::Solution s = lp::solve(problem);
  if (s.status != lp::Status::Optimal) {
    throw SolverError(std::string(what) + ": LP finished with status '" + lp::status_name(s.status) +
                      "' after " + std::to_string(s.pivots) + " pivots");
  }
  return s;
}

std::vector<Eigen::Index> support(const AtomicMeasure& a) {
  std::vector<Eigen::Index> idx;
  for (Eigen::Index i = 0; i < a.weights().size(); ++i) {
    if (a.weights()(i) > 0.0) idx.push_back(i);
  }
  return idx;
}

}  // namespace

TransportPlan solve_transportation(const Matrix& cost, const AtomicMeasure& a, const AtomicMeasure& b) {
  const std::size_t m = a.size();
  if (b.size() != m) throw ValidationError("marginal sizes differ");
  require_finite_square(cost, m);
  const double gap = a.mass() - b.mass();
  if (std::abs(gap) > kMarginalTolerance) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "unbalanced marginals: mass gap %.6g", gap);
    throw ValidationError(buf);
  }

  const auto n = static_cast<Eigen::Index>(m);
  TransportPlan out;
  out.plan = Matrix::Zero(n, n);
  out.row_potential = Vector::Zero(n);
  out.col_potential = Vector::Zero(n);

  const auto rows = support(a);
  const auto cols = support(b);
  if (rows.empty() || cols.empty()) return out;

  // Only pairs inside supp(a) × supp(b) can carry mass.
  const auto ra = static_cast<Eigen::Index>(rows.size());
  const auto rb = static_cast<Eigen::Index>(cols.size());
  lp::Problem p;
  p.cost.resize(ra * rb);
  p.A_eq = Matrix::Zero(ra + rb, ra * rb);
  p.b_eq.resize(ra + rb);
  for (Eigen::Index i = 0; i < ra; ++i) {
    for (Eigen::Index j = 0; j < rb; ++j) {
      const Eigen::Index k = i * rb + j;
      p.cost(k) = cost(rows[static_cast<std::size_t>(i)], cols[static_cast<std::size_t>(j)]);
      p.A_eq(i, k) = 1.0;
      p.A_eq(ra + j, k) = 1.0;
    }
  }
  for (Eigen::Index i = 0; i < ra; ++i) p.b_eq(i) = a.weights()(rows[static_cast<std::size_t>(i)]);
  for (Eigen::Index j = 0; j < rb; ++j) p.b_eq(ra + j) = b.weights()(cols[static_cast<std::size_t>(j)]);

  const lp::Solution s = run(p, "transportation");
  for (Eigen::Index i = 0; i < ra; ++i) {
    for (Eigen::Index j = 0; j < rb; ++j) {
      out.plan(rows[static_cast<std::size_t>(i)], cols[static_cast<std::size_t>(j)]) = s.x(i * rb + j);
    }
  }
  out.value = (cost.array() * out.plan.array()).sum();

  // Dual (u, v) with u_i + v_j <= c_ij becomes ψ = −u, φ = v.
  std::vector<bool> row_in(m, false), col_in(m, false);
  for (Eigen::Index i = 0; i < ra; ++i) {
    out.row_potential(rows[static_cast<std::size_t>(i)]) = -s.dual_eq(i);
    row_in[static_cast<std::size_t>(rows[static_cast<std::size_t>(i)])] = true;
  }
  for (Eigen::Index j = 0; j < rb; ++j) {
    out.col_potential(cols[static_cast<std::size_t>(j)]) = s.dual_eq(ra + j);
    col_in[static_cast<std::size_t>(cols[static_cast<std::size_t>(j)])] = true;
  }
  // Extend the certificate to zero-mass points without changing its value.
  for (Eigen::Index j = 0; j < n; ++j) {
    if (col_in[static_cast<std::size_t>(j)]) continue;
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index r : rows) best = std::min(best, cost(r, j) + out.row_potential(r));
    out.col_potential(j) = best;
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (row_in[static_cast<std::size_t>(i)]) continue;
    double best = -std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < n; ++j) best = std::max(best, out.col_potential(j) - cost(i, j));
    out.row_potential(i) = best;
  }
  return out;
}

CirculationSolution solve_circulation(const Matrix& cost) {
  const auto n = cost.rows();
  if (n == 0) throw ValidationError("cost matrix is empty");
  require_finite_square(cost, static_cast<std::size_t>(n));

  lp::Problem p;
  p.cost.resize(n * n);
  p.A_eq = Matrix::Zero(n + 1, n * n);
  p.b_eq = Vector::Zero(n + 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const Eigen::Index k = i * n + j;
      p.cost(k) = cost(i, j);
      p.A_eq(i, k) += 1.0;  // outflow of i
      p.A_eq(j, k) -= 1.0;  // inflow of j
      p.A_eq(n, k) = 1.0;
    }
  }
  p.b_eq(n) = 1.0;

  const lp::Solution s = run(p, "circulation");
  CirculationSolution out;
  out.plan.plan = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) out.plan.plan(i, j) = s.x(i * n + j);
  }
  out.plan.value = (cost.array() * out.plan.plan.array()).sum();
  out.plan.row_potential = Vector::Zero(n);
  out.plan.col_potential = Vector::Zero(n);
  out.mu = AtomicMeasure::clamped(out.plan.plan.rowwise().sum());
  return out;
}

JointSolution solve_joint_min_mu(const Matrix& cost, const SignedMeasure& lambda, double eps) {
  const std::size_t m = lambda.size();
  require_finite_square(cost, m);
  if (!(eps > 0.0) || !std::isfinite(eps)) throw ValidationError("eps must be a positive finite number");

  const auto n = static_cast<Eigen::Index>(m);
  const Eigen::Index vars = n * n + n;
  lp::Problem p;
  p.cost = Vector::Zero(vars);
  p.A_eq = Matrix::Zero(2 * n + 1, vars);
  p.b_eq = Vector::Zero(2 * n + 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const Eigen::Index k = i * n + j;
      p.cost(k) = cost(i, j);
      p.A_eq(i, k) = 1.0;
      p.A_eq(n + j, k) = 1.0;
    }
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index mu = n * n + i;
    p.A_eq(i, mu) = -1.0;
    p.A_eq(n + i, mu) = -1.0;
    p.A_eq(2 * n, mu) = 1.0;
    p.b_eq(i) = eps * lambda.pos().weights()(i);
    p.b_eq(n + i) = eps * lambda.neg().weights()(i);
  }
  p.b_eq(2 * n) = 1.0;

  const lp::Solution s = run(p, "joint min-mu");
  JointSolution out;
  out.plan.plan = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) out.plan.plan(i, j) = s.x(i * n + j);
  }
  out.plan.value = (cost.array() * out.plan.plan.array()).sum();
  out.plan.row_potential = -s.dual_eq.head(n);
  out.plan.col_potential = s.dual_eq.segment(n, n);
  out.mu = AtomicMeasure::clamped(s.x.tail(n));
  out.value = out.plan.value;
  return out;
}

double plan_residual(const Matrix& cost, const TransportPlan& plan, const AtomicMeasure& a,
                     const AtomicMeasure& b) {
  double r = 0.0;
  r = std::max(r, (plan.plan.rowwise().sum() - a.weights()).cwiseAbs().maxCoeff());
  r = std::max(r, (plan.plan.colwise().sum().transpose() - b.weights()).cwiseAbs().maxCoeff());
  r = std::max(r, std::max(0.0, -plan.plan.minCoeff()));
  r = std::max(r, std::abs((cost.array() * plan.plan.array()).sum() - plan.value));
  return r;
}

}  // namespace otl
