#include "otlimits/wasserstein.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "otlimits/lp.hpp"

namespace otl {

Matrix power_cost(const GroundSpace& space, double p) {
  if (!(p >= 1.0) || !std::isfinite(p)) throw ValidationError("Wasserstein exponent p must be >= 1");
  if (p == 1.0) return space.dist();
  return space.dist().array().pow(p).matrix();
}

double wasserstein_p(const GroundSpace& space, double p, const AtomicMeasure& a, const AtomicMeasure& b) {
  if (a.size() != space.size() || b.size() != space.size()) {
    throw ValidationError("measure size does not match the ground space");
  }
  const TransportPlan plan = solve_transportation(power_cost(space, p), a, b);
  return std::pow(std::max(plan.value, 0.0), 1.0 / p);
}

double w1_primal(const GroundSpace& space, const SignedMeasure& lambda) {
  return wasserstein_p(space, 1.0, lambda.pos(), lambda.neg());
}

DualPotential w1_dual(const GroundSpace& space, const SignedMeasure& lambda) {
  const std::size_t m = space.size();
  if (lambda.size() != m) throw ValidationError("signed measure size does not match the ground space");
  const Matrix& D = space.dist();
  const Vector diff = lambda.difference();
  const auto n = static_cast<Eigen::Index>(m);

  DualPotential out;
  out.phi = Vector::Zero(n);
  if (m == 1) return out;

  // φ(0) = 0 and φ(i) = ψ(i) − D(0,i) with ψ >= 0. The triangle inequality
  // makes every right-hand side nonnegative, so ψ = 0 is a feasible start.
  const Eigen::Index vars = n - 1;
  const Eigen::Index rows = vars * vars;  // (i,j) pairs over 1..m−1 plus the j = 0 bounds
  lp::Problem p;
  p.A_ub = Matrix::Zero(rows, vars);
  p.b_ub.resize(rows);
  Eigen::Index r = 0;
  for (Eigen::Index i = 1; i < n; ++i) {
    for (Eigen::Index j = 1; j < n; ++j) {
      if (i == j) continue;
      p.A_ub(r, i - 1) = 1.0;
      p.A_ub(r, j - 1) = -1.0;
      p.b_ub(r) = D(i, j) + D(0, i) - D(0, j);
      ++r;
    }
    // φ(i) − φ(0) <= D(i,0)
    p.A_ub(r, i - 1) = 1.0;
    p.b_ub(r) = 2.0 * D(0, i);
    ++r;
  }
  p.b_ub = p.b_ub.cwiseMax(0.0);  // round-off from the triangle inequality
  p.cost = -diff.tail(vars);

  const lp::Solution s = lp::solve(p);
  if (s.status != lp::Status::Optimal) {
    throw SolverError(std::string("W1 dual: LP finished with status '") + lp::status_name(s.status) + "'");
  }
  for (Eigen::Index i = 1; i < n; ++i) out.phi(i) = s.x(i - 1) - D(0, i);
  out.value = out.phi.dot(diff);
  return out;
}

double duality_gap(const GroundSpace& space, const SignedMeasure& lambda) {
  return std::abs(w1_primal(space, lambda) - w1_dual(space, lambda).value);
}

double lipschitz_violation(const GroundSpace& space, const Vector& phi) {
  const Matrix& D = space.dist();
  double worst = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < D.rows(); ++i) {
    for (Eigen::Index j = 0; j < D.cols(); ++j) {
      if (i != j) worst = std::max(worst, phi(i) - phi(j) - D(i, j));
    }
  }
  return D.rows() > 1 ? worst : 0.0;
}

}  // namespace otl
