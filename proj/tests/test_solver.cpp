#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "otlimits/lp.hpp"
#include "otlimits/solver.hpp"
#include "otlimits/wasserstein.hpp"

using namespace otl;

namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index k = 0;
  for (double x : xs) v(k++) = x;
  return v;
}

Matrix random_cost(std::mt19937_64& rng, Eigen::Index m) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  Matrix c(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) c(i, j) = U(rng);
  }
  return c;
}

// Certificate check: dual feasibility plus equal objective values.
void check_certificate(const Matrix& cost, const TransportPlan& t, const Vector& a, const Vector& b) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < cost.rows(); ++i) {
    for (Eigen::Index j = 0; j < cost.cols(); ++j) {
      worst = std::max(worst, t.col_potential(j) - t.row_potential(i) - cost(i, j));
    }
  }
  CHECK(worst <= 1e-9);
  CHECK(t.col_potential.dot(b) - t.row_potential.dot(a) == doctest::Approx(t.value).epsilon(1e-9));
}

}  // namespace

TEST_SUITE("solver") {

TEST_CASE("lp kernel on a textbook problem") {
  // max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18  →  36 at (2, 6)
  lp::Problem p;
  p.A_eq = Matrix(0, 2);
  p.b_eq = Vector(0);
  p.A_ub = Matrix(3, 2);
  p.A_ub << 1, 0, 0, 2, 3, 2;
  p.b_ub = vec({4, 12, 18});
  p.cost = vec({-3, -5});
  const lp::Solution s = lp::solve(p);
  REQUIRE(s.status == lp::Status::Optimal);
  CHECK(s.value == doctest::Approx(-36.0));
  CHECK(s.x(0) == doctest::Approx(2.0));
  CHECK(s.x(1) == doctest::Approx(6.0));
}

TEST_CASE("lp kernel reports infeasible and unbounded") {
  lp::Problem inf;
  inf.A_eq = Matrix::Ones(1, 1);
  inf.b_eq = vec({-1});
  inf.A_ub = Matrix(0, 1);
  inf.b_ub = Vector(0);
  inf.cost = vec({1});
  CHECK(lp::solve(inf).status == lp::Status::Infeasible);

  lp::Problem unb;
  unb.A_eq = Matrix(0, 1);
  unb.b_eq = Vector(0);
  unb.A_ub = Matrix(0, 1);
  unb.b_ub = Vector(0);
  unb.cost = vec({-1});
  CHECK(lp::solve(unb).status == lp::Status::Unbounded);
}

TEST_CASE("transportation examples") {
  Matrix c(2, 2);
  c << 0, 1, 1, 0;
  const TransportPlan t = solve_transportation(c, AtomicMeasure(vec({1, 0})), AtomicMeasure(vec({0, 1})));
  CHECK(t.value == doctest::Approx(1.0));
  CHECK(t.plan(0, 1) == doctest::Approx(1.0));

  std::mt19937_64 rng(3);
  const Matrix sym = [&] {
    Matrix r = random_cost(rng, 5);
    r = r + r.transpose();
    r.diagonal().setZero();
    return r;
  }();
  const Vector a = oracle::random_unit_measure(rng, 5, 5);
  const TransportPlan same = solve_transportation(sym, AtomicMeasure(a), AtomicMeasure(a));
  CHECK(same.value == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(plan_residual(sym, same, AtomicMeasure(a), AtomicMeasure(a)) <= 1e-9);
}

TEST_CASE("transportation rejects bad input") {
  Matrix c = Matrix::Zero(2, 2);
  CHECK_THROWS_AS(solve_transportation(c, AtomicMeasure(vec({1, 0})), AtomicMeasure(vec({0, 2}))),
                  ValidationError);
  c(0, 1) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(solve_transportation(c, AtomicMeasure(vec({1, 0})), AtomicMeasure(vec({0, 1}))),
                  ValidationError);
}

TEST_CASE("uniform 4x4 transport matches the best permutation") {
  std::mt19937_64 rng(5);
  const AtomicMeasure q(Vector::Constant(4, 0.25));
  for (int rep = 0; rep < 30; ++rep) {
    const Matrix c = random_cost(rng, 4);
    const TransportPlan t = solve_transportation(c, q, q);
    CHECK(t.value == doctest::Approx(0.25 * oracle::min_permutation_cost(c)).epsilon(1e-10));
    check_certificate(c, t, q.weights(), q.weights());
  }
}

TEST_CASE("transport matches vertex enumeration on small supports") {
  std::mt19937_64 rng(9);
  for (int rep = 0; rep < 40; ++rep) {
    const Matrix c = random_cost(rng, 8);
    const Vector a = oracle::random_unit_measure(rng, 8, 4);
    const Vector b = oracle::random_unit_measure(rng, 8, 3);
    const TransportPlan t = solve_transportation(c, AtomicMeasure(a), AtomicMeasure(b));
    CHECK(t.value == doctest::Approx(oracle::transport_by_vertices(c, a, b)).epsilon(1e-10));
    CHECK(plan_residual(c, t, AtomicMeasure(a), AtomicMeasure(b)) <= 1e-9);
    CHECK(t.plan.minCoeff() >= 0.0);
  }
}

TEST_CASE("strong duality on random instances") {
  std::mt19937_64 rng(13);
  for (int rep = 0; rep < 20; ++rep) {
    std::uniform_int_distribution<Eigen::Index> size(2, 50);
    const Eigen::Index m = size(rng);
    const Matrix c = random_cost(rng, m);
    const Vector a = oracle::random_unit_measure(rng, static_cast<std::size_t>(m), static_cast<std::size_t>(m));
    const Vector b = oracle::random_unit_measure(rng, static_cast<std::size_t>(m), static_cast<std::size_t>(m));
    check_certificate(c, solve_transportation(c, AtomicMeasure(a), AtomicMeasure(b)), a, b);
  }
}

TEST_CASE("restricted optimal plans stay optimal") {
  std::mt19937_64 rng(17);
  for (int rep = 0; rep < 10; ++rep) {
    std::uniform_int_distribution<Eigen::Index> size(3, 10);
    const Eigen::Index m = size(rng);
    const Matrix c = random_cost(rng, m);
    const Vector a = oracle::random_unit_measure(rng, static_cast<std::size_t>(m), static_cast<std::size_t>(m));
    const Vector b = oracle::random_unit_measure(rng, static_cast<std::size_t>(m), static_cast<std::size_t>(m));
    const TransportPlan t = solve_transportation(c, AtomicMeasure(a), AtomicMeasure(b));
    // keep a random subset of cells
    Matrix sub = t.plan;
    std::bernoulli_distribution keep(0.5);
    for (Eigen::Index i = 0; i < m; ++i) {
      for (Eigen::Index j = 0; j < m; ++j) {
        if (!keep(rng)) sub(i, j) = 0.0;
      }
    }
    const double mass = sub.sum();
    if (mass < 1e-9) continue;
    const Vector ra = sub.rowwise().sum(), cb = sub.colwise().sum().transpose();
    const TransportPlan resolved = solve_transportation(c, AtomicMeasure(ra), AtomicMeasure(cb));
    CHECK(resolved.value == doctest::Approx((c.array() * sub.array()).sum()).epsilon(1e-9));
  }
}

TEST_CASE("circulation examples") {
  Matrix zero_diag = Matrix::Constant(4, 4, 2.0);
  zero_diag.diagonal().setZero();
  CHECK(solve_circulation(zero_diag).plan.value == doctest::Approx(0.0).epsilon(1e-12));

  const CirculationSolution c = solve_circulation(Matrix::Constant(3, 3, 0.7));
  CHECK(c.plan.value == doctest::Approx(0.7));
  CHECK(c.mu.mass() == doctest::Approx(1.0));
}

TEST_CASE("circulation equals the minimum mean cycle") {
  std::mt19937_64 rng(19);
  for (int rep = 0; rep < 25; ++rep) {
    std::uniform_int_distribution<Eigen::Index> size(2, 9);
    const Eigen::Index m = size(rng);
    const Matrix c = random_cost(rng, m).array() - 0.5;
    const CirculationSolution s = solve_circulation(c);
    CHECK(s.plan.value == doctest::Approx(oracle::min_mean_cycle(c)).epsilon(1e-10));
    const Vector rows = s.plan.plan.rowwise().sum(), cols = s.plan.plan.colwise().sum().transpose();
    CHECK((rows - cols).lpNorm<Eigen::Infinity>() <= 1e-9);
    CHECK((rows - s.mu.weights()).lpNorm<Eigen::Infinity>() <= 1e-9);
  }
}

TEST_CASE("joint problem on three points") {
  const GroundSpace s = build_interval(3);
  const Matrix cost = power_cost(s, 2.0);
  const SignedMeasure lambda(dirac(s, 0), dirac(s, 2));
  const JointSolution j = solve_joint_min_mu(cost, lambda, 0.5);
  CHECK(j.value == doctest::Approx(0.25).epsilon(1e-12));
  const double grid = oracle::joint_by_simplex_grid(cost, lambda.pos().weights(), lambda.neg().weights(), 0.5, 60);
  CHECK(j.value <= grid + 1e-12);
  CHECK(grid == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(j.mu.mass() == doctest::Approx(1.0));
  const AtomicMeasure a = shifted(j.mu, 0.5, lambda.pos()), b = shifted(j.mu, 0.5, lambda.neg());
  CHECK(plan_residual(cost, j.plan, a, b) <= 1e-9);
}

TEST_CASE("joint problem with zero lambda") {
  const GroundSpace s = build_torus_1d(6);
  const SignedMeasure zero(dirac(s, 2), dirac(s, 2));
  CHECK(solve_joint_min_mu(s.dist(), zero, 0.25).value == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("joint W1 value is homogeneous in eps") {
  std::mt19937_64 rng(23);
  const GroundSpace s = build_torus_1d(12);
  for (int rep = 0; rep < 5; ++rep) {
    const SignedMeasure lambda = oracle::random_lambda(rng, 12, 2, 2);
    const double base = solve_joint_min_mu(s.dist(), lambda, 0.2).value;
    for (double c : {0.5, 2.0}) {
      CHECK(solve_joint_min_mu(s.dist(), lambda, 0.2 * c).value == doctest::Approx(c * base).epsilon(1e-9));
    }
  }
}

TEST_CASE("joint minimum is below every supplied candidate") {
  std::mt19937_64 rng(29);
  const GroundSpace s = build_torus_1d(10);
  const Matrix cost = power_cost(s, 2.0);
  const SignedMeasure lambda = oracle::random_lambda(rng, 10, 2, 2);
  const double eps = 0.25;
  const double best = solve_joint_min_mu(cost, lambda, eps).value;
  for (int rep = 0; rep < 100; ++rep) {
    std::uniform_int_distribution<std::size_t> support(1, 10);
    const AtomicMeasure mu(oracle::random_unit_measure(rng, 10, support(rng)));
    const double v = solve_transportation(cost, shifted(mu, eps, lambda.pos()), shifted(mu, eps, lambda.neg())).value;
    CHECK(best <= v + 1e-9);
  }
}

TEST_CASE("joint problem input checks") {
  const GroundSpace s = build_torus_1d(4);
  const SignedMeasure lambda(dirac(s, 0), dirac(s, 1));
  CHECK_THROWS_AS(solve_joint_min_mu(s.dist(), lambda, 0.0), ValidationError);
  CHECK_THROWS_AS(solve_joint_min_mu(Matrix::Zero(3, 3), lambda, 0.5), ValidationError);
}

}
