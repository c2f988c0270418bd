#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "otlimits/wasserstein.hpp"

using namespace otl;

TEST_SUITE("wasserstein") {

TEST_CASE("point masses") {
  const GroundSpace s = build_interval(5);
  for (double p : {1.0, 1.5, 2.0, 4.0}) {
    CHECK(wasserstein_p(s, p, dirac(s, 0), dirac(s, 4)) == doctest::Approx(1.0));
  }
  const GroundSpace t = build_torus_1d(9);
  for (std::size_t i = 0; i < 9; ++i) {
    for (std::size_t j = 0; j < 9; ++j) {
      CHECK(w1_primal(t, SignedMeasure(dirac(t, i), dirac(t, j))) == doctest::Approx(t.distance(i, j)));
    }
  }
}

TEST_CASE("split mass meets at the midpoint") {
  const GroundSpace s = build_interval(3);
  const AtomicMeasure a((Vector(3) << 0.5, 0.0, 0.5).finished());
  for (double p : {1.0, 2.0, 3.0}) CHECK(wasserstein_p(s, p, a, dirac(s, 1)) == doctest::Approx(0.5));
}

TEST_CASE("small supports agree with vertex enumeration") {
  std::mt19937_64 rng(31);
  const GroundSpace s = build_torus_1d(8);
  for (int rep = 0; rep < 30; ++rep) {
    const Vector a = oracle::random_unit_measure(rng, 8, 4), b = oracle::random_unit_measure(rng, 8, 4);
    for (double p : {1.0, 2.0}) {
      const double ref = std::pow(oracle::transport_by_vertices(power_cost(s, p), a, b), 1.0 / p);
      CHECK(wasserstein_p(s, p, AtomicMeasure(a), AtomicMeasure(b)) == doctest::Approx(ref).epsilon(1e-10));
    }
  }
}

TEST_CASE("1-D W1 equals the CDF formula") {
  std::mt19937_64 rng(37);
  for (int rep = 0; rep < 20; ++rep) {
    const Vector a = oracle::random_unit_measure(rng, 17, 6), b = oracle::random_unit_measure(rng, 17, 6);
    const SignedMeasure lam(AtomicMeasure{a}, AtomicMeasure{b});
    CHECK(w1_primal(build_interval(17), lam) == doctest::Approx(oracle::w1_interval_cdf(a, b)).epsilon(1e-10));
    CHECK(w1_dual(build_torus_1d(17), lam).value == doctest::Approx(oracle::w1_torus_cdf(a, b)).epsilon(1e-10));
  }
}

TEST_CASE("dual potential") {
  const GroundSpace s = build_interval(5);
  const DualPotential d = w1_dual(s, SignedMeasure(dirac(s, 0), dirac(s, 4)));
  CHECK(d.value == doctest::Approx(1.0));
  CHECK(d.phi(0) == 0.0);
  CHECK(lipschitz_violation(s, d.phi) <= 1e-12);
  // -x is optimal here and so is anything reaching -1 at the far end
  CHECK(d.phi(4) == doctest::Approx(-1.0));
  CHECK(duality_gap(s, SignedMeasure(dirac(s, 0), dirac(s, 4))) <= 1e-12);
}

TEST_CASE("zero lambda") {
  const GroundSpace s = build_torus_1d(6);
  const SignedMeasure z(uniform(s), uniform(s));
  CHECK(w1_primal(s, z) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(w1_dual(s, z).value == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(duality_gap(s, z) <= 1e-12);
}

TEST_CASE("dual matches primal on random small instances") {
  std::mt19937_64 rng(41);
  for (int rep = 0; rep < 30; ++rep) {
    std::uniform_int_distribution<std::size_t> size(2, 6);
    const std::size_t m = size(rng);
    const GroundSpace s = metric_closure(oracle::random_connected_graph(rng, m, 4));
    const SignedMeasure lam(AtomicMeasure(oracle::random_unit_measure(rng, m, m)),
                            AtomicMeasure(oracle::random_unit_measure(rng, m, m)));
    const DualPotential d = w1_dual(s, lam);
    CHECK(d.value == doctest::Approx(w1_primal(s, lam)).epsilon(1e-9));
    CHECK(d.value == doctest::Approx(d.phi.dot(lam.difference())).epsilon(1e-9));
    CHECK(lipschitz_violation(s, d.phi) <= 1e-9);
  }
}

TEST_CASE("W1 depends only on the difference") {
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> U(0.0, 2.0);
  for (int rep = 0; rep < 20; ++rep) {
    std::uniform_int_distribution<std::size_t> size(2, 20);
    const std::size_t m = size(rng);
    const GroundSpace s = rep % 2 ? build_torus_1d(m) : metric_closure(oracle::random_connected_graph(rng, m, m));
    const SignedMeasure lam = oracle::random_lambda(rng, m, 1, m > 2 ? 2 : 1);
    Vector sigma(static_cast<Eigen::Index>(m));
    for (auto& x : sigma) x = U(rng);
    const SignedMeasure pinned(AtomicMeasure(lam.pos().weights() + sigma), AtomicMeasure(lam.neg().weights() + sigma));
    CHECK(std::abs(w1_primal(s, pinned) - w1_primal(s, lam)) <= 1e-9);
  }
}

TEST_CASE("Wp is nondecreasing in p") {
  std::mt19937_64 rng(47);
  const GroundSpace s = build_torus_1d(10);
  for (int rep = 0; rep < 20; ++rep) {
    const AtomicMeasure a(oracle::random_unit_measure(rng, 10, 5)), b(oracle::random_unit_measure(rng, 10, 5));
    double prev = 0.0;
    for (double p : {1.0, 1.5, 2.0, 3.0, 5.0}) {
      const double w = wasserstein_p(s, p, a, b);
      CHECK(w >= prev - 1e-10);
      prev = w;
    }
  }
}

TEST_CASE("Wp is a metric on probability measures") {
  std::mt19937_64 rng(53);
  for (int rep = 0; rep < 20; ++rep) {
    std::uniform_int_distribution<std::size_t> size(2, 12);
    const std::size_t m = size(rng);
    const GroundSpace s = build_interval(m);
    const AtomicMeasure a(oracle::random_unit_measure(rng, m, m)), b(oracle::random_unit_measure(rng, m, m)),
        c(oracle::random_unit_measure(rng, m, m));
    for (double p : {1.0, 2.0}) {
      const double ab = wasserstein_p(s, p, a, b), ba = wasserstein_p(s, p, b, a);
      CHECK(ab == doctest::Approx(ba).epsilon(1e-10));
      CHECK(wasserstein_p(s, p, a, c) <= ab + wasserstein_p(s, p, b, c) + 1e-10);
      CHECK(wasserstein_p(s, p, a, a) == doctest::Approx(0.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("input checks") {
  const GroundSpace s = build_interval(3);
  CHECK_THROWS_AS(wasserstein_p(s, 0.5, dirac(s, 0), dirac(s, 1)), ValidationError);
  CHECK_THROWS_AS(wasserstein_p(s, 1.0, dirac(s, 0), dirac(build_interval(4), 1)), ValidationError);
}

}
