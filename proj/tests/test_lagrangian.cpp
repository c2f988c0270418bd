#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "otlimits/lagrangian.hpp"
#include "otlimits/wasserstein.hpp"

using namespace otl;

namespace {

CostModel cosine_model(std::size_t m, double a = 1.0) {
  const GroundSpace s = build_torus_1d(m);
  return CostModel::mechanical(s, catalogue_potential(s, "cosine", a));
}

double max_abs(const Matrix& x) { return x.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_SUITE("lagrangian") {

TEST_CASE("homogeneous closed form") {
  const GroundSpace s = build_interval(3);
  CHECK(c_t_homogeneous(s, 2.0, 1.0).C(0, 1) == doctest::Approx(0.25));
  CHECK(c_t_homogeneous(s, 2.0, 2.0).C(0, 2) == doctest::Approx(0.5));
  CHECK(c_t_homogeneous(s, 3.0, 1.0).C(1, 1) == 0.0);
  CHECK_THROWS_AS(c_t_homogeneous(s, 2.0, 0.0), ValidationError);
  CHECK_THROWS_AS(CostModel::homogeneous(s, 1.0), ValidationError);
}

TEST_CASE("Lagrangian and Hamiltonian") {
  const GroundSpace s = build_torus_1d(8);
  const CostModel h = CostModel::homogeneous(s, 3.0);
  CHECK(h.lagrangian(0, 2.0) == doctest::Approx(4.0));
  CHECK(h.q() == doctest::Approx(1.5));
  CHECK(h.hamiltonian(0, 2.0) == doctest::Approx(std::pow(1.5, -1.5) * std::pow(2.0, 1.5)));
  // Legendre: h(ξ) = sup_v ξv − l(v), checked on a fine v grid
  for (double xi : {-1.3, 0.4, 2.0}) {
    double sup = -1e300;
    for (int k = -40000; k <= 40000; ++k) {
      const double v = k * 1e-4;
      sup = std::max(sup, xi * v - h.lagrangian(0, std::abs(v)));
    }
    CHECK(sup == doctest::Approx(h.hamiltonian(0, xi)).epsilon(1e-6));
  }
  const CostModel mech = cosine_model(8);
  CHECK(mech.hamiltonian(0, 2.0) == doctest::Approx(3.0));
  CHECK(mech.lagrangian(0, 2.0) == doctest::Approx(1.0));
}

TEST_CASE("catalogue") {
  const GroundSpace s = build_torus_1d(64);
  const Vector w = catalogue_potential(s, "two_well", 1.0);
  CHECK(w(0) == doctest::Approx(1.25));
  CHECK(w(32) == doctest::Approx(0.75));
  CHECK(w.maxCoeff() == doctest::Approx(1.25));
  CHECK(catalogue_potential(s, "constant", 0.3).isApproxToConstant(0.3));
  CHECK(catalogue_potential(s, "cosine", 2.0, 0.25)(16) == doctest::Approx(2.0));
  CHECK_THROWS_WITH_AS(catalogue_potential(s, "quartic"), doctest::Contains("unknown potential"), ValidationError);
}

TEST_CASE("Bellman with V = 0 has the exact velocity-quantization error") {
  // Each step moves a whole number of cells, so a distance of N cells in K
  // steps costs h²·r(K−r)/T more than D²/T where r = N mod K.
  const std::size_t m = 32;
  const GroundSpace s = build_torus_1d(m);
  const CostModel model = CostModel::homogeneous(s, 2.0);
  const double h = 1.0 / m;
  for (std::size_t K : {8, 32}) {
    for (double T : {0.5, 1.0}) {
      const Matrix C = c_t_bellman(model, T, K).C;
      const Matrix exact = c_t_homogeneous(s, 2.0, T).C;
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
          const auto N = static_cast<std::size_t>(std::lround(s.distance(i, j) / h));
          const double r = static_cast<double>(N % K);
          const double extra = h * h * r * (static_cast<double>(K) - r) / T;
          CHECK(C(Eigen::Index(i), Eigen::Index(j)) - exact(Eigen::Index(i), Eigen::Index(j)) ==
                doctest::Approx(extra).epsilon(1e-9));
        }
      }
    }
  }
  CHECK(max_abs(c_t_bellman(model, 1.0, 8).C - c_t_homogeneous(s, 2.0, 1.0).C) < 2.0 / 32);
}

TEST_CASE("constant potential shifts the action by -cT") {
  const GroundSpace s = build_torus_1d(32);
  const CostModel flat = CostModel::mechanical(s, Vector::Zero(32));
  const CostModel raised = CostModel::mechanical(s, catalogue_potential(s, "constant", 0.7));
  for (double T : {0.5, 1.0, 3.0}) {
    const Matrix diff = c_t_bellman(raised, T, 32).C - c_t_bellman(flat, T, 32).C;
    CHECK(max_abs(diff.array() + 0.7 * T) < 1e-12);
  }
}

TEST_CASE("Bellman refinement is first order when the grid is fine") {
  const CostModel model = cosine_model(256);
  const Matrix c4 = c_t_bellman(model, 1.0, 4).C;
  const Matrix c8 = c_t_bellman(model, 1.0, 8).C;
  const Matrix c16 = c_t_bellman(model, 1.0, 16).C;
  const double d1 = max_abs(c4 - c8), d2 = max_abs(c8 - c16);
  MESSAGE("K-refinement gaps " << d1 << " " << d2);
  CHECK(d2 < d1);
  CHECK(d1 / d2 == doctest::Approx(2.0).epsilon(0.35));
}

TEST_CASE("min-plus product and semigroup") {
  Matrix a(2, 2), b(2, 2);
  a << 0, 3, 1, 0;
  b << 0, 1, 5, 0;
  const Matrix c = min_plus(a, b);
  CHECK(c(0, 1) == doctest::Approx(1.0));
  CHECK(c(1, 0) == doctest::Approx(1.0));

  const GroundSpace s = build_torus_1d(24);
  const Matrix split = min_plus(c_t_homogeneous(s, 2.0, 0.4).C, c_t_homogeneous(s, 2.0, 0.6).C);
  CHECK((c_t_homogeneous(s, 2.0, 1.0).C - split).maxCoeff() <= 1e-12);

  const CostModel mech = cosine_model(24);
  const Matrix half = c_t_bellman(mech, 0.5, 6).C;
  CHECK(max_abs(c_t_bellman(mech, 1.0, 12).C - min_plus(half, half)) <= 1e-12);
}

TEST_CASE("diagonal of the action") {
  const CostModel h = CostModel::homogeneous(build_torus_1d(16), 2.0);
  CHECK(max_abs(c_t_bellman(h, 1.0, 16).C.diagonal()) == 0.0);
  const CostModel mech = cosine_model(16);
  const Matrix C = c_t_bellman(mech, 1.0, 16).C;
  for (Eigen::Index i = 0; i < 16; ++i) CHECK(C(i, i) <= -mech.potential()(i) * 1.0 + 1e-12);
}

TEST_CASE("D_E for the homogeneous model") {
  const GroundSpace s = build_interval(2);
  const CostModel model = CostModel::homogeneous(s, 2.0);
  const std::vector<double> grid = geometric_grid(0.01, 100.0, 33);
  CHECK(d_e(model, 1.0, grid)(0, 1) == doctest::Approx(2.0).epsilon(1e-9));

  const GroundSpace s5 = build_interval(5);
  const CostModel p3 = CostModel::homogeneous(s5, 3.0);
  const Matrix de = d_e(p3, 2.0, grid);
  CHECK(max_abs(de - 1.5 * std::pow(2.0, 2.0 / 3.0) * s5.dist()) < 1e-8);
  CHECK(max_abs(de.diagonal()) == 0.0);
  // seed grid far from the optimum: the bracket has to walk outward
  const std::vector<double> narrow{10.0, 20.0};
  CHECK(d_e(model, 1.0, narrow)(0, 1) == doctest::Approx(2.0).epsilon(1e-9));
  CHECK_THROWS_AS(d_e(model, 1.0, std::vector<double>{}), ValidationError);
}

TEST_CASE("D_E is monotone in E and a metric above the ground energy") {
  const CostModel mech = cosine_model(24);
  const std::vector<double> grid = geometric_grid(0.02, 8.0, 17);
  std::vector<ActionTable> family;
  for (double T : grid) family.push_back(c_t_bellman(mech, T, 24));
  const double ubar = ubar_and_mather(mech, 1.0, 24).ubar;
  Matrix prev = d_e(family, ubar);
  CHECK(max_abs(prev.diagonal()) <= 1e-12);
  for (double E = ubar + 0.25; E < ubar + 4.0; E += 0.25) {
    const Matrix cur = d_e(family, E);
    CHECK((prev - cur).maxCoeff() <= 1e-12);
    CHECK(oracle::triangle_ok(cur, 1e-10));
    prev = cur;
  }
  const CostModel hom = CostModel::homogeneous(build_torus_1d(12), 2.5);
  CHECK(oracle::triangle_ok(d_e(hom, 0.8, grid), 1e-10));
}

TEST_CASE("ground energy") {
  const GroundEnergy flat = ubar_and_mather(CostModel::homogeneous(build_torus_1d(32), 2.0), 1.0);
  CHECK(flat.ubar == doctest::Approx(0.0).epsilon(1e-12));

  const GroundEnergy cosine = ubar_and_mather(cosine_model(64), 1.0, 64);
  CHECK(cosine.ubar == doctest::Approx(1.0).epsilon(0.03));
  CHECK(cosine.circulation_value == doctest::Approx(-1.0).epsilon(0.03));
  const Vector& w = cosine.mather.weights();
  CHECK(w(0) + w(1) + w(2) + w(62) + w(63) >= 0.99);

  const GroundSpace s = build_torus_1d(16);
  const CostModel c = CostModel::mechanical(s, catalogue_potential(s, "constant", -0.4));
  CHECK(ubar_and_mather(c, 1.0).ubar == doctest::Approx(-0.4));

  CHECK(oracle::min_mean_cycle(c_t_bellman(cosine_model(12), 1.0, 12).C) ==
        doctest::Approx(-ubar_and_mather(cosine_model(12), 1.0, 12).ubar).epsilon(1e-10));
}

TEST_CASE("effective Hamiltonian bound") {
  const CostModel mech = cosine_model(32);
  const Vector zero = Vector::Zero(32);
  CHECK(effective_h_bound(mech, zero) == doctest::Approx(1.0));
  CHECK(effective_h_bound(CostModel::homogeneous(build_torus_1d(32), 2.0), zero) == 0.0);

  const double ubar = ubar_and_mather(mech, 1.0, 32).ubar;
  std::mt19937_64 rng(59);
  std::normal_distribution<double> N(0.0, 0.05);
  for (int rep = 0; rep < 20; ++rep) {
    const double a = N(rng), b = N(rng);
    Vector phi(32);
    for (Eigen::Index i = 0; i < 32; ++i) {
      const double x = i / 32.0;
      phi(i) = a * std::sin(2 * M_PI * x) + b * std::cos(4 * M_PI * x);
    }
    CHECK(effective_h_bound(mech, phi) >= ubar - 1e-12);
  }

  const GroundSpace s = build_interval(5);
  const Vector grad = discrete_gradient(s, (Vector(5) << 0, 1, 2, 3, 4).finished());
  // the last point differences against its left neighbour
  CHECK(grad.isApprox((Vector(5) << 4, 4, 4, 4, -4).finished()));
}

TEST_CASE("D_E transport") {
  const GroundSpace s = build_torus_1d(16);
  const CostModel model = CostModel::homogeneous(s, 2.0);
  const std::vector<double> grid = geometric_grid(0.005, 50.0, 33);
  const Matrix de = d_e(model, 1.5, grid);
  CHECK(d_e_transport(s, SignedMeasure(dirac(s, 2), dirac(s, 9)), de) == doctest::Approx(de(2, 9)));
  CHECK(d_e_transport(s, SignedMeasure(uniform(s), uniform(s)), de) == doctest::Approx(0.0).epsilon(1e-14));

  std::mt19937_64 rng(61);
  for (int rep = 0; rep < 5; ++rep) {
    const SignedMeasure lam = oracle::random_lambda(rng, 16, 3, 2);
    const double factor = 2.0 * std::sqrt(1.5);
    CHECK(d_e_transport(s, lam, de) == doctest::Approx(factor * w1_dual(s, lam).value).epsilon(1e-8));
  }
}

TEST_CASE("transport cost under D_E is concave in E") {
  std::mt19937_64 rng(67);
  const CostModel mech = cosine_model(16);
  const std::vector<double> grid = geometric_grid(0.02, 16.0, 25);
  std::vector<ActionTable> family;
  for (double T : grid) family.push_back(c_t_bellman(mech, T, 16));
  const double ubar = ubar_and_mather(mech, 1.0, 16).ubar;
  const SignedMeasure lam = oracle::random_lambda(rng, 16, 2, 2);
  std::vector<double> v;
  for (int k = 0; k < 20; ++k) v.push_back(d_e_transport(mech.space(), lam, d_e(family, ubar + 0.1 * k)));
  for (std::size_t k = 1; k + 1 < v.size(); ++k) CHECK(v[k + 1] - v[k] <= v[k] - v[k - 1] + 1e-10);
}

TEST_CASE("geometric grid") {
  const auto g = geometric_grid(0.1, 10.0, 3);
  CHECK(g[1] == doctest::Approx(1.0));
  CHECK(g.back() == doctest::Approx(10.0));
  CHECK_THROWS_AS(geometric_grid(0.0, 1.0, 3), ValidationError);
}

}
