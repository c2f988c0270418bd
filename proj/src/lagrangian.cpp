#include "otlimits/lagrangian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "numeric.hpp"
#include "otlimits/parallel.hpp"
#include "otlimits/solver.hpp"

namespace otl {

CostModel::CostModel(Kind kind, GroundSpace space, double p, Vector potential)
    : kind_(kind), space_(std::move(space)), p_(p), potential_(std::move(potential)) {}

CostModel CostModel::homogeneous(GroundSpace space, double p) {
  if (!(p > 1.0) || !std::isfinite(p)) throw ValidationError("homogeneous Lagrangian needs p > 1");
  const auto m = static_cast<Eigen::Index>(space.size());
  return CostModel(Kind::Homogeneous, std::move(space), p, Vector::Zero(m));
}

CostModel CostModel::mechanical(GroundSpace space, Vector potential) {
  if (potential.size() != static_cast<Eigen::Index>(space.size())) {
    throw ValidationError("potential has " + std::to_string(potential.size()) + " values for a space of " +
                          std::to_string(space.size()) + " points");
  }
  if (!potential.allFinite()) throw ValidationError("potential values must be finite");
  return CostModel(Kind::Mechanical, std::move(space), 2.0, std::move(potential));
}

double CostModel::lagrangian(std::size_t i, double speed) const {
  if (kind_ == Kind::Homogeneous) return std::pow(speed, p_) / (p_ - 1.0);
  return 0.5 * speed * speed - potential_(static_cast<Eigen::Index>(i));
}

double CostModel::hamiltonian(std::size_t i, double xi) const {
  if (kind_ == Kind::Homogeneous) {
    const double qq = q();
    return std::pow(qq, -qq) * std::pow(std::abs(xi), qq);
  }
  return 0.5 * xi * xi + potential_(static_cast<Eigen::Index>(i));
}

Vector catalogue_potential(const GroundSpace& space, const std::string& name, double amplitude, double shift) {
  if (!space.has_grid()) throw ValidationError("catalogue potentials need a torus or interval space");
  const auto m = static_cast<Eigen::Index>(space.size());
  Vector v(m);
  constexpr double two_pi = 2.0 * std::numbers::pi;
  for (Eigen::Index i = 0; i < m; ++i) {
    const double x = space.points()[static_cast<std::size_t>(i)][0];
    if (name == "cosine") {
      v(i) = amplitude * std::cos(two_pi * (x - shift));
    } else if (name == "constant") {
      v(i) = amplitude;
    } else if (name == "two_well") {
      v(i) = amplitude * (std::cos(2.0 * two_pi * (x - shift)) + 0.25 * std::cos(two_pi * (x - shift)));
    } else {
      throw ValidationError("unknown potential '" + name + "' (expected cosine, constant or two_well)");
    }
  }
  return v;
}

ActionTable c_t_homogeneous(const GroundSpace& space, double p, double T) {
  if (!(p > 1.0)) throw ValidationError("homogeneous action needs p > 1");
  if (!(T > 0.0) || !std::isfinite(T)) throw ValidationError("action time T must be positive");
  ActionTable out;
  out.T = T;
  out.C = space.dist().array().pow(p).matrix() / ((p - 1.0) * std::pow(T, p - 1.0));
  return out;
}

Matrix min_plus(const Matrix& a, const Matrix& b) {
  const Eigen::Index m = a.rows();
  Matrix out(m, b.cols());
  parallel_for(static_cast<std::size_t>(b.cols()), [&](std::size_t yy) {
    const auto y = static_cast<Eigen::Index>(yy);
    Eigen::ArrayXd col = Eigen::ArrayXd::Constant(m, std::numeric_limits<double>::infinity());
    for (Eigen::Index z = 0; z < a.cols(); ++z) {
      col = col.min(a.col(z).array() + b(z, y));
    }
    out.col(y) = col.matrix();
  });
  return out;
}

ActionTable c_t_bellman(const CostModel& model, double T, std::size_t steps) {
  if (!(T > 0.0) || !std::isfinite(T)) throw ValidationError("action time T must be positive");
  if (steps < 1) throw ValidationError("Bellman iteration needs at least one step");
  const GroundSpace& space = model.space();
  const auto m = static_cast<Eigen::Index>(space.size());
  const double dt = T / static_cast<double>(steps);
  Matrix one(m, m);
  for (Eigen::Index x = 0; x < m; ++x) {
    for (Eigen::Index y = 0; y < m; ++y) {
      one(x, y) = dt * model.lagrangian(static_cast<std::size_t>(x), space.dist()(x, y) / dt);
    }
  }
  // The recursion is time-homogeneous, so C⁽ᴷ⁾ is the K-th (min,+) power of
  // C⁽¹⁾ and binary powering gives the same table in O(log K) products.
  Matrix result;
  bool have_result = false;
  Matrix base = one;
  std::size_t k = steps;
  while (k > 0) {
    if (k & 1U) {
      result = have_result ? min_plus(result, base) : base;
      have_result = true;
    }
    k >>= 1U;
    if (k > 0) base = min_plus(base, base);
  }
  ActionTable out;
  out.T = T;
  out.C = std::move(result);
  out.steps = steps;
  return out;
}

ActionTable action_table(const CostModel& model, double T, std::size_t steps) {
  if (model.is_homogeneous()) return c_t_homogeneous(model.space(), model.p(), T);
  return c_t_bellman(model, T, steps == 0 ? model.space().size() : steps);
}

Matrix d_e(std::span<const ActionTable> family, double E) {
  if (family.empty()) throw ValidationError("D_E needs a nonempty T grid");
  Matrix out = family.front().C.array() + E * family.front().T;
  for (const auto& table : family.subspan(1)) {
    out = out.cwiseMin((table.C.array() + E * table.T).matrix());
  }
  out.diagonal() = out.diagonal().cwiseMin(0.0);
  return out;
}

std::vector<double> geometric_grid(double lo, double hi, std::size_t count) {
  if (!(lo > 0.0) || !(hi >= lo) || count == 0) throw ValidationError("invalid geometric grid");
  std::vector<double> g(count);
  if (count == 1) {
    g[0] = lo;
    return g;
  }
  const double ratio = std::log(hi / lo) / static_cast<double>(count - 1);
  for (std::size_t k = 0; k < count; ++k) g[k] = lo * std::exp(ratio * static_cast<double>(k));
  g.back() = hi;
  return g;
}

Matrix d_e(const CostModel& model, double E, std::span<const double> T_grid, std::size_t steps) {
  if (T_grid.empty()) throw ValidationError("D_E needs a nonempty T grid");
  for (double T : T_grid) {
    if (!(T > 0.0) || !std::isfinite(T)) throw ValidationError("T grid entries must be positive");
  }
  if (!model.is_homogeneous()) {
    std::vector<ActionTable> family;
    family.reserve(T_grid.size());
    for (double T : T_grid) family.push_back(action_table(model, T, steps));
    return d_e(family, E);
  }

  std::vector<double> grid(T_grid.begin(), T_grid.end());
  std::sort(grid.begin(), grid.end());
  const double p = model.p();
  const Matrix& D = model.space().dist();
  const auto m = D.rows();
  Matrix out(m, m);
  parallel_for(static_cast<std::size_t>(m), [&](std::size_t jj) {
    const auto j = static_cast<Eigen::Index>(jj);
    for (Eigen::Index i = 0; i < m; ++i) {
      const double Dp = std::pow(D(i, j), p);
      auto f = [&](double T) { return Dp / ((p - 1.0) * std::pow(T, p - 1.0)) + E * T; };
      std::size_t best = 0;
      double best_val = f(grid[0]);
      for (std::size_t k = 1; k < grid.size(); ++k) {
        const double v = f(grid[k]);
        if (v < best_val) {
          best_val = v;
          best = k;
        }
      }
      if (i == j) {
        // E·T is monotone in T here; only the T → 0⁺ limit matters.
        out(i, j) = std::min(best_val, 0.0);
        continue;
      }
      // The objective is convex in T, so a bracket around the best grid
      // point contains the minimizer. Grid endpoints are pushed outward
      // until the objective turns up.
      double lo = best == 0 ? grid[0] : grid[best - 1];
      double hi = best + 1 < grid.size() ? grid[best + 1] : grid.back();
      if (best + 1 == grid.size()) {
        for (int k = 0; k < 200 && f(2.0 * hi) < f(hi); ++k) {
          lo = hi;
          hi *= 2.0;
        }
        hi *= 2.0;
      }
      if (best == 0) {
        for (int k = 0; k < 200 && f(0.5 * lo) < f(lo); ++k) {
          hi = std::max(hi, lo);
          lo *= 0.5;
        }
        lo *= 0.5;
      }
      const auto refined = detail::golden_section_min(f, lo, hi, 1e-13);
      out(i, j) = std::min(best_val, refined.second);
    }
  });
  return out;
}

GroundEnergy ubar_and_mather(const CostModel& model, double T, std::size_t steps) {
  if (!(T > 0.0) || !std::isfinite(T)) throw ValidationError("action time T must be positive");
  const ActionTable table = action_table(model, T, steps);
  const CirculationSolution circ = solve_circulation(table.C);
  GroundEnergy out;
  out.circulation_value = circ.plan.value;
  out.ubar = -circ.plan.value / T;
  out.mather = circ.mu;
  return out;
}

Vector discrete_gradient(const GroundSpace& space, const Vector& phi) {
  const std::size_t m = space.size();
  if (phi.size() != static_cast<Eigen::Index>(m)) throw ValidationError("potential size does not match the space");
  Vector g(static_cast<Eigen::Index>(m));
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t nb = space.forward_neighbour(i);
    const auto ii = static_cast<Eigen::Index>(i);
    const auto nn = static_cast<Eigen::Index>(nb);
    g(ii) = (phi(nn) - phi(ii)) / space.dist()(ii, nn);
  }
  return g;
}

double effective_h_bound(const CostModel& model, const Vector& phi) {
  if (!phi.allFinite()) throw ValidationError("potential must be finite");
  const Vector g = discrete_gradient(model.space(), phi);
  double best = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    best = std::max(best, model.hamiltonian(static_cast<std::size_t>(i), g(i)));
  }
  return best;
}

double d_e_transport(const GroundSpace& space, const SignedMeasure& lambda, const Matrix& d_e_matrix) {
  if (lambda.size() != space.size()) throw ValidationError("signed measure size does not match the space");
  return solve_transportation(d_e_matrix, lambda.pos(), lambda.neg()).value;
}

}  // namespace otl
