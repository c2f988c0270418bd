#pragma once

// Lagrangian point costs on a ground space: the time-T action C_T, the
// metric D_E = inf_T C_T + E·T, the ground energy ūE with its projected
// Mather measure, and the D_E-cost transport of a signed measure.

#include <span>
#include <string>
#include <vector>

#include "otlimits/core.hpp"

namespace otl {

/// Either the homogeneous Lagrangian |v|^p/(p−1), p > 1, or the mechanical
/// Lagrangian |v|²/2 − V(x) with V given on the grid points.
class CostModel {
 public:
  enum class Kind { Homogeneous, Mechanical };

  static CostModel homogeneous(GroundSpace space, double p);
  static CostModel mechanical(GroundSpace space, Vector potential);

  Kind kind() const noexcept { return kind_; }
  bool is_homogeneous() const noexcept { return kind_ == Kind::Homogeneous; }
  const GroundSpace& space() const noexcept { return space_; }
  /// Kinetic exponent: p for homogeneous models, 2 for mechanical ones.
  double p() const noexcept { return p_; }
  /// Conjugate exponent p/(p−1).
  double q() const noexcept { return p_ / (p_ - 1.0); }
  /// V on the grid; identically zero for homogeneous models.
  const Vector& potential() const noexcept { return potential_; }

  double lagrangian(std::size_t i, double speed) const;
  /// Legendre dual of the Lagrangian at point i: q^{−q}|ξ|^q, or ξ²/2 + V.
  double hamiltonian(std::size_t i, double xi) const;

 private:
  CostModel(Kind kind, GroundSpace space, double p, Vector potential);

  Kind kind_;
  GroundSpace space_;
  double p_;
  Vector potential_;
};

/// Potentials available to declarative configs: "cosine" (a·cos 2π(x−s)),
/// "constant" (a), "two_well" (a·(cos 4πx + ¼cos 2πx), two maxima of
/// different height).
Vector catalogue_potential(const GroundSpace& space, const std::string& name, double amplitude = 1.0,
                           double shift = 0.0);

struct ActionTable {
  double T = 0.0;
  Matrix C;
  std::size_t steps = 0;  // 0 for closed-form tables
};

/// Closed form D^p / ((p−1) T^{p−1}).
ActionTable c_t_homogeneous(const GroundSpace& space, double p, double T);

/// K-step value iteration: C⁽¹⁾(x,y) = δt·l(x, D(x,y)/δt) with δt = T/K and
/// C⁽ᵏ⁺¹⁾ = C⁽ᵏ⁾ ⊗ C⁽¹⁾ in the (min,+) semiring.
ActionTable c_t_bellman(const CostModel& model, double T, std::size_t steps);

/// Closed form for homogeneous models, value iteration otherwise. steps = 0
/// selects one step per grid point.
ActionTable action_table(const CostModel& model, double T, std::size_t steps = 0);

/// (min,+) product: out(x,y) = min_z a(x,z) + b(z,y).
Matrix min_plus(const Matrix& a, const Matrix& b);

/// D_E from a precomputed family of C_T tables: entrywise min over the family
/// of C_T + E·T. Diagonal entries also see the T → 0⁺ limit, which is 0.
Matrix d_e(std::span<const ActionTable> family, double E);

/// D_E for a model over a T grid. Homogeneous models refine each entry by
/// golden section around the best grid point (the grid only seeds the
/// bracket, which may extend past its ends); mechanical models take the
/// entrywise min over Bellman tables on the grid.
Matrix d_e(const CostModel& model, double E, std::span<const double> T_grid, std::size_t steps = 0);

/// Geometric grid of `count` times between lo and hi.
std::vector<double> geometric_grid(double lo, double hi, std::size_t count);

struct GroundEnergy {
  double ubar = 0.0;
  AtomicMeasure mather;
  double circulation_value = 0.0;
};

/// ūE = −(min circulation value with cost C_T)/T; the optimal common marginal
/// is the projected Mather measure.
GroundEnergy ubar_and_mather(const CostModel& model, double T, std::size_t steps = 0);

/// Forward-difference gradient (φ(nb(i)) − φ(i)) / D(i, nb(i)).
Vector discrete_gradient(const GroundSpace& space, const Vector& phi);

/// max_x h(x, dφ(x)): an upper bound for ūE for this φ.
double effective_h_bound(const CostModel& model, const Vector& phi);

/// Transportation value of λ⁺ → λ⁻ under the cost D_E.
double d_e_transport(const GroundSpace& space, const SignedMeasure& lambda, const Matrix& d_e_matrix);

}  // namespace otl
