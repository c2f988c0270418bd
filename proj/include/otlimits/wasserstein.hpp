#pragma once

// Wasserstein distances and the Kantorovich–Rubinstein dual of W₁.

#include "otlimits/core.hpp"
#include "otlimits/solver.hpp"

namespace otl {

/// Kantorovich potential for W₁, gauge-fixed to phi(0) = 0.
struct DualPotential {
  Vector phi;
  double value = 0.0;
};

/// Entrywise D^p.
Matrix power_cost(const GroundSpace& space, double p);

/// (min Σ D^p dπ)^(1/p) over couplings of a and b; p >= 1.
double wasserstein_p(const GroundSpace& space, double p, const AtomicMeasure& a, const AtomicMeasure& b);

/// Primal W₁ of λ = λ⁺ − λ⁻ via the transportation LP with cost D.
double w1_primal(const GroundSpace& space, const SignedMeasure& lambda);

/// Maximizes Σ φ dλ over φ with φ(i) − φ(j) <= D(i,j) for all pairs. Solved
/// directly as an LP in the m potentials (m(m−1) constraints), independently
/// of the transportation LP.
DualPotential w1_dual(const GroundSpace& space, const SignedMeasure& lambda);

/// |primal − dual| for W₁.
double duality_gap(const GroundSpace& space, const SignedMeasure& lambda);

/// max over pairs of φ(i) − φ(j) − D(i,j); <= 0 for a feasible potential.
double lipschitz_violation(const GroundSpace& space, const Vector& phi);

}  // namespace otl
