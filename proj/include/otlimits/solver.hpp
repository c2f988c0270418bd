#pragma once

// Exact transportation-type linear programs: the balanced transportation
// problem, the equal-marginal circulation problem, and the joint problem in
// which the common measure μ is itself a free variable.

#include "otlimits/core.hpp"

namespace otl {

inline constexpr double kMarginalTolerance = 1e-9;

struct TransportPlan {
  Matrix plan;
  double value = 0.0;
  // Certificate: col_potential(j) − row_potential(i) <= cost(i,j) for every
  // pair, with value = Σ col_potential·b − Σ row_potential·a at optimality.
  Vector row_potential;
  Vector col_potential;
};

struct CirculationSolution {
  AtomicMeasure mu;  // common marginal, total mass 1
  TransportPlan plan;
};

struct JointSolution {
  AtomicMeasure mu;  // optimal common measure, total mass 1
  TransportPlan plan;
  double value = 0.0;
};

/// Minimizes Σ cost·plan over couplings of a and b (|a| = |b| within 1e-9).
TransportPlan solve_transportation(const Matrix& cost, const AtomicMeasure& a, const AtomicMeasure& b);

/// Minimizes Σ cost·Λ over Λ >= 0 with ΣΛ = 1 and equal row/column sums.
CirculationSolution solve_circulation(const Matrix& cost);

/// min over probability μ of the transportation value between μ + ε·λ⁺ and
/// μ + ε·λ⁻, solved as a single LP in (plan, μ).
JointSolution solve_joint_min_mu(const Matrix& cost, const SignedMeasure& lambda, double eps);

/// Largest violation of the coupling constraints and of value = Σ cost·plan.
double plan_residual(const Matrix& cost, const TransportPlan& plan, const AtomicMeasure& a,
                     const AtomicMeasure& b);

}  // namespace otl
