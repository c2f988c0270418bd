#pragma once

// Dense two-phase simplex on a condensed (nonbasic-columns-only) tableau.
//
//   minimize  cᵀx   subject to  A_eq x = b_eq,  A_ub x <= b_ub,  x >= 0.
//
// Pricing is Dantzig's rule; after a run of degenerate pivots the kernel
// switches to Bland's rule until the objective strictly improves again, so a
// degenerate cycle cannot repeat. Every transportation-type LP in the library
// funnels through here.

#include <cstddef>

#include "otlimits/core.hpp"

namespace otl::lp {

enum class Status { Optimal, Infeasible, Unbounded, IterationLimit };

const char* status_name(Status s);

struct Problem {
  Matrix A_eq;
  Vector b_eq;
  Matrix A_ub;
  Vector b_ub;
  Vector cost;
};

struct Options {
  double pivot_tolerance = 1e-10;
  double optimality_tolerance = 1e-11;
  double feasibility_tolerance = 1e-9;
  std::size_t degenerate_streak_for_bland = 64;
  std::size_t max_pivots = 0;  // 0 selects a size-dependent default
};

struct Solution {
  Status status = Status::Infeasible;
  Vector x;
  double value = 0.0;
  // Dual of  max b_eqᵀy + b_ubᵀz  s.t.  A_eqᵀy + A_ubᵀz <= c,  z <= 0.
  Vector dual_eq;
  Vector dual_ub;
  std::size_t pivots = 0;
  std::size_t bland_pivots = 0;
};

Solution solve(const Problem& problem, const Options& options = {});

}  // namespace otl::lp
