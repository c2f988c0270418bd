#pragma once

// Modified action ĈT, the conditional action ĈT(λ‖μ), ε-sweeps of the
// scaled joint transport problem and the transport-measure approximation.

#include <limits>
#include <vector>

#include "otlimits/core.hpp"
#include "otlimits/lagrangian.hpp"

namespace otl {

struct EnergySearch {
  /// Lower end of the E search. NaN means the ūE estimate of the model
  /// (0 for homogeneous models, the circulation LP at T = 1 otherwise).
  double e_lo = std::numeric_limits<double>::quiet_NaN();
  /// Upper end. NaN means bracket automatically by doubling.
  double e_hi = std::numeric_limits<double>::quiet_NaN();
  std::size_t coarse_points = 12;
  double tolerance = 1e-9;
  /// Times used for D_E. Empty selects a geometric grid scaled to the space.
  std::vector<double> T_grid;
  std::size_t steps = 0;
};

struct EnergyResult {
  double value = 0.0;
  double energy = 0.0;  // maximizing E
  std::size_t evaluations = 0;
};

/// max over E >= e_lo of 𝒟_E(λ) − E·T.
EnergyResult chat_T_energy(const SignedMeasure& lambda, double T, const CostModel& model,
                           const EnergySearch& search = {});

/// One evaluation of Σ φ·λ − T Σ μ(x) h(x, dφ(x)) and its gradient in φ.
struct ConditionalObjective {
  double value = 0.0;
  Vector gradient;
};

ConditionalObjective conditional_objective(const CostModel& model, const SignedMeasure& lambda,
                                           const AtomicMeasure& mu, double T, const Vector& phi);

struct ConditionalSolution {
  Vector phi;
  double value = 0.0;
  bool converged = false;
  bool bounded = true;  // false when μ leaves a λ-charged set disconnected
  std::size_t iterations = 0;
  double gradient_norm = 0.0;
};

struct AscentOptions {
  std::size_t max_iterations = 200;
  double gradient_tolerance = 1e-7;
  double smoothing = 1e-6;  // only used when q < 2
};

/// sup over φ (φ(0) = 0) of the conditional objective, by damped Newton
/// ascent with Armijo backtracking.
ConditionalSolution chat_conditional(const SignedMeasure& lambda, const AtomicMeasure& mu, double T,
                                     const CostModel& model, const AscentOptions& options = {});

/// W⁽ᵖ⁾(λ‖μ) recovered from ĈT(λ‖μ) of the homogeneous model at T = 1.
double conditional_w1p(const GroundSpace& space, const SignedMeasure& lambda, const AtomicMeasure& mu,
                       double p);

struct ScaledMin {
  double value = 0.0;
  AtomicMeasure mu;
};

/// n·(min over μ of the joint LP with cost D^p and ε = 1/n)^(1/p).
ScaledMin min_mu_scaled(const GroundSpace& space, double p, const SignedMeasure& lambda, std::size_t n);

struct SweepReport {
  double p = 2.0;
  std::vector<std::size_t> n_values;
  std::vector<double> scaled_values;
  std::vector<AtomicMeasure> mu_trace;
  double extrapolated_limit = std::numeric_limits<double>::quiet_NaN();
  double observed_rate = std::numeric_limits<double>::quiet_NaN();
};

/// Runs min_mu_scaled for each n (in parallel) and extrapolates the last two
/// entries assuming a first-order error in 1/n.
SweepReport epsilon_sweep(const GroundSpace& space, double p, const SignedMeasure& lambda,
                          const std::vector<std::size_t>& n_list);

/// (n2·v2 − n1·v1)/(n2 − n1).
double richardson(std::size_t n1, double v1, std::size_t n2, double v2);

/// Successive gaps |v_{k+1} − v_k| for k = 0..size−2.
std::vector<double> sweep_gaps(const SweepReport& report);

/// log(g_{k−1}/g_k)/log(n_{k+1}/n_k) for each k >= 1; NaN where undefined.
std::vector<double> sweep_rates(const SweepReport& report);

struct LiminfRow {
  std::size_t n = 0;
  double F_n = 0.0;
  double lower_bound = 0.0;
  double margin = 0.0;
  double slack = 0.0;
  bool holds = true;  // margin >= −slack
};

/// Grid allowance for F_n >= ĈT(λ‖μ): 2h·|bound| with h the mesh size. It
/// covers discretization error only; the O(1/n) deficit of F_n at small n
/// is part of what the check measures.
double liminf_grid_slack(const GroundSpace& space, double bound);

/// F_n = n·𝒞_{T/n}(μ + λ⁺/n, μ + λ⁻/n) with the homogeneous closed-form cost,
/// compared against ĈT(λ‖μ). μ must be strictly positive.
std::vector<LiminfRow> gamma_liminf_check(const GroundSpace& space, double p, const SignedMeasure& lambda,
                                          const AtomicMeasure& mu, const std::vector<std::size_t>& n_list,
                                          double T = 1.0);

struct TransportMeasure {
  AtomicMeasure mu;
  double tv_last_two = std::numeric_limits<double>::quiet_NaN();
  SweepReport sweep;
};

/// μ from the sweep at the largest n, with the TV distance between the
/// minimizers of the last two n as a convergence diagnostic.
TransportMeasure transport_measure(const GroundSpace& space, const SignedMeasure& lambda,
                                   const std::vector<std::size_t>& n_list, double p = 2.0);

struct Th5Result {
  std::vector<double> candidate_values;  // +inf for unbounded candidates
  double min_over_candidates = 0.0;
  double unconditional = 0.0;
};

/// ĈT(λ‖μ) over the candidates against ĈT(λ) from the energy route, for the
/// homogeneous model with exponent p.
Th5Result th5_spotcheck(const GroundSpace& space, const SignedMeasure& lambda, double p,
                        const std::vector<AtomicMeasure>& candidates, double T = 1.0);

}  // namespace otl
