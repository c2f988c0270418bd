#include "otlimits/limits.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "numeric.hpp"
#include "otlimits/parallel.hpp"
#include "otlimits/solver.hpp"
#include "otlimits/wasserstein.hpp"

namespace otl {

namespace {

void require_same_space(const GroundSpace& space, const SignedMeasure& lambda) {
  if (lambda.size() != space.size()) {
    throw ValidationError("signed measure has " + std::to_string(lambda.size()) + " weights for a space of " +
                          std::to_string(space.size()) + " points");
  }
}

void require_time(double T) {
  if (!(T > 0.0) || !std::isfinite(T)) throw ValidationError("time T must be positive and finite");
}

void require_probability(const GroundSpace& space, const AtomicMeasure& mu) {
  if (mu.size() != space.size()) throw ValidationError("measure size does not match the ground space");
  if (std::abs(mu.mass() - 1.0) > 1e-9) throw ValidationError("mu must be a probability measure");
}

double min_positive_distance(const GroundSpace& space) {
  const Matrix& D = space.dist();
  double h = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < D.rows(); ++i) {
    for (Eigen::Index j = 0; j < D.cols(); ++j) {
      if (i != j) h = std::min(h, D(i, j));
    }
  }
  return h;
}

std::vector<double> default_T_grid(const GroundSpace& space) {
  const double diam = std::max(space.diameter(), 1e-12);
  return geometric_grid(1e-2 * diam, 1e2 * diam, 33);
}

// h and its first two derivatives in ξ. For q < 2 the power is replaced by
// the smooth surrogate (ξ² + δ²)^{q/2} − δ^q when δ > 0.
struct HamiltonianPiece {
  double value;
  double d1;
  double d2;
};

HamiltonianPiece hamiltonian_piece(const CostModel& model, std::size_t i, double xi, double delta) {
  if (!model.is_homogeneous()) {
    return {0.5 * xi * xi + model.potential()(static_cast<Eigen::Index>(i)), xi, 1.0};
  }
  const double q = model.q();
  const double c = std::pow(q, -q);
  if (q < 2.0 && delta > 0.0) {
    const double s = xi * xi + delta * delta;
    return {c * (std::pow(s, 0.5 * q) - std::pow(delta, q)), c * q * xi * std::pow(s, 0.5 * q - 1.0),
            c * q * std::pow(s, 0.5 * q - 2.0) * ((q - 1.0) * xi * xi + delta * delta)};
  }
  const double a = std::abs(xi);
  const double sgn = xi > 0.0 ? 1.0 : (xi < 0.0 ? -1.0 : 0.0);
  const double d2 = a > 0.0 || q == 2.0 ? c * q * (q - 1.0) * std::pow(a, q - 2.0) : 0.0;
  return {c * std::pow(a, q), c * q * sgn * std::pow(a, q - 1.0), d2};
}

struct Edges {
  std::vector<std::size_t> next;
  std::vector<double> inv_len;
};

Edges grid_edges(const GroundSpace& space) {
  if (!space.has_grid()) throw ValidationError("conditional action needs a torus or interval space");
  Edges e;
  const std::size_t m = space.size();
  e.next.resize(m);
  e.inv_len.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    e.next[i] = space.forward_neighbour(i);
    e.inv_len[i] = 1.0 / space.distance(i, e.next[i]);
  }
  return e;
}

ConditionalObjective evaluate(const CostModel& model, const Edges& edges, const Vector& lambda,
                              const Vector& mu, double T, const Vector& phi, double delta) {
  ConditionalObjective out;
  out.gradient = lambda;
  double penalty = 0.0;
  for (std::size_t i = 0; i < edges.next.size(); ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    const auto jj = static_cast<Eigen::Index>(edges.next[i]);
    const double w = mu(ii);
    if (w == 0.0) continue;
    const double xi = (phi(jj) - phi(ii)) * edges.inv_len[i];
    const HamiltonianPiece h = hamiltonian_piece(model, i, xi, delta);
    penalty += w * h.value;
    const double g = T * w * h.d1 * edges.inv_len[i];
    out.gradient(jj) -= g;
    out.gradient(ii) += g;
  }
  out.value = lambda.dot(phi) - T * penalty;
  return out;
}

// Negated Hessian, which is positive semidefinite.
Matrix neg_hessian(const CostModel& model, const Edges& edges, const Vector& mu, double T, const Vector& phi,
                   double delta) {
  const auto m = phi.size();
  Matrix H = Matrix::Zero(m, m);
  for (std::size_t i = 0; i < edges.next.size(); ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    const auto jj = static_cast<Eigen::Index>(edges.next[i]);
    const double w = mu(ii);
    if (w == 0.0) continue;
    const double xi = (phi(jj) - phi(ii)) * edges.inv_len[i];
    const double k = T * w * hamiltonian_piece(model, i, xi, delta).d2 * edges.inv_len[i] * edges.inv_len[i];
    H(ii, ii) += k;
    H(jj, jj) += k;
    H(ii, jj) -= k;
    H(jj, ii) -= k;
  }
  return H;
}

// With μ(x) = 0 the edge at x carries no penalty. If the remaining edges
// split the grid into pieces and λ charges one of them, shifting φ on that
// piece raises the objective without bound.
bool has_charged_component(const Edges& edges, const Vector& lambda, const Vector& mu) {
  const std::size_t m = edges.next.size();
  std::vector<std::size_t> parent(m);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t i = 0; i < m; ++i) {
    if (mu(static_cast<Eigen::Index>(i)) > 0.0) parent[find(i)] = find(edges.next[i]);
  }
  std::vector<double> charge(m, 0.0), scale(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    charge[find(i)] += lambda(static_cast<Eigen::Index>(i));
    scale[find(i)] += std::abs(lambda(static_cast<Eigen::Index>(i)));
  }
  for (std::size_t r = 0; r < m; ++r) {
    if (std::abs(charge[r]) > kMassTolerance * std::max(1.0, scale[r])) return true;
  }
  return false;
}

}  // namespace

EnergyResult chat_T_energy(const SignedMeasure& lambda, double T, const CostModel& model,
                           const EnergySearch& search) {
  const GroundSpace& space = model.space();
  require_same_space(space, lambda);
  require_time(T);
  if (search.coarse_points < 2) throw ValidationError("energy search needs at least two coarse points");

  const std::vector<double> T_grid = search.T_grid.empty() ? default_T_grid(space) : search.T_grid;
  double lo = search.e_lo;
  if (std::isnan(lo)) lo = model.is_homogeneous() ? 0.0 : ubar_and_mather(model, 1.0, search.steps).ubar;
  if (!std::isfinite(lo)) throw ValidationError("energy range lower end must be finite");

  // Bellman tables do not depend on E, so build them once.
  std::vector<ActionTable> family;
  if (!model.is_homogeneous()) {
    for (double t : T_grid) family.push_back(action_table(model, t, search.steps));
  }

  EnergyResult out;
  auto g = [&](double E) {
    ++out.evaluations;
    const Matrix de = model.is_homogeneous() ? d_e(model, E, T_grid, search.steps) : d_e(family, E);
    return d_e_transport(space, lambda, de) - E * T;
  };

  double hi = search.e_hi;
  if (std::isnan(hi)) {
    double step = std::max(1.0, std::abs(lo));
    double f_near = g(lo + step);
    for (int k = 0; k < 60; ++k) {
      const double f_far = g(lo + 2.0 * step);
      if (f_far <= f_near) break;
      f_near = f_far;
      step *= 2.0;
    }
    hi = lo + 2.0 * step;
  }
  if (!(hi > lo) || !std::isfinite(hi)) throw ValidationError("energy range is empty");

  const std::size_t n = search.coarse_points;
  std::vector<double> Es(n), vals(n);
  for (std::size_t k = 0; k < n; ++k) {
    Es[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n - 1);
    vals[k] = g(Es[k]);
  }
  const auto best = static_cast<std::size_t>(std::max_element(vals.begin(), vals.end()) - vals.begin());
  out.value = vals[best];
  out.energy = Es[best];
  const double a = Es[best == 0 ? 0 : best - 1];
  const double b = Es[std::min(best + 1, n - 1)];
  const auto refined = detail::golden_section_min([&](double E) { return -g(E); }, a, b, search.tolerance);
  if (-refined.second > out.value) {
    out.value = -refined.second;
    out.energy = refined.first;
  }
  return out;
}

ConditionalObjective conditional_objective(const CostModel& model, const SignedMeasure& lambda,
                                           const AtomicMeasure& mu, double T, const Vector& phi) {
  const GroundSpace& space = model.space();
  require_same_space(space, lambda);
  if (mu.size() != space.size() || phi.size() != static_cast<Eigen::Index>(space.size())) {
    throw ValidationError("measure or potential size does not match the ground space");
  }
  require_time(T);
  return evaluate(model, grid_edges(space), lambda.difference(), mu.weights(), T, phi, 0.0);
}

ConditionalSolution chat_conditional(const SignedMeasure& lambda, const AtomicMeasure& mu, double T,
                                     const CostModel& model, const AscentOptions& options) {
  const GroundSpace& space = model.space();
  require_same_space(space, lambda);
  require_probability(space, mu);
  require_time(T);
  const Edges edges = grid_edges(space);
  const Vector lam = lambda.difference();
  const Vector& w = mu.weights();
  const auto m = static_cast<Eigen::Index>(space.size());

  ConditionalSolution out;
  out.phi = Vector::Zero(m);
  if (has_charged_component(edges, lam, w)) {
    out.bounded = false;
    out.value = std::numeric_limits<double>::infinity();
    return out;
  }

  const double delta = model.is_homogeneous() && model.q() < 2.0 ? options.smoothing : 0.0;
  Vector phi = Vector::Zero(m);
  ConditionalObjective cur = evaluate(model, edges, lam, w, T, phi, delta);
  for (; out.iterations < options.max_iterations; ++out.iterations) {
    // Gauge φ(0) = 0: only coordinates 1..m−1 move.
    const Vector grad = cur.gradient.tail(m - 1);
    if (grad.lpNorm<Eigen::Infinity>() <= options.gradient_tolerance) {
      out.converged = true;
      break;
    }
    Matrix H = neg_hessian(model, edges, w, T, phi, delta).bottomRightCorner(m - 1, m - 1);
    const double tau = 1e-12 * std::max(1.0, H.diagonal().maxCoeff());
    H.diagonal().array() += tau;
    Vector dir = H.ldlt().solve(grad);
    double slope = grad.dot(dir);
    if (!dir.allFinite() || !(slope > 0.0)) {
      dir = grad;
      slope = grad.squaredNorm();
    }

    double t = 1.0;
    Vector trial(m);
    ConditionalObjective next;
    bool accepted = false;
    for (int k = 0; k < 80; ++k, t *= 0.5) {
      trial(0) = 0.0;
      trial.tail(m - 1) = phi.tail(m - 1) + t * dir;
      next = evaluate(model, edges, lam, w, T, trial, delta);
      if (next.value >= cur.value + 1e-4 * t * slope) {
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
    phi = trial;
    cur = next;
  }

  const ConditionalObjective exact = evaluate(model, edges, lam, w, T, phi, 0.0);
  out.phi = phi;
  out.value = exact.value;
  out.gradient_norm = exact.gradient.tail(m - 1).lpNorm<Eigen::Infinity>();
  return out;
}

double conditional_w1p(const GroundSpace& space, const SignedMeasure& lambda, const AtomicMeasure& mu,
                       double p) {
  const CostModel model = CostModel::homogeneous(space, p);
  const ConditionalSolution s = chat_conditional(lambda, mu, 1.0, model);
  if (!s.bounded) return std::numeric_limits<double>::infinity();
  return std::pow(std::max(s.value, 0.0) / (model.q() - 1.0), 1.0 / p);
}

ScaledMin min_mu_scaled(const GroundSpace& space, double p, const SignedMeasure& lambda, std::size_t n) {
  require_same_space(space, lambda);
  if (n < 1) throw ValidationError("n must be at least 1");
  const JointSolution s = solve_joint_min_mu(power_cost(space, p), lambda, 1.0 / static_cast<double>(n));
  ScaledMin out;
  out.value = static_cast<double>(n) * std::pow(std::max(s.value, 0.0), 1.0 / p);
  out.mu = s.mu;
  return out;
}

double richardson(std::size_t n1, double v1, std::size_t n2, double v2) {
  const double a = static_cast<double>(n1);
  const double b = static_cast<double>(n2);
  return (b * v2 - a * v1) / (b - a);
}

SweepReport epsilon_sweep(const GroundSpace& space, double p, const SignedMeasure& lambda,
                          const std::vector<std::size_t>& n_list) {
  require_same_space(space, lambda);
  for (std::size_t k = 0; k < n_list.size(); ++k) {
    if (n_list[k] < 1) throw ValidationError("sweep entries must be positive");
    if (k > 0 && n_list[k] <= n_list[k - 1]) throw ValidationError("sweep n_list must be strictly increasing");
  }
  SweepReport r;
  r.p = p;
  r.n_values = n_list;
  r.scaled_values.assign(n_list.size(), 0.0);
  r.mu_trace.assign(n_list.size(), AtomicMeasure{});
  parallel_for(n_list.size(), [&](std::size_t k) {
    ScaledMin s = min_mu_scaled(space, p, lambda, n_list[k]);
    r.scaled_values[k] = s.value;
    r.mu_trace[k] = std::move(s.mu);
  });
  const std::size_t len = n_list.size();
  if (len == 1) r.extrapolated_limit = r.scaled_values[0];
  if (len >= 2) {
    r.extrapolated_limit = richardson(n_list[len - 2], r.scaled_values[len - 2], n_list[len - 1],
                                      r.scaled_values[len - 1]);
  }
  const std::vector<double> rates = sweep_rates(r);
  if (!rates.empty()) r.observed_rate = rates.back();
  return r;
}

std::vector<double> sweep_gaps(const SweepReport& report) {
  std::vector<double> gaps;
  for (std::size_t k = 1; k < report.scaled_values.size(); ++k) {
    gaps.push_back(std::abs(report.scaled_values[k] - report.scaled_values[k - 1]));
  }
  return gaps;
}

std::vector<double> sweep_rates(const SweepReport& report) {
  const std::vector<double> gaps = sweep_gaps(report);
  std::vector<double> rates;
  for (std::size_t k = 1; k < gaps.size(); ++k) {
    const double ratio = static_cast<double>(report.n_values[k + 1]) / static_cast<double>(report.n_values[k]);
    if (gaps[k] > 0.0 && gaps[k - 1] > 0.0) {
      rates.push_back(std::log(gaps[k - 1] / gaps[k]) / std::log(ratio));
    } else {
      rates.push_back(std::numeric_limits<double>::quiet_NaN());
    }
  }
  return rates;
}

double liminf_grid_slack(const GroundSpace& space, double bound) {
  // The discrete conditional action overshoots its continuum value by
  // about h/2 relative on uniform measures; 2h leaves room for curvature.
  return 2.0 * min_positive_distance(space) * std::abs(bound) + 1e-9;
}

std::vector<LiminfRow> gamma_liminf_check(const GroundSpace& space, double p, const SignedMeasure& lambda,
                                          const AtomicMeasure& mu, const std::vector<std::size_t>& n_list,
                                          double T) {
  require_same_space(space, lambda);
  require_probability(space, mu);
  require_time(T);
  if (mu.weights().minCoeff() <= 0.0) {
    throw ValidationError("liminf check needs mu strictly positive on every grid point");
  }
  const CostModel model = CostModel::homogeneous(space, p);
  const ConditionalSolution bound = chat_conditional(lambda, mu, T, model);

  std::vector<LiminfRow> rows(n_list.size());
  parallel_for(n_list.size(), [&](std::size_t k) {
    const std::size_t n = n_list[k];
    if (n < 1) throw ValidationError("n must be at least 1");
    const double eps = 1.0 / static_cast<double>(n);
    const ActionTable C = c_t_homogeneous(space, p, eps * T);
    const AtomicMeasure a = shifted(mu, eps, lambda.pos());
    const AtomicMeasure b = shifted(mu, eps, lambda.neg());
    LiminfRow& row = rows[k];
    row.n = n;
    row.F_n = static_cast<double>(n) * solve_transportation(C.C, a, b).value;
    row.lower_bound = bound.value;
    row.margin = row.F_n - row.lower_bound;
    row.slack = liminf_grid_slack(space, bound.value);
    row.holds = row.margin >= -row.slack;
  });
  return rows;
}

TransportMeasure transport_measure(const GroundSpace& space, const SignedMeasure& lambda,
                                   const std::vector<std::size_t>& n_list, double p) {
  if (n_list.empty()) throw ValidationError("transport measure needs at least one n");
  TransportMeasure out;
  out.sweep = epsilon_sweep(space, p, lambda, n_list);
  out.mu = out.sweep.mu_trace.back();
  const std::size_t len = out.sweep.mu_trace.size();
  if (len >= 2) out.tv_last_two = total_variation(out.sweep.mu_trace[len - 2], out.sweep.mu_trace[len - 1]);
  return out;
}

Th5Result th5_spotcheck(const GroundSpace& space, const SignedMeasure& lambda, double p,
                        const std::vector<AtomicMeasure>& candidates, double T) {
  if (candidates.empty()) throw ValidationError("candidate check needs at least one candidate measure");
  const CostModel model = CostModel::homogeneous(space, p);
  Th5Result out;
  out.unconditional = chat_T_energy(lambda, T, model).value;
  out.candidate_values.resize(candidates.size());
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    const ConditionalSolution s = chat_conditional(lambda, candidates[k], T, model);
    out.candidate_values[k] = s.bounded ? s.value : std::numeric_limits<double>::infinity();
  }
  out.min_over_candidates = *std::min_element(out.candidate_values.begin(), out.candidate_values.end());
  return out;
}

}  // namespace otl
