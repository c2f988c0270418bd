#include "otlimits/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace otl::lp {

const char* status_name(Status s) {
  switch (s) {
    case Status::Optimal: return "optimal";
    case Status::Infeasible: return "infeasible";
    case Status::Unbounded: return "unbounded";
    case Status::IterationLimit: return "iteration limit";
  }
  return "unknown";
}

namespace {

// x_B = beta − M x_N for every row, including the two objective rows at the
// bottom (phase 2 at index R, phase 1 at index R+1).
class Tableau {
 public:
  Tableau(Eigen::Index rows, Eigen::Index structurals, std::vector<bool> artificial_row)
      : R_(rows),
        n_(structurals),
        M_(Matrix::Zero(rows + 2, structurals)),
        beta_(Vector::Zero(rows + 2)),
        basis_(static_cast<std::size_t>(rows)),
        nonbasic_(static_cast<std::size_t>(structurals)),
        column_of_(static_cast<std::size_t>(rows + structurals), -1),
        artificial_row_(std::move(artificial_row)),
        dead_(static_cast<std::size_t>(rows), false) {
    for (Eigen::Index c = 0; c < n_; ++c) {
      nonbasic_[static_cast<std::size_t>(c)] = c;
      column_of_[static_cast<std::size_t>(c)] = c;
    }
    for (Eigen::Index r = 0; r < R_; ++r) basis_[static_cast<std::size_t>(r)] = n_ + r;
  }

  Matrix& M() { return M_; }
  Vector& beta() { return beta_; }
  Eigen::Index rows() const { return R_; }
  Eigen::Index cols() const { return n_; }
  Eigen::Index phase2_row() const { return R_; }
  Eigen::Index phase1_row() const { return R_ + 1; }

  bool is_artificial(Eigen::Index id) const {
    return id >= n_ && artificial_row_[static_cast<std::size_t>(id - n_)];
  }
  Eigen::Index basic(Eigen::Index r) const { return basis_[static_cast<std::size_t>(r)]; }
  Eigen::Index nonbasic(Eigen::Index c) const { return nonbasic_[static_cast<std::size_t>(c)]; }
  Eigen::Index column_of(Eigen::Index id) const { return column_of_[static_cast<std::size_t>(id)]; }
  bool dead(Eigen::Index r) const { return dead_[static_cast<std::size_t>(r)]; }
  void mark_dead(Eigen::Index r) { dead_[static_cast<std::size_t>(r)] = true; }

  void pivot(Eigen::Index r, Eigen::Index c) {
    const double piv = M_(r, c);
    const Vector col = M_.col(c);
    Eigen::RowVectorXd rowr = M_.row(r) / piv;
    rowr(c) = 1.0 / piv;
    const double beta_r = beta_(r) / piv;
    M_.col(c).setZero();
    M_.noalias() -= col * rowr;
    M_.row(r) = rowr;
    beta_.noalias() -= col * beta_r;
    beta_(r) = beta_r;

    const Eigen::Index entering = nonbasic_[static_cast<std::size_t>(c)];
    const Eigen::Index leaving = basis_[static_cast<std::size_t>(r)];
    basis_[static_cast<std::size_t>(r)] = entering;
    nonbasic_[static_cast<std::size_t>(c)] = leaving;
    column_of_[static_cast<std::size_t>(entering)] = -1;
    column_of_[static_cast<std::size_t>(leaving)] = c;
  }

 private:
  Eigen::Index R_;
  Eigen::Index n_;
  Matrix M_;
  Vector beta_;
  std::vector<Eigen::Index> basis_;
  std::vector<Eigen::Index> nonbasic_;
  std::vector<Eigen::Index> column_of_;
  std::vector<bool> artificial_row_;
  std::vector<bool> dead_;
};

enum class LoopResult { Optimal, Unbounded, IterationLimit };

class Driver {
 public:
  Driver(Tableau& t, const Options& o, std::size_t max_pivots)
      : t_(t), opt_(o), max_pivots_(max_pivots) {}

  LoopResult run(Eigen::Index obj_row) {
    Matrix& M = t_.M();
    Vector& beta = t_.beta();
    std::size_t streak = 0;
    for (;;) {
      const bool bland = streak >= opt_.degenerate_streak_for_bland;

      Eigen::Index enter = -1;
      double best = opt_.optimality_tolerance;
      Eigen::Index best_id = std::numeric_limits<Eigen::Index>::max();
      for (Eigen::Index c = 0; c < t_.cols(); ++c) {
        const Eigen::Index id = t_.nonbasic(c);
        if (t_.is_artificial(id)) continue;
        const double d = M(obj_row, c);
        if (d <= opt_.optimality_tolerance) continue;
        if (bland) {
          if (id < best_id) {
            best_id = id;
            enter = c;
          }
        } else if (d > best) {
          best = d;
          enter = c;
        }
      }
      if (enter < 0) return LoopResult::Optimal;

      Eigen::Index leave = -1;
      double best_ratio = std::numeric_limits<double>::infinity();
      double best_pivot = 0.0;
      for (Eigen::Index r = 0; r < t_.rows(); ++r) {
        if (t_.dead(r)) continue;
        const double a = M(r, enter);
        if (a <= opt_.pivot_tolerance) continue;
        const double ratio = std::max(beta(r), 0.0) / a;
        const double tie = leave < 0 ? 0.0 : 1e-12 * (1.0 + best_ratio);
        if (leave < 0 || ratio < best_ratio - tie) {
          leave = r;
          best_ratio = ratio;
          best_pivot = a;
        } else if (ratio <= best_ratio + tie) {
          const bool take = bland ? t_.basic(r) < t_.basic(leave) : a > best_pivot;
          if (take) {
            leave = r;
            best_ratio = std::min(best_ratio, ratio);
            best_pivot = a;
          }
        }
      }
      if (leave < 0) return LoopResult::Unbounded;

      if (pivots_ >= max_pivots_) return LoopResult::IterationLimit;
      t_.pivot(leave, enter);
      ++pivots_;
      if (bland) ++bland_pivots_;
      streak = best_ratio <= 1e-14 ? streak + 1 : 0;
    }
  }

  std::size_t pivots() const { return pivots_; }
  std::size_t bland_pivots() const { return bland_pivots_; }

 private:
  Tableau& t_;
  const Options& opt_;
  std::size_t max_pivots_;
  std::size_t pivots_ = 0;
  std::size_t bland_pivots_ = 0;
};

}  // namespace

Solution solve(const Problem& p, const Options& opt) {
  const Eigen::Index n = p.cost.size();
  const Eigen::Index n_eq = p.A_eq.rows();
  const Eigen::Index n_ub = p.A_ub.rows();
  if ((n_eq > 0 && p.A_eq.cols() != n) || (n_ub > 0 && p.A_ub.cols() != n) ||
      p.b_eq.size() != n_eq || p.b_ub.size() != n_ub) {
    throw ValidationError("LP dimensions are inconsistent");
  }
  if (!p.cost.allFinite() || (n_eq > 0 && !p.A_eq.allFinite()) || (n_ub > 0 && !p.A_ub.allFinite()) ||
      !p.b_eq.allFinite() || !p.b_ub.allFinite()) {
    throw ValidationError("LP data contains NaN or infinite entries");
  }

  // Inequality rows with a negative right-hand side get an explicit slack
  // column and become equality rows, so every logical starts feasible.
  std::vector<Eigen::Index> extra_slack_of_ub(static_cast<std::size_t>(n_ub), -1);
  Eigen::Index extra = 0;
  for (Eigen::Index k = 0; k < n_ub; ++k) {
    if (p.b_ub(k) < 0.0) extra_slack_of_ub[static_cast<std::size_t>(k)] = n + extra++;
  }
  const Eigen::Index ns = n + extra;
  const Eigen::Index R = n_eq + n_ub;

  std::vector<bool> artificial(static_cast<std::size_t>(R));
  std::vector<double> sign(static_cast<std::size_t>(R), 1.0);
  for (Eigen::Index k = 0; k < n_eq; ++k) artificial[static_cast<std::size_t>(k)] = true;
  for (Eigen::Index k = 0; k < n_ub; ++k) {
    artificial[static_cast<std::size_t>(n_eq + k)] = extra_slack_of_ub[static_cast<std::size_t>(k)] >= 0;
  }

  Tableau t(R, ns, artificial);
  Matrix& M = t.M();
  Vector& beta = t.beta();
  for (Eigen::Index k = 0; k < n_eq; ++k) {
    const double s = p.b_eq(k) < 0.0 ? -1.0 : 1.0;
    sign[static_cast<std::size_t>(k)] = s;
    M.row(k).head(n) = s * p.A_eq.row(k);
    beta(k) = s * p.b_eq(k);
  }
  for (Eigen::Index k = 0; k < n_ub; ++k) {
    const Eigen::Index r = n_eq + k;
    const Eigen::Index slack = extra_slack_of_ub[static_cast<std::size_t>(k)];
    const double s = slack >= 0 ? -1.0 : 1.0;
    sign[static_cast<std::size_t>(r)] = s;
    M.row(r).head(n) = s * p.A_ub.row(k);
    if (slack >= 0) M(r, slack) = s;
    beta(r) = s * p.b_ub(k);
  }
  M.row(t.phase2_row()).head(n) = -p.cost.transpose();
  bool any_artificial = false;
  for (Eigen::Index r = 0; r < R; ++r) {
    if (!artificial[static_cast<std::size_t>(r)]) continue;
    any_artificial = true;
    M.row(t.phase1_row()) += M.row(r);
    beta(t.phase1_row()) += beta(r);
  }

  const std::size_t max_pivots =
      opt.max_pivots > 0 ? opt.max_pivots : static_cast<std::size_t>(50 * (R + ns) + 1000);
  Driver driver(t, opt, max_pivots);
  Solution sol;

  auto finish = [&](Status s) {
    sol.status = s;
    sol.pivots = driver.pivots();
    sol.bland_pivots = driver.bland_pivots();
    return sol;
  };

  if (any_artificial) {
    const LoopResult r1 = driver.run(t.phase1_row());
    if (r1 == LoopResult::IterationLimit) return finish(Status::IterationLimit);
    const double scale = std::max(1.0, p.b_eq.cwiseAbs().sum() + p.b_ub.cwiseAbs().sum());
    if (beta(t.phase1_row()) > opt.feasibility_tolerance * scale) return finish(Status::Infeasible);
    for (Eigen::Index r = 0; r < R; ++r) {
      if (!t.is_artificial(t.basic(r))) continue;
      Eigen::Index best = -1;
      double best_abs = opt.pivot_tolerance * 100.0;
      for (Eigen::Index c = 0; c < t.cols(); ++c) {
        if (t.is_artificial(t.nonbasic(c))) continue;
        const double a = std::abs(M(r, c));
        if (a > best_abs) {
          best_abs = a;
          best = c;
        }
      }
      if (best >= 0) {
        t.pivot(r, best);
      } else {
        t.mark_dead(r);
      }
    }
  }

  const LoopResult r2 = driver.run(t.phase2_row());
  if (r2 == LoopResult::IterationLimit) return finish(Status::IterationLimit);
  if (r2 == LoopResult::Unbounded) return finish(Status::Unbounded);

  sol.x = Vector::Zero(n);
  for (Eigen::Index r = 0; r < R; ++r) {
    const Eigen::Index id = t.basic(r);
    if (id < n) sol.x(id) = std::max(beta(r), 0.0);
  }
  sol.value = p.cost.dot(sol.x);

  sol.dual_eq = Vector::Zero(n_eq);
  sol.dual_ub = Vector::Zero(n_ub);
  for (Eigen::Index r = 0; r < R; ++r) {
    const Eigen::Index c = t.column_of(ns + r);
    const double reduced = c >= 0 ? -M(t.phase2_row(), c) : 0.0;
    const double y = -reduced * sign[static_cast<std::size_t>(r)];
    if (r < n_eq) {
      sol.dual_eq(r) = y;
    } else {
      sol.dual_ub(r - n_eq) = y;
    }
  }
  return finish(Status::Optimal);
}

}  // namespace otl::lp
