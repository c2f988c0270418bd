#include "otlimits/core.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

namespace otl {

namespace {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

void validate_metric(const Matrix& d) {
  const Eigen::Index m = d.rows();
  if (m == 0 || d.cols() != m) {
    throw ValidationError("distance matrix must be square and nonempty");
  }
  double scale = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      const double v = d(i, j);
      if (!std::isfinite(v) || v < 0.0) {
        throw ValidationError("distance entry (" + std::to_string(i) + "," + std::to_string(j) +
                              ") is not a finite nonnegative number");
      }
      scale = std::max(scale, v);
    }
  }
  for (Eigen::Index i = 0; i < m; ++i) {
    if (d(i, i) != 0.0) {
      throw ValidationError("distance diagonal entry " + std::to_string(i) + " is not zero");
    }
    for (Eigen::Index j = i + 1; j < m; ++j) {
      if (d(i, j) != d(j, i)) {
        throw ValidationError("distance matrix is not symmetric at (" + std::to_string(i) + "," +
                              std::to_string(j) + ")");
      }
    }
  }
  const double slack = 1e-12 * std::max(scale, 1.0);
  for (Eigen::Index j = 0; j < m; ++j) {
    for (Eigen::Index k = 0; k < m; ++k) {
      const double djk = d(j, k);
      for (Eigen::Index i = 0; i < m; ++i) {
        if (d(i, k) > d(i, j) + djk + slack) {
          throw ValidationError("triangle inequality fails for (" + std::to_string(i) + "," +
                                std::to_string(j) + "," + std::to_string(k) + ")");
        }
      }
    }
  }
}

}  // namespace

const char* topology_name(Topology t) {
  switch (t) {
    case Topology::Torus1D: return "torus_1d";
    case Topology::Interval: return "interval";
    case Topology::General: return "general";
  }
  return "general";
}

struct GroundSpace::Data {
  std::vector<std::vector<double>> points;
  Matrix dist;
  Topology topology;
  double diameter;
};

GroundSpace::GroundSpace(std::vector<std::vector<double>> points, Matrix dist, Topology topology) {
  validate_metric(dist);
  if (points.size() != static_cast<std::size_t>(dist.rows())) {
    throw ValidationError("point count " + std::to_string(points.size()) +
                          " does not match distance matrix size " + std::to_string(dist.rows()));
  }
  if (topology != Topology::General && dist.rows() < 2) {
    throw ValidationError("grid topologies need at least two points");
  }
  auto data = std::make_shared<Data>();
  data->points = std::move(points);
  data->diameter = dist.maxCoeff();
  data->dist = std::move(dist);
  data->topology = topology;
  data_ = std::move(data);
}

std::size_t GroundSpace::size() const noexcept { return static_cast<std::size_t>(data_->dist.rows()); }
const Matrix& GroundSpace::dist() const noexcept { return data_->dist; }
const std::vector<std::vector<double>>& GroundSpace::points() const noexcept { return data_->points; }
Topology GroundSpace::topology() const noexcept { return data_->topology; }
double GroundSpace::diameter() const noexcept { return data_->diameter; }

double GroundSpace::distance(std::size_t i, std::size_t j) const {
  if (i >= size() || j >= size()) {
    throw ValidationError("point index out of range");
  }
  return data_->dist(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
}

std::size_t GroundSpace::forward_neighbour(std::size_t i) const {
  const std::size_t m = size();
  if (i >= m) throw ValidationError("point index out of range");
  switch (topology()) {
    case Topology::Torus1D: return (i + 1) % m;
    case Topology::Interval: return i + 1 < m ? i + 1 : m - 2;
    case Topology::General: break;
  }
  throw ValidationError("discrete gradients need a torus or interval ground space");
}

std::size_t GroundSpace::nearest_index(double x) const {
  const std::size_t m = size();
  switch (topology()) {
    case Topology::Torus1D: {
      double k = std::round((x - std::floor(x)) * static_cast<double>(m));
      return static_cast<std::size_t>(k) % m;
    }
    case Topology::Interval: {
      if (x < 0.0 || x > 1.0) throw ValidationError("coordinate " + format_double(x) + " outside [0,1]");
      return static_cast<std::size_t>(std::round(x * static_cast<double>(m - 1)));
    }
    case Topology::General: break;
  }
  throw ValidationError("coordinates are only meaningful on torus or interval spaces");
}

GroundSpace build_torus_1d(std::size_t m) {
  if (m < 2) throw ValidationError("torus needs m >= 2, got " + std::to_string(m));
  const auto n = static_cast<Eigen::Index>(m);
  Matrix d(n, n);
  std::vector<std::vector<double>> pts(m);
  for (Eigen::Index i = 0; i < n; ++i) {
    pts[static_cast<std::size_t>(i)] = {static_cast<double>(i) / static_cast<double>(m)};
    for (Eigen::Index j = 0; j < n; ++j) {
      const Eigen::Index k = std::abs(i - j);
      d(i, j) = static_cast<double>(std::min(k, n - k)) / static_cast<double>(m);
    }
  }
  return GroundSpace(std::move(pts), std::move(d), Topology::Torus1D);
}

GroundSpace build_interval(std::size_t m) {
  if (m < 2) throw ValidationError("interval needs m >= 2, got " + std::to_string(m));
  const auto n = static_cast<Eigen::Index>(m);
  const double h = static_cast<double>(m - 1);
  Matrix d(n, n);
  std::vector<std::vector<double>> pts(m);
  for (Eigen::Index i = 0; i < n; ++i) {
    pts[static_cast<std::size_t>(i)] = {static_cast<double>(i) / h};
    for (Eigen::Index j = 0; j < n; ++j) {
      d(i, j) = static_cast<double>(std::abs(i - j)) / h;
    }
  }
  return GroundSpace(std::move(pts), std::move(d), Topology::Interval);
}

GroundSpace metric_closure(std::span<const Edge> edges) {
  if (edges.empty()) throw ValidationError("metric closure needs at least one edge");
  std::size_t m = 0;
  for (const auto& e : edges) m = std::max({m, e.from + 1, e.to + 1});
  const auto n = static_cast<Eigen::Index>(m);
  const double inf = std::numeric_limits<double>::infinity();
  Matrix d = Matrix::Constant(n, n, inf);
  d.diagonal().setZero();
  for (const auto& e : edges) {
    if (!(e.weight > 0.0) || !std::isfinite(e.weight)) {
      throw ValidationError("edge weights must be finite and positive");
    }
    const auto a = static_cast<Eigen::Index>(e.from);
    const auto b = static_cast<Eigen::Index>(e.to);
    if (a == b) continue;
    d(a, b) = std::min(d(a, b), e.weight);
    d(b, a) = d(a, b);
  }
  // Floyd–Warshall
  for (Eigen::Index k = 0; k < n; ++k) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double dkj = d(k, j);
      if (dkj == inf) continue;
      for (Eigen::Index i = 0; i < n; ++i) {
        const double via = d(i, k) + dkj;
        if (via < d(i, j)) d(i, j) = via;
      }
    }
  }
  if (!d.allFinite()) {
    throw ValidationError("graph is disconnected; infinite distances are not representable");
  }
  // Shortest-path sums can differ in the last bit depending on direction.
  d = 0.5 * (d + d.transpose()).eval();
  std::vector<std::vector<double>> pts(m);
  for (std::size_t i = 0; i < m; ++i) pts[i] = {static_cast<double>(i)};
  return GroundSpace(std::move(pts), std::move(d), Topology::General);
}

AtomicMeasure::AtomicMeasure(Vector weights) : weights_(std::move(weights)) {
  for (Eigen::Index i = 0; i < weights_.size(); ++i) {
    const double w = weights_(i);
    if (!std::isfinite(w) || w < 0.0) {
      throw ValidationError("measure weight " + std::to_string(i) + " = " + format_double(w) +
                            " is not a finite nonnegative number");
    }
  }
}

AtomicMeasure AtomicMeasure::clamped(Vector weights, double slack) {
  for (Eigen::Index i = 0; i < weights.size(); ++i) {
    if (weights(i) < 0.0 && weights(i) >= -slack) weights(i) = 0.0;
  }
  return AtomicMeasure(std::move(weights));
}

AtomicMeasure dirac(const GroundSpace& space, std::size_t i, double mass) {
  if (i >= space.size()) throw ValidationError("dirac index " + std::to_string(i) + " out of range");
  Vector w = Vector::Zero(static_cast<Eigen::Index>(space.size()));
  w(static_cast<Eigen::Index>(i)) = mass;
  return AtomicMeasure(std::move(w));
}

AtomicMeasure uniform(const GroundSpace& space) {
  const auto m = static_cast<Eigen::Index>(space.size());
  return AtomicMeasure(Vector::Constant(m, 1.0 / static_cast<double>(m)));
}

AtomicMeasure zero_measure(const GroundSpace& space) {
  return AtomicMeasure(Vector::Zero(static_cast<Eigen::Index>(space.size())));
}

AtomicMeasure shifted(const AtomicMeasure& base, double scale, const AtomicMeasure& extra) {
  if (base.size() != extra.size()) throw ValidationError("measure sizes differ");
  return AtomicMeasure(base.weights() + scale * extra.weights());
}

double total_variation(const AtomicMeasure& a, const AtomicMeasure& b) {
  if (a.size() != b.size()) throw ValidationError("measure sizes differ");
  return 0.5 * (a.weights() - b.weights()).cwiseAbs().sum();
}

SignedMeasure::SignedMeasure(AtomicMeasure pos, AtomicMeasure neg)
    : pos_(std::move(pos)), neg_(std::move(neg)) {
  if (pos_.size() != neg_.size()) {
    throw ValidationError("signed measure parts have different sizes");
  }
  const double gap = pos_.mass() - neg_.mass();
  if (std::abs(gap) > kMassTolerance) {
    throw ValidationError("signed measure is unbalanced: mass gap |λ⁺| − |λ⁻| = " + format_double(gap));
  }
}

SignedMeasure SignedMeasure::from_difference(const Vector& lambda) {
  return SignedMeasure(AtomicMeasure(lambda.cwiseMax(0.0)), AtomicMeasure((-lambda).cwiseMax(0.0)));
}

bool SignedMeasure::is_zero(double tol) const {
  return difference().cwiseAbs().maxCoeff() <= tol;
}

SignedMeasure signed_measure(AtomicMeasure pos, AtomicMeasure neg) {
  return SignedMeasure(std::move(pos), std::move(neg));
}

}  // namespace otl
