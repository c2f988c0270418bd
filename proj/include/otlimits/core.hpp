#pragma once

// Finite ground spaces (discretized manifolds) and atomic measures on them.

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "otlimits/error.hpp"

namespace otl {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Absolute tolerance on |λ⁺| − |λ⁻| for signed measures.
inline constexpr double kMassTolerance = 1e-12;

/// How a ground space was discretized. Grid topologies carry a forward
/// neighbour for discrete gradients; general metric spaces do not.
enum class Topology { Torus1D, Interval, General };

const char* topology_name(Topology t);

/// Finite metric space: point coordinates plus a dense distance matrix.
///
/// Immutable after construction. Copies share the underlying storage, so
/// passing a GroundSpace by value is cheap and thread-safe.
class GroundSpace {
 public:
  /// Validates symmetry, zero diagonal, finiteness, nonnegativity and the
  /// triangle inequality (exhaustive triple loop, relative slack 1e-12).
  GroundSpace(std::vector<std::vector<double>> points, Matrix dist,
              Topology topology = Topology::General);

  std::size_t size() const noexcept;
  const Matrix& dist() const noexcept;
  double distance(std::size_t i, std::size_t j) const;
  const std::vector<std::vector<double>>& points() const noexcept;
  Topology topology() const noexcept;
  double diameter() const noexcept;

  bool has_grid() const noexcept { return topology() != Topology::General; }

  /// Neighbour used by the forward-difference gradient: i+1 (mod m) on the
  /// torus; i+1 on the interval except the last point, which looks back.
  std::size_t forward_neighbour(std::size_t i) const;

  /// Grid index closest to coordinate x (wrapping on the torus).
  std::size_t nearest_index(double x) const;

 private:
  struct Data;
  std::shared_ptr<const Data> data_;
};

GroundSpace build_torus_1d(std::size_t m);
GroundSpace build_interval(std::size_t m);

struct Edge {
  std::size_t from;
  std::size_t to;
  double weight;
};

/// All-pairs shortest paths over an undirected weighted graph. Node count
/// is one past the largest index mentioned.
GroundSpace metric_closure(std::span<const Edge> edges);

/// Nonnegative finite weights on the points of a ground space.
class AtomicMeasure {
 public:
  AtomicMeasure() = default;
  explicit AtomicMeasure(Vector weights);

  const Vector& weights() const noexcept { return weights_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(weights_.size()); }
  double mass() const noexcept { return weights_.sum(); }
  double operator[](std::size_t i) const { return weights_(static_cast<Eigen::Index>(i)); }

  /// Weights below zero by no more than `slack` are clamped; anything more
  /// negative is rejected. Used when reading measures back out of an LP.
  static AtomicMeasure clamped(Vector weights, double slack = 1e-9);

 private:
  Vector weights_;
};

AtomicMeasure dirac(const GroundSpace& space, std::size_t i, double mass = 1.0);
AtomicMeasure uniform(const GroundSpace& space);
AtomicMeasure zero_measure(const GroundSpace& space);

/// base + scale·extra, entrywise.
AtomicMeasure shifted(const AtomicMeasure& base, double scale, const AtomicMeasure& extra);

/// ½ Σ |a − b|.
double total_variation(const AtomicMeasure& a, const AtomicMeasure& b);

/// A balanced pair (λ⁺, λ⁻) representing λ = λ⁺ − λ⁻ with ∫dλ = 0.
class SignedMeasure {
 public:
  SignedMeasure(AtomicMeasure pos, AtomicMeasure neg);

  /// Splits a signed weight vector into positive and negative parts.
  static SignedMeasure from_difference(const Vector& lambda);

  const AtomicMeasure& pos() const noexcept { return pos_; }
  const AtomicMeasure& neg() const noexcept { return neg_; }
  std::size_t size() const noexcept { return pos_.size(); }
  Vector difference() const { return pos_.weights() - neg_.weights(); }
  double mass() const noexcept { return pos_.mass(); }
  double total_variation() const noexcept { return pos_.mass() + neg_.mass(); }
  bool is_zero(double tol = kMassTolerance) const;

 private:
  AtomicMeasure pos_;
  AtomicMeasure neg_;
};

SignedMeasure signed_measure(AtomicMeasure pos, AtomicMeasure neg);

}  // namespace otl
