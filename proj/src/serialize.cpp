#include "otlimits/serialize.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace otl {

namespace {

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw ValidationError(std::string("missing JSON field '") + key + "'");
  return j.at(key);
}

}  // namespace

Json real(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

double real_from_json(const Json& j) {
  if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
  if (!j.is_number()) throw ValidationError("expected a number, got " + std::string(j.type_name()));
  return j.get<double>();
}

Json to_json(const Vector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(real(v(i)));
  return out;
}

Json to_json(const Matrix& m) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(real(m(i, j)));
    out.push_back(std::move(row));
  }
  return out;
}

Vector vector_from_json(const Json& j) {
  if (!j.is_array()) throw ValidationError("expected a JSON array of numbers");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = real_from_json(j[i]);
  return v;
}

Matrix matrix_from_json(const Json& j) {
  if (!j.is_array()) throw ValidationError("expected a JSON array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = rows == 0 ? Eigen::Index{0} : static_cast<Eigen::Index>(j[0].size());
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const Vector r = vector_from_json(j[static_cast<std::size_t>(i)]);
    if (r.size() != cols) throw ValidationError("matrix rows have different lengths");
    m.row(i) = r.transpose();
  }
  return m;
}

Json to_json(const GroundSpace& space) {
  Json points = Json::array();
  for (const auto& p : space.points()) points.push_back(p);
  return Json{{"points", points}, {"dist", to_json(space.dist())}, {"topology", topology_name(space.topology())}};
}

GroundSpace space_from_json(const Json& j) {
  std::vector<std::vector<double>> points;
  for (const auto& p : field(j, "points")) points.push_back(p.get<std::vector<double>>());
  Topology topology = Topology::General;
  if (j.contains("topology")) {
    const auto name = j.at("topology").get<std::string>();
    if (name == topology_name(Topology::Torus1D)) {
      topology = Topology::Torus1D;
    } else if (name == topology_name(Topology::Interval)) {
      topology = Topology::Interval;
    } else if (name != topology_name(Topology::General)) {
      throw ValidationError("unknown topology '" + name + "'");
    }
  }
  return GroundSpace(std::move(points), matrix_from_json(field(j, "dist")), topology);
}

Json to_json(const AtomicMeasure& mu) { return Json{{"weights", to_json(mu.weights())}}; }

AtomicMeasure measure_from_json(const Json& j) { return AtomicMeasure(vector_from_json(field(j, "weights"))); }

Json to_json(const SignedMeasure& lambda) {
  return Json{{"pos", to_json(lambda.pos())}, {"neg", to_json(lambda.neg())}};
}

SignedMeasure signed_from_json(const Json& j) {
  return SignedMeasure(measure_from_json(field(j, "pos")), measure_from_json(field(j, "neg")));
}

Json to_json(const TransportPlan& plan) { return Json{{"value", real(plan.value)}, {"plan", to_json(plan.plan)}}; }

Json to_json(const JointSolution& s) {
  return Json{{"value", real(s.value)}, {"plan", to_json(s.plan.plan)}, {"mu", to_json(s.mu.weights())}};
}

Json to_json(const CirculationSolution& s) {
  return Json{{"value", real(s.plan.value)}, {"plan", to_json(s.plan.plan)}, {"mu", to_json(s.mu.weights())}};
}

Json to_json(const DualPotential& d) { return Json{{"phi", to_json(d.phi)}, {"value", real(d.value)}}; }

DualPotential dual_from_json(const Json& j) {
  DualPotential d;
  d.phi = vector_from_json(field(j, "phi"));
  d.value = real_from_json(field(j, "value"));
  return d;
}

Json to_json(const ActionTable& t) { return Json{{"T", real(t.T)}, {"steps", t.steps}, {"C", to_json(t.C)}}; }

ActionTable action_table_from_json(const Json& j) {
  ActionTable t;
  t.T = real_from_json(field(j, "T"));
  t.steps = field(j, "steps").get<std::size_t>();
  t.C = matrix_from_json(field(j, "C"));
  return t;
}

Json to_json(const GroundEnergy& g) {
  return Json{{"ubar", real(g.ubar)},
              {"mather", to_json(g.mather.weights())},
              {"circulation_value", real(g.circulation_value)}};
}

Json to_json(const SweepReport& r) {
  Json trace = Json::array();
  for (const auto& mu : r.mu_trace) trace.push_back(to_json(mu.weights()));
  Json scaled = Json::array();
  for (double v : r.scaled_values) scaled.push_back(real(v));
  return Json{{"p", real(r.p)},
              {"n_values", r.n_values},
              {"scaled_values", scaled},
              {"extrapolated_limit", real(r.extrapolated_limit)},
              {"observed_rate", real(r.observed_rate)},
              {"mu_trace", trace}};
}

SweepReport sweep_from_json(const Json& j) {
  SweepReport r;
  r.p = real_from_json(field(j, "p"));
  r.n_values = field(j, "n_values").get<std::vector<std::size_t>>();
  for (const auto& v : field(j, "scaled_values")) r.scaled_values.push_back(real_from_json(v));
  r.extrapolated_limit = real_from_json(field(j, "extrapolated_limit"));
  r.observed_rate = real_from_json(field(j, "observed_rate"));
  for (const auto& mu : field(j, "mu_trace")) r.mu_trace.emplace_back(vector_from_json(mu));
  if (r.scaled_values.size() != r.n_values.size() || r.mu_trace.size() != r.n_values.size()) {
    throw ValidationError("sweep report lists have different lengths");
  }
  return r;
}

Json to_json(const ConditionalSolution& s) {
  return Json{{"phi", to_json(s.phi)},          {"value", real(s.value)},
              {"converged", s.converged},       {"bounded", s.bounded},
              {"iterations", s.iterations},     {"gradient_norm", real(s.gradient_norm)}};
}

ConditionalSolution conditional_from_json(const Json& j) {
  ConditionalSolution s;
  s.phi = vector_from_json(field(j, "phi"));
  s.bounded = field(j, "bounded").get<bool>();
  s.value = s.bounded ? real_from_json(field(j, "value")) : std::numeric_limits<double>::infinity();
  s.converged = field(j, "converged").get<bool>();
  s.iterations = field(j, "iterations").get<std::size_t>();
  s.gradient_norm = real_from_json(field(j, "gradient_norm"));
  return s;
}

Json to_json(const LiminfRow& row) {
  return Json{{"n", row.n},
              {"F_n", real(row.F_n)},
              {"lower_bound", real(row.lower_bound)},
              {"margin", real(row.margin)},
              {"slack", real(row.slack)},
              {"holds", row.holds}};
}

Json to_json(const TransportMeasure& t) {
  return Json{{"mu", to_json(t.mu.weights())}, {"tv_last_two", real(t.tv_last_two)}, {"sweep", to_json(t.sweep)}};
}

Json to_json(const Th5Result& r) {
  Json values = Json::array();
  for (double v : r.candidate_values) values.push_back(real(v));
  return Json{{"candidate_values", values},
              {"min_over_candidates", real(r.min_over_candidates)},
              {"unconditional", real(r.unconditional)}};
}

Json to_json(const EnergyResult& r) {
  return Json{{"value", real(r.value)}, {"energy", real(r.energy)}, {"evaluations", r.evaluations}};
}

}  // namespace otl
