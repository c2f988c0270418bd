#include "otlimits/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include "otlimits/parallel.hpp"

namespace otl::harness {

namespace fs = std::filesystem;

bool SpaceSpec::operator==(const SpaceSpec& o) const {
  if (builder != o.builder || size != o.size || edges.size() != o.edges.size()) return false;
  for (std::size_t k = 0; k < edges.size(); ++k) {
    const Edge& a = edges[k];
    const Edge& b = o.edges[k];
    if (a.from != b.from || a.to != b.to || a.weight != b.weight) return false;
  }
  return true;
}

namespace {

void reject_unknown(const Json& j, const char* where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ValidationError(std::string(where) + " must be a JSON object");
  const std::set<std::string> keys(allowed.begin(), allowed.end());
  for (const auto& item : j.items()) {
    if (!keys.count(item.key())) {
      throw ValidationError("unknown field '" + item.key() + "' in " + where);
    }
  }
}

template <class T>
void read(const Json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

template <class T>
void read_optional(const Json& j, const char* key, std::optional<T>& out) {
  if (j.contains(key) && !j.at(key).is_null()) out = j.at(key).get<T>();
}

std::size_t resolve_point(const std::optional<std::size_t>& index, const std::optional<double>& at,
                          const GroundSpace& space, const char* what) {
  if (index.has_value() == at.has_value()) {
    throw ValidationError(std::string(what) + " needs exactly one of 'index' or 'at'");
  }
  if (index) {
    if (*index >= space.size()) {
      throw ValidationError(std::string(what) + " index " + std::to_string(*index) + " is outside the space");
    }
    return *index;
  }
  return space.nearest_index(*at);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::string text() const {
    std::string out;
    auto line = [&](const std::vector<std::string>& cells) {
      for (std::size_t k = 0; k < cells.size(); ++k) {
        if (k) out += ',';
        out += cells[k];
      }
      out += '\n';
    };
    line(header);
    for (const auto& r : rows) line(r);
    return out;
  }
};

std::string cell(double x) { return std::isnan(x) ? std::string() : format_real(x); }

Table key_value(std::initializer_list<std::pair<const char*, double>> rows) {
  Table t{{"quantity", "value"}, {}};
  for (const auto& [k, v] : rows) t.rows.push_back({k, cell(v)});
  return t;
}

std::vector<std::size_t> require_n_list(const ExperimentConfig& c) {
  if (c.sweep.n_list.empty()) throw ValidationError("sweep.n_list must not be empty for this experiment");
  return c.sweep.n_list;
}

// Random smooth potentials for the effective-Hamiltonian bound; the first
// one is φ ≡ 0.
std::vector<Vector> test_potentials(const GroundSpace& space, std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> coef(0.0, 0.3);
  std::uniform_real_distribution<double> phase(0.0, 1.0);
  const auto m = static_cast<Eigen::Index>(space.size());
  std::vector<Vector> out;
  for (std::size_t k = 0; k < count; ++k) {
    Vector phi = Vector::Zero(m);
    if (k > 0) {
      for (int mode = 1; mode <= 3; ++mode) {
        const double c = coef(rng) / mode;
        const double s = phase(rng);
        for (Eigen::Index i = 0; i < m; ++i) {
          const double x = space.points()[static_cast<std::size_t>(i)][0];
          phi(i) += c * std::sin(2.0 * std::numbers::pi * mode * (x + s));
        }
      }
    }
    out.push_back(phi);
  }
  return out;
}

struct Outcome {
  Json json;
  std::string table;
  std::optional<std::string> plot;
};

Outcome run_w1(const ExperimentConfig& c) {
  const GroundSpace space = build_space(c.space);
  const SignedMeasure lambda = build_lambda(c.lambda, space);
  const double primal = w1_primal(space, lambda);
  const DualPotential dual = w1_dual(space, lambda);
  const double gap = std::abs(primal - dual.value);
  return {Json{{"value", real(primal)}, {"dual", to_json(dual)}, {"duality_gap", real(gap)}},
          key_value({{"primal", primal}, {"dual", dual.value}, {"duality_gap", gap}}).text(),
          std::nullopt};
}

Outcome run_wp(const ExperimentConfig& c) {
  const GroundSpace space = build_space(c.space);
  const SignedMeasure lambda = build_lambda(c.lambda, space);
  const double p = c.sweep.p;
  const double v = wasserstein_p(space, p, lambda.pos(), lambda.neg());
  return {Json{{"p", real(p)}, {"value", real(v)}}, key_value({{"p", p}, {"value", v}}).text(), std::nullopt};
}

Outcome run_sweep(const ExperimentConfig& c) {
  const GroundSpace space = build_space(c.space);
  const SignedMeasure lambda = build_lambda(c.lambda, space);
  const SweepReport r = epsilon_sweep(space, c.sweep.p, lambda, require_n_list(c));
  Json j = to_json(r);
  j["w1"] = real(w1_dual(space, lambda).value);
  return {j, emit_table(r), emit_plotdata(r)};
}

Outcome run_conditional(const ExperimentConfig& c) {
  const GroundSpace space = build_space(c.space);
  const CostModel model = build_model(c.model, space);
  const SignedMeasure lambda = build_lambda(c.lambda, space);
  const AtomicMeasure mu = build_mu(c.mu, space);
  const ConditionalSolution s = chat_conditional(lambda, mu, c.sweep.T, model);
  Json j = to_json(s);
  double w1p = std::numeric_limits<double>::quiet_NaN();
  if (model.is_homogeneous()) {
    w1p = conditional_w1p(space, lambda, mu, model.p());
    j["w1p"] = s.bounded ? real(w1p) : Json(nullptr);
  }
  Table t = key_value({{"value", s.value},
                       {"converged", s.converged ? 1.0 : 0.0},
                       {"bounded", s.bounded ? 1.0 : 0.0},
                       {"iterations", static_cast<double>(s.iterations)},
                       {"gradient_norm", s.gradient_norm},
                       {"w1p", w1p}});
  if (!s.bounded) t.rows[0][1] = "inf";
  return {j, t.text(), std::nullopt};
}

Outcome run_weakkam(const ExperimentConfig& c, std::uint64_t seed) {
  const GroundSpace space = build_space(c.space);
  const CostModel model = build_model(c.model, space);
  const GroundEnergy g = ubar_and_mather(model, c.sweep.T, c.model.steps);
  const auto potentials = test_potentials(space, std::max<std::size_t>(1, c.sweep.test_potentials), seed);
  Table t{{"potential", "h_bound"}, {}};
  Json bounds = Json::array();
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < potentials.size(); ++k) {
    const double b = effective_h_bound(model, potentials[k]);
    best = std::min(best, b);
    bounds.push_back(real(b));
    t.rows.push_back({std::to_string(k), cell(b)});
  }
  Json j = to_json(g);
  j["h_bounds"] = bounds;
  j["min_h_bound"] = real(best);
  j["sandwich_gap"] = real(best - g.ubar);
  return {j, t.text(), std::nullopt};
}

Outcome run_transport_measure(const ExperimentConfig& c) {
  const GroundSpace space = build_space(c.space);
  const SignedMeasure lambda = build_lambda(c.lambda, space);
  const TransportMeasure tm = transport_measure(space, lambda, require_n_list(c), c.sweep.p);
  Table t{{"index", "x", "mu"}, {}};
  for (std::size_t i = 0; i < space.size(); ++i) {
    t.rows.push_back({std::to_string(i), cell(space.points()[i][0]), cell(tm.mu[i])});
  }
  return {to_json(tm), t.text(), std::nullopt};
}

Outcome run_th1(const ExperimentConfig& c) {
  const GroundSpace space = build_space(c.space);
  const CostModel model = build_model(c.model, space);
  const SignedMeasure lambda = build_lambda(c.lambda, space);
  std::vector<double> Ts = c.sweep.T_list;
  if (Ts.empty()) Ts.push_back(c.sweep.T);

  double ubar = 0.0;
  if (!model.is_homogeneous()) ubar = ubar_and_mather(model, 1.0, c.model.steps).ubar;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  double w1 = nan;
  double sweep_limit = nan;
  if (model.is_homogeneous()) {
    w1 = w1_dual(space, lambda).value;
    if (!c.sweep.n_list.empty()) sweep_limit = epsilon_sweep(space, model.p(), lambda, c.sweep.n_list).extrapolated_limit;
  }

  EnergySearch search;
  search.steps = c.model.steps;
  search.e_lo = ubar;
  Table t{{"T", "energy_route", "closed_form", "sweep_route", "shifted"}, {}};
  Json rows = Json::array();
  for (double T : Ts) {
    const double p = model.p();
    const double energy = chat_T_energy(lambda, T, model, search).value;
    const double scale = (p - 1.0) * std::pow(T, p - 1.0);
    const double closed = model.is_homogeneous() ? std::pow(w1, p) / scale : nan;
    const double swept = std::isnan(sweep_limit) ? nan : std::pow(sweep_limit, p) / scale;
    const double shifted = energy + T * ubar;
    t.rows.push_back({cell(T), cell(energy), cell(closed), cell(swept), cell(shifted)});
    rows.push_back(Json{{"T", real(T)},
                        {"energy_route", real(energy)},
                        {"closed_form", real(closed)},
                        {"sweep_route", real(swept)},
                        {"shifted", real(shifted)}});
  }
  return {Json{{"ubar", real(ubar)}, {"w1", real(w1)}, {"rows", rows}}, t.text(), std::nullopt};
}

Outcome run_th5(const ExperimentConfig& c) {
  const GroundSpace space = build_space(c.space);
  const SignedMeasure lambda = build_lambda(c.lambda, space);
  const TransportMeasure tm = transport_measure(space, lambda, require_n_list(c), c.sweep.p);
  MuSpec point;
  point.kind = "dirac";
  point.index = c.mu.index;
  point.at = c.mu.at;
  if (!point.index && !point.at) point.index = space.size() / 2;
  const std::vector<AtomicMeasure> cands{uniform(space), tm.mu, build_mu(point, space)};
  const Th5Result r = th5_spotcheck(space, lambda, c.sweep.p, cands, c.sweep.T);
  const char* names[] = {"uniform", "transport_measure", "point_mass"};
  Table t{{"candidate", "value"}, {}};
  for (std::size_t k = 0; k < cands.size(); ++k) {
    const double v = r.candidate_values[k];
    t.rows.push_back({names[k], std::isinf(v) ? std::string("inf") : cell(v)});
  }
  t.rows.push_back({"unconditional", cell(r.unconditional)});
  Json j = to_json(r);
  j["candidates"] = {names[0], names[1], names[2]};
  return {j, t.text(), std::nullopt};
}

Outcome run_liminf(const ExperimentConfig& c) {
  const GroundSpace space = build_space(c.space);
  const SignedMeasure lambda = build_lambda(c.lambda, space);
  const AtomicMeasure mu = build_mu(c.mu, space);
  const auto rows = gamma_liminf_check(space, c.sweep.p, lambda, mu, require_n_list(c), c.sweep.T);
  Table t{{"n", "F_n", "lower_bound", "margin", "slack", "holds"}, {}};
  Json j = Json::array();
  std::size_t violations = 0;
  for (const auto& r : rows) {
    t.rows.push_back({std::to_string(r.n), cell(r.F_n), cell(r.lower_bound), cell(r.margin), cell(r.slack),
                      r.holds ? "1" : "0"});
    j.push_back(to_json(r));
    if (!r.holds) ++violations;
  }
  return {Json{{"rows", j}, {"violations", violations}}, t.text(), std::nullopt};
}

int code_for(ErrorKind k) {
  switch (k) {
    case ErrorKind::Validation: return kValidation;
    case ErrorKind::Solver: return kSolver;
    case ErrorKind::Io: return kIo;
  }
  return kInternal;
}

}  // namespace

ExperimentConfig parse_config(const Json& j) {
  try {
    reject_unknown(j, "config", {"schema_version", "space", "model", "lambda", "mu", "sweep", "output"});
    ExperimentConfig c;
    if (!j.contains("schema_version")) throw ValidationError("config is missing 'schema_version'");
    c.schema_version = j.at("schema_version").get<int>();
    if (c.schema_version != kSchemaVersion) {
      throw ValidationError("unsupported schema_version " + std::to_string(c.schema_version) + " (expected " +
                            std::to_string(kSchemaVersion) + ")");
    }
    if (!j.contains("space")) throw ValidationError("config is missing 'space'");
    const Json& s = j.at("space");
    reject_unknown(s, "space", {"builder", "size", "edges"});
    read(s, "builder", c.space.builder);
    read(s, "size", c.space.size);
    if (s.contains("edges")) {
      for (const auto& e : s.at("edges")) {
        if (!e.is_array() || e.size() != 3) throw ValidationError("graph edges are [from, to, weight] triples");
        c.space.edges.push_back({e[0].get<std::size_t>(), e[1].get<std::size_t>(), e[2].get<double>()});
      }
    }
    if (j.contains("model")) {
      const Json& m = j.at("model");
      reject_unknown(m, "model", {"kind", "p", "potential", "amplitude", "shift", "steps"});
      read(m, "kind", c.model.kind);
      read(m, "p", c.model.p);
      read(m, "potential", c.model.potential);
      read(m, "amplitude", c.model.amplitude);
      read(m, "shift", c.model.shift);
      read(m, "steps", c.model.steps);
    }
    if (j.contains("lambda")) {
      if (!j.at("lambda").is_array()) throw ValidationError("lambda must be a list of atoms");
      for (const auto& a : j.at("lambda")) {
        reject_unknown(a, "lambda atom", {"index", "at", "weight"});
        Atom atom;
        read_optional(a, "index", atom.index);
        read_optional(a, "at", atom.at);
        if (!a.contains("weight")) throw ValidationError("lambda atom is missing 'weight'");
        atom.weight = a.at("weight").get<double>();
        c.lambda.push_back(atom);
      }
    }
    if (j.contains("mu")) {
      const Json& m = j.at("mu");
      reject_unknown(m, "mu", {"kind", "index", "at", "amplitude", "shift", "weights"});
      read(m, "kind", c.mu.kind);
      read_optional(m, "index", c.mu.index);
      read_optional(m, "at", c.mu.at);
      read(m, "amplitude", c.mu.amplitude);
      read(m, "shift", c.mu.shift);
      read(m, "weights", c.mu.weights);
    }
    if (j.contains("sweep")) {
      const Json& w = j.at("sweep");
      reject_unknown(w, "sweep", {"n_list", "T", "p", "T_list", "test_potentials"});
      read(w, "n_list", c.sweep.n_list);
      read(w, "T", c.sweep.T);
      read(w, "p", c.sweep.p);
      read(w, "T_list", c.sweep.T_list);
      read(w, "test_potentials", c.sweep.test_potentials);
    }
    if (j.contains("output")) {
      const Json& o = j.at("output");
      reject_unknown(o, "output", {"json", "csv", "plot"});
      read(o, "json", c.output.json);
      read(o, "csv", c.output.csv);
      read(o, "plot", c.output.plot);
    }
    return c;
  } catch (const Json::exception& e) {
    throw ValidationError(std::string("malformed config: ") + e.what());
  }
}

ExperimentConfig load_config(const std::string& path) {
  const std::string text = read_file(path);
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ValidationError("config '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_config(j);
}

Json emit_config(const ExperimentConfig& c) {
  Json space{{"builder", c.space.builder}, {"size", c.space.size}};
  if (!c.space.edges.empty()) {
    Json edges = Json::array();
    for (const Edge& e : c.space.edges) edges.push_back(Json::array({e.from, e.to, e.weight}));
    space["edges"] = edges;
  }
  Json lambda = Json::array();
  for (const Atom& a : c.lambda) {
    Json atom{{"weight", a.weight}};
    if (a.index) atom["index"] = *a.index;
    if (a.at) atom["at"] = *a.at;
    lambda.push_back(atom);
  }
  Json mu{{"kind", c.mu.kind}, {"amplitude", c.mu.amplitude}, {"shift", c.mu.shift}};
  if (c.mu.index) mu["index"] = *c.mu.index;
  if (c.mu.at) mu["at"] = *c.mu.at;
  if (!c.mu.weights.empty()) mu["weights"] = c.mu.weights;
  return Json{{"schema_version", c.schema_version},
              {"space", space},
              {"model",
               {{"kind", c.model.kind},
                {"p", c.model.p},
                {"potential", c.model.potential},
                {"amplitude", c.model.amplitude},
                {"shift", c.model.shift},
                {"steps", c.model.steps}}},
              {"lambda", lambda},
              {"mu", mu},
              {"sweep",
               {{"n_list", c.sweep.n_list},
                {"T", c.sweep.T},
                {"p", c.sweep.p},
                {"T_list", c.sweep.T_list},
                {"test_potentials", c.sweep.test_potentials}}},
              {"output", {{"json", c.output.json}, {"csv", c.output.csv}, {"plot", c.output.plot}}}};
}

GroundSpace build_space(const SpaceSpec& spec) {
  if (spec.builder == "torus_1d") return build_torus_1d(spec.size);
  if (spec.builder == "interval") return build_interval(spec.size);
  if (spec.builder == "graph") return metric_closure(spec.edges);
  throw ValidationError("unknown space builder '" + spec.builder + "' (expected torus_1d, interval or graph)");
}

CostModel build_model(const ModelSpec& spec, const GroundSpace& space) {
  if (spec.kind == "homogeneous") return CostModel::homogeneous(space, spec.p);
  if (spec.kind == "mechanical") {
    return CostModel::mechanical(space, catalogue_potential(space, spec.potential, spec.amplitude, spec.shift));
  }
  throw ValidationError("unknown model kind '" + spec.kind + "' (expected homogeneous or mechanical)");
}

SignedMeasure build_lambda(const std::vector<Atom>& atoms, const GroundSpace& space) {
  Vector diff = Vector::Zero(static_cast<Eigen::Index>(space.size()));
  for (const Atom& a : atoms) {
    if (!std::isfinite(a.weight)) throw ValidationError("lambda weights must be finite");
    diff(static_cast<Eigen::Index>(resolve_point(a.index, a.at, space, "lambda atom"))) += a.weight;
  }
  Vector pos = diff.cwiseMax(0.0);
  Vector neg = (-diff).cwiseMax(0.0);
  return SignedMeasure(AtomicMeasure(pos), AtomicMeasure(neg));
}

AtomicMeasure build_mu(const MuSpec& spec, const GroundSpace& space) {
  if (spec.kind == "uniform") return uniform(space);
  if (spec.kind == "dirac") return dirac(space, resolve_point(spec.index, spec.at, space, "mu"));
  if (spec.kind == "smooth") {
    if (!(std::abs(spec.amplitude) < 1.0)) throw ValidationError("smooth mu needs |amplitude| < 1");
    Vector w(static_cast<Eigen::Index>(space.size()));
    for (std::size_t i = 0; i < space.size(); ++i) {
      const double x = space.points()[i][0];
      w(static_cast<Eigen::Index>(i)) = 1.0 + spec.amplitude * std::cos(2.0 * std::numbers::pi * (x - spec.shift));
    }
    return AtomicMeasure(w / w.sum());
  }
  if (spec.kind == "weights") {
    if (spec.weights.size() != space.size()) throw ValidationError("mu weights do not match the space size");
    AtomicMeasure mu(Eigen::Map<const Vector>(spec.weights.data(), static_cast<Eigen::Index>(spec.weights.size())));
    if (std::abs(mu.mass() - 1.0) > 1e-9) throw ValidationError("mu weights must sum to 1");
    return mu;
  }
  throw ValidationError("unknown mu kind '" + spec.kind + "' (expected uniform, dirac, smooth or weights)");
}

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names{"w1",          "wp",
                                              "sweep",       "conditional",
                                              "weakkam",     "transport-measure",
                                              "th1-check",   "th5-check",
                                              "liminf-check"};
  return names;
}

std::string format_real(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12e", x);
  return buf;
}

std::string emit_table(const SweepReport& report) {
  const std::vector<double> gaps = sweep_gaps(report);
  const std::vector<double> rates = sweep_rates(report);
  std::string out = "n,scaled_value,gap,rate\n";
  for (std::size_t k = 0; k < report.n_values.size(); ++k) {
    out += std::to_string(report.n_values[k]);
    out += ',';
    out += cell(report.scaled_values[k]);
    out += ',';
    if (k >= 1) out += cell(gaps[k - 1]);
    out += ',';
    if (k >= 2) out += cell(rates[k - 2]);
    out += '\n';
  }
  return out;
}

std::string emit_plotdata(const SweepReport& report) {
  std::string out = "# n scaled_value\n";
  for (std::size_t k = 0; k < report.n_values.size(); ++k) {
    out += std::to_string(report.n_values[k]) + ' ' + format_real(report.scaled_values[k]) + '\n';
  }
  return out;
}

RunResult run(const std::string& subcommand, const ExperimentConfig& config, const std::string& out_dir,
              std::uint64_t seed) {
  RunResult result;
  try {
    Outcome o;
    if (subcommand == "w1") {
      o = run_w1(config);
    } else if (subcommand == "wp") {
      o = run_wp(config);
    } else if (subcommand == "sweep") {
      o = run_sweep(config);
    } else if (subcommand == "conditional") {
      o = run_conditional(config);
    } else if (subcommand == "weakkam") {
      o = run_weakkam(config, seed);
    } else if (subcommand == "transport-measure") {
      o = run_transport_measure(config);
    } else if (subcommand == "th1-check") {
      o = run_th1(config);
    } else if (subcommand == "th5-check") {
      o = run_th5(config);
    } else if (subcommand == "liminf-check") {
      o = run_liminf(config);
    } else {
      result.exit_code = kUsage;
      result.message = "unknown subcommand '" + subcommand + "'";
      return result;
    }

    o.json["experiment"] = subcommand;
    o.json["seed"] = seed;
    result.result = o.json;

    if (!out_dir.empty()) {
      std::error_code ec;
      fs::create_directories(out_dir, ec);
      if (ec) throw IoError("cannot create output directory '" + out_dir + "': " + ec.message());
      write_file(fs::path(out_dir) / config.output.json, o.json.dump(2) + "\n");
      write_file(fs::path(out_dir) / config.output.csv, o.table);
      if (o.plot) write_file(fs::path(out_dir) / config.output.plot, *o.plot);
    }
  } catch (const Error& e) {
    result.exit_code = code_for(e.kind());
    result.message = e.what();
  } catch (const Json::exception& e) {
    result.exit_code = kValidation;
    result.message = std::string("malformed input: ") + e.what();
  } catch (const std::exception& e) {
    result.exit_code = kInternal;
    result.message = std::string("internal error: ") + e.what();
  }
  return result;
}

}  // namespace otl::harness
