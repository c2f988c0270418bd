#include "otlimits/otlimits.h"

#include <cstring>
#include <limits>
#include <string>

#include "otlimits/harness.hpp"
#include "otlimits/parallel.hpp"

struct otl_space {
  otl::GroundSpace space;
};

struct otl_sweep {
  otl::SweepReport report;
};

namespace {

thread_local std::string last_error;

otl_status fail(otl_status s, const std::string& message) {
  last_error = message;
  return s;
}

otl_status status_of(otl::ErrorKind k) {
  switch (k) {
    case otl::ErrorKind::Validation: return OTL_VALIDATION;
    case otl::ErrorKind::Solver: return OTL_SOLVER;
    case otl::ErrorKind::Io: return OTL_IO;
  }
  return OTL_INTERNAL;
}

template <class F>
otl_status guarded(F&& f) {
  try {
    last_error.clear();
    f();
    return OTL_OK;
  } catch (const otl::Error& e) {
    return fail(status_of(e.kind()), e.what());
  } catch (const std::exception& e) {
    return fail(OTL_INTERNAL, e.what());
  } catch (...) {
    return fail(OTL_INTERNAL, "unknown exception");
  }
}

otl::AtomicMeasure measure(const otl_space* s, const double* w) {
  if (!w) throw otl::ValidationError("measure pointer is null");
  const auto m = static_cast<Eigen::Index>(s->space.size());
  return otl::AtomicMeasure(Eigen::Map<const otl::Vector>(w, m));
}

void require(const void* p, const char* what) {
  if (!p) throw otl::ValidationError(std::string(what) + " is null");
}

}  // namespace

extern "C" {

const char* otl_version(void) { return "0.1.0"; }

const char* otl_last_error(void) { return last_error.c_str(); }

size_t otl_thread_count(void) { return otl::thread_count(); }

otl_status otl_space_torus_1d(size_t m, otl_space** out) {
  return guarded([&] {
    require(out, "output handle");
    *out = new otl_space{otl::build_torus_1d(m)};
  });
}

otl_status otl_space_interval(size_t m, otl_space** out) {
  return guarded([&] {
    require(out, "output handle");
    *out = new otl_space{otl::build_interval(m)};
  });
}

otl_status otl_space_from_edges(size_t count, const size_t* from, const size_t* to, const double* weight,
                                otl_space** out) {
  return guarded([&] {
    require(out, "output handle");
    require(from, "edge sources");
    require(to, "edge targets");
    require(weight, "edge weights");
    std::vector<otl::Edge> edges(count);
    for (size_t k = 0; k < count; ++k) edges[k] = {from[k], to[k], weight[k]};
    *out = new otl_space{otl::metric_closure(edges)};
  });
}

void otl_space_free(otl_space* space) { delete space; }

size_t otl_space_size(const otl_space* space) { return space ? space->space.size() : 0; }

otl_status otl_space_distance(const otl_space* space, size_t i, size_t j, double* out) {
  return guarded([&] {
    require(space, "space");
    require(out, "output");
    *out = space->space.distance(i, j);
  });
}

otl_status otl_w1(const otl_space* space, const double* pos, const double* neg, double* primal, double* dual) {
  return guarded([&] {
    require(space, "space");
    const otl::SignedMeasure lambda(measure(space, pos), measure(space, neg));
    if (primal) *primal = otl::w1_primal(space->space, lambda);
    if (dual) *dual = otl::w1_dual(space->space, lambda).value;
  });
}

otl_status otl_wp(const otl_space* space, double p, const double* a, const double* b, double* out) {
  return guarded([&] {
    require(space, "space");
    require(out, "output");
    *out = otl::wasserstein_p(space->space, p, measure(space, a), measure(space, b));
  });
}

otl_status otl_sweep_run(const otl_space* space, double p, const double* pos, const double* neg,
                         const size_t* n_list, size_t count, otl_sweep** out) {
  return guarded([&] {
    require(space, "space");
    require(out, "output handle");
    if (count > 0) require(n_list, "n_list");
    const otl::SignedMeasure lambda(measure(space, pos), measure(space, neg));
    std::vector<std::size_t> ns(n_list, n_list + count);
    *out = new otl_sweep{otl::epsilon_sweep(space->space, p, lambda, ns)};
  });
}

void otl_sweep_free(otl_sweep* sweep) { delete sweep; }

size_t otl_sweep_length(const otl_sweep* sweep) { return sweep ? sweep->report.n_values.size() : 0; }

otl_status otl_sweep_entry(const otl_sweep* sweep, size_t k, size_t* n, double* scaled_value) {
  return guarded([&] {
    require(sweep, "sweep");
    if (k >= sweep->report.n_values.size()) throw otl::ValidationError("sweep entry out of range");
    if (n) *n = sweep->report.n_values[k];
    if (scaled_value) *scaled_value = sweep->report.scaled_values[k];
  });
}

otl_status otl_sweep_mu(const otl_sweep* sweep, size_t k, double* weights) {
  return guarded([&] {
    require(sweep, "sweep");
    require(weights, "weights");
    if (k >= sweep->report.mu_trace.size()) throw otl::ValidationError("sweep entry out of range");
    const otl::Vector& w = sweep->report.mu_trace[k].weights();
    std::memcpy(weights, w.data(), sizeof(double) * static_cast<size_t>(w.size()));
  });
}

double otl_sweep_limit(const otl_sweep* sweep) {
  return sweep ? sweep->report.extrapolated_limit : std::numeric_limits<double>::quiet_NaN();
}

double otl_sweep_rate(const otl_sweep* sweep) {
  return sweep ? sweep->report.observed_rate : std::numeric_limits<double>::quiet_NaN();
}

otl_status otl_conditional(const otl_space* space, double p, double T, const double* pos, const double* neg,
                           const double* mu, double* value, int* bounded) {
  return guarded([&] {
    require(space, "space");
    const otl::SignedMeasure lambda(measure(space, pos), measure(space, neg));
    const otl::CostModel model = otl::CostModel::homogeneous(space->space, p);
    const otl::ConditionalSolution s = otl::chat_conditional(lambda, measure(space, mu), T, model);
    if (value) *value = s.value;
    if (bounded) *bounded = s.bounded ? 1 : 0;
  });
}

otl_status otl_run_experiment(const char* subcommand, const char* config_path, const char* out_dir,
                              uint64_t seed) {
  last_error.clear();
  if (!subcommand || !config_path) return fail(OTL_USAGE, "subcommand and config path are required");
  otl::harness::ExperimentConfig config;
  const otl_status loaded = guarded([&] { config = otl::harness::load_config(config_path); });
  if (loaded != OTL_OK) return loaded;
  const auto r = otl::harness::run(subcommand, config, out_dir ? out_dir : "", seed);
  if (r.exit_code != 0) return fail(static_cast<otl_status>(r.exit_code), r.message);
  return OTL_OK;
}

otl_status otl_run_experiment_json(const char* subcommand, const char* config_json, uint64_t seed,
                                   char** result_json) {
  last_error.clear();
  if (!subcommand || !config_json || !result_json) {
    return fail(OTL_USAGE, "subcommand, config and result pointer are required");
  }
  *result_json = nullptr;
  otl::harness::ExperimentConfig config;
  const otl_status parsed = guarded([&] {
    otl::Json j;
    try {
      j = otl::Json::parse(config_json);
    } catch (const otl::Json::parse_error& e) {
      throw otl::ValidationError(std::string("config is not valid JSON: ") + e.what());
    }
    config = otl::harness::parse_config(j);
  });
  if (parsed != OTL_OK) return parsed;
  const auto r = otl::harness::run(subcommand, config, "", seed);
  if (r.exit_code != 0) return fail(static_cast<otl_status>(r.exit_code), r.message);
  const std::string text = r.result.dump(2);
  char* buf = new char[text.size() + 1];
  std::memcpy(buf, text.c_str(), text.size() + 1);
  *result_json = buf;
  return OTL_OK;
}

void otl_string_free(char* s) { delete[] s; }

}  // extern "C"
