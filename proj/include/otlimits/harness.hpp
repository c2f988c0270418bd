#pragma once

// Declarative experiment configs and the subcommand runner behind the CLI.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "otlimits/serialize.hpp"

namespace otl::harness {

inline constexpr int kSchemaVersion = 1;

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kValidation = 2,
  kSolver = 3,
  kIo = 4,
  kInternal = 5,
};

struct SpaceSpec {
  std::string builder = "torus_1d";  // torus_1d | interval | graph
  std::size_t size = 0;
  std::vector<Edge> edges;  // graph only
  bool operator==(const SpaceSpec& o) const;
};

struct ModelSpec {
  std::string kind = "homogeneous";  // homogeneous | mechanical
  double p = 2.0;
  std::string potential = "cosine";  // mechanical only
  double amplitude = 1.0;
  double shift = 0.0;
  std::size_t steps = 0;  // Bellman steps, 0 = one per grid point
  bool operator==(const ModelSpec&) const = default;
};

/// A point is named either by grid index or by coordinate (nearest point).
struct Atom {
  std::optional<std::size_t> index;
  std::optional<double> at;
  double weight = 0.0;
  bool operator==(const Atom&) const = default;
};

struct MuSpec {
  std::string kind = "uniform";  // uniform | dirac | smooth | weights
  std::optional<std::size_t> index;
  std::optional<double> at;
  double amplitude = 0.5;  // smooth: 1 + a·cos 2π(x − s), normalized
  double shift = 0.0;
  std::vector<double> weights;
  bool operator==(const MuSpec&) const = default;
};

struct SweepSpec {
  std::vector<std::size_t> n_list;
  double T = 1.0;
  double p = 2.0;
  std::vector<double> T_list;  // th1-check
  std::size_t test_potentials = 20;  // weakkam
  bool operator==(const SweepSpec&) const = default;
};

struct OutputSpec {
  std::string json = "result.json";
  std::string csv = "table.csv";
  std::string plot = "plot.dat";
  bool operator==(const OutputSpec&) const = default;
};

struct ExperimentConfig {
  int schema_version = kSchemaVersion;
  SpaceSpec space;
  ModelSpec model;
  std::vector<Atom> lambda;
  MuSpec mu;
  SweepSpec sweep;
  OutputSpec output;
  bool operator==(const ExperimentConfig&) const = default;
};

ExperimentConfig parse_config(const Json& j);
ExperimentConfig load_config(const std::string& path);
Json emit_config(const ExperimentConfig& config);

GroundSpace build_space(const SpaceSpec& spec);
CostModel build_model(const ModelSpec& spec, const GroundSpace& space);
SignedMeasure build_lambda(const std::vector<Atom>& atoms, const GroundSpace& space);
AtomicMeasure build_mu(const MuSpec& spec, const GroundSpace& space);

const std::vector<std::string>& subcommands();

struct RunResult {
  int exit_code = kOk;
  std::string message;  // error text when exit_code != 0
  Json result;
};

/// Runs one experiment. With a nonempty out_dir the JSON result, the CSV
/// table and (for sweeps) the plot data are written there.
RunResult run(const std::string& subcommand, const ExperimentConfig& config, const std::string& out_dir,
              std::uint64_t seed);

/// Columns n, scaled_value, gap, rate. gap and rate are empty where the
/// sweep has no predecessor.
std::string emit_table(const SweepReport& report);

/// Two whitespace-separated columns: n and scaled value.
std::string emit_plotdata(const SweepReport& report);

/// Fixed 12-significant-digit formatting shared by all tables.
std::string format_real(double x);

}  // namespace otl::harness
