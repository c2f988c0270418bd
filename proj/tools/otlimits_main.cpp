#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "otlimits/otlimits.h"

int main(int argc, char** argv) {
  CLI::App app{"Optimal transport limit experiments"};
  app.require_subcommand(1, 1);
  app.set_version_flag("--version", otl_version());

  const std::vector<std::string> names{"w1",        "wp",          "sweep",     "conditional", "weakkam",
                                       "transport-measure", "th1-check", "th5-check", "liminf-check"};
  std::string config;
  std::string out;
  std::uint64_t seed = 0;
  for (const auto& name : names) {
    CLI::App* sub = app.add_subcommand(name, "run the " + name + " experiment");
    sub->add_option("--config", config, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out, "directory for result.json and the CSV table");
    sub->add_option("--seed", seed, "seed for randomized test potentials");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return OTL_USAGE;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  const otl_status s = otl_run_experiment(name.c_str(), config.c_str(), out.empty() ? nullptr : out.c_str(), seed);
  if (s != OTL_OK) {
    std::fprintf(stderr, "otlimits %s: %s\n", name.c_str(), otl_last_error());
    return static_cast<int>(s);
  }
  if (out.empty()) std::printf("ok\n");
  return 0;
}
