#include <string>

#include "CLI11.hpp"
#include "cforge/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"cforge: certified commutator machinery over complex matrix "
               "algebras"};

  cforge::RunConfig cfg;
  long long seed = 0;
  app.add_option("--cmd", cfg.command,
                 "Command: decompose2 peel fack nilify bridge rosenblum det "
                 "regroup suzuki kernel compare gen manifest")
      ->required();
  app.add_option("--in", cfg.input_path, "Input JSON file");
  app.add_option("--out", cfg.output_path,
                 "Output report file (stdout if omitted)");
  app.add_option("--tol", cfg.tol, "Tolerance, in (0, 1e-2)");
  app.add_option("--seed", seed, "RNG seed for gen");
  app.add_option("--n", cfg.n, "Size / count parameter");
  app.add_option("--N", cfg.N, "Power / node-count parameter");
  app.add_option("--gamma", cfg.gamma, "Comparison gap in (0,1)");
  app.add_option("--eps", cfg.eps, "Cut-down level");
  app.add_option("--grid", cfg.grid, "Partition grid size");
  app.add_option("--jobs", cfg.jobs, "Manifest fan-out width");
  app.add_flag("--report-only", cfg.report_only,
               "Write reports but do not fail on bound violations");

  CLI11_PARSE(app, argc, argv);
  cfg.seed = static_cast<std::uint64_t>(seed);
  return cforge::run(cfg);
}
