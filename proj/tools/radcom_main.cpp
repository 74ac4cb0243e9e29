// SPDX-License-Identifier: Apache-2.0
//
// radcom: experiment runner for the dual-functional waveform designs.
//
//   radcom run <spec.cfg> --out <dir> [--threads N] [--scenario name]
//
// Exit codes: 0 full success, 1 spec or usage errors, 2 when some per-run
// computations failed (their rows carry an "error" metric).

#include <CLI11.hpp>
#include <cstdio>
#include <exception>
#include <string>

#include "radcom/bench.hpp"
#include "radcom/kernels.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Dual-functional radar-communication waveform benchmarks"};
  app.require_subcommand(1);

  std::string spec_path;
  std::string out_dir = "out";
  int threads = 1;
  std::string scenario_override;

  CLI::App* run = app.add_subcommand("run", "Run an experiment spec");
  run->add_option("spec", spec_path, "Path to the spec file")->required();
  run->add_option("--out", out_dir, "Output directory");
  run->add_option("--threads", threads, "Worker threads over the seed grid")
      ->check(CLI::PositiveNumber);
  run->add_option("--scenario", scenario_override, "Override the spec's scenario");

  CLI11_PARSE(app, argc, argv);

  try {
    radcom::bench::ExperimentSpec spec = radcom::bench::parse_spec(spec_path);
    if (!scenario_override.empty()) {
      bool found = false;
      using radcom::bench::Scenario;
      for (Scenario s : {Scenario::SumrateVsSnr, Scenario::TradeoffSweep,
                         Scenario::BeampatternDump, Scenario::BnbTrace,
                         Scenario::SumrateVsEpsilon, Scenario::PulseCompression}) {
        if (scenario_override == radcom::bench::scenario_name(s)) {
          spec.scenario = s;
          found = true;
          break;
        }
      }
      if (!found) {
        std::fprintf(stderr, "error: unknown scenario '%s'\n",
                     scenario_override.c_str());
        return 1;
      }
    }
    radcom::bench::apply_env_overrides(spec);

    const radcom::bench::RunSummary summary =
        radcom::bench::run_experiment(spec, out_dir, threads);
    std::printf("scenario %s: %d rows (%d failed) in %.2f s -> %s [kernels: %s]\n",
                radcom::bench::scenario_name(spec.scenario), summary.rows,
                summary.failures, summary.wall_seconds, summary.csv_path.c_str(),
                radcom::kernels::backend_name(radcom::kernels::active_backend()));
    return summary.failures > 0 ? 2 : 0;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
