// SPDX-License-Identifier: Apache-2.0
//
// Experiment harness: flat key=value spec files, seeded Monte-Carlo sweeps,
// CSV output plus a JSON-lines run manifest. The CSV is the plotting
// contract; figures are produced out of process.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "radcom/cm_bnb.hpp"
#include "radcom/types.hpp"

namespace radcom::bench {

enum class Scenario {
  SumrateVsSnr,
  TradeoffSweep,
  BeampatternDump,
  BnbTrace,
  SumrateVsEpsilon,
  PulseCompression,
};

enum class Method { Zf, OmniStrict, DirectionalStrict, Tradeoff, CmBnb };

const char* scenario_name(Scenario s);
const char* method_name(Method m);

struct ExperimentSpec {
  Scenario scenario = Scenario::SumrateVsSnr;
  SystemConfig cfg;
  std::vector<std::uint64_t> seeds;
  /// Sweep axis; its meaning is per scenario (SNR dB grid, rho grid,
  /// epsilon grid, or angle grid in degrees for beampattern dumps).
  std::vector<double> sweep;
  std::vector<Method> methods;
  double rho = 0.1;
  double epsilon = 1.0;  // normalized similarity tolerance for bnb_trace
  double snr_db = 10.0;  // fixed-SNR scenarios; sets noise unless overridden
  bool noise_overridden = false;
  double delta = 1e-5;
  int bnb_max_iters = 10000;
  SubdivisionRule bnb_rule = SubdivisionRule::Ars;
  std::vector<double> target_angles;  // radians
  double mainlobe_width = 10.0 * 3.14159265358979323846 / 180.0;
  bool identity_channel = false;  // debug hook: H = I instead of Rayleigh
};

/// Parses a spec file. Throws std::runtime_error with "<path>:<line>: ..."
/// messages on unknown keys or malformed values, and std::invalid_argument
/// naming the field on range violations.
ExperimentSpec parse_spec(const std::string& path);
ExperimentSpec parse_spec_stream(std::istream& in, const std::string& name);

/// RADCOM_SEED, when set, replaces the first seed (smoke-test hook).
void apply_env_overrides(ExperimentSpec& spec);

struct RunSummary {
  std::string csv_path;
  int rows = 0;
  int failures = 0;
  double wall_seconds = 0.0;
};

/// Runs the scenario sweep and writes <out_dir>/<scenario>.csv plus a line
/// in <out_dir>/run_manifest.jsonl. Per-run failures become rows with an
/// "error" metric; the sweep itself never aborts. Output is byte-identical
/// across repeated runs and thread counts.
RunSummary run_experiment(const ExperimentSpec& spec, const std::string& out_dir,
                          int threads = 1);

}  // namespace radcom::bench
