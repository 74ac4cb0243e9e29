// SPDX-License-Identifier: Apache-2.0

#include "radcom/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <thread>

#include "radcom/closed_form.hpp"
#include "radcom/model.hpp"
#include "radcom/radar_tools.hpp"
#include "radcom/tradeoff.hpp"

namespace radcom::bench {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr std::uint64_t kSymbolSeedMix = 0x9e3779b97f4a7c15ULL;
constexpr const char* kVersion = "0.1.0";

struct ScenarioName {
  Scenario scenario;
  const char* name;
};
constexpr ScenarioName kScenarios[] = {
    {Scenario::SumrateVsSnr, "sumrate_vs_snr"},
    {Scenario::TradeoffSweep, "tradeoff_sweep"},
    {Scenario::BeampatternDump, "beampattern_dump"},
    {Scenario::BnbTrace, "bnb_trace"},
    {Scenario::SumrateVsEpsilon, "sumrate_vs_epsilon"},
    {Scenario::PulseCompression, "pulse_compression"},
};

struct MethodName {
  Method method;
  const char* name;
};
constexpr MethodName kMethods[] = {
    {Method::Zf, "ZF"},
    {Method::OmniStrict, "OmniStrict"},
    {Method::DirectionalStrict, "DirectionalStrict"},
    {Method::Tradeoff, "Tradeoff"},
    {Method::CmBnb, "CmBnb"},
};

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) {
    return "";
  }
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) {
      out.push_back(item);
    }
  }
  return out;
}

[[noreturn]] void parse_fail(const std::string& name, int line,
                             const std::string& what) {
  throw std::runtime_error(name + ":" + std::to_string(line) + ": " + what);
}

double to_double(const std::string& v, const std::string& name, int line) {
  std::size_t used = 0;
  double out = 0.0;
  try {
    out = std::stod(v, &used);
  } catch (const std::exception&) {
    parse_fail(name, line, "expected a number, got '" + v + "'");
  }
  if (used != v.size()) {
    parse_fail(name, line, "trailing characters in number '" + v + "'");
  }
  return out;
}

long long to_int(const std::string& v, const std::string& name, int line) {
  std::size_t used = 0;
  long long out = 0;
  try {
    out = std::stoll(v, &used);
  } catch (const std::exception&) {
    parse_fail(name, line, "expected an integer, got '" + v + "'");
  }
  if (used != v.size()) {
    parse_fail(name, line, "trailing characters in integer '" + v + "'");
  }
  return out;
}

void fill_defaults(ExperimentSpec& spec, bool have_seeds, bool have_sweep,
                   bool have_methods, bool have_targets) {
  if (!have_seeds) {
    spec.seeds.resize(100);
    for (std::size_t i = 0; i < spec.seeds.size(); ++i) {
      spec.seeds[i] = i + 1;
    }
  }
  if (!have_targets) {
    spec.target_angles = {-kPi / 3.0, 0.0, kPi / 3.0};
  }
  if (!have_sweep) {
    switch (spec.scenario) {
      case Scenario::SumrateVsSnr:
        spec.sweep = {-2.0, 0.0, 2.0, 4.0, 6.0, 8.0, 10.0, 12.0};
        break;
      case Scenario::TradeoffSweep:
        spec.sweep = {0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
        break;
      case Scenario::BeampatternDump: {
        spec.sweep.clear();
        for (int d = -90; d <= 90; ++d) {
          spec.sweep.push_back(static_cast<double>(d));
        }
        break;
      }
      case Scenario::BnbTrace:
        spec.sweep = {0.0};  // trace rows carry the iteration index instead
        break;
      case Scenario::SumrateVsEpsilon:
        spec.sweep = {0.1, 0.5, 1.0, 1.5, 2.0};
        break;
      case Scenario::PulseCompression:
        spec.sweep = {0.05, 0.4, 1.0};
        break;
    }
  }
  if (!have_methods) {
    switch (spec.scenario) {
      case Scenario::SumrateVsSnr:
        spec.methods = {Method::Zf, Method::OmniStrict, Method::DirectionalStrict,
                        Method::Tradeoff};
        break;
      case Scenario::TradeoffSweep:
        spec.methods = {Method::Tradeoff};
        break;
      case Scenario::BeampatternDump:
        spec.methods = {Method::OmniStrict, Method::DirectionalStrict,
                        Method::Tradeoff};
        break;
      case Scenario::BnbTrace:
      case Scenario::SumrateVsEpsilon:
      case Scenario::PulseCompression:
        spec.methods = {Method::CmBnb};
        break;
    }
  }
}

void validate_spec(const ExperimentSpec& spec) {
  spec.cfg.validate();
  if (spec.seeds.empty()) {
    throw std::invalid_argument("field 'seeds' must be non-empty");
  }
  if (spec.sweep.empty()) {
    throw std::invalid_argument("field 'sweep' must be non-empty");
  }
  if (spec.methods.empty()) {
    throw std::invalid_argument("field 'methods' must be non-empty");
  }
  if (!(spec.rho >= 0.0 && spec.rho <= 1.0)) {
    throw std::invalid_argument("field 'rho' must be in [0, 1]");
  }
  if (!(spec.epsilon >= 0.0 && spec.epsilon <= 2.0)) {
    throw std::invalid_argument("field 'epsilon' must be in [0, 2]");
  }
  if (!(spec.delta > 0.0)) {
    throw std::invalid_argument("field 'delta' must be > 0");
  }
  if (spec.bnb_max_iters <= 0) {
    throw std::invalid_argument("field 'bnb_max_iters' must be positive");
  }
}

}  // namespace

const char* scenario_name(Scenario s) {
  for (const auto& entry : kScenarios) {
    if (entry.scenario == s) {
      return entry.name;
    }
  }
  return "unknown";
}

const char* method_name(Method m) {
  for (const auto& entry : kMethods) {
    if (entry.method == m) {
      return entry.name;
    }
  }
  return "unknown";
}

ExperimentSpec parse_spec_stream(std::istream& in, const std::string& name) {
  ExperimentSpec spec;
  bool have_scenario = false, have_seeds = false, have_sweep = false,
       have_methods = false, have_targets = false;
  int n_seeds = -1;

  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto comment = raw.find('#');
    if (comment != std::string::npos) {
      raw = raw.substr(0, comment);
    }
    const std::string text = trim(raw);
    if (text.empty()) {
      continue;
    }
    const auto eq = text.find('=');
    if (eq == std::string::npos) {
      parse_fail(name, line, "expected 'key = value'");
    }
    const std::string key = trim(text.substr(0, eq));
    const std::string value = trim(text.substr(eq + 1));
    if (key.empty() || value.empty()) {
      parse_fail(name, line, "expected 'key = value'");
    }

    if (key == "scenario") {
      bool found = false;
      for (const auto& entry : kScenarios) {
        if (value == entry.name) {
          spec.scenario = entry.scenario;
          found = true;
          break;
        }
      }
      if (!found) {
        parse_fail(name, line, "unknown scenario '" + value + "'");
      }
      have_scenario = true;
    } else if (key == "n_antennas") {
      spec.cfg.n_antennas = static_cast<int>(to_int(value, name, line));
    } else if (key == "n_users") {
      spec.cfg.n_users = static_cast<int>(to_int(value, name, line));
    } else if (key == "frame_len") {
      spec.cfg.frame_len = static_cast<int>(to_int(value, name, line));
    } else if (key == "total_power") {
      spec.cfg.total_power = to_double(value, name, line);
    } else if (key == "noise_power") {
      spec.cfg.noise_power = to_double(value, name, line);
      spec.noise_overridden = true;
    } else if (key == "element_spacing") {
      spec.cfg.element_spacing = to_double(value, name, line);
    } else if (key == "snr_db") {
      spec.snr_db = to_double(value, name, line);
    } else if (key == "seeds") {
      spec.seeds.clear();
      for (const auto& item : split_list(value)) {
        const long long v = to_int(item, name, line);
        if (v < 0) {
          parse_fail(name, line, "seeds must be non-negative");
        }
        spec.seeds.push_back(static_cast<std::uint64_t>(v));
      }
      have_seeds = true;
    } else if (key == "n_seeds") {
      n_seeds = static_cast<int>(to_int(value, name, line));
      if (n_seeds <= 0) {
        parse_fail(name, line, "n_seeds must be positive");
      }
    } else if (key == "sweep") {
      spec.sweep.clear();
      for (const auto& item : split_list(value)) {
        spec.sweep.push_back(to_double(item, name, line));
      }
      have_sweep = true;
    } else if (key == "methods") {
      spec.methods.clear();
      for (const auto& item : split_list(value)) {
        bool found = false;
        for (const auto& entry : kMethods) {
          if (item == entry.name) {
            spec.methods.push_back(entry.method);
            found = true;
            break;
          }
        }
        if (!found) {
          parse_fail(name, line, "unknown method '" + item + "'");
        }
      }
      have_methods = true;
    } else if (key == "rho") {
      spec.rho = to_double(value, name, line);
    } else if (key == "epsilon") {
      spec.epsilon = to_double(value, name, line);
    } else if (key == "delta") {
      spec.delta = to_double(value, name, line);
    } else if (key == "bnb_max_iters") {
      spec.bnb_max_iters = static_cast<int>(to_int(value, name, line));
    } else if (key == "bnb_rule") {
      if (value == "ARS") {
        spec.bnb_rule = SubdivisionRule::Ars;
      } else if (value == "BRS") {
        spec.bnb_rule = SubdivisionRule::Brs;
      } else {
        parse_fail(name, line, "bnb_rule must be ARS or BRS");
      }
    } else if (key == "targets_deg") {
      spec.target_angles.clear();
      for (const auto& item : split_list(value)) {
        spec.target_angles.push_back(to_double(item, name, line) * kPi / 180.0);
      }
      have_targets = true;
    } else if (key == "mainlobe_width_deg") {
      spec.mainlobe_width = to_double(value, name, line) * kPi / 180.0;
    } else if (key == "debug_fixed_channel") {
      if (value == "identity") {
        spec.identity_channel = true;
      } else if (value == "none") {
        spec.identity_channel = false;
      } else {
        parse_fail(name, line, "debug_fixed_channel must be none or identity");
      }
    } else {
      parse_fail(name, line, "unknown key '" + key + "'");
    }
  }

  if (!have_scenario) {
    throw std::runtime_error(name + ": missing required key 'scenario'");
  }
  if (have_seeds && n_seeds > 0) {
    throw std::runtime_error(name + ": 'seeds' and 'n_seeds' conflict");
  }
  if (!have_seeds && n_seeds > 0) {
    spec.seeds.resize(static_cast<std::size_t>(n_seeds));
    for (int i = 0; i < n_seeds; ++i) {
      spec.seeds[static_cast<std::size_t>(i)] = static_cast<std::uint64_t>(i + 1);
    }
    have_seeds = true;
  }
  fill_defaults(spec, have_seeds, have_sweep, have_methods, have_targets);
  validate_spec(spec);
  return spec;
}

ExperimentSpec parse_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error(path + ": cannot open spec file");
  }
  return parse_spec_stream(in, path);
}

void apply_env_overrides(ExperimentSpec& spec) {
  const char* env = std::getenv("RADCOM_SEED");
  if (env != nullptr && !spec.seeds.empty()) {
    spec.seeds[0] = std::strtoull(env, nullptr, 10);
  }
}

namespace {

struct Row {
  std::size_t seed_pos;
  std::size_t sweep_pos;
  std::string method;
  std::string metric;
  double sweep_value;
  double value;
};

std::string format_g(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

double snr_noise(double total_power, double snr_db) {
  return total_power / std::pow(10.0, snr_db / 10.0);
}

// Shared per-run context (read-only inside the workers).
struct RunContext {
  const ExperimentSpec& spec;
  RVector grid;                 // beampattern evaluation grid (radians)
  CovarianceMatrix omni_rd;     // (P_T/N) I
  CovarianceMatrix directional_rd;  // least-squares design, regularized
  bool has_directional = false;
};

Channel make_channel(const RunContext& ctx, std::uint64_t seed) {
  if (ctx.spec.identity_channel) {
    CMatrix h = CMatrix::Identity(ctx.spec.cfg.n_users, ctx.spec.cfg.n_antennas);
    return Channel{std::move(h)};
  }
  return generate_rayleigh_channel(ctx.spec.cfg, RngSeed{seed});
}

double beampattern_mse(const RunContext& ctx, const WaveformBlock& x,
                       const CovarianceMatrix& desired) {
  const RVector designed = beampattern(sample_covariance(x), ctx.spec.cfg, ctx.grid);
  const RVector target = beampattern(desired, ctx.spec.cfg, ctx.grid);
  return (designed - target).squaredNorm() / static_cast<double>(ctx.grid.size());
}

BnbConfig bnb_config(const ExperimentSpec& spec) {
  BnbConfig cfg;
  cfg.delta = spec.delta;
  cfg.max_iters = spec.bnb_max_iters;
  cfg.rule = spec.bnb_rule;
  return cfg;
}

// All metric rows for one seed; this is the unit of parallelism.
void run_seed(const RunContext& ctx, std::size_t seed_pos, std::vector<Row>& rows,
              int& failures) {
  const ExperimentSpec& spec = ctx.spec;
  const std::uint64_t seed = spec.seeds[seed_pos];
  const Channel h = make_channel(ctx, seed);
  const SymbolBlock s =
      generate_qpsk_symbols(spec.cfg, RngSeed{seed ^ kSymbolSeedMix});

  const auto push = [&](std::size_t sweep_pos, const std::string& method,
                        const std::string& metric, double value) {
    rows.push_back(Row{seed_pos, sweep_pos, method, metric,
                       spec.sweep[sweep_pos], value});
  };
  const auto push_error = [&](std::size_t sweep_pos, const std::string& method) {
    push(sweep_pos, method, "error", 1.0);
    ++failures;
  };

  switch (spec.scenario) {
    case Scenario::SumrateVsSnr: {
      for (Method m : spec.methods) {
        WaveformBlock x;
        bool ok = true;
        try {
          switch (m) {
            case Method::Zf:
              x = zf_precode(h, s, spec.cfg).x;
              break;
            case Method::OmniStrict:
              x = omni_design(h, s, spec.cfg);
              break;
            case Method::DirectionalStrict:
              x = directional_design(h, s, ctx.directional_rd, spec.cfg);
              break;
            case Method::Tradeoff: {
              TradeoffProblem p{h, s, omni_design(h, s, spec.cfg), spec.rho,
                                spec.cfg};
              x = solve_tradeoff(p).x_opt;
              break;
            }
            case Method::CmBnb: {
              const WaveformBlock x0 = chirp_reference(spec.cfg);
              const double eta =
                  spec.epsilon * std::sqrt(spec.cfg.total_power / spec.cfg.n_antennas);
              x = solve_block(h, s, x0, eta, spec.cfg, bnb_config(spec)).x;
              break;
            }
          }
        } catch (const std::exception&) {
          ok = false;
        }
        for (std::size_t sp = 0; sp < spec.sweep.size(); ++sp) {
          if (!ok) {
            push_error(sp, method_name(m));
            continue;
          }
          SystemConfig cfg_pt = spec.cfg;
          cfg_pt.noise_power = snr_noise(spec.cfg.total_power, spec.sweep[sp]);
          push(sp, method_name(m), "sum_rate",
               sum_rate(per_user_sinr(h, x, s, cfg_pt)));
          push(sp, method_name(m), "mui", mui_energy(h, x, s));
        }
      }
      break;
    }

    case Scenario::TradeoffSweep: {
      const WaveformBlock x0 = omni_design(h, s, spec.cfg);
      for (std::size_t sp = 0; sp < spec.sweep.size(); ++sp) {
        try {
          TradeoffProblem p{h, s, x0, spec.sweep[sp], spec.cfg};
          const TrsSolution sol = solve_tradeoff(p);
          push(sp, "Tradeoff", "sum_rate",
               sum_rate(per_user_sinr(h, sol.x_opt, s, spec.cfg)));
          push(sp, "Tradeoff", "mui", mui_energy(h, sol.x_opt, s));
          push(sp, "Tradeoff", "bp_mse",
               beampattern_mse(ctx, sol.x_opt, ctx.omni_rd));
        } catch (const std::exception&) {
          push_error(sp, "Tradeoff");
        }
      }
      break;
    }

    case Scenario::BeampatternDump: {
      for (Method m : spec.methods) {
        WaveformBlock x;
        bool ok = true;
        try {
          switch (m) {
            case Method::OmniStrict:
              x = omni_design(h, s, spec.cfg);
              break;
            case Method::DirectionalStrict:
              x = directional_design(h, s, ctx.directional_rd, spec.cfg);
              break;
            case Method::Tradeoff: {
              TradeoffProblem p{h, s, omni_design(h, s, spec.cfg), spec.rho,
                                spec.cfg};
              x = solve_tradeoff(p).x_opt;
              break;
            }
            case Method::Zf:
              x = zf_precode(h, s, spec.cfg).x;
              break;
            case Method::CmBnb:
              ok = false;  // no beampattern scenario for the CM design
              break;
          }
        } catch (const std::exception&) {
          ok = false;
        }
        if (!ok) {
          for (std::size_t sp = 0; sp < spec.sweep.size(); ++sp) {
            push_error(sp, method_name(m));
          }
          continue;
        }
        const CovarianceMatrix rx = sample_covariance(x);
        for (std::size_t sp = 0; sp < spec.sweep.size(); ++sp) {
          RVector angle(1);
          angle(0) = spec.sweep[sp] * kPi / 180.0;
          push(sp, method_name(m), "power",
               beampattern(rx, spec.cfg, angle)(0));
        }
      }
      break;
    }

    case Scenario::BnbTrace: {
      const WaveformBlock x0 = chirp_reference(spec.cfg);
      const double scale = std::sqrt(spec.cfg.total_power / spec.cfg.n_antennas);
      CmProblem p;
      p.h_tilde = scale * h.h;
      p.s = s.s.col(0);
      p.x0 = x0.x.col(0) / scale;
      for (Eigen::Index i = 0; i < p.x0.size(); ++i) {
        p.x0(i) /= std::abs(p.x0(i));
      }
      p.epsilon = spec.epsilon;
      for (SubdivisionRule rule : {SubdivisionRule::Ars, SubdivisionRule::Brs}) {
        const std::string method =
            rule == SubdivisionRule::Ars ? "CmBnb-ARS" : "CmBnb-BRS";
        BnbConfig cfg = bnb_config(spec);
        cfg.rule = rule;
        std::vector<BnbTracePoint> trace;
        try {
          bnb_solve_column(p, cfg, [&](const BnbTracePoint& pt) {
            trace.push_back(pt);
          });
        } catch (const std::exception&) {
          push_error(0, method);
          continue;
        }
        for (const BnbTracePoint& pt : trace) {
          rows.push_back(Row{seed_pos, static_cast<std::size_t>(pt.iteration),
                             method, "ub", static_cast<double>(pt.iteration),
                             pt.upper_bound});
          rows.push_back(Row{seed_pos, static_cast<std::size_t>(pt.iteration),
                             method, "lb", static_cast<double>(pt.iteration),
                             pt.lower_bound});
          rows.push_back(Row{seed_pos, static_cast<std::size_t>(pt.iteration),
                             method, "active_nodes",
                             static_cast<double>(pt.iteration),
                             static_cast<double>(pt.active_nodes)});
        }
      }
      break;
    }

    case Scenario::SumrateVsEpsilon: {
      const WaveformBlock x0 = chirp_reference(spec.cfg);
      const double scale = std::sqrt(spec.cfg.total_power / spec.cfg.n_antennas);
      for (std::size_t sp = 0; sp < spec.sweep.size(); ++sp) {
        const double eps = std::clamp(spec.sweep[sp], 0.0, 2.0);
        const double eta = eps * scale;
        try {
          const BlockResult block =
              solve_block(h, s, x0, eta, spec.cfg, bnb_config(spec));
          push(sp, "CmBnb", "sum_rate",
               sum_rate(per_user_sinr(h, block.x, s, spec.cfg)));
          push(sp, "CmBnb", "mui", mui_energy(h, block.x, s));

          // Convex relaxation reference: root-node hull minimizers per column.
          CmProblem p;
          p.h_tilde = scale * h.h;
          p.epsilon = eps;
          WaveformBlock relaxed;
          relaxed.x.resize(x0.x.rows(), x0.x.cols());
          GpConfig gp;
          gp.max_iters = 2000;
          for (Eigen::Index j = 0; j < s.s.cols(); ++j) {
            p.s = s.s.col(j);
            p.x0 = x0.x.col(j) / scale;
            for (Eigen::Index i = 0; i < p.x0.size(); ++i) {
              p.x0(i) /= std::abs(p.x0(i));
            }
            const GpResult lb = gp_lower_bound(p, arc_bounds(p.x0, eps), gp);
            relaxed.x.col(j) = scale * lb.x;
          }
          push(sp, "CvxRelaxBound", "sum_rate",
               sum_rate(per_user_sinr(h, relaxed, s, spec.cfg)));
          push(sp, "CvxRelaxBound", "mui", mui_energy(h, relaxed, s));
        } catch (const std::exception&) {
          push_error(sp, "CmBnb");
        }
      }
      break;
    }

    case Scenario::PulseCompression: {
      const WaveformBlock x0 = chirp_reference(spec.cfg);
      const CVector reference = x0.x.row(0).transpose();
      for (std::size_t sp = 0; sp < spec.sweep.size(); ++sp) {
        const double eps = std::clamp(spec.sweep[sp], 0.0, 2.0);
        const double eta = eps * std::sqrt(spec.cfg.total_power / spec.cfg.n_antennas);
        try {
          const BlockResult block =
              solve_block(h, s, x0, eta, spec.cfg, bnb_config(spec));
          const CVector tx = block.x.x.row(0).transpose();
          const PulseProfile profile = pulse_compress(tx, reference, WindowSpec{});
          // one guard bin on each side of the peak covers the taper-widened
          // mainlobe shoulders
          const int bins = static_cast<int>(profile.magnitude.size());
          double sidelobe_energy = 0.0;
          double max_sidelobe_db = -400.0;
          for (int i = 0; i < bins; ++i) {
            const int lag = std::min((i - profile.peak_bin + bins) % bins,
                                     (profile.peak_bin - i + bins) % bins);
            if (lag <= 1) {
              continue;
            }
            sidelobe_energy += profile.magnitude(i) * profile.magnitude(i);
            max_sidelobe_db = std::max(max_sidelobe_db, profile.magnitude_db(i));
          }
          push(sp, "CmBnb", "peak_bin", static_cast<double>(profile.peak_bin));
          push(sp, "CmBnb", "sidelobe_energy", sidelobe_energy);
          push(sp, "CmBnb", "max_sidelobe_db", max_sidelobe_db);
        } catch (const std::exception&) {
          push_error(sp, "CmBnb");
        }
      }
      break;
    }
  }
}

}  // namespace

RunSummary run_experiment(const ExperimentSpec& spec_in, const std::string& out_dir,
                          int threads) {
  const auto start = std::chrono::steady_clock::now();
  ExperimentSpec spec = spec_in;
  validate_spec(spec);
  if (!spec.noise_overridden) {
    spec.cfg.noise_power = snr_noise(spec.cfg.total_power, spec.snr_db);
  }

  RunContext ctx{spec, RVector(), CovarianceMatrix{}, CovarianceMatrix{}, false};
  ctx.grid.resize(181);
  for (int i = 0; i < 181; ++i) {
    ctx.grid(i) = (-90.0 + i) * kPi / 180.0;
  }
  ctx.omni_rd = CovarianceMatrix{
      (spec.cfg.total_power / spec.cfg.n_antennas) *
      CMatrix::Identity(spec.cfg.n_antennas, spec.cfg.n_antennas)};
  const bool needs_directional =
      std::find(spec.methods.begin(), spec.methods.end(),
                Method::DirectionalStrict) != spec.methods.end();
  if (needs_directional) {
    DirectionalTarget target;
    target.angles =
        Eigen::Map<const RVector>(spec.target_angles.data(),
                                  static_cast<Eigen::Index>(spec.target_angles.size()));
    target.mainlobe_width = spec.mainlobe_width;
    target.grid = ctx.grid;
    ctx.directional_rd =
        regularize_covariance(design_covariance_ls(target, spec.cfg).r, spec.cfg);
    ctx.has_directional = true;
  }

  const std::size_t n_seeds = spec.seeds.size();
  std::vector<std::vector<Row>> buckets(n_seeds);
  std::vector<int> bucket_failures(n_seeds, 0);

  const int worker_count =
      std::max(1, std::min<int>(threads, static_cast<int>(n_seeds)));
  std::atomic<std::size_t> next{0};
  const auto worker = [&]() {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n_seeds) {
        break;
      }
      run_seed(ctx, i, buckets[i], bucket_failures[i]);
    }
  };
  if (worker_count == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(worker_count));
    for (int t = 0; t < worker_count; ++t) {
      pool.emplace_back(worker);
    }
    for (auto& t : pool) {
      t.join();
    }
  }

  std::vector<Row> rows;
  for (auto& bucket : buckets) {
    std::stable_sort(bucket.begin(), bucket.end(), [](const Row& a, const Row& b) {
      if (a.sweep_pos != b.sweep_pos) {
        return a.sweep_pos < b.sweep_pos;
      }
      if (a.method != b.method) {
        return a.method < b.method;
      }
      return a.metric < b.metric;
    });
    rows.insert(rows.end(), bucket.begin(), bucket.end());
  }

  std::filesystem::create_directories(out_dir);
  const std::string csv_path =
      (std::filesystem::path(out_dir) / (std::string(scenario_name(spec.scenario)) +
                                         ".csv"))
          .string();
  {
    std::ofstream csv(csv_path, std::ios::binary);
    if (!csv) {
      throw std::runtime_error(csv_path + ": cannot open for writing");
    }
    csv << "scenario,method,seed,sweep,metric,value\n";
    for (const Row& row : rows) {
      csv << scenario_name(spec.scenario) << ',' << row.method << ','
          << spec.seeds[row.seed_pos] << ',' << format_g(row.sweep_value) << ','
          << row.metric << ',' << format_g(row.value) << '\n';
    }
  }

  RunSummary summary;
  summary.csv_path = csv_path;
  summary.rows = static_cast<int>(rows.size());
  for (int f : bucket_failures) {
    summary.failures += f;
  }
  summary.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();

  nlohmann::json manifest;
  manifest["version"] = kVersion;
  manifest["scenario"] = scenario_name(spec.scenario);
  manifest["csv"] = csv_path;
  manifest["rows"] = summary.rows;
  manifest["failures"] = summary.failures;
  manifest["threads"] = worker_count;
  manifest["wall_s"] = summary.wall_seconds;
  nlohmann::json echo;
  echo["n_antennas"] = spec.cfg.n_antennas;
  echo["n_users"] = spec.cfg.n_users;
  echo["frame_len"] = spec.cfg.frame_len;
  echo["total_power"] = spec.cfg.total_power;
  echo["noise_power"] = spec.cfg.noise_power;
  echo["element_spacing"] = spec.cfg.element_spacing;
  echo["snr_db"] = spec.snr_db;
  echo["rho"] = spec.rho;
  echo["epsilon"] = spec.epsilon;
  echo["delta"] = spec.delta;
  echo["bnb_max_iters"] = spec.bnb_max_iters;
  echo["bnb_rule"] = spec.bnb_rule == SubdivisionRule::Ars ? "ARS" : "BRS";
  echo["seeds"] = spec.seeds;
  echo["sweep"] = spec.sweep;
  std::vector<std::string> method_names;
  for (Method m : spec.methods) {
    method_names.emplace_back(method_name(m));
  }
  echo["methods"] = method_names;
  echo["identity_channel"] = spec.identity_channel;
  manifest["spec"] = echo;

  std::ofstream mf((std::filesystem::path(out_dir) / "run_manifest.jsonl").string(),
                   std::ios::app);
  mf << manifest.dump() << '\n';

  return summary;
}

}  // namespace radcom::bench
