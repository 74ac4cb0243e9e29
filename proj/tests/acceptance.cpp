// SPDX-License-Identifier: Apache-2.0
//
// Acceptance suite: one check per release criterion, each printed as a
// single PASS/FAIL line with its runtime. Exit code is the failure count.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "radcom/closed_form.hpp"
#include "radcom/cm_bnb.hpp"
#include "radcom/model.hpp"
#include "radcom/radar_tools.hpp"
#include "radcom/rng.hpp"
#include "radcom/tradeoff.hpp"

using namespace radcom;

namespace {

struct Checker {
  bool ok = true;
  std::vector<std::string> notes;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      if (notes.size() < 8) {
        notes.push_back(what);
      }
    }
  }
};

int g_failures = 0;
int g_index = 0;

void criterion(const std::string& name, double time_budget_s,
               const std::function<void(Checker&)>& body) {
  ++g_index;
  Checker check;
  const auto start = std::chrono::steady_clock::now();
  try {
    body(check);
  } catch (const std::exception& e) {
    check.require(false, std::string("exception: ") + e.what());
  }
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  if (time_budget_s > 0.0 && elapsed > time_budget_s) {
    check.require(false, "runtime " + std::to_string(elapsed) + " s exceeds " +
                             std::to_string(time_budget_s) + " s");
  }
  std::printf("[%s] criterion %2d: %s (%.2f s)\n", check.ok ? "PASS" : "FAIL",
              g_index, name.c_str(), elapsed);
  for (const std::string& note : check.notes) {
    std::printf("        - %s\n", note.c_str());
  }
  if (!check.ok) {
    ++g_failures;
  }
  std::fflush(stdout);
}

SystemConfig paper_cfg() {
  SystemConfig cfg;
  cfg.n_antennas = 16;
  cfg.n_users = 4;
  cfg.frame_len = 20;
  cfg.total_power = 1.0;
  cfg.noise_power = 0.1;  // SNR = 10 dB at P_T = 1
  cfg.element_spacing = 0.5;
  return cfg;
}

CmProblem column_problem(const SystemConfig& cfg, std::uint64_t seed,
                         double epsilon) {
  const Channel h = generate_rayleigh_channel(cfg, RngSeed{seed});
  const SymbolBlock s = generate_qpsk_symbols(cfg, RngSeed{seed + 5000});
  const WaveformBlock x0 = chirp_reference(cfg);
  const double scale = std::sqrt(cfg.total_power / cfg.n_antennas);
  CmProblem p;
  p.h_tilde = scale * h.h;
  p.s = s.s.col(0);
  p.x0 = x0.x.col(0) / scale;
  for (Eigen::Index i = 0; i < p.x0.size(); ++i) {
    p.x0(i) /= std::abs(p.x0(i));
  }
  p.epsilon = epsilon;
  return p;
}

void criterion_opp(Checker& check) {
  const SystemConfig cfg = paper_cfg();
  const double per = cfg.total_power / cfg.n_antennas;
  const CMatrix target = per * CMatrix::Identity(16, 16);
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const Channel h = generate_rayleigh_channel(cfg, RngSeed{seed});
    const SymbolBlock s = generate_qpsk_symbols(cfg, RngSeed{seed + 5000});
    const WaveformBlock x = omni_design(h, s, cfg);
    const double achieved = mui_energy(h, x, s);
    const double analytic = omni_optimal_mui(h, s, cfg);
    check.require(std::abs(achieved - analytic) <= 1e-8 * std::abs(analytic),
                  "seed " + std::to_string(seed) + ": objective gap");
    const double residual = ((x.x * x.x.adjoint()) / cfg.frame_len - target).norm();
    check.require(residual <= 1e-10,
                  "seed " + std::to_string(seed) + ": constraint residual " +
                      std::to_string(residual));
  }
}

void criterion_directional(Checker& check) {
  const SystemConfig cfg = paper_cfg();
  DirectionalTarget target;
  target.angles.resize(3);
  target.angles << -M_PI / 3.0, 0.0, M_PI / 3.0;
  target.mainlobe_width = 10.0 * M_PI / 180.0;
  target.grid.resize(181);
  for (int i = 0; i < 181; ++i) {
    target.grid(i) = (-90.0 + i) * M_PI / 180.0;
  }
  const CovarianceLsResult ls = design_covariance_ls(target, cfg);
  const CovarianceMatrix rd = regularize_covariance(ls.r, cfg);
  const RVector desired = beampattern(rd, cfg, target.grid);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Channel h = generate_rayleigh_channel(cfg, RngSeed{seed});
    const SymbolBlock s = generate_qpsk_symbols(cfg, RngSeed{seed + 5000});
    const WaveformBlock x = directional_design(h, s, rd, cfg);
    const RVector designed = beampattern(sample_covariance(x), cfg, target.grid);
    const double worst = (designed - desired).cwiseAbs().maxCoeff();
    check.require(worst <= 1e-8, "seed " + std::to_string(seed) +
                                     ": beampattern deviation " +
                                     std::to_string(worst));
  }
}

void criterion_trs(Checker& check) {
  SystemConfig cfg;
  cfg.n_antennas = 4;
  cfg.n_users = 2;
  cfg.frame_len = 4;
  const double frame_power = cfg.frame_len * cfg.total_power;
  const std::vector<double> rho_grid = {0.0, 0.25, 0.5, 0.75, 1.0};
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Channel h = generate_rayleigh_channel(cfg, RngSeed{seed});
    const SymbolBlock s = generate_qpsk_symbols(cfg, RngSeed{seed + 5000});
    const WaveformBlock x0 = omni_design(h, s, cfg);
    for (double rho : rho_grid) {
      const TradeoffProblem p{h, s, x0, rho, cfg};
      const TrsSolution sol = solve_tradeoff(p);
      const std::string tag =
          "seed " + std::to_string(seed) + " rho " + std::to_string(rho);
      check.require(sol.kkt_residual <= 1e-7, tag + ": stationarity");
      check.require(
          std::abs(sol.x_opt.x.squaredNorm() - frame_power) <= 1e-6,
          tag + ": power");
      auto [q, g] = assemble_stacked(p);
      const QEigen eig = decompose_q(q, g);
      check.require(sol.lambda_opt + eig.eigenvalues(0) >= -1e-9,
                    tag + ": dual feasibility");
      if (rho == 0.0) {
        check.require((sol.x_opt.x - x0.x).cwiseAbs().maxCoeff() <= 1e-7,
                      tag + ": rho = 0 must return the reference");
      }

      Rng rng(RngSeed{seed * 97 + 11});
      double best_random = std::numeric_limits<double>::infinity();
      CMatrix cand(cfg.n_antennas, cfg.frame_len);
      for (int trial = 0; trial < 10000; ++trial) {
        for (int i = 0; i < cand.rows(); ++i) {
          for (int j = 0; j < cand.cols(); ++j) {
            cand(i, j) = rng.gaussian();
          }
        }
        cand *= std::sqrt(frame_power / cand.squaredNorm());
        best_random = std::min(best_random,
                               tradeoff_objective(p, WaveformBlock{cand}));
      }
      check.require(sol.objective <= best_random + 1e-9,
                    tag + ": beaten by a random feasible point");
    }
  }
}

void criterion_tradeoff_direction(Checker& check) {
  const SystemConfig cfg = paper_cfg();
  double zf_rate = 0.0, omni_rate = 0.0, tradeoff_rate = 0.0;
  const int n_seeds = 100;
  for (std::uint64_t seed = 1; seed <= n_seeds; ++seed) {
    const Channel h = generate_rayleigh_channel(cfg, RngSeed{seed});
    const SymbolBlock s = generate_qpsk_symbols(cfg, RngSeed{seed + 5000});
    zf_rate += sum_rate(per_user_sinr(h, zf_precode(h, s, cfg).x, s, cfg));
    const WaveformBlock omni = omni_design(h, s, cfg);
    omni_rate += sum_rate(per_user_sinr(h, omni, s, cfg));
    const TradeoffProblem p{h, s, omni, 0.1, cfg};
    tradeoff_rate += sum_rate(per_user_sinr(h, solve_tradeoff(p).x_opt, s, cfg));
  }
  zf_rate /= n_seeds;
  omni_rate /= n_seeds;
  tradeoff_rate /= n_seeds;
  const double awgn = cfg.n_users * std::log2(1.0 + 1.0 / cfg.noise_power);
  check.require(tradeoff_rate > omni_rate,
                "tradeoff rate " + std::to_string(tradeoff_rate) +
                    " not above strict rate " + std::to_string(omni_rate));
  check.require(omni_rate > zf_rate, "strict rate " + std::to_string(omni_rate) +
                                         " not above ZF rate " +
                                         std::to_string(zf_rate));
  check.require(tradeoff_rate >= 0.9 * awgn,
                "tradeoff rate " + std::to_string(tradeoff_rate) +
                    " below 90% of the zero-interference rate " +
                    std::to_string(awgn));
}

void criterion_bnb_small(Checker& check) {
  SystemConfig cfg;
  cfg.n_antennas = 2;
  cfg.n_users = 2;
  cfg.frame_len = 2;
  BnbConfig bnb;
  bnb.delta = 1e-6;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const CmProblem p = column_problem(cfg, seed, 1.0);
    std::vector<BnbTracePoint> trace;
    const BnbResult res = bnb_solve_column(p, bnb, [&](const BnbTracePoint& pt) {
      trace.push_back(pt);
    });
    const std::string tag = "seed " + std::to_string(seed);
    check.require(res.converged && res.gap <= bnb.delta, tag + ": terminal gap");
    for (std::size_t i = 1; i < trace.size(); ++i) {
      check.require(trace[i].upper_bound <= trace[i - 1].upper_bound + 1e-12,
                    tag + ": upper bound increased");
      check.require(trace[i].lower_bound >= trace[i - 1].lower_bound - 1e-12,
                    tag + ": lower bound decreased");
    }
    const ArcBox box = arc_bounds(p.x0, p.epsilon);
    const double grid = oracles::arc_grid_min_2d(
        p.h_tilde, p.s, box.l(0), box.u(0), box.l(1), box.u(1), 10000);
    check.require(std::abs(res.objective - grid) <= bnb.delta + 1e-4,
                  tag + ": grid optimum mismatch " +
                      std::to_string(std::abs(res.objective - grid)));
  }
}

void criterion_bnb_paper_scale(Checker& check) {
  const SystemConfig cfg = paper_cfg();
  BnbConfig bnb;
  bnb.delta = 1e-3;
  bnb.max_iters = 10000;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const CmProblem p = column_problem(cfg, seed, 1.0);
    for (SubdivisionRule rule : {SubdivisionRule::Ars, SubdivisionRule::Brs}) {
      bnb.rule = rule;
      const BnbResult res = bnb_solve_column(p, bnb);
      check.require(res.converged,
                    "seed " + std::to_string(seed) + " rule " +
                        (rule == SubdivisionRule::Ars ? "ARS" : "BRS") +
                        ": gap " + std::to_string(res.gap) + " after " +
                        std::to_string(res.iterations) + " iterations");
    }
  }

  SystemConfig mid;
  mid.n_antennas = 8;
  mid.n_users = 2;
  mid.frame_len = 8;
  std::vector<int> ars_iters, brs_iters;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const CmProblem p = column_problem(mid, seed, 1.0);
    bnb.rule = SubdivisionRule::Ars;
    ars_iters.push_back(bnb_solve_column(p, bnb).iterations);
    bnb.rule = SubdivisionRule::Brs;
    brs_iters.push_back(bnb_solve_column(p, bnb).iterations);
  }
  std::sort(ars_iters.begin(), ars_iters.end());
  std::sort(brs_iters.begin(), brs_iters.end());
  const double ars_median = 0.5 * (ars_iters[9] + ars_iters[10]);
  const double brs_median = 0.5 * (brs_iters[9] + brs_iters[10]);
  check.require(ars_median <= brs_median,
                "median iterations: ARS " + std::to_string(ars_median) +
                    " vs BRS " + std::to_string(brs_median));
}

void criterion_projectors(Checker& check) {
  Rng rng(RngSeed{77});
  int arc_checked = 0, hull_checked = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    const double center = 2.0 * M_PI * rng.uniform() - M_PI;
    const double hw = M_PI * rng.uniform();  // openings on both sides of pi
    const double l = center - hw, u = center + hw;
    const Complex x{4.0 * rng.uniform() - 2.0, 4.0 * rng.uniform() - 2.0};

    const Complex arc = project_arc(x, l, u);
    check.require(std::abs(std::abs(arc) - 1.0) <= 1e-9, "PR1 off the circle");
    const Complex arc_ref = oracles::nearest_on_arc_dense(x, l, u, 50000);
    check.require(std::abs(x - arc) <= std::abs(x - arc_ref) + 2e-3,
                  "PR1 farther than the dense-arc oracle");
    ++arc_checked;

    const Complex hull = project_hull(x, l, u);
    const Complex hull_ref = oracles::nearest_in_hull_dense(x, l, u, 4000);
    check.require(std::abs(x - hull) <= std::abs(x - hull_ref) + 2e-3,
                  "PR2 farther than the dense-hull oracle");
    const Complex twice = project_hull(hull, l, u);
    check.require(std::abs(twice - hull) <= 1e-12, "PR2 not idempotent");
    const Complex y{4.0 * rng.uniform() - 2.0, 4.0 * rng.uniform() - 2.0};
    check.require(std::abs(hull - project_hull(y, l, u)) <=
                      std::abs(x - y) + 1e-12,
                  "PR2 expansive");
    ++hull_checked;
  }
  check.require(arc_checked == 10000 && hull_checked == 10000, "pair count");
}

void criterion_rate_vs_epsilon(Checker& check) {
  SystemConfig cfg;
  cfg.n_antennas = 8;
  cfg.n_users = 2;
  cfg.frame_len = 8;
  cfg.noise_power = 0.1;
  const std::vector<double> eps_grid = {0.1, 0.5, 1.0, 1.5, 2.0};
  const double scale = std::sqrt(cfg.total_power / cfg.n_antennas);
  BnbConfig bnb;
  bnb.delta = 1e-4;
  const int n_seeds = 20;

  std::vector<double> mean_rate(eps_grid.size(), 0.0);
  double relaxed_rate_full = 0.0;
  for (std::uint64_t seed = 1; seed <= n_seeds; ++seed) {
    const Channel h = generate_rayleigh_channel(cfg, RngSeed{seed});
    const SymbolBlock s = generate_qpsk_symbols(cfg, RngSeed{seed + 5000});
    const WaveformBlock x0 = chirp_reference(cfg);
    for (std::size_t e = 0; e < eps_grid.size(); ++e) {
      const BlockResult block =
          solve_block(h, s, x0, eps_grid[e] * scale, cfg, bnb);
      mean_rate[e] += sum_rate(per_user_sinr(h, block.x, s, cfg)) / n_seeds;
    }

    // relaxation reference at the widest tolerance
    CmProblem p;
    p.h_tilde = scale * h.h;
    p.epsilon = 2.0;
    GpConfig gp;
    gp.max_iters = 2000;
    WaveformBlock relaxed{CMatrix(cfg.n_antennas, cfg.frame_len)};
    for (Eigen::Index j = 0; j < s.s.cols(); ++j) {
      p.s = s.s.col(j);
      p.x0 = x0.x.col(j) / scale;
      for (Eigen::Index i = 0; i < p.x0.size(); ++i) {
        p.x0(i) /= std::abs(p.x0(i));
      }
      relaxed.x.col(j) = scale * gp_lower_bound(p, arc_bounds(p.x0, 2.0), gp).x;
    }
    relaxed_rate_full += sum_rate(per_user_sinr(h, relaxed, s, cfg)) / n_seeds;
  }

  for (std::size_t e = 1; e < eps_grid.size(); ++e) {
    check.require(mean_rate[e] >= mean_rate[e - 1] - 1e-9,
                  "mean rate not monotone between eps " +
                      std::to_string(eps_grid[e - 1]) + " and " +
                      std::to_string(eps_grid[e]));
  }
  check.require(mean_rate.back() >= relaxed_rate_full - 0.1,
                "rate at eps = 2 is " + std::to_string(mean_rate.back()) +
                    ", relaxation reference " + std::to_string(relaxed_rate_full));
}

void criterion_pulse_compression(Checker& check) {
  SystemConfig cfg;
  cfg.n_antennas = 4;
  cfg.n_users = 2;
  cfg.frame_len = 32;
  cfg.noise_power = 0.1;
  const double scale = std::sqrt(cfg.total_power / cfg.n_antennas);
  BnbConfig bnb;
  bnb.delta = 1e-3;
  const WaveformBlock x0 = chirp_reference(cfg);
  const CVector reference = x0.x.row(0).transpose();

  // matched filter on a circularly delayed copy lands on the delay bin
  for (int delay : {0, 5, 17}) {
    CVector delayed(cfg.frame_len);
    for (int i = 0; i < cfg.frame_len; ++i) {
      delayed((i + delay) % cfg.frame_len) = reference(i);
    }
    WindowSpec rect;
    rect.kind = WindowSpec::Kind::Rectangular;
    check.require(pulse_compress(delayed, reference, rect).peak_bin == delay,
                  "peak not at delay " + std::to_string(delay));
  }

  const auto sidelobe_energy = [](const PulseProfile& profile) {
    const int bins = static_cast<int>(profile.magnitude.size());
    double energy = 0.0;
    for (int i = 0; i < bins; ++i) {
      const int lag = std::min((i - profile.peak_bin + bins) % bins,
                               (profile.peak_bin - i + bins) % bins);
      if (lag > 1) {
        energy += profile.magnitude(i) * profile.magnitude(i);
      }
    }
    return energy;
  };

  double tight = 0.0, loose = 0.0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Channel h = generate_rayleigh_channel(cfg, RngSeed{seed});
    const SymbolBlock s = generate_qpsk_symbols(cfg, RngSeed{seed + 5000});
    const BlockResult near_ref =
        solve_block(h, s, x0, 0.05 * scale, cfg, bnb);
    const BlockResult free_ref = solve_block(h, s, x0, 1.0 * scale, cfg, bnb);
    tight += sidelobe_energy(pulse_compress(near_ref.x.x.row(0).transpose(),
                                            reference, WindowSpec{}));
    loose += sidelobe_energy(pulse_compress(free_ref.x.x.row(0).transpose(),
                                            reference, WindowSpec{}));
  }
  check.require(loose >= tight,
                "sidelobe energy at eps = 1 (" + std::to_string(loose) +
                    ") below eps = 0.05 (" + std::to_string(tight) + ")");
}

void criterion_diagnostics(Checker& check) {
  Rng rng(RngSeed{99});
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 2 + static_cast<int>(rng.uniform() * 6);
    const int k = 1 + static_cast<int>(rng.uniform() * 3);
    CmProblem p;
    p.h_tilde.resize(k, n);
    for (int i = 0; i < k; ++i) {
      for (int j = 0; j < n; ++j) {
        p.h_tilde(i, j) = rng.gaussian();
      }
    }
    p.s.resize(k);
    for (int i = 0; i < k; ++i) {
      p.s(i) = rng.gaussian();
    }
    p.x0.resize(n);
    for (int i = 0; i < n; ++i) {
      p.x0(i) = std::polar(1.0, 2.0 * M_PI * rng.uniform() - M_PI);
    }
    p.epsilon = 0.1 + 1.8 * rng.uniform();
    const double delta = std::pow(10.0, -3.0 * rng.uniform());

    Eigen::SelfAdjointEigenSolver<CMatrix> es(p.h_tilde.adjoint() * p.h_tilde,
                                              Eigen::EigenvaluesOnly);
    const double lam_max = es.eigenvalues().maxCoeff();
    const double hts = (p.h_tilde.adjoint() * p.s).norm();

    const ConvergenceDiagnostics got = convergence_diagnostics(p, delta);
    const oracles::DiagnosticsRef ref =
        oracles::diagnostics_reference(n, lam_max, hts, p.epsilon, delta);
    const std::string tag = "trial " + std::to_string(trial);
    check.require(std::abs(got.eta1 - static_cast<double>(ref.eta1)) <=
                      1e-12 * std::abs(static_cast<double>(ref.eta1)),
                  tag + ": eta1");
    check.require(std::abs(got.eta2 - static_cast<double>(ref.eta2)) <=
                      1e-12 * std::abs(static_cast<double>(ref.eta2)),
                  tag + ": eta2");
    const long double t_ref = ref.iterations;
    check.require(fabsl(static_cast<long double>(got.worst_case_iters) - t_ref) <=
                      2e-12L * t_ref + 0.5L,
                  tag + ": worst-case iterations");
  }
}

}  // namespace

int main() {
  std::printf("acceptance suite\n");
  criterion("orthogonal design reaches the analytic optimum", 5.0, criterion_opp);
  criterion("directional design reproduces the target beampattern", 0.0,
            criterion_directional);
  criterion("trade-off solver satisfies the optimality conditions", 30.0,
            criterion_trs);
  criterion("trade-off direction and near-capacity rate", 120.0,
            criterion_tradeoff_direction);
  criterion("branch-and-bound matches the exhaustive grid", 120.0,
            criterion_bnb_small);
  criterion("branch-and-bound converges at full scale; ARS beats BRS", 600.0,
            criterion_bnb_paper_scale);
  criterion("projectors match dense nearest-point oracles", 0.0,
            criterion_projectors);
  criterion("sum rate grows with the similarity tolerance", 0.0,
            criterion_rate_vs_epsilon);
  criterion("pulse compression peaks and sidelobe ordering", 0.0,
            criterion_pulse_compression);
  criterion("convergence diagnostics match extended precision", 0.0,
            criterion_diagnostics);
  std::printf("%d of 10 criteria passed\n", 10 - g_failures);
  return g_failures;
}
