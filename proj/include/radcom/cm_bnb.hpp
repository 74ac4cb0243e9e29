// SPDX-License-Identifier: Apache-2.0
//
// Globally optimal constant-modulus waveform design under an entrywise
// similarity constraint. The per-column problem restricts each entry to an
// arc of the unit circle; a branch-and-bound search over boxes of arcs uses
// gradient projection onto the arcs (upper bounds) and onto their convex
// hulls (lower bounds).

#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "radcom/types.hpp"

namespace radcom {

/// One-column problem in normalized form: h_tilde = sqrt(P_T/N) H, unit
/// modulus entries, similarity radius epsilon in [0, 2].
struct CmProblem {
  CMatrix h_tilde;  // K x N
  CVector s;        // K
  CVector x0;       // N, |x0(n)| = 1
  double epsilon = 1.0;
};

/// Per-entry feasible phase intervals [l_n, u_n], kept as center/half-width
/// so that splitting and membership tests never wrap around 2 pi.
struct ArcBox {
  RVector center;
  RVector half_width;  // in [0, pi]

  Eigen::Index size() const { return center.size(); }
  double l(Eigen::Index n) const { return center(n) - half_width(n); }
  double u(Eigen::Index n) const { return center(n) + half_width(n); }
  RVector lower_angles() const { return center - half_width; }
  RVector upper_angles() const { return center + half_width; }

  /// Builds from explicit bounds; requires u >= l and u - l <= 2 pi.
  static ArcBox from_bounds(const RVector& l, const RVector& u);
};

/// Feasible region of the similarity constraint: arcs of half-width
/// arccos(1 - epsilon^2 / 2) around the reference phases.
ArcBox arc_bounds(const CVector& x0, double epsilon);

/// Projection onto the arc {e^{j t} : t in [l, u]} (nearest point).
/// x = 0 snaps to the arc midpoint.
Complex project_arc(Complex x, double l, double u);

/// Projection onto the convex hull of that arc (the chord-bounded circular
/// segment, or the chord-truncated disc once the opening reaches pi).
Complex project_hull(Complex x, double l, double u);

struct GpConfig {
  /// Step multiplier in the update x - 2 s H~^H (H~ x - s_vec); 0 selects
  /// 1 / (2 lambda_max(H~^H H~)), the largest value with a descent
  /// guarantee for this objective.
  double step = 0.0;
  int max_iters = 500;
  double fixed_point_tol = 1e-10;
};

struct GpResult {
  CVector x;
  double objective = 0.0;  // f at the returned point
  /// For the hull solve: certified lower bound max(objective - gap, 0),
  /// where gap is the linearization gap at x (rigorous regardless of how
  /// far the iteration converged). For the arc solve: equals objective.
  double bound = 0.0;
  double residual = 0.0;  // final fixed-point residual
  int iterations = 0;
  bool converged = false;
};

/// Accelerated gradient projection on the convex hull relaxation.
GpResult gp_lower_bound(const CmProblem& p, const ArcBox& box, const GpConfig& cfg,
                        const CVector* warm_start = nullptr);

/// Non-interpolated gradient projection on the arcs, started from init
/// (callers pass the arc projection of the relaxed point). Returns the best
/// iterate seen, so the result never exceeds f(init).
GpResult gp_upper_bound(const CmProblem& p, const ArcBox& box, const CVector& init,
                        const GpConfig& cfg);

enum class SubdivisionRule { Brs, Ars };

struct BnbNode {
  ArcBox box;
  double lower_bound = 0.0;
  double upper_bound = 0.0;
  CVector x_l;  // relaxed (hull) minimizer
  CVector x_u;  // feasible point achieving upper_bound
  double phi_max = 0.0;  // widest arc opening
  double d_max = 0.0;    // max per-entry |x_u - x_l|
};

/// Splits the selected arc at its midpoint (widest arc for Brs, largest
/// bound-gap coordinate for Ars; ties pick the lowest index). Throws
/// DegenerateNodeError when every arc has zero width.
std::pair<ArcBox, ArcBox> subdivide(const BnbNode& node, SubdivisionRule rule);

struct BnbConfig {
  double delta = 1e-5;
  int max_iters = 10000;
  SubdivisionRule rule = SubdivisionRule::Ars;
  GpConfig gp;
};

struct BnbTracePoint {
  int iteration = 0;
  double upper_bound = 0.0;
  double lower_bound = 0.0;
  std::size_t active_nodes = 0;
};

using BnbTraceSink = std::function<void(const BnbTracePoint&)>;

struct BnbResult {
  CVector x_opt;
  double objective = 0.0;  // final upper bound, achieved by x_opt
  double lower_bound = 0.0;
  double gap = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Best-first branch-and-bound for one column. The sink, when set, receives
/// one point per iteration for convergence plots.
BnbResult bnb_solve_column(const CmProblem& p, const BnbConfig& cfg,
                           const BnbTraceSink& sink = {});

struct BlockResult {
  WaveformBlock x;
  std::vector<BnbResult> columns;
  bool converged = false;
};

/// Solves the full N x L block column by column (the objective separates
/// over columns). eta is the unnormalized similarity tolerance; entries of
/// x0_block must have modulus sqrt(P_T/N).
BlockResult solve_block(const Channel& h, const SymbolBlock& s,
                        const WaveformBlock& x0_block, double eta,
                        const SystemConfig& cfg, const BnbConfig& bnb);

struct ConvergenceDiagnostics {
  double eta1 = 0.0;  // arc-width threshold guaranteeing a delta gap
  double eta2 = 0.0;  // bound-distance threshold guaranteeing a delta gap
  /// Worst-case iteration count for the widest-arc rule; saturates at
  /// INT64_MAX when the bound overflows.
  std::int64_t worst_case_iters = 0;
};

ConvergenceDiagnostics convergence_diagnostics(const CmProblem& p, double delta);

}  // namespace radcom
