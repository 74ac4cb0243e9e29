// SPDX-License-Identifier: Apache-2.0

#include "radcom/cm_bnb.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include "radcom/kernels.hpp"

namespace radcom {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Wrap to (-pi, pi].
double wrap_pi(double a) {
  a = std::fmod(a, 2.0 * kPi);
  if (a <= -kPi) {
    a += 2.0 * kPi;
  } else if (a > kPi) {
    a -= 2.0 * kPi;
  }
  return a;
}

}  // namespace

ArcBox ArcBox::from_bounds(const RVector& l, const RVector& u) {
  if (l.size() != u.size()) {
    throw std::invalid_argument("ArcBox: bound sizes differ");
  }
  ArcBox box;
  box.center = 0.5 * (l + u);
  box.half_width = 0.5 * (u - l);
  for (Eigen::Index n = 0; n < box.half_width.size(); ++n) {
    if (box.half_width(n) < 0.0 || box.half_width(n) > kPi + 1e-12) {
      throw std::invalid_argument("ArcBox: needs 0 <= u - l <= 2 pi");
    }
    box.half_width(n) = std::min(box.half_width(n), kPi);
  }
  return box;
}

ArcBox arc_bounds(const CVector& x0, double epsilon) {
  if (!(epsilon >= 0.0 && epsilon <= 2.0)) {
    throw std::invalid_argument("arc_bounds: epsilon must be in [0, 2]");
  }
  const double cosine = 1.0 - 0.5 * epsilon * epsilon;
  const double half_width = std::acos(std::clamp(cosine, -1.0, 1.0));
  ArcBox box;
  box.center.resize(x0.size());
  box.half_width = RVector::Constant(x0.size(), half_width);
  for (Eigen::Index n = 0; n < x0.size(); ++n) {
    box.center(n) = std::arg(x0(n));
  }
  return box;
}

Complex project_arc(Complex x, double l, double u) {
  const double c = 0.5 * (l + u);
  const double w = 0.5 * (u - l);
  const double mag = std::abs(x);
  if (mag == 0.0) {
    return std::polar(1.0, c);  // every arc point is equidistant: take the midpoint
  }
  const double d = wrap_pi(std::arg(x) - c);
  if (std::abs(d) <= w) {
    return x / mag;
  }
  // Bisector rule; the antipodal tie (d = pi exactly) snaps to the upper edge.
  return std::polar(1.0, d > 0.0 ? u : l);
}

Complex project_hull(Complex x, double l, double u) {
  const double c = 0.5 * (l + u);
  const double w = 0.5 * (u - l);
  const double cos_w = std::cos(w);
  const double sin_w = std::sin(w);

  // Rotate so the arc is symmetric about the positive real axis; the chord
  // becomes the vertical line Re = cos(w) and the hull is
  // {|y| <= 1, Re y >= cos(w)} for every opening up to 2 pi.
  const Complex y = x * std::polar(1.0, -c);
  const double mag = std::abs(y);
  if (mag <= 1.0 && y.real() >= cos_w) {
    return x;
  }
  if (mag > 1.0 && std::abs(wrap_pi(std::arg(y))) <= w) {
    return x / mag;  // radially outside, angle within the arc
  }
  Complex projected;
  if (y.imag() > sin_w) {
    projected = {cos_w, sin_w};  // corner at the upper arc endpoint
  } else if (y.imag() < -sin_w) {
    projected = {cos_w, -sin_w};  // corner at the lower arc endpoint
  } else {
    projected = {cos_w, y.imag()};  // foot of the perpendicular on the chord
  }
  return projected * std::polar(1.0, c);
}

namespace {

void project_arc_box(const CVector& in, const ArcBox& box, CVector& out) {
  for (Eigen::Index n = 0; n < in.size(); ++n) {
    out(n) = project_arc(in(n), box.l(n), box.u(n));
  }
}

void project_hull_box(const CVector& in, const ArcBox& box, CVector& out) {
  for (Eigen::Index n = 0; n < in.size(); ++n) {
    out(n) = project_hull(in(n), box.l(n), box.u(n));
  }
}

// Per-problem precomputation: row-major operator copies for the kernels and
// the curvature/gradient constants shared by every bound evaluation.
struct GpWorkspace {
  Eigen::Index k = 0;
  Eigen::Index n = 0;
  std::vector<Complex> h_rm;     // K x N row-major
  std::vector<Complex> hadj_rm;  // N x K row-major (adjoint)
  std::vector<Complex> s;
  double lam_max = 0.0;     // largest eigenvalue of H~^H H~
  double hts_norm = 0.0;    // ||H~^H s||

  mutable CVector resid;  // K scratch
  mutable CVector grad;   // N scratch

  explicit GpWorkspace(const CmProblem& p) {
    k = p.h_tilde.rows();
    n = p.h_tilde.cols();
    h_rm.resize(static_cast<std::size_t>(k * n));
    hadj_rm.resize(static_cast<std::size_t>(k * n));
    for (Eigen::Index r = 0; r < k; ++r) {
      for (Eigen::Index cidx = 0; cidx < n; ++cidx) {
        h_rm[static_cast<std::size_t>(r * n + cidx)] = p.h_tilde(r, cidx);
        hadj_rm[static_cast<std::size_t>(cidx * k + r)] = std::conj(p.h_tilde(r, cidx));
      }
    }
    s.assign(p.s.data(), p.s.data() + k);
    Eigen::SelfAdjointEigenSolver<CMatrix> es(p.h_tilde.adjoint() * p.h_tilde,
                                              Eigen::EigenvaluesOnly);
    lam_max = std::max(es.eigenvalues().maxCoeff(), 0.0);
    hts_norm = (p.h_tilde.adjoint() * p.s).norm();
    resid.resize(k);
    grad.resize(n);
  }

  double step_of(const GpConfig& cfg) const {
    if (cfg.step > 0.0) {
      return cfg.step;
    }
    return lam_max > 0.0 ? 1.0 / (2.0 * lam_max) : 1.0;
  }

  // f(x) = ||H~ x - s||^2
  double objective(const CVector& x) const {
    kernels::matvec_residual(h_rm.data(), static_cast<std::size_t>(k),
                             static_cast<std::size_t>(n), x.data(), s.data(),
                             resid.data());
    return kernels::sum_sq(resid.data(), static_cast<std::size_t>(k));
  }

  // grad = 2 H~^H (H~ x - s); returns f(x)
  double objective_and_gradient(const CVector& x) const {
    kernels::matvec_residual(h_rm.data(), static_cast<std::size_t>(k),
                             static_cast<std::size_t>(n), x.data(), s.data(),
                             resid.data());
    kernels::matvec(hadj_rm.data(), static_cast<std::size_t>(n),
                    static_cast<std::size_t>(k), resid.data(), grad.data());
    grad *= 2.0;
    return kernels::sum_sq(resid.data(), static_cast<std::size_t>(k));
  }
};

// min over the hull of Re(conj(g) z); attained on the arc.
double hull_support_min(Complex g, double center, double half_width) {
  const double mag = std::abs(g);
  if (mag == 0.0) {
    return 0.0;
  }
  const double psi = std::arg(g);
  const double d = wrap_pi(psi + kPi - center);
  if (std::abs(d) <= half_width) {
    return -mag;
  }
  const double theta = center + (d > 0.0 ? half_width : -half_width);
  return mag * std::cos(theta - psi);
}

// Certified lower bound at a hull-feasible point: the objective minus its
// linearization gap over the hull, never below zero.
double certified_lower_bound(const GpWorkspace& ws, const ArcBox& box,
                             const CVector& x, double objective) {
  double gap = 0.0;
  ws.objective_and_gradient(x);  // fills ws.grad at x
  for (Eigen::Index n = 0; n < x.size(); ++n) {
    const double here = (std::conj(ws.grad(n)) * x(n)).real();
    gap += here - hull_support_min(ws.grad(n), box.center(n), box.half_width(n));
  }
  return std::max(objective - gap, 0.0);
}

GpResult gp_lower_bound_ws(const GpWorkspace& ws, const ArcBox& box,
                           const GpConfig& cfg, const CVector* warm_start,
                           const CVector& x0) {
  const double step = ws.step_of(cfg);
  GpResult out;
  CVector x(ws.n);
  project_hull_box(warm_start != nullptr ? *warm_start : x0, box, x);
  CVector x_prev = x;
  CVector cand(ws.n);
  double f_cur = ws.objective(x);
  int momentum_age = 0;

  for (int it = 1; it <= cfg.max_iters; ++it) {
    out.iterations = it;
    const double momentum =
        static_cast<double>(momentum_age) / (momentum_age + 3);
    CVector v = x + momentum * (x - x_prev);
    ws.objective_and_gradient(v);
    cand = v - step * ws.grad;  // grad already carries the factor of two
    project_hull_box(cand, box, cand);
    const double f_cand = ws.objective(cand);
    if (f_cand > f_cur && momentum_age > 0) {
      momentum_age = 0;  // adaptive restart: retry as a plain step
      x_prev = x;
      continue;
    }
    ++momentum_age;
    out.residual = (cand - x).norm();
    x_prev = x;
    x = cand;
    f_cur = f_cand;
    if (out.residual <= cfg.fixed_point_tol) {
      out.converged = true;
      break;
    }
  }

  out.x = x;
  out.objective = f_cur;
  out.bound = certified_lower_bound(ws, box, x, f_cur);
  return out;
}

GpResult gp_upper_bound_ws(const GpWorkspace& ws, const ArcBox& box,
                           const CVector& init, const GpConfig& cfg) {
  const double step = ws.step_of(cfg);
  GpResult out;
  CVector x = init;
  CVector best = x;
  double f_best = ws.objective(x);
  CVector cand(ws.n);

  for (int it = 1; it <= cfg.max_iters; ++it) {
    out.iterations = it;
    ws.objective_and_gradient(x);
    cand = x - step * ws.grad;
    project_arc_box(cand, box, cand);
    const double f_cand = ws.objective(cand);
    out.residual = (cand - x).norm();
    x = cand;
    if (f_cand < f_best) {
      f_best = f_cand;
      best = cand;
    }
    if (out.residual <= cfg.fixed_point_tol) {
      out.converged = true;
      break;
    }
  }

  out.x = best;
  out.objective = f_best;
  out.bound = f_best;
  return out;
}

void validate_cm_problem(const CmProblem& p) {
  if (p.h_tilde.cols() != p.x0.size() || p.h_tilde.rows() != p.s.size()) {
    throw std::invalid_argument("cm problem: dimension mismatch");
  }
  if (!(p.epsilon >= 0.0 && p.epsilon <= 2.0)) {
    throw std::invalid_argument("cm problem: epsilon must be in [0, 2]");
  }
  for (Eigen::Index n = 0; n < p.x0.size(); ++n) {
    if (std::abs(std::abs(p.x0(n)) - 1.0) > 1e-12) {
      throw std::invalid_argument("cm problem: x0 entries must have unit modulus");
    }
  }
}

}  // namespace

GpResult gp_lower_bound(const CmProblem& p, const ArcBox& box, const GpConfig& cfg,
                        const CVector* warm_start) {
  validate_cm_problem(p);
  GpWorkspace ws(p);
  return gp_lower_bound_ws(ws, box, cfg, warm_start, p.x0);
}

GpResult gp_upper_bound(const CmProblem& p, const ArcBox& box, const CVector& init,
                        const GpConfig& cfg) {
  validate_cm_problem(p);
  GpWorkspace ws(p);
  return gp_upper_bound_ws(ws, box, init, cfg);
}

std::pair<ArcBox, ArcBox> subdivide(const BnbNode& node, SubdivisionRule rule) {
  const Eigen::Index n = node.box.size();
  Eigen::Index pick = 0;
  if (rule == SubdivisionRule::Brs) {
    for (Eigen::Index i = 1; i < n; ++i) {
      if (node.box.half_width(i) > node.box.half_width(pick)) {
        pick = i;
      }
    }
  } else {
    double best = -1.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double d = std::abs(node.x_u(i) - node.x_l(i));
      if (d > best) {
        best = d;
        pick = i;
      }
    }
    if (node.box.half_width(pick) == 0.0) {
      // the largest-gap arc is already a point: fall back to the widest arc
      for (Eigen::Index i = 0; i < n; ++i) {
        if (node.box.half_width(i) > node.box.half_width(pick)) {
          pick = i;
        }
      }
    }
  }
  const double hw = node.box.half_width(pick);
  if (hw <= 0.0) {
    throw DegenerateNodeError("subdivide: every arc has zero width");
  }
  ArcBox a = node.box;
  ArcBox b = node.box;
  a.center(pick) -= 0.5 * hw;
  a.half_width(pick) = 0.5 * hw;
  b.center(pick) += 0.5 * hw;
  b.half_width(pick) = 0.5 * hw;
  return {std::move(a), std::move(b)};
}

BnbResult bnb_solve_column(const CmProblem& p, const BnbConfig& cfg,
                           const BnbTraceSink& sink) {
  validate_cm_problem(p);
  if (!(cfg.delta > 0.0)) {
    throw std::invalid_argument("bnb: delta must be > 0");
  }
  const GpWorkspace ws(p);

  const auto evaluate = [&](ArcBox box, const CVector* warm) {
    BnbNode node;
    node.box = std::move(box);
    GpResult lower = gp_lower_bound_ws(ws, node.box, cfg.gp, warm, p.x0);
    CVector feas(ws.n);
    project_arc_box(lower.x, node.box, feas);
    GpResult upper = gp_upper_bound_ws(ws, node.box, feas, cfg.gp);
    node.x_l = std::move(lower.x);
    node.x_u = std::move(upper.x);
    node.lower_bound = lower.bound;
    node.upper_bound = upper.objective;
    node.phi_max = 2.0 * node.box.half_width.maxCoeff();
    node.d_max = 0.0;
    for (Eigen::Index i = 0; i < ws.n; ++i) {
      node.d_max = std::max(node.d_max, std::abs(node.x_u(i) - node.x_l(i)));
    }
    return node;
  };

  struct HeapEntry {
    double lower_bound;
    std::uint64_t seq;  // FIFO tie-break
    BnbNode node;
    bool operator<(const HeapEntry& o) const {
      if (lower_bound != o.lower_bound) {
        return lower_bound > o.lower_bound;  // min-heap on the bound
      }
      return seq > o.seq;
    }
  };
  std::priority_queue<HeapEntry> active;
  std::uint64_t seq = 0;

  BnbNode root = evaluate(arc_bounds(p.x0, p.epsilon), nullptr);
  BnbResult result;
  result.x_opt = root.x_u;
  double ub = root.upper_bound;
  double lb = std::min(root.lower_bound, ub);
  active.push(HeapEntry{lb, seq++, std::move(root)});

  const auto emit = [&](int iteration) {
    if (sink) {
      sink(BnbTracePoint{iteration, ub, lb, active.size()});
    }
  };
  emit(0);

  int iteration = 0;
  while (ub - lb > cfg.delta && iteration < cfg.max_iters && !active.empty()) {
    ++iteration;
    HeapEntry top = active.top();
    active.pop();

    auto [box_a, box_b] = subdivide(top.node, cfg.rule);
    for (ArcBox* child_box : {&box_a, &box_b}) {
      BnbNode child = evaluate(std::move(*child_box), &top.node.x_l);
      // A child region is a subset of its parent, so its optimum can only be
      // higher; lifting keeps the global bound monotone under inexact solves.
      child.lower_bound = std::max(child.lower_bound, top.node.lower_bound);
      if (child.upper_bound < ub) {
        ub = child.upper_bound;
        result.x_opt = child.x_u;
      }
      if (child.lower_bound <= ub) {
        active.push(HeapEntry{child.lower_bound, seq++, std::move(child)});
      }
    }
    lb = active.empty() ? ub : std::max(lb, active.top().lower_bound);
    lb = std::min(lb, ub);
    emit(iteration);
  }

  result.objective = ub;
  result.lower_bound = lb;
  result.gap = ub - lb;
  result.iterations = iteration;
  result.converged = result.gap <= cfg.delta;
  return result;
}

BlockResult solve_block(const Channel& h, const SymbolBlock& s,
                        const WaveformBlock& x0_block, double eta,
                        const SystemConfig& cfg, const BnbConfig& bnb) {
  if (eta < 0.0) {
    throw std::invalid_argument("solve_block: eta must be >= 0");
  }
  const double scale = std::sqrt(cfg.total_power / cfg.n_antennas);
  for (Eigen::Index i = 0; i < x0_block.x.rows(); ++i) {
    for (Eigen::Index j = 0; j < x0_block.x.cols(); ++j) {
      if (std::abs(std::abs(x0_block.x(i, j)) - scale) > 1e-9) {
        throw std::invalid_argument(
            "solve_block: reference entries must have modulus sqrt(P_T/N)");
      }
    }
  }

  CmProblem column;
  column.h_tilde = scale * h.h;
  column.epsilon = std::min(eta / scale, 2.0);

  BlockResult out;
  out.x.x.resize(x0_block.x.rows(), x0_block.x.cols());
  out.converged = true;
  out.columns.reserve(static_cast<std::size_t>(s.s.cols()));
  for (Eigen::Index j = 0; j < s.s.cols(); ++j) {
    column.s = s.s.col(j);
    column.x0 = x0_block.x.col(j) / scale;
    for (Eigen::Index i = 0; i < column.x0.size(); ++i) {
      column.x0(i) /= std::abs(column.x0(i));  // exact unit modulus
    }
    try {
      BnbResult col = bnb_solve_column(column, bnb);
      out.converged = out.converged && col.converged;
      out.x.x.col(j) = scale * col.x_opt;
      out.columns.push_back(std::move(col));
    } catch (const std::exception& e) {
      throw NumericalFailureError("solve_block: column " + std::to_string(j) +
                                  ": " + e.what());
    }
  }
  return out;
}

ConvergenceDiagnostics convergence_diagnostics(const CmProblem& p, double delta) {
  if (!(delta > 0.0)) {
    throw std::invalid_argument("convergence_diagnostics: delta must be > 0");
  }
  validate_cm_problem(p);
  const GpWorkspace ws(p);
  const double n = static_cast<double>(ws.n);
  const double denom = n * ws.lam_max + std::sqrt(n) * ws.hts_norm;

  ConvergenceDiagnostics out;
  const double asin_arg = delta / (4.0 * denom);
  out.eta1 = asin_arg >= 1.0 ? kPi : 2.0 * std::asin(asin_arg);
  out.eta2 = delta / (2.0 * denom);

  const double half_width =
      std::acos(std::clamp(1.0 - 0.5 * p.epsilon * p.epsilon, -1.0, 1.0));
  if (half_width == 0.0) {
    out.worst_case_iters = 0;
    return out;
  }
  const double t = std::ceil(std::pow(2.0, n + 1.0) * std::pow(half_width, n) /
                             out.eta1);
  if (!std::isfinite(t) ||
      t >= static_cast<double>(std::numeric_limits<std::int64_t>::max())) {
    out.worst_case_iters = std::numeric_limits<std::int64_t>::max();
  } else {
    out.worst_case_iters = static_cast<std::int64_t>(t);
  }
  return out;
}

}  // namespace radcom
