// SPDX-License-Identifier: Apache-2.0

#include "radcom/closed_form.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <vector>

#include "radcom/model.hpp"

namespace radcom {

namespace {

// X = scale * U I_{NxL} V^H given the full SVD U S V^H of target. The
// rectangular identity pairs U's columns with the first N columns of V.
CMatrix procrustes_point(const CMatrix& target, double scale) {
  Eigen::JacobiSVD<CMatrix> svd(target, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return scale * svd.matrixU() *
         svd.matrixV().leftCols(target.rows()).adjoint();
}

void check_procrustes_dims(const Channel& h, const SymbolBlock& s,
                           const SystemConfig& cfg) {
  if (h.h.rows() != s.s.rows() || h.h.cols() != cfg.n_antennas ||
      s.s.cols() != cfg.frame_len) {
    throw std::invalid_argument("waveform design: dimension mismatch");
  }
  if (cfg.frame_len < cfg.n_antennas) {
    throw std::invalid_argument("waveform design: needs L >= N");
  }
}

// Lower-triangular Cholesky factor of a validated design target.
CMatrix design_target_factor(const CovarianceMatrix& rd, const SystemConfig& cfg) {
  if (rd.r.rows() != cfg.n_antennas || rd.r.cols() != cfg.n_antennas) {
    throw std::invalid_argument("directional design: R_d has wrong size");
  }
  if (!rd.is_hermitian(1e-10)) {
    throw std::invalid_argument("directional design: R_d is not Hermitian");
  }
  if (std::abs(rd.r.trace().real() - cfg.total_power) > 1e-8) {
    throw std::invalid_argument("directional design: tr(R_d) != P_T");
  }
  if (rd.min_eigenvalue() <= 1e-10) {
    throw NotPositiveDefiniteError(
        "directional design: R_d is not positive-definite");
  }
  Eigen::LLT<CMatrix> llt(rd.r);
  if (llt.info() != Eigen::Success) {
    throw NotPositiveDefiniteError("directional design: Cholesky failed");
  }
  return llt.matrixL();
}

}  // namespace

WaveformBlock omni_design(const Channel& h, const SymbolBlock& s,
                          const SystemConfig& cfg) {
  check_procrustes_dims(h, s, cfg);
  const double scale =
      std::sqrt(cfg.frame_len * cfg.total_power / cfg.n_antennas);
  return WaveformBlock{procrustes_point(h.h.adjoint() * s.s, scale)};
}

WaveformBlock directional_design(const Channel& h, const SymbolBlock& s,
                                 const CovarianceMatrix& rd,
                                 const SystemConfig& cfg) {
  check_procrustes_dims(h, s, cfg);
  const CMatrix f = design_target_factor(rd, cfg);
  const CMatrix whitened =
      procrustes_point(f.adjoint() * h.h.adjoint() * s.s, 1.0);
  return WaveformBlock{std::sqrt(static_cast<double>(cfg.frame_len)) * f *
                       whitened};
}

double omni_optimal_mui(const Channel& h, const SymbolBlock& s,
                        const SystemConfig& cfg) {
  const double c = cfg.frame_len * cfg.total_power / cfg.n_antennas;
  Eigen::JacobiSVD<CMatrix> svd(h.h.adjoint() * s.s);
  return c * h.h.squaredNorm() - 2.0 * std::sqrt(c) * svd.singularValues().sum() +
         s.s.squaredNorm();
}

double directional_optimal_mui(const Channel& h, const SymbolBlock& s,
                               const CovarianceMatrix& rd,
                               const SystemConfig& cfg) {
  const CMatrix f = design_target_factor(rd, cfg);
  const double l = static_cast<double>(cfg.frame_len);
  Eigen::JacobiSVD<CMatrix> svd(f.adjoint() * h.h.adjoint() * s.s);
  const double quad = (h.h * rd.r * h.h.adjoint()).trace().real();
  return l * quad - 2.0 * std::sqrt(l) * svd.singularValues().sum() +
         s.s.squaredNorm();
}

CovarianceMatrix regularize_covariance(const CovarianceMatrix& rd,
                                       const SystemConfig& cfg, double eps) {
  if (eps < 0.0) {
    eps = 1e-8 * cfg.total_power / cfg.n_antennas;
  }
  CMatrix shifted = rd.r + eps * CMatrix::Identity(rd.r.rows(), rd.r.cols());
  shifted *= cfg.total_power / shifted.trace().real();
  return CovarianceMatrix{std::move(shifted)};
}

namespace {

// Eigenvalues projected onto {v >= 0, sum v = budget}: the Frobenius-nearest
// PSD matrix with the required trace shares the eigenbasis, so this single
// spectral step realizes the PSD-cone / trace-plane projection pair.
CMatrix project_psd_trace(const CMatrix& m, double budget) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (m + m.adjoint()));
  RVector v = es.eigenvalues();
  std::vector<double> sorted(v.data(), v.data() + v.size());
  std::sort(sorted.begin(), sorted.end(), std::greater<double>());
  double cumsum = 0.0;
  double tau = (sorted[0] - budget);
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    cumsum += sorted[i];
    const double cand = (cumsum - budget) / static_cast<double>(i + 1);
    if (i + 1 == sorted.size() || sorted[i + 1] <= cand) {
      tau = cand;
      break;
    }
  }
  RVector clipped = (v.array() - tau).max(0.0);
  return es.eigenvectors() * clipped.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace

CovarianceLsResult design_covariance_ls(const DirectionalTarget& target,
                                        const SystemConfig& cfg) {
  const Eigen::Index g_count = target.grid.size();
  if (g_count == 0) {
    throw std::invalid_argument("design_covariance_ls: empty grid");
  }
  for (Eigen::Index g = 1; g < g_count; ++g) {
    if (target.grid(g) <= target.grid(g - 1)) {
      throw std::invalid_argument("design_covariance_ls: grid must increase");
    }
  }
  for (Eigen::Index t = 0; t < target.angles.size(); ++t) {
    if (std::abs(target.angles(t)) >= M_PI / 2.0) {
      throw std::invalid_argument(
          "design_covariance_ls: target angles must lie in (-pi/2, pi/2)");
    }
  }

  const int n = cfg.n_antennas;
  CMatrix steer(n, g_count);
  RVector tmpl(g_count);
  // Rectangular template: level N P_T / (#lobes) inside each mainlobe, zero
  // elsewhere; flat at P_T when no target angles are given.
  const double level =
      target.angles.size() > 0
          ? cfg.total_power * n / static_cast<double>(target.angles.size())
          : cfg.total_power;
  for (Eigen::Index g = 0; g < g_count; ++g) {
    steer.col(g) = steering_vector(cfg, target.grid(g));
    double p = target.angles.size() > 0 ? 0.0 : cfg.total_power;
    for (Eigen::Index t = 0; t < target.angles.size(); ++t) {
      if (std::abs(target.grid(g) - target.angles(t)) <=
          0.5 * target.mainlobe_width) {
        p = level;
        break;
      }
    }
    tmpl(g) = p;
  }

  // res_g = a_g^H R a_g - tmpl_g, computed column-wise through M = R A.
  const auto pattern_residual = [&](const CMatrix& r) -> RVector {
    const CMatrix m = r * steer;
    return (steer.conjugate().cwiseProduct(m)).colwise().sum().real().transpose() -
           tmpl;
  };
  const auto gradient_from_residual = [&](const RVector& res) -> CMatrix {
    return steer * (2.0 * res).asDiagonal() * steer.adjoint();
  };

  // Largest curvature of the quadratic objective via power iteration on the
  // normal operator R -> sum_g (a_g^H R a_g) a_g a_g^H.
  double lam_max = 1.0;
  {
    CMatrix z = CMatrix::Identity(n, n) / std::sqrt(static_cast<double>(n));
    for (int it = 0; it < 40; ++it) {
      const CMatrix m = z * steer;
      const RVector w =
          (steer.conjugate().cwiseProduct(m)).colwise().sum().real().transpose();
      CMatrix next = steer * w.asDiagonal() * steer.adjoint();
      const double norm = next.norm();
      if (norm <= 0.0) {
        break;
      }
      lam_max = norm;
      z = next / norm;
    }
  }
  const double step = 1.0 / (2.0 * lam_max * 1.01);

  const double budget = cfg.total_power;
  const int max_iters = 10000;
  const double pg_tol = 1e-6;

  CMatrix r_cur = (budget / n) * CMatrix::Identity(n, n);
  CMatrix r_prev = r_cur;
  double obj_cur = pattern_residual(r_cur).squaredNorm();
  int momentum_age = 0;
  CovarianceLsResult out;

  for (int k = 1; k <= max_iters; ++k) {
    out.iterations = k;
    const double momentum =
        static_cast<double>(momentum_age) / (momentum_age + 3);
    const CMatrix y = r_cur + momentum * (r_cur - r_prev);
    CMatrix r_next = project_psd_trace(y - step * gradient_from_residual(
                                                      pattern_residual(y)),
                                       budget);
    double obj_next = pattern_residual(r_next).squaredNorm();
    if (obj_next > obj_cur) {
      // accelerated step overshot: fall back to a plain projected gradient
      // step from r_cur (monotone for this step size) and reset momentum
      r_next = project_psd_trace(
          r_cur - step * gradient_from_residual(pattern_residual(r_cur)), budget);
      obj_next = pattern_residual(r_next).squaredNorm();
      momentum_age = 0;
    } else {
      ++momentum_age;
    }

    const double move = (r_next - r_cur).norm() / step;
    r_prev = r_cur;
    r_cur = r_next;
    obj_cur = std::min(obj_cur, obj_next);
    if (move < pg_tol) {
      const CMatrix pg_point = project_psd_trace(
          r_cur - step * gradient_from_residual(pattern_residual(r_cur)), budget);
      if ((r_cur - pg_point).norm() / step < pg_tol) {
        out.converged = true;
        break;
      }
    }
  }

  out.r = CovarianceMatrix{r_cur};
  out.objective = obj_cur;
  return out;
}

}  // namespace radcom
