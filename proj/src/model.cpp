// SPDX-License-Identifier: Apache-2.0

#include "radcom/model.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <limits>

#include "radcom/kernels.hpp"
#include "radcom/rng.hpp"

namespace radcom {

void SystemConfig::validate() const {
  if (n_antennas <= 0) {
    throw std::invalid_argument("n_antennas must be positive");
  }
  if (n_users <= 0) {
    throw std::invalid_argument("n_users must be positive");
  }
  if (frame_len < n_antennas) {
    throw std::invalid_argument("frame_len must be >= n_antennas");
  }
  if (!(total_power > 0.0)) {
    throw std::invalid_argument("total_power must be > 0");
  }
  if (!(noise_power >= 0.0)) {
    throw std::invalid_argument("noise_power must be >= 0");
  }
  if (!(element_spacing > 0.0)) {
    throw std::invalid_argument("element_spacing must be > 0");
  }
}

bool CovarianceMatrix::is_hermitian(double tol) const {
  if (r.rows() != r.cols()) {
    return false;
  }
  return (r - r.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

double CovarianceMatrix::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (r + r.adjoint()),
                                            Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

CVector steering_vector(const SystemConfig& cfg, double theta) {
  CVector a(cfg.n_antennas);
  const double phase_step = 2.0 * M_PI * cfg.element_spacing * std::sin(theta);
  for (int n = 0; n < cfg.n_antennas; ++n) {
    a(n) = std::polar(1.0, phase_step * n);
  }
  return a;
}

RVector beampattern(const CovarianceMatrix& r, const SystemConfig& cfg,
                    const RVector& theta_grid) {
  if (!r.is_hermitian(1e-10)) {
    throw std::invalid_argument("beampattern: covariance is not Hermitian");
  }
  RVector out(theta_grid.size());
  CVector ra(cfg.n_antennas);
  for (Eigen::Index g = 0; g < theta_grid.size(); ++g) {
    const CVector a = steering_vector(cfg, theta_grid(g));
    ra.noalias() = r.r * a;
    out(g) = kernels::cdotc(a.data(), ra.data(), static_cast<std::size_t>(a.size()))
                 .real();
  }
  return out;
}

CovarianceMatrix sample_covariance(const WaveformBlock& x) {
  const double l = static_cast<double>(x.x.cols());
  CMatrix r = (x.x * x.x.adjoint()) / l;
  return CovarianceMatrix{0.5 * (r + r.adjoint())};
}

double mui_energy(const Channel& h, const WaveformBlock& x, const SymbolBlock& s) {
  if (h.h.cols() != x.x.rows() || h.h.rows() != s.s.rows() ||
      x.x.cols() != s.s.cols()) {
    throw std::invalid_argument("mui_energy: dimension mismatch");
  }
  const CMatrix hx = h.h * x.x;
  return kernels::sq_dist(hx.data(), s.s.data(),
                          static_cast<std::size_t>(hx.size()));
}

RVector per_user_sinr(const Channel& h, const WaveformBlock& x, const SymbolBlock& s,
                      const SystemConfig& cfg) {
  const CMatrix err = h.h * x.x - s.s;
  const double l = static_cast<double>(s.s.cols());
  RVector sinr(s.s.rows());
  for (Eigen::Index i = 0; i < s.s.rows(); ++i) {
    const double signal = s.s.row(i).squaredNorm() / l;
    const double denom = err.row(i).squaredNorm() / l + cfg.noise_power;
    sinr(i) = denom > 0.0 ? signal / denom
                          : (signal > 0.0 ? std::numeric_limits<double>::infinity()
                                          : 0.0);
  }
  return sinr;
}

double sum_rate(const RVector& sinr) {
  double rate = 0.0;
  for (Eigen::Index i = 0; i < sinr.size(); ++i) {
    if (sinr(i) < 0.0) {
      throw std::invalid_argument("sum_rate: negative SINR entry");
    }
    rate += std::log2(1.0 + sinr(i));
  }
  return rate;
}

Channel generate_rayleigh_channel(const SystemConfig& cfg, RngSeed seed) {
  Rng rng(seed);
  CMatrix h(cfg.n_users, cfg.n_antennas);
  // Row-major fill order so the draw sequence is part of the contract.
  for (int i = 0; i < cfg.n_users; ++i) {
    for (int j = 0; j < cfg.n_antennas; ++j) {
      h(i, j) = rng.gaussian();
    }
  }
  return Channel{std::move(h)};
}

SymbolBlock generate_qpsk_symbols(const SystemConfig& cfg, RngSeed seed) {
  Rng rng(seed);
  static const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  static const Complex alphabet[4] = {{inv_sqrt2, inv_sqrt2},
                                      {inv_sqrt2, -inv_sqrt2},
                                      {-inv_sqrt2, inv_sqrt2},
                                      {-inv_sqrt2, -inv_sqrt2}};
  CMatrix s(cfg.n_users, cfg.frame_len);
  for (int i = 0; i < cfg.n_users; ++i) {
    for (int j = 0; j < cfg.frame_len; ++j) {
      s(i, j) = alphabet[rng.qpsk_index()];
    }
  }
  return SymbolBlock{std::move(s)};
}

ZfDesign zf_precode(const Channel& h, const SymbolBlock& s, const SystemConfig& cfg) {
  const Eigen::Index k = h.h.rows();
  const Eigen::Index n = h.h.cols();
  if (k > n) {
    throw SingularChannelError("zf_precode: needs K <= N");
  }
  Eigen::JacobiSVD<CMatrix> svd(h.h, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const RVector sv = svd.singularValues();
  if (sv(0) <= 0.0 || sv(k - 1) < 1e-12 * sv(0)) {
    throw SingularChannelError("zf_precode: channel is rank deficient");
  }
  // H^+ = V diag(1/sigma) U^H for a full-row-rank K x N channel.
  const CMatrix pinv_s =
      svd.matrixV() * sv.cwiseInverse().asDiagonal() * svd.matrixU().adjoint() * s.s;
  const double frame_power =
      static_cast<double>(s.s.cols()) * cfg.total_power;
  const double c = std::sqrt(frame_power / pinv_s.squaredNorm());
  return ZfDesign{WaveformBlock{c * pinv_s}, c};
}

}  // namespace radcom
