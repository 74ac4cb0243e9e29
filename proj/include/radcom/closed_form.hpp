// SPDX-License-Identifier: Apache-2.0
//
// Closed-form globally optimal waveforms for a fixed radar covariance:
// orthogonal (omnidirectional) and covariance-shaped (directional) designs,
// both solved through an orthogonal Procrustes reduction, plus a
// least-squares designer for the target covariance itself.

#pragma once

#include "radcom/types.hpp"

namespace radcom {

/// Angles of interest and the evaluation grid for a directional design.
struct DirectionalTarget {
  RVector angles;          // radians, each inside (-pi/2, pi/2)
  double mainlobe_width;   // radians
  RVector grid;            // strictly increasing evaluation angles
};

/// Interference-optimal waveform under the orthogonality constraint
/// (1/L) X X^H = (P_T/N) I. Requires L >= N.
WaveformBlock omni_design(const Channel& h, const SymbolBlock& s,
                          const SystemConfig& cfg);

/// Interference-optimal waveform under (1/L) X X^H = R_d. The target must be
/// Hermitian positive-definite with trace P_T; throws
/// NotPositiveDefiniteError / std::invalid_argument otherwise.
WaveformBlock directional_design(const Channel& h, const SymbolBlock& s,
                                 const CovarianceMatrix& rd,
                                 const SystemConfig& cfg);

/// Analytic optimum of the omnidirectional problem:
/// (L P_T / N) ||H||_F^2 - 2 sqrt(L P_T / N) sum_i sigma_i(H^H S) + ||S||_F^2.
double omni_optimal_mui(const Channel& h, const SymbolBlock& s,
                        const SystemConfig& cfg);

/// Analytic optimum of the directional problem:
/// L tr(H R_d H^H) - 2 sqrt(L) sum_i sigma_i(F^H H^H S) + ||S||_F^2.
double directional_optimal_mui(const Channel& h, const SymbolBlock& s,
                               const CovarianceMatrix& rd, const SystemConfig& cfg);

/// (R + eps I) rescaled back to trace P_T, for callers that need a strictly
/// positive-definite target. eps defaults to 1e-8 * P_T / N.
CovarianceMatrix regularize_covariance(const CovarianceMatrix& rd,
                                       const SystemConfig& cfg, double eps = -1.0);

struct CovarianceLsResult {
  CovarianceMatrix r;
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Fits a Hermitian PSD covariance with trace P_T to a rectangular
/// beampattern template (constant level on each mainlobe, zero elsewhere)
/// by projected gradient descent. With an empty angle list the template is
/// flat at P_T and (P_T/N) I is the exact optimum.
CovarianceLsResult design_covariance_ls(const DirectionalTarget& target,
                                        const SystemConfig& cfg);

}  // namespace radcom
