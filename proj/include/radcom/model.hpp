// SPDX-License-Identifier: Apache-2.0
//
// System model: steering vectors, beampatterns, multi-user interference
// metrics, sum rate, scenario generators, and the zero-forcing baseline.
// All functions are pure; generators are deterministic in (cfg, seed).

#pragma once

#include "radcom/types.hpp"

namespace radcom {

/// Transmit steering vector a(theta): entry n = exp(j 2 pi n spacing sin
/// theta).
CVector steering_vector(const SystemConfig& cfg, double theta);

/// Beampattern P(theta) = a(theta)^H R a(theta) on a grid of angles.
/// Throws std::invalid_argument if r is not Hermitian to 1e-10.
RVector beampattern(const CovarianceMatrix& r, const SystemConfig& cfg,
                    const RVector& theta_grid);

/// Sample covariance R_X = (1/L) X X^H, symmetrized against roundoff.
CovarianceMatrix sample_covariance(const WaveformBlock& x);

/// Total downlink interference energy ||H X - S||_F^2.
/// Throws std::invalid_argument on dimension mismatch.
double mui_energy(const Channel& h, const WaveformBlock& x, const SymbolBlock& s);

/// Per-user SINR with the ensemble average realized as the arithmetic mean
/// over the L frame columns. A zero denominator yields +infinity.
RVector per_user_sinr(const Channel& h, const WaveformBlock& x, const SymbolBlock& s,
                      const SystemConfig& cfg);

/// Achievable sum rate sum_i log2(1 + sinr_i) in bits/s/Hz.
/// Throws std::invalid_argument on a negative entry.
double sum_rate(const RVector& sinr);

/// Flat Rayleigh channel: i.i.d. CN(0,1) entries.
Channel generate_rayleigh_channel(const SystemConfig& cfg, RngSeed seed);

/// Unit-power QPSK symbols, entries uniform over {(+-1 +- j)/sqrt(2)}.
SymbolBlock generate_qpsk_symbols(const SystemConfig& cfg, RngSeed seed);

struct ZfDesign {
  WaveformBlock x;
  /// Scaling c with X = c H^+ S, so the receiver sees H X = c S.
  double scale = 0.0;
};

/// Zero-forcing baseline X = c H^+ S with c > 0 chosen so that
/// ||X||_F^2 = L P_T. Requires K <= N and a full-row-rank channel;
/// throws SingularChannelError otherwise.
ZfDesign zf_precode(const Channel& h, const SymbolBlock& s, const SystemConfig& cfg);

}  // namespace radcom
