// SPDX-License-Identifier: Apache-2.0
//
// Radar-side utilities: the orthogonal chirp reference block and FFT-based
// pulse compression with a Taylor taper.

#pragma once

#include "radcom/types.hpp"

namespace radcom {

/// Constant-modulus reference block: row n is a common quadratic-phase chirp
/// shifted to the n-th DFT frequency, so rows are orthogonal whenever L is a
/// multiple of N. Every entry has modulus sqrt(P_T/N).
WaveformBlock chirp_reference(const SystemConfig& cfg);

/// Classical Taylor taper with nbar near-in sidelobes at sll_db (negative,
/// in dB), symmetric and normalized to unit peak.
RVector taylor_window(int len, int nbar, double sll_db);

struct WindowSpec {
  enum class Kind { Rectangular, Taylor };
  Kind kind = Kind::Taylor;
  int nbar = 4;
  double sll_db = -30.0;
};

struct PulseProfile {
  Eigen::VectorXi delay_bins;
  RVector magnitude;     // linear matched-filter output magnitude
  RVector magnitude_db;  // relative to the peak (0 dB at exactly one bin)
  int peak_bin = 0;
};

/// Circular matched filtering: inverse-DFT(DFT(x) . conj(DFT(reference)) .
/// window). With zero_pad the inputs are padded to twice the length, which
/// turns the correlation linear. Lengths must agree.
PulseProfile pulse_compress(const CVector& x, const CVector& reference,
                            const WindowSpec& window, bool zero_pad = false);

}  // namespace radcom
