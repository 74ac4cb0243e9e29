// SPDX-License-Identifier: Apache-2.0
//
// Core domain types shared by every solver: the scenario configuration,
// the channel/symbol/waveform blocks, and the covariance wrapper.

#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <stdexcept>

namespace radcom {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

/// Channel with too small a row rank for zero-forcing.
class SingularChannelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Covariance input that is not positive-definite where one is required.
class NotPositiveDefiniteError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Iterative solver failed to reach its tolerance within its budget.
class NumericalFailureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Subdivision requested on a zero-volume node.
class DegenerateNodeError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Transmitter scenario constants: array size N, user count K, frame
/// length L, power budget P_T, noise floor N_0, element spacing in
/// wavelengths.
struct SystemConfig {
  int n_antennas = 16;
  int n_users = 4;
  int frame_len = 20;
  double total_power = 1.0;
  double noise_power = 0.1;
  double element_spacing = 0.5;

  /// Throws std::invalid_argument on out-of-range fields. Requires
  /// frame_len >= n_antennas so the sample covariance can be full rank.
  /// n_users <= n_antennas is deliberately not checked here; only the
  /// zero-forcing baseline needs it.
  void validate() const;
};

struct RngSeed {
  std::uint64_t value = 1;
};

/// K x N flat-fading channel matrix H (row i is user i's channel).
struct Channel {
  CMatrix h;
};

/// K x L desired constellation matrix S.
struct SymbolBlock {
  CMatrix s;
};

/// N x L transmit signal matrix X, the decision variable of every solver.
struct WaveformBlock {
  CMatrix x;
};

/// N x N Hermitian PSD matrix (a sample covariance R_X or a design target
/// R_d).
struct CovarianceMatrix {
  CMatrix r;

  bool is_hermitian(double tol = 1e-10) const;
  /// Smallest eigenvalue (of the Hermitian part).
  double min_eigenvalue() const;
};

}  // namespace radcom
