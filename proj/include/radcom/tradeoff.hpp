// SPDX-License-Identifier: Apache-2.0
//
// Weighted radar/communication trade-off solved globally as a matrix
// trust-region subproblem: a single eigendecomposition of the stacked
// Gram matrix, a 1-D dual search on the secular function, and solution
// recovery through the (pseudo)inverse.

#pragma once

#include <utility>

#include "radcom/types.hpp"

namespace radcom {

struct TradeoffProblem {
  Channel h;
  SymbolBlock s;
  WaveformBlock x0;  // feasible reference design, ||X0||_F^2 = L P_T
  double rho = 0.5;  // 0 = pure radar (keep X0), 1 = pure communication
  SystemConfig cfg;
};

struct TrsSolution {
  WaveformBlock x_opt;
  double lambda_opt = 0.0;
  double kkt_residual = 0.0;
  /// Weighted primal objective rho ||H X - S||_F^2 + (1-rho) ||X - X0||_F^2.
  double objective = 0.0;
  bool hard_case = false;
  int search_iterations = 0;
};

/// Q = rho H^H H + (1-rho) I and G = rho H^H S + (1-rho) X0, formed without
/// materializing the stacked matrices.
std::pair<CMatrix, CMatrix> assemble_stacked(const TradeoffProblem& p);

/// Eigendecomposition of Q together with the projected right-hand side,
/// cached so each secular evaluation is a diagonal solve.
struct QEigen {
  RVector eigenvalues;  // ascending
  CMatrix eigenvectors;
  CMatrix vhg;          // V^H G
  RVector row_weights;  // c_i = sum_j |vhg(i, j)|^2
};

QEigen decompose_q(const CMatrix& q, const CMatrix& g);

/// Secular function P(lambda) = sum_i c_i / (lambda + lambda_i)^2.
/// Returns +infinity at a pole with non-vanishing numerator.
double secular_value(double lambda, const QEigen& eig);

/// Globally optimal trade-off waveform. The dual search runs golden-section
/// on (P(lambda) - L P_T)^2 with a safeguarded bisection fallback;
/// lambda_tol is the interval tolerance of the golden-section stage.
/// Throws NumericalFailureError if the 1-D search fails to converge.
TrsSolution solve_tradeoff(const TradeoffProblem& p, double lambda_tol = 1e-10);

/// Weighted objective of an arbitrary candidate waveform.
double tradeoff_objective(const TradeoffProblem& p, const WaveformBlock& x);

}  // namespace radcom
