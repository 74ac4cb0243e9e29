// SPDX-License-Identifier: Apache-2.0

#include "radcom/tradeoff.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>

#include "radcom/kernels.hpp"

namespace radcom {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void validate_problem(const TradeoffProblem& p) {
  if (!(p.rho >= 0.0 && p.rho <= 1.0)) {
    throw std::invalid_argument("tradeoff: rho must be in [0, 1]");
  }
  const double frame_power = p.cfg.frame_len * p.cfg.total_power;
  if (std::abs(p.x0.x.squaredNorm() - frame_power) >
      1e-6 * std::max(1.0, frame_power)) {
    throw std::invalid_argument("tradeoff: reference X0 violates the power budget");
  }
  if (p.h.h.cols() != p.x0.x.rows() || p.h.h.rows() != p.s.s.rows() ||
      p.x0.x.cols() != p.s.s.cols()) {
    throw std::invalid_argument("tradeoff: dimension mismatch");
  }
}

}  // namespace

std::pair<CMatrix, CMatrix> assemble_stacked(const TradeoffProblem& p) {
  const Eigen::Index n = p.x0.x.rows();
  CMatrix q = p.rho * (p.h.h.adjoint() * p.h.h);
  q += (1.0 - p.rho) * CMatrix::Identity(n, n);
  CMatrix g = p.rho * (p.h.h.adjoint() * p.s.s) + (1.0 - p.rho) * p.x0.x;
  return {std::move(q), std::move(g)};
}

QEigen decompose_q(const CMatrix& q, const CMatrix& g) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (q + q.adjoint()));
  QEigen out;
  out.eigenvalues = es.eigenvalues();
  out.eigenvectors = es.eigenvectors();
  out.vhg = out.eigenvectors.adjoint() * g;
  out.row_weights.resize(out.vhg.rows());
  // Row-major copy so each weight is one contiguous reduction.
  Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm =
      out.vhg;
  for (Eigen::Index i = 0; i < rm.rows(); ++i) {
    out.row_weights(i) = kernels::sum_sq(rm.data() + i * rm.cols(),
                                         static_cast<std::size_t>(rm.cols()));
  }
  return out;
}

double secular_value(double lambda, const QEigen& eig) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < eig.eigenvalues.size(); ++i) {
    const double c = eig.row_weights(i);
    if (c == 0.0) {
      continue;
    }
    const double d = lambda + eig.eigenvalues(i);
    const double term = c / (d * d);
    if (!std::isfinite(term)) {
      return kInf;
    }
    acc += term;
  }
  return acc;
}

double tradeoff_objective(const TradeoffProblem& p, const WaveformBlock& x) {
  const CMatrix comm_err = p.h.h * x.x - p.s.s;
  return p.rho * comm_err.squaredNorm() + (1.0 - p.rho) * (x.x - p.x0.x).squaredNorm();
}

TrsSolution solve_tradeoff(const TradeoffProblem& p, double lambda_tol) {
  validate_problem(p);
  auto [q, g] = assemble_stacked(p);
  const QEigen eig = decompose_q(q, g);

  const double target = p.cfg.frame_len * p.cfg.total_power;
  const double lam_min = eig.eigenvalues(0);
  const double lam_max = eig.eigenvalues(eig.eigenvalues.size() - 1);
  const double lo = -lam_min;

  const double total_mass = eig.row_weights.sum();
  const double cluster_tol = 1e-12 * std::max(1.0, std::abs(lam_max));
  double cluster_mass = 0.0;
  double p_rest = 0.0;
  for (Eigen::Index i = 0; i < eig.eigenvalues.size(); ++i) {
    const double gap = eig.eigenvalues(i) - lam_min;
    if (gap <= cluster_tol) {
      cluster_mass += eig.row_weights(i);
    } else {
      p_rest += eig.row_weights(i) / (gap * gap);
    }
  }

  TrsSolution sol;

  const auto recover = [&](double lambda, bool zero_cluster) {
    RVector d(eig.eigenvalues.size());
    for (Eigen::Index i = 0; i < d.size(); ++i) {
      const double den = eig.eigenvalues(i) + lambda;
      const bool in_cluster = eig.eigenvalues(i) - lam_min <= cluster_tol;
      d(i) = ((zero_cluster && in_cluster) || den == 0.0) ? 0.0 : 1.0 / den;
    }
    return CMatrix(eig.eigenvectors * d.asDiagonal() * eig.vhg);
  };

  const bool hard_case =
      cluster_mass <= 1e-14 * std::max(total_mass, 1e-300) && p_rest < target;
  if (hard_case) {
    // All of G is orthogonal to the minimal eigenspace and the pseudoinverse
    // point sits inside the power sphere: take lambda = -lambda_min and pad
    // with a minimal-eigenspace rank-one term to restore the budget.
    sol.hard_case = true;
    sol.lambda_opt = lo;
    CMatrix x = recover(lo, true);
    const double deficit = target - x.squaredNorm();
    if (deficit > 0.0) {
      x.col(0) += std::sqrt(deficit) * eig.eigenvectors.col(0);
    }
    sol.x_opt = WaveformBlock{std::move(x)};
  } else {
    // Upper end of the search interval: guarantees P(hi) <= target.
    double hi = std::sqrt(std::max(total_mass, 0.0) / target) +
                std::max(lam_max, 0.0);
    int expand = 0;
    while (secular_value(hi, eig) > target && expand++ < 200) {
      hi = 2.0 * hi + 1.0;
    }

    int iterations = 0;
    const auto surrogate = [&](double lambda) {
      ++iterations;
      const double v = secular_value(lambda, eig);
      return std::isfinite(v) ? (v - target) * (v - target) : kInf;
    };

    // Golden-section on the unimodal surrogate (P - target)^2.
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = lo, b = hi;
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = surrogate(x1), f2 = surrogate(x2);
    while (b - a > lambda_tol * std::max(1.0, std::abs(a) + std::abs(b))) {
      if (f1 <= f2) {
        b = x2;
        x2 = x1;
        f2 = f1;
        x1 = b - gr * (b - a);
        f1 = surrogate(x1);
      } else {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + gr * (b - a);
        f2 = surrogate(x2);
      }
      if (iterations > 500) {
        break;
      }
    }
    double lambda = 0.5 * (a + b);

    // Safeguarded bisection keeps the monotone bracket P(left) >= target
    // >= P(right) until the power residual meets tolerance.
    if (std::abs(secular_value(lambda, eig) - target) > 1e-9 * target) {
      double left = lo, right = hi;
      int bisect = 0;
      while (bisect++ < 200) {
        lambda = 0.5 * (left + right);
        const double v = secular_value(lambda, eig);
        if (std::abs(v - target) <= 1e-9 * target ||
            right - left <= 4.0 * std::numeric_limits<double>::epsilon() *
                                std::max(1.0, std::abs(lambda))) {
          break;
        }
        (v > target ? left : right) = lambda;
      }
      if (std::abs(secular_value(lambda, eig) - target) > 1e-8 * target) {
        throw NumericalFailureError("tradeoff: dual search did not converge");
      }
    }

    sol.lambda_opt = lambda;
    sol.search_iterations = iterations;
    sol.x_opt = WaveformBlock{recover(lambda, false)};
  }

  sol.kkt_residual =
      (q * sol.x_opt.x + sol.lambda_opt * sol.x_opt.x - g).norm();
  sol.objective = tradeoff_objective(p, sol.x_opt);
  return sol;
}

}  // namespace radcom
