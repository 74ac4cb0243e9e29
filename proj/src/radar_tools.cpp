// SPDX-License-Identifier: Apache-2.0

#include "radcom/radar_tools.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>

namespace radcom {

namespace {

constexpr double kPi = 3.14159265358979323846;

// FFTW plan creation is not thread-safe; execution on distinct plans is.
std::mutex& fftw_mutex() {
  static std::mutex m;
  return m;
}

CVector dft(const CVector& in, int sign) {
  CVector out(in.size());
  CVector work = in;
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(fftw_mutex());
    plan = fftw_plan_dft_1d(static_cast<int>(in.size()),
                            reinterpret_cast<fftw_complex*>(work.data()),
                            reinterpret_cast<fftw_complex*>(out.data()), sign,
                            FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(fftw_mutex());
    fftw_destroy_plan(plan);
  }
  return out;
}

}  // namespace

WaveformBlock chirp_reference(const SystemConfig& cfg) {
  cfg.validate();
  const int n_rows = cfg.n_antennas;
  const int len = cfg.frame_len;
  const double amp = std::sqrt(cfg.total_power / n_rows);
  CMatrix x(n_rows, len);
  for (int l = 0; l < len; ++l) {
    const double chirp_phase = kPi * static_cast<double>(l) * l / len;
    for (int n = 0; n < n_rows; ++n) {
      const double shift = 2.0 * kPi * static_cast<double>(n) * l / len;
      x(n, l) = amp * std::polar(1.0, shift + chirp_phase);
    }
  }
  return WaveformBlock{std::move(x)};
}

RVector taylor_window(int len, int nbar, double sll_db) {
  if (len < 1 || nbar < 1 || !(sll_db < 0.0)) {
    throw std::invalid_argument("taylor_window: need len >= 1, nbar >= 1, sll < 0");
  }
  const double b = std::pow(10.0, -sll_db / 20.0);
  const double a = std::log(b + std::sqrt(b * b - 1.0)) / kPi;
  const double sigma2 =
      nbar * nbar / (a * a + (nbar - 0.5) * (nbar - 0.5));

  RVector fm = RVector::Zero(std::max(nbar - 1, 0));
  for (int m = 1; m < nbar; ++m) {
    double num = 1.0;
    double den = 1.0;
    for (int n = 1; n < nbar; ++n) {
      num *= 1.0 - (m * m / sigma2) / (a * a + (n - 0.5) * (n - 0.5));
      if (n != m) {
        den *= 1.0 - static_cast<double>(m * m) / (n * n);
      }
    }
    fm(m - 1) = ((m % 2 == 1) ? 0.5 : -0.5) * num / den;
  }

  const double peak = 1.0 + 2.0 * fm.sum();
  RVector w(len);
  const double mid = 0.5 * (len - 1);
  for (int k = 0; k < len; ++k) {
    double v = 1.0;
    for (int m = 1; m < nbar; ++m) {
      v += 2.0 * fm(m - 1) * std::cos(2.0 * kPi * m * (k - mid) / len);
    }
    w(k) = v / peak;
  }
  return w;
}

PulseProfile pulse_compress(const CVector& x, const CVector& reference,
                            const WindowSpec& window, bool zero_pad) {
  if (x.size() != reference.size()) {
    throw std::invalid_argument("pulse_compress: length mismatch");
  }
  if (x.size() == 0) {
    throw std::invalid_argument("pulse_compress: empty input");
  }
  const Eigen::Index len = zero_pad ? 2 * x.size() : x.size();
  CVector xin = CVector::Zero(len);
  CVector rin = CVector::Zero(len);
  xin.head(x.size()) = x;
  rin.head(x.size()) = reference;

  const CVector xf = dft(xin, FFTW_FORWARD);
  const CVector rf = dft(rin, FFTW_FORWARD);
  CVector prod(len);
  if (window.kind == WindowSpec::Kind::Taylor) {
    const RVector w = taylor_window(static_cast<int>(len), window.nbar, window.sll_db);
    for (Eigen::Index i = 0; i < len; ++i) {
      prod(i) = xf(i) * std::conj(rf(i)) * w(i);
    }
  } else {
    for (Eigen::Index i = 0; i < len; ++i) {
      prod(i) = xf(i) * std::conj(rf(i));
    }
  }
  CVector y = dft(prod, FFTW_BACKWARD) / static_cast<double>(len);

  PulseProfile profile;
  profile.delay_bins.resize(len);
  profile.magnitude.resize(len);
  profile.magnitude_db.resize(len);
  double peak = 0.0;
  for (Eigen::Index i = 0; i < len; ++i) {
    profile.delay_bins(i) = static_cast<int>(i);
    profile.magnitude(i) = std::abs(y(i));
    if (profile.magnitude(i) > peak) {
      peak = profile.magnitude(i);
      profile.peak_bin = static_cast<int>(i);
    }
  }
  for (Eigen::Index i = 0; i < len; ++i) {
    const double ratio = peak > 0.0 ? profile.magnitude(i) / peak : 0.0;
    profile.magnitude_db(i) = 20.0 * std::log10(std::max(ratio, 1e-20));
  }
  return profile;
}

}  // namespace radcom
