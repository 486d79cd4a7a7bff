#include "nvbeat/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include <unsupported/Eigen/FFT>

#include "nvbeat/errors.hpp"

namespace nvbeat {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double uniform_step(const RamseyTrace& trace) {
  const auto& t = trace.tau;
  const double dt = (t.back() - t.front()) / static_cast<double>(t.size() - 1);
  for (std::size_t i = 1; i < t.size(); ++i) {
    if (std::abs((t[i] - t[i - 1]) - dt) > 1e-6 * dt) {
      throw InvalidInput("spectrum requires a uniform time grid");
    }
  }
  return dt;
}

struct LinearFit {
  double c0 = 0.0, c1 = 0.0, c2 = 0.0, rss = 0.0;
};

LinearFit linear_sinusoid(const RamseyTrace& trace, double f) {
  const auto n = static_cast<Eigen::Index>(trace.tau.size());
  Eigen::MatrixXd a(n, 3);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double w = kTwoPi * f * trace.tau[static_cast<std::size_t>(i)];
    a(i, 0) = 1.0;
    a(i, 1) = std::cos(w);
    a(i, 2) = std::sin(w);
    y(i) = trace.signal[static_cast<std::size_t>(i)];
  }
  const Eigen::Vector3d c = a.colPivHouseholderQr().solve(y);
  LinearFit out{c(0), c(1), c(2), (a * c - y).squaredNorm()};
  return out;
}

}  // namespace

SpectrumPeaks spectrum_peaks(const RamseyTrace& trace, int n_peaks, const SpectrumOptions& options) {
  trace.validate();
  if (trace.tau.size() < 16) throw InvalidInput("spectrum requires at least 16 points");
  if (n_peaks < 0) throw InvalidInput("n_peaks must be >= 0");
  const double dt = uniform_step(trace);
  const std::size_t n = trace.signal.size();

  SpectrumPeaks out;
  out.bin_width = 1.0 / (static_cast<double>(n) * dt);
  out.nyquist = 0.5 / dt;

  double mean = 0.0;
  for (double v : trace.signal) mean += v;
  mean /= static_cast<double>(n);
  double spread = 0.0;
  for (double v : trace.signal) spread = std::max(spread, std::abs(v - mean));
  if (spread < 1e-12) return out;

  std::size_t len = 1;
  while (len < n * static_cast<std::size_t>(std::max(1, options.zero_pad_factor))) len <<= 1;
  std::vector<double> x(len, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double w = options.hann_window
                         ? 0.5 - 0.5 * std::cos(kTwoPi * static_cast<double>(i) / static_cast<double>(n - 1))
                         : 1.0;
    x[i] = (trace.signal[i] - mean) * w;
  }
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> spec;
  fft.fwd(spec, x);
  const std::size_t half = len / 2 + 1;
  std::vector<double> mag(half);
  for (std::size_t k = 0; k < half; ++k) mag[k] = std::abs(spec[k]);
  const double df = 1.0 / (static_cast<double>(len) * dt);

  for (std::size_t k = 1; k + 1 < half; ++k) {
    if (!(mag[k] > mag[k - 1] && mag[k] >= mag[k + 1])) continue;
    const double a = mag[k - 1], b = mag[k], c = mag[k + 1];
    const double den = a - 2.0 * b + c;
    const double shift = std::abs(den) > 0.0 ? std::clamp(0.5 * (a - c) / den, -0.5, 0.5) : 0.0;
    SpectrumPeak p;
    p.frequency = (static_cast<double>(k) + shift) * df;
    p.magnitude = b - 0.25 * (a - c) * shift;

    // Half-maximum crossings by linear interpolation on either side.
    const double halfmax = 0.5 * p.magnitude;
    double lo = 0.0, hi = (static_cast<double>(half) - 1.0) * df;
    for (std::size_t j = k; j > 0; --j) {
      if (mag[j - 1] <= halfmax) {
        lo = (static_cast<double>(j - 1) + (halfmax - mag[j - 1]) / (mag[j] - mag[j - 1])) * df;
        break;
      }
    }
    for (std::size_t j = k; j + 1 < half; ++j) {
      if (mag[j + 1] <= halfmax) {
        hi = (static_cast<double>(j) + (mag[j] - halfmax) / (mag[j] - mag[j + 1])) * df;
        break;
      }
    }
    p.fwhm = hi - lo;
    out.peaks.push_back(p);
  }
  std::stable_sort(out.peaks.begin(), out.peaks.end(),
                   [](const SpectrumPeak& l, const SpectrumPeak& r) { return l.magnitude > r.magnitude; });
  if (out.peaks.size() > static_cast<std::size_t>(n_peaks)) out.peaks.resize(static_cast<std::size_t>(n_peaks));
  return out;
}

double beat_amplitude(const RamseyTrace& trace, double frequency) {
  trace.validate();
  if (trace.tau.size() < 3) throw InvalidInput("beat_amplitude needs at least 3 points");
  const LinearFit f = linear_sinusoid(trace, frequency);
  return std::hypot(f.c1, f.c2);
}

SinusoidFit fit_sinusoid(const RamseyTrace& trace, double frequency_guess, double half_range) {
  trace.validate();
  if (trace.tau.size() < 4) throw InvalidInput("fit_sinusoid needs at least 4 points");
  if (!(half_range > 0.0)) throw InvalidInput("half_range must be > 0");
  // Dense pre-scan guards against the side lobes of the residual landscape.
  double lo = frequency_guess - half_range;
  double hi = frequency_guess + half_range;
  constexpr int kScan = 41;
  double best_f = frequency_guess;
  double best_rss = linear_sinusoid(trace, best_f).rss;
  for (int i = 0; i <= kScan; ++i) {
    const double f = lo + (hi - lo) * i / kScan;
    const double rss = linear_sinusoid(trace, f).rss;
    if (rss < best_rss) {
      best_rss = rss;
      best_f = f;
    }
  }
  const double step = (hi - lo) / kScan;
  lo = best_f - step;
  hi = best_f + step;
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
  double f1 = linear_sinusoid(trace, x1).rss, f2 = linear_sinusoid(trace, x2).rss;
  for (int it = 0; it < 100 && hi - lo > 1e-10 * std::max(1.0, std::abs(best_f)); ++it) {
    if (f1 < f2) {
      hi = x2; x2 = x1; f2 = f1;
      x1 = hi - g * (hi - lo); f1 = linear_sinusoid(trace, x1).rss;
    } else {
      lo = x1; x1 = x2; f1 = f2;
      x2 = lo + g * (hi - lo); f2 = linear_sinusoid(trace, x2).rss;
    }
  }
  SinusoidFit out;
  out.frequency = 0.5 * (lo + hi);
  const LinearFit f = linear_sinusoid(trace, out.frequency);
  out.offset = f.c0;
  out.amplitude = std::hypot(f.c1, f.c2);
  out.phase = std::atan2(-f.c2, f.c1);
  out.rms_residual = std::sqrt(f.rss / static_cast<double>(trace.tau.size()));
  return out;
}

}  // namespace nvbeat
