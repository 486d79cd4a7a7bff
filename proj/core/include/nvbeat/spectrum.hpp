#pragma once

// Frequency analysis of uniformly sampled traces.

#include <vector>

#include "nvbeat/dynamics.hpp"

namespace nvbeat {

struct SpectrumPeak {
  double frequency = 0.0;  ///< MHz
  double magnitude = 0.0;  ///< |FFT|, arbitrary units
  double fwhm = 0.0;       ///< full width at half maximum, MHz
};

struct SpectrumPeaks {
  std::vector<SpectrumPeak> peaks;  ///< by magnitude, descending
  double bin_width = 0.0;           ///< 1 / (N dt) of the unpadded trace, MHz
  double nyquist = 0.0;             ///< MHz
};

struct SpectrumOptions {
  int zero_pad_factor = 8;  ///< transform length >= factor * N, rounded up to a power of two
  bool hann_window = true;
};

/// Mean removal, Hann window, zero-padded FFT, local maxima with parabolic
/// refinement. Returns at most n_peaks entries; a constant trace yields none.
/// Throws InvalidInput for fewer than 16 points or a non-uniform grid.
SpectrumPeaks spectrum_peaks(const RamseyTrace& trace, int n_peaks, const SpectrumOptions& options = {});

/// Amplitude of the component at `frequency` from a linear least-squares fit
/// of c0 + c1 cos(2πft) + c2 sin(2πft): returns √(c1² + c2²).
double beat_amplitude(const RamseyTrace& trace, double frequency);

struct SinusoidFit {
  double frequency = 0.0;
  double amplitude = 0.0;
  double phase = 0.0;   ///< radians, signal ≈ offset + amplitude cos(2πft + phase)
  double offset = 0.0;
  double rms_residual = 0.0;
};

/// Best single sinusoid with frequency searched within ±`half_range` of
/// `frequency_guess` (golden section on the linear least-squares residual).
SinusoidFit fit_sinusoid(const RamseyTrace& trace, double frequency_guess, double half_range);

}  // namespace nvbeat
