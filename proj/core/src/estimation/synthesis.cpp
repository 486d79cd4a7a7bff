#include "nvbeat/estimation/synthesis.hpp"

#include <cmath>
#include <random>

#include "nvbeat/errors.hpp"

namespace nvbeat {

double NoiseSigma::noise(ObservableKind kind) const {
  switch (kind) {
    case ObservableKind::sq_frequency: return sq_frequency;
    case ObservableKind::zq_frequency: return zq_frequency;
    case ObservableKind::zq_amplitude: return zq_amplitude;
  }
  return 0.0;
}

double NoiseSigma::recorded(ObservableKind kind) const {
  const double s = noise(kind);
  if (s > 0.0) return s;
  return kind == ObservableKind::zq_amplitude ? amplitude_floor : frequency_floor;
}

double FieldImperfection::field(double b0, double phi_deg) const {
  return b0 + amplitude * std::cos(deg_to_rad(360.0 * phi_deg / period + phase));
}

ScanDataset synthesize_dataset(const SystemParams& base, const FitParameters& truth,
                               const std::vector<DesignPoint>& design, const NoiseSigma& noise,
                               const std::optional<FieldImperfection>& imperfection, std::uint64_t seed) {
  if (design.empty()) throw InvalidInput("synthesis design is empty");
  if (!(truth.b > 0.0)) throw InvalidInput("synthesis needs b > 0");
  for (ObservableKind k : {ObservableKind::sq_frequency, ObservableKind::zq_frequency, ObservableKind::zq_amplitude}) {
    if (!(noise.noise(k) >= 0.0) || !(noise.recorded(k) > 0.0)) throw InvalidInput("noise sigma must be >= 0");
  }
  if (imperfection && !(imperfection->period > 0.0)) throw InvalidInput("imperfection period must be > 0");

  ScanDataset out;
  out.frame = Frame::nv;
  for (const DesignPoint& d : design) {
    ScanPoint p;
    p.theta_deg = d.theta_deg;
    p.phi_deg = d.phi_deg;
    p.b_gauss = truth.b;
    p.kind = d.kind;
    p.sigma = noise.recorded(d.kind);
    p.transition_index = d.transition_index;
    out.points.push_back(p);
  }
  out.validate();

  if (!imperfection) {
    const auto v = ForwardModel(base, out).values(truth);
    for (std::size_t i = 0; i < v.size(); ++i) out.points[i].value = v[i];
  } else {
    for (ScanPoint& p : out.points) {
      ScanDataset one;
      one.points.push_back(p);
      FitParameters t = truth;
      t.b = imperfection->field(truth.b, p.phi_deg);
      one.points.front().b_gauss = t.b;
      p.value = ForwardModel(base, one).value(t, 0);
    }
  }

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (ScanPoint& p : out.points) {
    const double s = noise.noise(p.kind);
    if (s > 0.0) p.value += s * gauss(rng);
  }
  return out;
}

std::vector<DesignPoint> sq_lines_design(double theta_deg, double phi_deg) {
  std::vector<DesignPoint> out;
  for (int k = 0; k < 4; ++k) out.push_back({theta_deg, phi_deg, ObservableKind::sq_frequency, k});
  return out;
}

std::vector<DesignPoint> zq_phi_sweep_design(double theta_deg, double phi_start, double phi_stop, double step) {
  if (!(step > 0.0) || phi_stop < phi_start) throw InvalidInput("invalid phi sweep");
  std::vector<DesignPoint> out;
  const int n = static_cast<int>(std::floor((phi_stop - phi_start) / step + 1e-9)) + 1;
  for (int i = 0; i < n; ++i) {
    out.push_back({theta_deg, phi_start + i * step, ObservableKind::zq_frequency, std::nullopt});
  }
  return out;
}

std::vector<DesignPoint> zq_amplitude_theta_design(double phi_deg, const std::vector<double>& thetas) {
  std::vector<DesignPoint> out;
  for (double th : thetas) out.push_back({th, phi_deg, ObservableKind::zq_amplitude, std::nullopt});
  return out;
}

}  // namespace nvbeat
