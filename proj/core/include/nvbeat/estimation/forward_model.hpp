#pragma once

// Exact-diagonalization forward model for angle-scan observables and its
// parameter derivatives.

#include <array>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "nvbeat/estimation/scan_dataset.hpp"
#include "nvbeat/types.hpp"

namespace nvbeat {

enum class ParamId { a_xx = 0, a_yy, a_zz, a, b, phi_offset };

inline constexpr int kParamCount = 6;
inline constexpr std::array<ParamId, kParamCount> kAllParams{
    ParamId::a_xx, ParamId::a_yy, ParamId::a_zz, ParamId::a, ParamId::b, ParamId::phi_offset};

const char* to_string(ParamId id);
/// Throws InvalidInput for unknown names.
ParamId param_id_from_string(const std::string& text);

/// Tensor in MHz, field magnitude in Gauss, azimuthal offset in degrees.
struct FitParameters {
  double a_xx = 0.0;
  double a_yy = 0.0;
  double a_zz = 0.0;
  double a = 0.0;
  double b = 0.0;
  double phi_offset = 0.0;

  double get(ParamId id) const;
  void set(ParamId id, double value);
  HyperfineTensor tensor() const { return {a_xx, a_yy, a_zz, a}; }

  static FitParameters from(const HyperfineTensor& t, double b_gauss, double phi_offset_deg = 0.0);
};

/// Evaluates points against a parameter record. Each point's field is
/// b_i · (params.b / b_ref) at (θ_i, φ_i + phi_offset), so a common field
/// scale is fitted while per-point nominal fields are kept. b_ref is the
/// first point's b (1 G if it is zero).
class ForwardModel {
 public:
  ForwardModel(SystemParams base, ScanDataset dataset);

  const ScanDataset& dataset() const { return dataset_; }
  const SystemParams& base() const { return base_; }
  double b_ref() const { return b_ref_; }

  /// Model value of point i.
  double value(const FitParameters& p, std::size_t i) const;

  /// Model value and its derivative with respect to every parameter.
  /// Frequencies use Hellmann–Feynman; amplitudes use central differences.
  void value_and_gradient(const FitParameters& p, std::size_t i, double& value,
                          std::array<double, kParamCount>& grad) const;

  std::vector<double> values(const FitParameters& p, int threads = 1) const;

 private:
  SystemParams base_;
  ScanDataset dataset_;
  double b_ref_ = 1.0;
};

/// Λ-type zero-quantum beat amplitude (Ω+Ω−/(Ω+² + Ω−²))² at one orientation.
double zq_amplitude(const SystemParams& params, const FieldOrientation& field);

}  // namespace nvbeat
