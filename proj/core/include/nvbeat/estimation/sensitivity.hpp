#pragma once

// Frequency sensitivity of the main SQ lines to hyperfine components and the
// resulting parameter precision.

#include <array>

#include "nvbeat/estimation/forward_model.hpp"
#include "nvbeat/types.hpp"

namespace nvbeat {

struct SensitivityReport {
  ParamId param = ParamId::a_zz;
  double c_value = 0.0;             ///< mean |slope| over the four lines
  std::array<double, 4> slopes{};   ///< dω/dA per line, ordered as main_transitions
  double step = 0.0;                ///< MHz
};

/// Central differences of the four main SQ lines with respect to one tensor
/// component (a_xx, a_yy, a_zz or a). Lines are followed across the perturbed
/// spectra by eigenvector overlap; an ambiguous match throws NumericalError
/// with the overlaps involved.
SensitivityReport sensitivity_c(const SystemParams& params, const FieldOrientation& field, ParamId which,
                                double step = 0.5);

/// δA = δω / c. Throws InvalidInput("parameter unobservable") for c <= 0 and
/// for negative δω.
double precision_propagation(double delta_omega, double c);

}  // namespace nvbeat
