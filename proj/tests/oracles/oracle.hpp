#pragma once

// Reference implementation written independently of the library: explicit
// matrix elements, a general complex eigensolver, and sorting by hand. Used
// to check the production code, never by it.

#include <array>
#include <complex>

#include <Eigen/Dense>

namespace oracle {

using Mat6 = Eigen::Matrix<std::complex<double>, 6, 6>;

struct Params {
  double d = 2870.0;
  double gamma_e = 2.8025;
  double gamma_n = 1.0705e-3;
  double a_xx = 0.0, a_yy = 0.0, a_zz = 0.0, a = 0.0;
  double b = 0.0, theta_deg = 0.0, phi_deg = 0.0;
};

/// Basis |m_S, m_I> with m_S in (+1, 0, -1) outer and m_I in (+1/2, -1/2) inner.
Mat6 hamiltonian(const Params& p);

/// Ascending eigenvalues via Eigen::ComplexEigenSolver on the full matrix.
std::array<double, 6> eigenvalues(const Params& p);

/// Splitting of the two levels with the largest m_S = 0 weight.
double ground_splitting(const Params& p);

/// Closed-form splitting (2 γe B sinθ / D)(√(A_xx² + a²) cos²φ + A_yy sin²φ).
double closed_form_splitting(const Params& p);

/// Eigenvalues of the full 3x3 tensor, ascending (general symmetric solver).
std::array<double, 3> tensor_eigenvalues(double a_xx, double a_yy, double a_zz, double a);

}  // namespace oracle
