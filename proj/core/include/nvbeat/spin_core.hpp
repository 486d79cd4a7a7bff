#pragma once

// Exact 6x6 Hamiltonian of one S=1 electron spin coupled to one I=1/2 nuclear
// spin, its diagonalization, and the transition structure derived from it.
//
// Product basis ordering: index = 2 * ms_index + mi_index with
//   ms_index 0, 1, 2  <->  m_S = +1, 0, -1
//   mi_index 0, 1     <->  m_I = +1/2, -1/2

#include <array>
#include <vector>

#include <Eigen/Dense>

#include "nvbeat/types.hpp"

namespace nvbeat {

struct SpinOperators {
  Eigen::MatrixXcd sx;
  Eigen::MatrixXcd sy;
  Eigen::MatrixXcd sz;
};

/// Ladder-constructed spin matrices for s = 1/2 or s = 1.
SpinOperators spin_matrices(double s);

/// Operator building blocks in the 6-dimensional product space. Built once.
struct HamiltonianTerms {
  Matrix6cd sx, sy, sz;        ///< electron operators (S ⊗ 1)
  Matrix6cd ix, iy, iz;        ///< nuclear operators (1 ⊗ I)
  Matrix6cd sz_squared;        ///< S_z^2 ⊗ 1
  Matrix6cd hf_xx, hf_yy, hf_zz, hf_a;  ///< S_xI_x, S_yI_y, S_zI_z, S_zI_x + S_xI_z
};

const HamiltonianTerms& hamiltonian_terms();

/// D S_z^2 + γe B·S + γn B·I + A_zz S_zI_z + A_xx S_xI_x + A_yy S_yI_y
///   + a (S_zI_x + S_xI_z), in MHz. The field must be in the NV frame.
Matrix6cd build_hamiltonian(const SystemParams& params, const FieldOrientation& field);

enum class Manifold { ms0, ms_minus, ms_plus };

const char* to_string(Manifold m);

struct Eigensystem {
  std::array<double, 6> values{};      ///< ascending, MHz
  Matrix6cd vectors;                   ///< column k belongs to values[k]
  std::array<Manifold, 6> manifold{};  ///< dominant m_S character of each state

  /// Indices of the states carrying `m`, in ascending energy.
  std::vector<int> states(Manifold m) const;
};

/// Diagonalizes a Hermitian 6x6 matrix. Degenerate clusters are rotated to
/// diagonalize S_z + 0.1 I_z so labels are reproducible; each eigenvector's
/// largest-magnitude component is made real-positive. A state is labelled by
/// the m_S subspace holding >= 0.6 of its weight. States that are clearly
/// |m_S| = 1 but split between +1 and -1 (transverse field) are labelled by
/// ascending energy, lower pair ms_minus. Throws InvalidInput for non-Hermitian
/// input and NumericalError when neither m_S = 0 nor |m_S| = 1 reaches 0.6.
Eigensystem eigensystem(const Matrix6cd& h);

/// Shorthand for eigensystem(build_hamiltonian(params, field)).
Eigensystem solve(const SystemParams& params, const FieldOrientation& field);

/// Microwave drive operator: electron S_x in the NV frame.
const Matrix6cd& electron_drive();

struct TransitionLine {
  double frequency = 0.0;  ///< |E_to - E_from|, MHz
  double amplitude = 0.0;  ///< |<to|drive|from>|^2
  int from_state = 0;
  int to_state = 0;
};

/// Every m_S=0 <-> m_S=±1 pair, sorted by frequency.
std::vector<TransitionLine> single_quantum_transitions(const Eigensystem& eig,
                                                       const Matrix6cd& drive = electron_drive());

/// The four lines between the m_S=0 doublet and the m_S=-1 doublet, sorted by
/// frequency. Throws NumericalError if either doublet is not resolved.
std::vector<TransitionLine> main_transitions(const Eigensystem& eig,
                                             const Matrix6cd& drive = electron_drive());

/// Energy splitting of the m_S=0 doublet (upper minus lower), MHz.
double zero_quantum_splitting_exact(const Eigensystem& eig);

struct NuclearExcitedStates {
  double theta_prime_deg = 0.0;  ///< atan2(a, A_zz)
  Eigen::Vector2cd alpha_plus;
  Eigen::Vector2cd alpha_minus;
};

/// Nuclear eigenstates of A_zz I_z + a I_x, i.e. the nuclear quantization in
/// the m_S = ±1 manifolds.
NuclearExcitedStates nuclear_eigenstates_excited(const HyperfineTensor& tensor);

struct ZeemanStates {
  Eigen::Vector2cd beta_plus;   ///< cos(θ/2)|+½> + e^{iφ} sin(θ/2)|-½>
  Eigen::Vector2cd beta_minus;  ///< sin(θ/2)|+½> - e^{iφ} cos(θ/2)|-½>
};

ZeemanStates ground_zeeman_states(const FieldOrientation& field);

/// Drive matrix elements of the Λ system: the m_S=-1 state whose nuclear part
/// is α- couples to the two m_S=0 states with |<e|drive|g±>| = Ω±.
struct LambdaAmplitudes {
  double omega_plus = 0.0;
  double omega_minus = 0.0;
  cd element_plus{};   ///< <excited|drive|ground_plus>
  cd element_minus{};  ///< <excited|drive|ground_minus>
  int excited = 0;
  int ground_plus = 0;
  int ground_minus = 0;

  /// min/max of the two amplitudes; 0 on the single-transition axis.
  double ratio() const;
};

/// The ground state with the larger overlap with |0>|β+> is labelled "plus";
/// exact ties go to the upper state. Throws NumericalError when the excited
/// state cannot be identified (both α- overlaps within 5% of each other).
LambdaAmplitudes lambda_transition_amplitudes(const Eigensystem& eig, const SystemParams& params,
                                              const FieldOrientation& field,
                                              const Matrix6cd& drive = electron_drive());

}  // namespace nvbeat
