#pragma once

// Dense Lindblad master-equation solver for small Hilbert spaces (d <= 128).
//
//   d rho/dt = -i[H, rho] + sum_k rate_k (L_k rho L_k^+ - 1/2 {L_k^+ L_k, rho})
//
// Time is in microseconds and H in rad/us throughout.

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <string>
#include <vector>

namespace cavread {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

inline constexpr int kMaxDimension = 128;

enum class DecayChannel { FreeSpace, MainMode, SecondMode, Other };

struct CollapseOperator {
  ComplexMatrix op;  // jump operator; the dissipator uses sqrt(rate) * op
  double rate = 0.0;
  DecayChannel channel = DecayChannel::Other;
  std::string label;
};

class DensityMatrix {
 public:
  static constexpr double kHermiticityTolerance = 1e-10;
  static constexpr double kTraceTolerance = 1e-9;
  static constexpr double kPositivityTolerance = 1e-8;

  /// Throws DomainError unless rho is Hermitian, unit-trace and positive
  /// within the tolerances above.
  explicit DensityMatrix(ComplexMatrix rho);

  static DensityMatrix pure(const ComplexVector& psi);
  static DensityMatrix basis_state(int dimension, int index);

  const ComplexMatrix& matrix() const { return rho_; }
  int dimension() const { return static_cast<int>(rho_.rows()); }

  double trace_error() const;
  double hermiticity_error() const;
  double min_eigenvalue() const;
  double population(int index) const { return rho_(index, index).real(); }
  /// Tr(rho O)
  Complex expectation(const ComplexMatrix& op) const;

 private:
  ComplexMatrix rho_;
};

struct LindbladModel {
  ComplexMatrix hamiltonian;
  std::vector<CollapseOperator> collapses;

  int dimension() const { return static_cast<int>(hamiltonian.rows()); }
  /// Hermitian H, square operators of matching size, rates >= 0, d <= kMaxDimension.
  void validate() const;
  /// The Lindblad generator applied to rho.
  ComplexMatrix apply(const ComplexMatrix& rho) const;
  /// sum over collapses of `channel` of rate * Tr(rho L^+ L): photons per us.
  double channel_flux(const DensityMatrix& rho, DecayChannel channel) const;
};

using EvolveObserver = std::function<void(double t, const ComplexMatrix& rho)>;

/// Fixed-step RK4 from rho0 to t_final (dt is shrunk to divide t_final evenly).
/// rho is re-Hermitised after each step. Throws StepSizeError if the trace
/// drifts by more than 1e-6 or the purity exceeds 1 (instability).
DensityMatrix evolve(const LindbladModel& model, const DensityMatrix& rho0, double t_final,
                     double dt, const EvolveObserver& observer = {});

/// Solves L(rho) = 0 with Tr rho = 1 through a sparse LU factorisation of the
/// vectorised generator. Throws MultipleSteadyStatesError when the kernel is
/// degenerate.
DensityMatrix steady_state(const LindbladModel& model);

/// Frobenius norm of L(rho).
double liouvillian_residual(const LindbladModel& model, const DensityMatrix& rho);

}  // namespace cavread
