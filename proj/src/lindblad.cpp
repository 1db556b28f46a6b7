#include "cavread/lindblad.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "cavread/errors.hpp"

namespace cavread {

namespace {

using SparseMatrix = Eigen::SparseMatrix<Complex>;
using Triplet = Eigen::Triplet<Complex>;

constexpr double kTraceDrift = 1e-6;
constexpr double kPuritySlack = 1e-6;
constexpr double kSparseDrop = 1e-300;

ComplexMatrix hermitise(const ComplexMatrix& m) { return 0.5 * (m + m.adjoint()); }

// Appends the nonzeros of A (x) B to `out`.
void kron_into(const ComplexMatrix& a, const ComplexMatrix& b, std::vector<Triplet>& out) {
  const auto nb = b.rows();
  std::vector<std::pair<Eigen::Index, Eigen::Index>> b_nz;
  for (Eigen::Index j = 0; j < b.cols(); ++j)
    for (Eigen::Index i = 0; i < nb; ++i)
      if (std::abs(b(i, j)) > kSparseDrop) b_nz.emplace_back(i, j);
  for (Eigen::Index aj = 0; aj < a.cols(); ++aj)
    for (Eigen::Index ai = 0; ai < a.rows(); ++ai) {
      const Complex av = a(ai, aj);
      if (std::abs(av) <= kSparseDrop) continue;
      for (const auto& [bi, bj] : b_nz)
        out.emplace_back(static_cast<int>(ai * nb + bi), static_cast<int>(aj * nb + bj), av * b(bi, bj));
    }
}

// Nonzeros of the vectorised generator acting on column-major vec(rho):
//   I (x) K + conj(K) (x) I + sum_k rate_k conj(L_k) (x) L_k,
// with K = -iH - 1/2 sum_k rate_k L_k^+ L_k.
std::vector<Triplet> liouvillian_triplets(const LindbladModel& model) {
  const int d = model.dimension();
  ComplexMatrix k = Complex(0.0, -1.0) * model.hamiltonian;
  for (const auto& c : model.collapses) k -= 0.5 * c.rate * (c.op.adjoint() * c.op);
  const ComplexMatrix id = ComplexMatrix::Identity(d, d);

  std::vector<Triplet> triplets;
  kron_into(id, k, triplets);
  kron_into(k.conjugate(), id, triplets);
  for (const auto& c : model.collapses) {
    if (c.rate == 0.0) continue;
    kron_into(c.rate * c.op.conjugate(), c.op, triplets);
  }
  return triplets;
}

}  // namespace

DensityMatrix::DensityMatrix(ComplexMatrix rho) : rho_(std::move(rho)) {
  if (rho_.rows() != rho_.cols() || rho_.rows() == 0)
    throw DomainError("DensityMatrix: matrix must be square and non-empty");
  if (!rho_.allFinite()) throw DomainError("DensityMatrix: non-finite entries");
  if (hermiticity_error() > kHermiticityTolerance)
    throw DomainError("DensityMatrix: not Hermitian (error " + std::to_string(hermiticity_error()) + ")");
  if (trace_error() > kTraceTolerance)
    throw DomainError("DensityMatrix: trace differs from 1 by " + std::to_string(trace_error()));
  if (min_eigenvalue() < -kPositivityTolerance)
    throw DomainError("DensityMatrix: negative eigenvalue " + std::to_string(min_eigenvalue()));
}

DensityMatrix DensityMatrix::pure(const ComplexVector& psi) {
  const double norm = psi.norm();
  if (!(norm > 0.0)) throw DomainError("DensityMatrix::pure: zero state vector");
  const ComplexVector unit = psi / norm;
  return DensityMatrix(unit * unit.adjoint());
}

DensityMatrix DensityMatrix::basis_state(int dimension, int index) {
  if (dimension <= 0 || index < 0 || index >= dimension)
    throw DomainError("DensityMatrix::basis_state: index out of range");
  ComplexMatrix rho = ComplexMatrix::Zero(dimension, dimension);
  rho(index, index) = 1.0;
  return DensityMatrix(std::move(rho));
}

double DensityMatrix::trace_error() const { return std::abs(rho_.trace() - Complex(1.0, 0.0)); }

double DensityMatrix::hermiticity_error() const {
  return (rho_ - rho_.adjoint()).cwiseAbs().maxCoeff();
}

double DensityMatrix::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitise(rho_), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

Complex DensityMatrix::expectation(const ComplexMatrix& op) const {
  if (op.rows() != rho_.rows() || op.cols() != rho_.cols())
    throw DomainError("DensityMatrix::expectation: operator dimension mismatch");
  return (rho_ * op).trace();
}

void LindbladModel::validate() const {
  const int d = dimension();
  if (d == 0 || hamiltonian.cols() != d) throw DomainError("LindbladModel: H must be square and non-empty");
  if (d > kMaxDimension)
    throw DimensionCapError("LindbladModel: dimension " + std::to_string(d) + " exceeds the cap of " +
                            std::to_string(kMaxDimension));
  if ((hamiltonian - hamiltonian.adjoint()).cwiseAbs().maxCoeff() > 1e-9 * (1.0 + hamiltonian.norm()))
    throw DomainError("LindbladModel: H is not Hermitian");
  for (const auto& c : collapses) {
    if (c.op.rows() != d || c.op.cols() != d)
      throw DomainError("LindbladModel: collapse operator '" + c.label + "' has the wrong size");
    if (!(c.rate >= 0.0) || !std::isfinite(c.rate))
      throw DomainError("LindbladModel: collapse rate of '" + c.label + "' must be finite and >= 0");
  }
}

ComplexMatrix LindbladModel::apply(const ComplexMatrix& rho) const {
  const Complex i(0.0, 1.0);
  ComplexMatrix out = -i * (hamiltonian * rho - rho * hamiltonian);
  for (const auto& c : collapses) {
    if (c.rate == 0.0) continue;
    const ComplexMatrix lr = c.op * rho;
    const ComplexMatrix ldl = c.op.adjoint() * c.op;
    out += c.rate * (lr * c.op.adjoint() - 0.5 * (ldl * rho + rho * ldl));
  }
  return out;
}

double LindbladModel::channel_flux(const DensityMatrix& rho, DecayChannel channel) const {
  double flux = 0.0;
  for (const auto& c : collapses)
    if (c.channel == channel) flux += c.rate * rho.expectation(c.op.adjoint() * c.op).real();
  return flux;
}

DensityMatrix evolve(const LindbladModel& model, const DensityMatrix& rho0, double t_final, double dt,
                     const EvolveObserver& observer) {
  model.validate();
  if (rho0.dimension() != model.dimension()) throw DomainError("evolve: state dimension mismatch");
  if (!(t_final >= 0.0) || !std::isfinite(t_final)) throw DomainError("evolve: t_final must be >= 0");
  if (!(dt > 0.0)) throw DomainError("evolve: dt must be > 0");

  const long steps = std::max(1L, static_cast<long>(std::ceil(t_final / dt - 1e-12)));
  const double h = t_final / static_cast<double>(steps);
  ComplexMatrix rho = rho0.matrix();
  const Complex trace0 = rho.trace();
  if (observer) observer(0.0, rho);
  for (long s = 1; s <= steps && t_final > 0.0; ++s) {
    const ComplexMatrix k1 = model.apply(rho);
    const ComplexMatrix k2 = model.apply(rho + 0.5 * h * k1);
    const ComplexMatrix k3 = model.apply(rho + 0.5 * h * k2);
    const ComplexMatrix k4 = model.apply(rho + h * k3);
    rho = hermitise(rho + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4));

    const double drift = std::abs(rho.trace() - trace0);
    const double purity_norm = rho.norm();
    if (!rho.allFinite() || drift > kTraceDrift || purity_norm > 1.0 + kPuritySlack)
      throw StepSizeError("evolve: integration unstable at t = " + std::to_string(s * h) +
                          " (trace drift " + std::to_string(drift) + ", |rho|_F " +
                          std::to_string(purity_norm) + "); reduce dt below " + std::to_string(h));
    if (observer) observer(s * h, rho);
  }
  return DensityMatrix(rho);
}

DensityMatrix steady_state(const LindbladModel& model) {
  model.validate();
  const int d = model.dimension();
  // Row 0 (the equation for rho_00) is replaced by Tr rho = 1.
  std::vector<Triplet> triplets;
  for (const auto& t : liouvillian_triplets(model))
    if (t.row() != 0) triplets.push_back(t);
  for (int i = 0; i < d; ++i) triplets.emplace_back(0, i * (d + 1), Complex(1.0, 0.0));
  SparseMatrix a(d * d, d * d);
  a.setFromTriplets(triplets.begin(), triplets.end());
  a.makeCompressed();

  Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
  lu.analyzePattern(a);
  lu.factorize(a);
  if (lu.info() != Eigen::Success)
    throw MultipleSteadyStatesError("steady_state: Liouvillian kernel is degenerate (" + lu.lastErrorMessage() +
                                    ")");
  Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(d * d);
  rhs(0) = 1.0;
  Eigen::VectorXcd x = lu.solve(rhs);
  // One round of iterative refinement.
  x += lu.solve(rhs - a * x);
  if (lu.info() != Eigen::Success || !x.allFinite() || (a * x - rhs).norm() > 1e-8 * (1.0 + x.norm()))
    throw MultipleSteadyStatesError("steady_state: singular system, the steady state is not unique");

  ComplexMatrix rho = hermitise(Eigen::Map<const ComplexMatrix>(x.data(), d, d));
  const Complex tr = rho.trace();
  rho /= tr;

  const double residual = model.apply(rho).norm();
  double scale = model.hamiltonian.norm();
  for (const auto& c : model.collapses) scale += c.rate * c.op.squaredNorm();
  if (residual > 1e-8 * std::max(1.0, scale))
    throw MultipleSteadyStatesError("steady_state: residual " + std::to_string(residual) +
                                    " too large; the steady state is not unique");
  return DensityMatrix(std::move(rho));
}

double liouvillian_residual(const LindbladModel& model, const DensityMatrix& rho) {
  return model.apply(rho.matrix()).norm();
}

}  // namespace cavread
