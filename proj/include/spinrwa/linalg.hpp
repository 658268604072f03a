#pragma once

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace spinrwa {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// Tolerances for the dense kernel. Defaults follow the artifact contract and
/// may be tightened or relaxed by callers.
struct LinalgTolerances {
  double hermitian = 1e-10;         // precondition check, relative to max(1, max|A|)
  double jacobi_offdiag = 1e-13;    // stop when off(A) <= tol * ||A||_F
  int jacobi_max_sweeps = 100;
  double reconstruction = 1e-10;    // ||V L V^dag - A||_max / max(1, ||A||_max)
};

struct EigenDecomposition {
  RealVector eigenvalues;      // ascending
  ComplexMatrix eigenvectors;  // orthonormal columns, same order
};

/// max_{jk} |A_jk - conj(A_kj)|
double hermiticity_residual(const ComplexMatrix& a);

/// Cyclic Jacobi diagonalisation of a Hermitian matrix. Throws
/// PreconditionError for non-Hermitian input and NumericalError if the sweep
/// cap is reached or the reconstruction check fails.
EigenDecomposition hermitian_eig(const ComplexMatrix& a, const LinalgTolerances& tol = {});

/// e^{-iHt} for a fixed Hermitian generator, diagonalised once and evaluated
/// at any number of times.
class SpectralExponential {
public:
  explicit SpectralExponential(const ComplexMatrix& h, const LinalgTolerances& tol = {});

  ComplexMatrix at(double t) const;
  const EigenDecomposition& spectrum() const noexcept { return eig_; }
  Eigen::Index dim() const noexcept { return eig_.eigenvalues.size(); }

private:
  EigenDecomposition eig_;
};

/// U = V diag(e^{-i lambda_k t}) V^dag.
ComplexMatrix expm_unitary(const ComplexMatrix& h, double t);

/// Block-diagonal matrix of the blocks in caller order.
ComplexMatrix direct_sum(std::span<const ComplexMatrix> blocks);
ComplexMatrix direct_sum(std::initializer_list<ComplexMatrix> blocks);

/// ||U^dag U - 1||_max
double unitarity_residual(const ComplexMatrix& u);

/// Nearest unitary W = U (U^dag U)^{-1/2}. Throws NumericalError if U is
/// numerically singular.
ComplexMatrix polar_unitary(const ComplexMatrix& u);

/// max_{jk} |A_jk|
double max_abs(const ComplexMatrix& a);

ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b);

}  // namespace spinrwa
