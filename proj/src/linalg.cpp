#include "spinrwa/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "spinrwa/errors.hpp"

namespace spinrwa {

double max_abs(const ComplexMatrix& a) {
  return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff();
}

double hermiticity_residual(const ComplexMatrix& a) {
  if (a.rows() != a.cols()) {
    throw PreconditionError("hermiticity_residual: matrix is not square");
  }
  return max_abs(a - a.adjoint());
}

ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b) {
  return a * b - b * a;
}

namespace {

double off_diagonal_norm(const ComplexMatrix& a) {
  double s = 0.0;
  const Eigen::Index n = a.rows();
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index k = 0; k < n; ++k) {
      if (j != k) s += std::norm(a(j, k));
    }
  }
  return std::sqrt(s);
}

// One complex Jacobi rotation zeroing a(p,q). G = P J where P rephases column q
// so that a(p,q) becomes real and J is the real symmetric Jacobi rotation.
void rotate(ComplexMatrix& a, ComplexMatrix& v, Eigen::Index p, Eigen::Index q) {
  const Complex g = a(p, q);
  const double mag = std::abs(g);
  if (mag == 0.0) return;
  const Complex phase = std::conj(g / mag);
  const double theta = (a(q, q).real() - a(p, p).real()) / (2.0 * mag);
  const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
  const double c = 1.0 / std::sqrt(1.0 + t * t);
  const double s = t * c;

  const Complex gpp = c;
  const Complex gpq = s;
  const Complex gqp = -s * phase;
  const Complex gqq = c * phase;

  const Eigen::Index n = a.rows();
  for (Eigen::Index k = 0; k < n; ++k) {
    const Complex akp = a(k, p);
    const Complex akq = a(k, q);
    a(k, p) = akp * gpp + akq * gqp;
    a(k, q) = akp * gpq + akq * gqq;
  }
  for (Eigen::Index k = 0; k < n; ++k) {
    const Complex apk = a(p, k);
    const Complex aqk = a(q, k);
    a(p, k) = std::conj(gpp) * apk + std::conj(gqp) * aqk;
    a(q, k) = std::conj(gpq) * apk + std::conj(gqq) * aqk;
  }
  a(p, q) = 0.0;
  a(q, p) = 0.0;
  a(p, p) = a(p, p).real();
  a(q, q) = a(q, q).real();

  for (Eigen::Index k = 0; k < n; ++k) {
    const Complex vkp = v(k, p);
    const Complex vkq = v(k, q);
    v(k, p) = vkp * gpp + vkq * gqp;
    v(k, q) = vkp * gpq + vkq * gqq;
  }
}

}  // namespace

EigenDecomposition hermitian_eig(const ComplexMatrix& a_in, const LinalgTolerances& tol) {
  if (a_in.rows() != a_in.cols() || a_in.rows() == 0) {
    throw PreconditionError("hermitian_eig: matrix must be square and non-empty");
  }
  const double scale = std::max(1.0, max_abs(a_in));
  const double herm = hermiticity_residual(a_in);
  if (herm > tol.hermitian * scale) {
    throw PreconditionError("hermitian_eig: input is not Hermitian (residual " +
                            std::to_string(herm) + ")");
  }

  const Eigen::Index n = a_in.rows();
  ComplexMatrix a = 0.5 * (a_in + a_in.adjoint());
  ComplexMatrix v = ComplexMatrix::Identity(n, n);
  const double frob = a.norm();
  const double threshold = tol.jacobi_offdiag * frob;

  int sweep = 0;
  for (; sweep < tol.jacobi_max_sweeps; ++sweep) {
    if (off_diagonal_norm(a) <= threshold) break;
    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        rotate(a, v, p, q);
      }
    }
  }
  const double off = off_diagonal_norm(a);
  if (off > threshold && off > 0.0) {
    throw NumericalError("hermitian_eig: Jacobi did not converge in " +
                             std::to_string(tol.jacobi_max_sweeps) + " sweeps",
                         off);
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index x, Eigen::Index y) {
    return a(x, x).real() < a(y, y).real();
  });

  EigenDecomposition out;
  out.eigenvalues.resize(n);
  out.eigenvectors.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const Eigen::Index src = order[static_cast<std::size_t>(k)];
    out.eigenvalues(k) = a(src, src).real();
    out.eigenvectors.col(k) = v.col(src);
  }

  const ComplexMatrix recon =
      out.eigenvectors * out.eigenvalues.cast<Complex>().asDiagonal() * out.eigenvectors.adjoint();
  const double residual = max_abs(recon - a_in);
  if (residual > tol.reconstruction * std::max(1.0, max_abs(a_in))) {
    throw NumericalError("hermitian_eig: reconstruction residual too large", residual);
  }
  return out;
}

SpectralExponential::SpectralExponential(const ComplexMatrix& h, const LinalgTolerances& tol)
    : eig_(hermitian_eig(h, tol)) {}

ComplexMatrix SpectralExponential::at(double t) const {
  const Eigen::Index n = dim();
  ComplexVector phases(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    phases(k) = std::polar(1.0, -eig_.eigenvalues(k) * t);
  }
  return eig_.eigenvectors * phases.asDiagonal() * eig_.eigenvectors.adjoint();
}

ComplexMatrix expm_unitary(const ComplexMatrix& h, double t) {
  return SpectralExponential(h).at(t);
}

ComplexMatrix direct_sum(std::span<const ComplexMatrix> blocks) {
  if (blocks.empty()) {
    throw PreconditionError("direct_sum: empty block list");
  }
  Eigen::Index n = 0;
  for (const auto& b : blocks) {
    if (b.rows() != b.cols() || b.rows() == 0) {
      throw PreconditionError("direct_sum: blocks must be square and non-empty");
    }
    n += b.rows();
  }
  ComplexMatrix out = ComplexMatrix::Zero(n, n);
  Eigen::Index offset = 0;
  for (const auto& b : blocks) {
    out.block(offset, offset, b.rows(), b.cols()) = b;
    offset += b.rows();
  }
  return out;
}

ComplexMatrix direct_sum(std::initializer_list<ComplexMatrix> blocks) {
  return direct_sum(std::span<const ComplexMatrix>(blocks.begin(), blocks.size()));
}

double unitarity_residual(const ComplexMatrix& u) {
  if (u.rows() != u.cols()) {
    throw PreconditionError("unitarity_residual: matrix is not square");
  }
  return max_abs(u.adjoint() * u - ComplexMatrix::Identity(u.rows(), u.cols()));
}

ComplexMatrix polar_unitary(const ComplexMatrix& u) {
  const ComplexMatrix gram = u.adjoint() * u;
  const EigenDecomposition eig = hermitian_eig(0.5 * (gram + gram.adjoint()));
  const double smallest = eig.eigenvalues.minCoeff();
  if (smallest <= 1e-12) {
    throw NumericalError("polar_unitary: matrix is numerically singular", smallest);
  }
  const Eigen::Index n = u.cols();
  ComplexVector inv_sqrt(n);
  for (Eigen::Index k = 0; k < n; ++k) inv_sqrt(k) = 1.0 / std::sqrt(eig.eigenvalues(k));
  return u * (eig.eigenvectors * inv_sqrt.asDiagonal() * eig.eigenvectors.adjoint());
}

}  // namespace spinrwa
