#include "spinrwa/rwa_full.hpp"

#include <cmath>
#include <string>

#include "spinrwa/errors.hpp"

namespace spinrwa {

FullRwaGenerator full_rwa_generator(const SpinParams& params) {
  if (!params.spin.is_integer()) {
    throw PreconditionError("full_rwa_integer: spin " + params.spin.to_string() +
                            " is half-integer; use the half-integer construction");
  }
  const SpinOperators ops = spin_matrices(params.spin);
  const ComplexMatrix izia = ops.z * ia_operator(params.spin);
  FullRwaGenerator gen;
  gen.frame = izia;
  gen.heff = params.Q * ops.z * ops.z - params.omega * izia + params.B0 * ops.z + (params.B1 / 2.0) * ops.x;
  return gen;
}

FullRwaInteger::FullRwaInteger(const SpinParams& params)
    : params_(params),
      gen_(full_rwa_generator(params)),
      frame_(params.omega * gen_.frame),
      heff_(gen_.heff) {
  params_.validate();
}

Propagator FullRwaInteger::at(double t) const {
  Propagator out;
  out.matrix = frame_.at(t) * heff_.at(t);
  out.time = t;
  out.method = "rwa-full";
  return out;
}

namespace {

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

struct ProductOperators {
  ComplexMatrix ix, iy, iz, ia, sx, sy, sz;
};

// Product basis: spin-1/2 factor first (M_S = +1/2 block leading).
ProductOperators product_operators(int i_int) {
  const Spin ispin = Spin::from_twice(2 * i_int == 0 ? 2 : 2 * i_int);
  ProductOperators p;
  const Eigen::Index d = 2 * i_int + 1;
  const ComplexMatrix one_i = ComplexMatrix::Identity(d, d);
  const ComplexMatrix one_s = ComplexMatrix::Identity(2, 2);
  if (i_int == 0) {
    const ComplexMatrix zero = ComplexMatrix::Zero(1, 1);
    p.ix = p.iy = p.iz = p.ia = kron(one_s, zero);
  } else {
    const SpinOperators i_ops = spin_matrices(ispin);
    p.ix = kron(one_s, i_ops.x);
    p.iy = kron(one_s, i_ops.y);
    p.iz = kron(one_s, i_ops.z);
    p.ia = kron(one_s, ia_operator(ispin));
  }
  const SpinOperators s_ops = spin_matrices(Spin::from_twice(1));
  p.sx = kron(s_ops.x, one_i);
  p.sy = kron(s_ops.y, one_i);
  p.sz = kron(s_ops.z, one_i);
  return p;
}

int integer_part(const SpinParams& params) {
  if (params.spin.is_integer()) {
    throw PreconditionError("full_rwa_half_integer: spin " + params.spin.to_string() + " is an integer");
  }
  return (params.spin.twice() - 1) / 2;
}

}  // namespace

FullRwaHalfInteger::FullRwaHalfInteger(const SpinParams& params)
    : params_(params),
      embedding_(clebsch_embed(integer_part(params)).embedding),
      heff_matrix_([&] {
        const ProductOperators p = product_operators(integer_part(params));
        return ComplexMatrix(params.Q * p.iz * p.iz - params.omega * p.iz * p.ia + params.B0 * p.iz +
                             (params.B1 / 2.0) * p.ix + (params.B0 - params.omega) * p.sz +
                             (params.B1 / 2.0) * p.sx + 2.0 * params.Q * p.iz * p.sz);
      }()),
      heff_(heff_matrix_) {
  params_.validate();
  const ProductOperators p = product_operators(integer_part(params));
  const ComplexMatrix jx = p.ix + p.sx;
  const ComplexMatrix jy = p.iy + p.sy;
  const ComplexMatrix jz = p.iz + p.sz;
  j_squared_ = jx * jx + jy * jy + jz * jz;
  const ComplexMatrix frame = p.iz * p.ia + p.sz;
  frame_diag_ = frame.diagonal().real();
}

ComplexMatrix FullRwaHalfInteger::product_propagator(double t) const {
  // Both frame generators are diagonal in the product basis and commute.
  ComplexVector phases(frame_diag_.size());
  for (Eigen::Index k = 0; k < frame_diag_.size(); ++k) {
    phases(k) = std::polar(1.0, -params_.omega * t * frame_diag_(k));
  }
  return phases.asDiagonal() * heff_.at(t);
}

Propagator FullRwaHalfInteger::at(double t) const {
  const ComplexMatrix u_product = product_propagator(t);
  const ComplexMatrix compressed = embedding_.adjoint() * u_product * embedding_;
  const double leakage = max_abs(u_product * embedding_ - embedding_ * compressed);

  const Eigen::JacobiSVD<ComplexMatrix> svd(compressed);
  const double min_singular = svd.singularValues().minCoeff();

  Propagator out;
  out.time = t;
  out.method = "rwa-full";
  out.diagnostics["leakage"] = leakage;
  out.diagnostics["min_singular"] = min_singular;
  out.diagnostics["j2_commutator"] = max_abs(commutator(u_product, j_squared_));
  out.matrix = polar_unitary(compressed);
  if (leakage > kLeakageWarnThreshold) {
    out.warnings.push_back("rwa-full: J-multiplet leakage " + std::to_string(leakage) +
                           "; propagator re-unitarised by polar projection");
  }
  return out;
}

Propagator full_rwa_integer(const SpinParams& params, double t) { return FullRwaInteger(params).at(t); }

Propagator full_rwa_half_integer(const SpinParams& params, double t) { return FullRwaHalfInteger(params).at(t); }

}  // namespace spinrwa
