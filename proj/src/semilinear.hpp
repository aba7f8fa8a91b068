#pragma once

#include "fq.hpp"
#include "linalg.hpp"

#include <vector>

namespace charp {

// Frobenius-semilinear endomorphism of F_q^n: v -> matrix . phi^twist(v),
// where phi is the p-power map applied coefficientwise.  twist = +1 models
// Frobenius pullback F = F^*, twist = -1 the Cartier/trace operator V = F_*,
// twist = 0 a plain linear map.  Over F_p every twist is equivalent to 0.
struct SemilinearOp {
  Fq K;
  Mat<Fq> mat;
  int twist = 0;

  SemilinearOp(Fq ring, Mat<Fq> m, int e) : K(std::move(ring)), mat(std::move(m)), twist(e) {
    if (mat.rows() != mat.cols()) throw std::invalid_argument("semilinear operator must be square");
  }

  int dim() const { return mat.rows(); }

  std::vector<FqElem> apply(const std::vector<FqElem>& v) const {
    std::vector<FqElem> w(v.size());
    for (size_t i = 0; i < v.size(); i++) w[i] = K.frobenius(v[i], twist);
    return mat.apply(w);
  }

  // Composition this . other (apply other first).
  SemilinearOp compose(const SemilinearOp& other) const {
    return SemilinearOp(K, mat.mul(other.mat.frobenius(twist)), twist + other.twist);
  }

  SemilinearOp power(int n) const {
    SemilinearOp r(K, Mat<Fq>::identity(K, dim()), 0);
    for (int i = 0; i < n; i++) r = r.compose(*this);
    return r;
  }

  // Inverse, defined when the matrix is invertible.
  SemilinearOp inverse() const {
    auto mi = charp::inverse(mat);
    if (!mi) throw std::domain_error("semilinear operator is not invertible");
    return SemilinearOp(K, mi->frobenius(-twist), -twist);
  }
};

// The Fitting ordinary/nilpotent decomposition of a semilinear operator:
// the unique splitting V = O + N with the operator bijective on O and
// nilpotent on N (images and kernels of op^n stabilize within dim steps).
struct FittingDecomposition {
  std::vector<std::vector<FqElem>> ordinary_basis;
  std::vector<std::vector<FqElem>> nilpotent_basis;
  Mat<Fq> ordinary_projector;
};

FittingDecomposition fitting_decompose(const SemilinearOp& op);

inline Mat<Fq> ordinary_projector(const SemilinearOp& op) {
  return fitting_decompose(op).ordinary_projector;
}

// Adjoint of op with respect to a nondegenerate bilinear form G between the
// space of op and a partner space: <op x, y> = phi^twist <x, adjoint y>,
// with <x, y> = x^T G y.  The adjoint carries twist -e.
SemilinearOp semilinear_dual(const SemilinearOp& op, const Mat<Fq>& pairing);

} // namespace charp
