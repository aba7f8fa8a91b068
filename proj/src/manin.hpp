#pragma once

#include "linalg.hpp"
#include "qq.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

namespace charp {

// Integer 2x2 matrices acting on Manin symbols.
struct IMat {
  int64_t a, b, c, d;
  IMat mul(const IMat& o) const {
    return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
  }
  int64_t det() const { return a * d - b * c; }
};

// Weight-k modular symbols for Gamma_1(M) in the Manin presentation:
// generators [X^i Y^{k-2-i}, (c:d)] modulo the standard two- and three-term
// relations, with the boundary map to signed cusp classes and the cuspidal
// kernel.  Everything is exact over Q.
class ManinSymbolSpace {
public:
  ManinSymbolSpace(int64_t M, int k);

  int64_t level() const { return M_; }
  int weight() const { return k_; }
  int dim() const { return dim_; }                       // quotient dimension
  int cuspidal_dim() const { return int(cuspidal_.size()); }
  const std::vector<std::vector<mpq_class>>& cuspidal_basis() const { return cuspidal_; }

  // number of unimodular rows (c:d)
  int n_rows() const { return int(rows_.size()); }
  const std::pair<int64_t, int64_t>& row(int idx) const { return rows_[size_t(idx)]; }
  int row_index(int64_t c, int64_t d) const;             // -1 when not unimodular

  // image of the generator [X^i Y^{k-2-i}, rows_[r]] in the quotient
  const std::vector<mpq_class>& generator_image(int r, int i) const {
    return gen_image_[size_t(r) * size_t(k_ - 1) + size_t(i)];
  }

  // a generator (index r*(k-1)+i) whose image is exactly the basis column t
  int basis_generator(int t) const { return basis_gen_[size_t(t)]; }

  // action of an integer matrix on a generator, expressed in the quotient:
  // [P, (c,d)] . g = [P|g, (c,d) g], with terms dropped when the row leaves
  // the unimodular locus (Heilbronn convention)
  std::vector<mpq_class> act_generator(int r, int i, const IMat& g) const;

  // matrix of sum_h (. h) on the whole quotient
  Mat<QQ> operator_matrix(const std::vector<IMat>& mats) const;

  // diamond operator <u>: [P, (c:d)] -> [P, (uc:ud)] (left coset scaling)
  Mat<QQ> diamond_matrix_on_quotient(int64_t u) const;

  // restrict an endomorphism of the quotient to the cuspidal subspace
  Mat<QQ> restrict_cuspidal(const Mat<QQ>& op) const;

  // weight-2 only: the class of the modular-symbol path {a1/b1, a2/b2}
  std::vector<mpq_class> path_class(int64_t a1, int64_t b1, int64_t a2, int64_t b2) const;

  // star involution [P,(c,d)] -> [P(-X,Y), (-c,d)] on the quotient
  Mat<QQ> star_matrix() const;

private:
  int64_t M_;
  int k_;
  std::vector<std::pair<int64_t, int64_t>> rows_;
  std::vector<int> row_lookup_; // (c*M + d) -> row index or -1
  int dim_ = 0;
  // generator -> dense vector over the quotient basis
  std::vector<std::vector<mpq_class>> gen_image_;
  std::vector<std::vector<mpq_class>> cuspidal_;
  std::vector<int> basis_gen_;

  int gen_index(int r, int i) const { return r * (k_ - 1) + i; }
  std::vector<mpq_class> act_poly_row(const std::vector<mpq_class>& poly_coeffs, int row,
                                      const IMat& g) const;
  void build_presentation();
  void build_cuspidal();
};

// Merel's Heilbronn matrices for T_p (p prime): a > b >= 0, d > c >= 0, det p.
std::vector<IMat> heilbronn_matrices(int64_t p);

// an SL_2(Z) lift with bottom row congruent to (c, d) mod M
IMat lift_to_sl2(int64_t c, int64_t d, int64_t M);

// an SL_2(Z) matrix congruent to (u^{-1}, 0; 0, u) mod M
IMat diamond_matrix(int64_t u, int64_t M);

} // namespace charp
