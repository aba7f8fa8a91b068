#pragma once

#include <cassert>
#include <optional>
#include <stdexcept>
#include <vector>

namespace charp {

// Dense matrix over a coefficient ring R (Fq or QQ).  Row-major.  The ring
// descriptor travels with the matrix; all desk-scale dimensions are small,
// so everything here is straightforward cubic linear algebra.
template <class R>
class Mat {
public:
  using Elem = typename R::Elem;

  Mat(R ring, int rows, int cols)
      : ring_(std::move(ring)), rows_(rows), cols_(cols),
        e_(size_t(rows) * cols, ring_.zero()) {}

  static Mat identity(const R& ring, int n) {
    Mat m(ring, n, n);
    for (int i = 0; i < n; i++) m.at(i, i) = ring.one();
    return m;
  }

  static Mat from_rows(const R& ring, const std::vector<std::vector<Elem>>& rows) {
    int r = int(rows.size());
    int c = r ? int(rows[0].size()) : 0;
    Mat m(ring, r, c);
    for (int i = 0; i < r; i++) {
      if (int(rows[i].size()) != c) throw std::invalid_argument("ragged rows");
      for (int j = 0; j < c; j++) m.at(i, j) = rows[i][j];
    }
    return m;
  }

  const R& ring() const { return ring_; }
  int rows() const { return rows_; }
  int cols() const { return cols_; }

  Elem& at(int i, int j) { return e_[size_t(i) * cols_ + j]; }
  const Elem& at(int i, int j) const { return e_[size_t(i) * cols_ + j]; }

  bool operator==(const Mat& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && e_ == o.e_;
  }
  bool operator!=(const Mat& o) const { return !(*this == o); }

  bool is_zero() const {
    for (const auto& x : e_)
      if (!ring_.is_zero(x)) return false;
    return true;
  }

  Mat add(const Mat& o) const {
    check_same_shape(o);
    Mat r(ring_, rows_, cols_);
    for (size_t i = 0; i < e_.size(); i++) r.e_[i] = ring_.add(e_[i], o.e_[i]);
    return r;
  }

  Mat sub(const Mat& o) const {
    check_same_shape(o);
    Mat r(ring_, rows_, cols_);
    for (size_t i = 0; i < e_.size(); i++) r.e_[i] = ring_.sub(e_[i], o.e_[i]);
    return r;
  }

  Mat neg() const {
    Mat r(ring_, rows_, cols_);
    for (size_t i = 0; i < e_.size(); i++) r.e_[i] = ring_.neg(e_[i]);
    return r;
  }

  Mat mul(const Mat& o) const {
    if (cols_ != o.rows_) throw std::invalid_argument("matrix product shape mismatch");
    Mat r(ring_, rows_, o.cols_);
    for (int i = 0; i < rows_; i++)
      for (int k = 0; k < cols_; k++) {
        const Elem& a = at(i, k);
        if (ring_.is_zero(a)) continue;
        for (int j = 0; j < o.cols_; j++)
          r.at(i, j) = ring_.add(r.at(i, j), ring_.mul(a, o.at(k, j)));
      }
    return r;
  }

  Mat scale(const Elem& s) const {
    Mat r(ring_, rows_, cols_);
    for (size_t i = 0; i < e_.size(); i++) r.e_[i] = ring_.mul(e_[i], s);
    return r;
  }

  std::vector<Elem> apply(const std::vector<Elem>& v) const {
    if (int(v.size()) != cols_) throw std::invalid_argument("matrix-vector shape mismatch");
    std::vector<Elem> r(rows_, ring_.zero());
    for (int i = 0; i < rows_; i++)
      for (int j = 0; j < cols_; j++)
        if (!ring_.is_zero(at(i, j))) r[i] = ring_.add(r[i], ring_.mul(at(i, j), v[j]));
    return r;
  }

  Mat transpose() const {
    Mat r(ring_, cols_, rows_);
    for (int i = 0; i < rows_; i++)
      for (int j = 0; j < cols_; j++) r.at(j, i) = at(i, j);
    return r;
  }

  // Apply coefficient-wise ring Frobenius phi^e to every entry.
  Mat frobenius(int e) const {
    Mat r(ring_, rows_, cols_);
    for (size_t i = 0; i < e_.size(); i++) r.e_[i] = ring_.frobenius(e_[i], e);
    return r;
  }

  Mat pow(int64_t n) const {
    if (rows_ != cols_) throw std::invalid_argument("pow needs square matrix");
    Mat result = identity(ring_, rows_);
    Mat base = *this;
    while (n > 0) {
      if (n & 1) result = result.mul(base);
      base = base.mul(base);
      n >>= 1;
    }
    return result;
  }

private:
  void check_same_shape(const Mat& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_)
      throw std::invalid_argument("matrix shape mismatch");
  }

  R ring_;
  int rows_, cols_;
  std::vector<Elem> e_;
};

// Row echelon data from field Gaussian elimination.
template <class R>
struct Echelon {
  Mat<R> rref;               // reduced row echelon form
  std::vector<int> pivots;   // pivot column per pivot row
  int rank;
};

template <class R>
Echelon<R> echelon_form(const Mat<R>& m) {
  if (!m.ring().is_field())
    throw std::domain_error("echelon_form requires a field coefficient ring");
  const R& K = m.ring();
  Mat<R> a = m;
  std::vector<int> pivots;
  int row = 0;
  for (int col = 0; col < a.cols() && row < a.rows(); col++) {
    int piv = -1;
    for (int i = row; i < a.rows(); i++)
      if (!K.is_zero(a.at(i, col))) {
        piv = i;
        break;
      }
    if (piv < 0) continue;
    if (piv != row)
      for (int j = 0; j < a.cols(); j++) std::swap(a.at(piv, j), a.at(row, j));
    auto inv = K.inv(a.at(row, col));
    for (int j = col; j < a.cols(); j++) a.at(row, j) = K.mul(a.at(row, j), inv);
    for (int i = 0; i < a.rows(); i++) {
      if (i == row || K.is_zero(a.at(i, col))) continue;
      auto f = a.at(i, col);
      for (int j = col; j < a.cols(); j++)
        a.at(i, j) = K.sub(a.at(i, j), K.mul(f, a.at(row, j)));
    }
    pivots.push_back(col);
    row++;
  }
  return Echelon<R>{std::move(a), std::move(pivots), row};
}

template <class R>
int rank(const Mat<R>& m) {
  return echelon_form(m).rank;
}

// Basis of the right kernel {v : m v = 0}, as column vectors.
template <class R>
std::vector<std::vector<typename R::Elem>> kernel_basis(const Mat<R>& m) {
  const R& K = m.ring();
  auto ech = echelon_form(m);
  std::vector<bool> is_pivot(m.cols(), false);
  for (int c : ech.pivots) is_pivot[c] = true;
  std::vector<std::vector<typename R::Elem>> basis;
  for (int free = 0; free < m.cols(); free++) {
    if (is_pivot[free]) continue;
    std::vector<typename R::Elem> v(m.cols(), K.zero());
    v[free] = K.one();
    for (int r = 0; r < ech.rank; r++) {
      int pc = ech.pivots[r];
      v[pc] = K.neg(ech.rref.at(r, free));
    }
    basis.push_back(std::move(v));
  }
  return basis;
}

// Basis of the column space, as column vectors (the pivot columns of m).
template <class R>
std::vector<std::vector<typename R::Elem>> image_basis(const Mat<R>& m) {
  auto ech = echelon_form(m.transpose());
  // rows of the rref of m^T spanning the row space of m^T = column space of m
  std::vector<std::vector<typename R::Elem>> basis;
  for (int r = 0; r < ech.rank; r++) {
    std::vector<typename R::Elem> v(m.rows(), m.ring().zero());
    for (int j = 0; j < m.rows(); j++) v[j] = ech.rref.at(r, j);
    basis.push_back(std::move(v));
  }
  return basis;
}

// Solve m x = b over a field; returns nullopt when inconsistent.
template <class R>
std::optional<std::vector<typename R::Elem>> solve(const Mat<R>& m,
                                                   const std::vector<typename R::Elem>& b) {
  const R& K = m.ring();
  Mat<R> aug(K, m.rows(), m.cols() + 1);
  for (int i = 0; i < m.rows(); i++) {
    for (int j = 0; j < m.cols(); j++) aug.at(i, j) = m.at(i, j);
    aug.at(i, m.cols()) = b[i];
  }
  auto ech = echelon_form(aug);
  for (int r = 0; r < ech.rank; r++)
    if (ech.pivots[r] == m.cols()) return std::nullopt;
  std::vector<typename R::Elem> x(m.cols(), K.zero());
  for (int r = 0; r < ech.rank; r++) x[ech.pivots[r]] = ech.rref.at(r, m.cols());
  return x;
}

template <class R>
std::optional<Mat<R>> inverse(const Mat<R>& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("inverse needs square matrix");
  const R& K = m.ring();
  int n = m.rows();
  if (n == 0) return m;
  Mat<R> aug(K, n, 2 * n);
  for (int i = 0; i < n; i++) {
    for (int j = 0; j < n; j++) aug.at(i, j) = m.at(i, j);
    aug.at(i, n + i) = K.one();
  }
  auto ech = echelon_form(aug);
  if (ech.rank < n || ech.pivots[n - 1] != n - 1) return std::nullopt;
  Mat<R> inv(K, n, n);
  for (int i = 0; i < n; i++)
    for (int j = 0; j < n; j++) inv.at(i, j) = ech.rref.at(i, n + j);
  return inv;
}

template <class R>
typename R::Elem det(const Mat<R>& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("det needs square matrix");
  const R& K = m.ring();
  Mat<R> a = m;
  auto d = K.one();
  int n = m.rows();
  for (int col = 0; col < n; col++) {
    int piv = -1;
    for (int i = col; i < n; i++)
      if (!K.is_zero(a.at(i, col))) {
        piv = i;
        break;
      }
    if (piv < 0) return K.zero();
    if (piv != col) {
      for (int j = 0; j < n; j++) std::swap(a.at(piv, j), a.at(col, j));
      d = K.neg(d);
    }
    d = K.mul(d, a.at(col, col));
    auto inv = K.inv(a.at(col, col));
    for (int i = col + 1; i < n; i++) {
      if (K.is_zero(a.at(i, col))) continue;
      auto f = K.mul(a.at(i, col), inv);
      for (int j = col; j < n; j++) a.at(i, j) = K.sub(a.at(i, j), K.mul(f, a.at(col, j)));
    }
  }
  return d;
}

// Characteristic polynomial (monic, lowest-degree coefficient first) via
// Hessenberg reduction; field coefficients only.
template <class R>
std::vector<typename R::Elem> charpoly(const Mat<R>& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("charpoly needs square matrix");
  if (!m.ring().is_field()) throw std::domain_error("charpoly requires field coefficients");
  const R& K = m.ring();
  int n = m.rows();
  Mat<R> h = m;
  // reduce to upper Hessenberg by similarity transforms
  for (int col = 0; col < n - 2; col++) {
    int piv = -1;
    for (int i = col + 1; i < n; i++)
      if (!K.is_zero(h.at(i, col))) {
        piv = i;
        break;
      }
    if (piv < 0) continue;
    if (piv != col + 1) {
      for (int j = 0; j < n; j++) std::swap(h.at(piv, j), h.at(col + 1, j));
      for (int i = 0; i < n; i++) std::swap(h.at(i, piv), h.at(i, col + 1));
    }
    auto inv = K.inv(h.at(col + 1, col));
    for (int i = col + 2; i < n; i++) {
      if (K.is_zero(h.at(i, col))) continue;
      auto f = K.mul(h.at(i, col), inv);
      for (int j = 0; j < n; j++) h.at(i, j) = K.sub(h.at(i, j), K.mul(f, h.at(col + 1, j)));
      for (int j = 0; j < n; j++) h.at(j, col + 1) = K.add(h.at(j, col + 1), K.mul(f, h.at(j, i)));
    }
  }
  // recurrence: p_0 = 1; p_k = charpoly of leading k x k block
  std::vector<std::vector<typename R::Elem>> p(n + 1);
  p[0] = {K.one()};
  for (int k = 1; k <= n; k++) {
    // p_k(x) = (x - h[k-1][k-1]) p_{k-1}(x) - sum_{i=1}^{k-1} h[k-1-i][k-1] *
    //          (prod_{j=1}^{i} h[k-j][k-j-1]) p_{k-1-i}(x)
    std::vector<typename R::Elem> pk(k + 1, K.zero());
    for (int t = 0; t < k; t++) {
      pk[t + 1] = K.add(pk[t + 1], p[k - 1][t]);
      pk[t] = K.sub(pk[t], K.mul(h.at(k - 1, k - 1), p[k - 1][t]));
    }
    auto prod = K.one();
    for (int i = 1; i <= k - 1; i++) {
      prod = K.mul(prod, h.at(k - i, k - i - 1));
      auto coef = K.mul(h.at(k - 1 - i, k - 1), prod);
      if (K.is_zero(coef)) continue;
      for (int t = 0; t <= k - 1 - i; t++)
        pk[t] = K.sub(pk[t], K.mul(coef, p[k - 1 - i][t]));
    }
    p[k] = std::move(pk);
  }
  return p[n];
}

// Evaluate a polynomial (lowest first) at a square matrix.
template <class R>
Mat<R> poly_at_matrix(const std::vector<typename R::Elem>& poly, const Mat<R>& m) {
  const R& K = m.ring();
  Mat<R> acc(K, m.rows(), m.cols());
  Mat<R> power = Mat<R>::identity(K, m.rows());
  for (size_t i = 0; i < poly.size(); i++) {
    if (!K.is_zero(poly[i])) acc = acc.add(power.scale(poly[i]));
    if (i + 1 < poly.size()) power = power.mul(m);
  }
  return acc;
}

// Stack the given column vectors side by side into a matrix.
template <class R>
Mat<R> columns_to_matrix(const R& ring, int dim,
                         const std::vector<std::vector<typename R::Elem>>& cols) {
  Mat<R> m(ring, dim, int(cols.size()));
  for (size_t j = 0; j < cols.size(); j++) {
    if (int(cols[j].size()) != dim) throw std::invalid_argument("bad column length");
    for (int i = 0; i < dim; i++) m.at(i, int(j)) = cols[j][i];
  }
  return m;
}

} // namespace charp
