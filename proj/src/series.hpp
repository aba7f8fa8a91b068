#pragma once

#include "fq.hpp"

#include <stdexcept>
#include <vector>

namespace charp {

// Truncated Laurent series over a finite coefficient ring: coefficients for
// exponents lowest .. prec-1 are known, exponents >= prec are unknown.
struct LSeries {
  Fq K;
  int lowest = 0;
  int prec = 0; // exclusive
  std::vector<FqElem> c; // c[i] is the coefficient of t^{lowest + i}

  LSeries(Fq ring, int low, int precision)
      : K(std::move(ring)), lowest(low), prec(precision) {
    if (prec <= lowest) throw std::invalid_argument("series precision <= lowest exponent");
    c.assign(size_t(prec - lowest), K.zero());
  }

  static LSeries zero(const Fq& K, int prec) { return LSeries(K, prec - 1, prec); }
  static LSeries constant(const Fq& K, const FqElem& v, int prec) {
    LSeries s(K, 0, prec);
    s.c[0] = v;
    return s;
  }
  // t^e
  static LSeries monomial(const Fq& K, int e, int prec) {
    LSeries s(K, e, prec);
    s.c[0] = K.one();
    return s;
  }

  FqElem coeff(int e) const {
    if (e >= prec) throw std::domain_error("coefficient beyond tracked precision");
    if (e < lowest) return K.zero();
    return c[size_t(e - lowest)];
  }

  bool known_zero() const {
    for (const auto& v : c)
      if (!K.is_zero(v)) return false;
    return true;
  }

  // valuation of the series if a nonzero coefficient is known; prec otherwise
  int val_or_prec() const {
    for (size_t i = 0; i < c.size(); i++)
      if (!K.is_zero(c[i])) return lowest + int(i);
    return prec;
  }

  LSeries& normalize() {
    while (!c.empty() && K.is_zero(c.front()) && lowest + 1 < prec) {
      c.erase(c.begin());
      lowest++;
    }
    return *this;
  }
};

inline LSeries ls_add(const LSeries& a, const LSeries& b) {
  if (!(a.K == b.K)) throw std::invalid_argument("series ring mismatch");
  int prec = std::min(a.prec, b.prec);
  int low = std::min(a.lowest, b.lowest);
  if (low >= prec) low = prec - 1;
  LSeries r(a.K, low, prec);
  for (int e = low; e < prec; e++) {
    FqElem v = a.K.zero();
    if (e >= a.lowest && e < a.prec) v = a.K.add(v, a.coeff(e));
    if (e >= b.lowest && e < b.prec) v = a.K.add(v, b.coeff(e));
    r.c[size_t(e - low)] = v;
  }
  return r.normalize();
}

inline LSeries ls_neg(const LSeries& a) {
  LSeries r = a;
  for (auto& v : r.c) v = a.K.neg(v);
  return r;
}

inline LSeries ls_sub(const LSeries& a, const LSeries& b) { return ls_add(a, ls_neg(b)); }

inline LSeries ls_scale(const LSeries& a, const FqElem& s) {
  LSeries r = a;
  for (auto& v : r.c) v = a.K.mul(v, s);
  return r;
}

// Pessimistic precision: coefficients of the product are fully known only for
// exponents below min(a.prec + b.lowest, b.prec + a.lowest).
inline LSeries ls_mul(const LSeries& a, const LSeries& b) {
  if (!(a.K == b.K)) throw std::invalid_argument("series ring mismatch");
  int prec = std::min(a.prec + b.lowest, b.prec + a.lowest);
  int low = a.lowest + b.lowest;
  if (low >= prec) low = prec - 1;
  LSeries r(a.K, low, prec);
  for (size_t i = 0; i < a.c.size(); i++) {
    if (a.K.is_zero(a.c[i])) continue;
    for (size_t j = 0; j < b.c.size(); j++) {
      int e = a.lowest + int(i) + b.lowest + int(j);
      if (e >= prec) break;
      r.c[size_t(e - low)] = a.K.add(r.c[size_t(e - low)], a.K.mul(a.c[i], b.c[j]));
    }
  }
  return r.normalize();
}

inline LSeries ls_mul_tpow(const LSeries& a, int e) {
  LSeries r = a;
  r.lowest += e;
  r.prec += e;
  return r;
}

// Invert a series whose leading coefficient is an exactly-known unit.
inline LSeries ls_inv(const LSeries& a0) {
  LSeries a = a0;
  a.normalize();
  if (a.K.is_zero(a.c[0]) || !a.K.is_unit(a.c[0]))
    throw std::domain_error("series inversion needs a unit leading coefficient");
  int n = a.prec - a.lowest; // number of known coefficients
  // write a = c0 t^low (1 + u), invert the unit part by recursion
  auto c0inv = a.K.inv(a.c[0]);
  std::vector<FqElem> u(a.c.size());
  for (size_t i = 0; i < a.c.size(); i++) u[i] = a.K.mul(a.c[i], c0inv); // u[0] = 1
  std::vector<FqElem> inv(u.size(), a.K.zero());
  inv[0] = a.K.one();
  for (int k = 1; k < n; k++) {
    // coefficient k of (1+u')*inv = 0
    FqElem s = a.K.zero();
    for (int j = 0; j < k; j++) s = a.K.add(s, a.K.mul(u[size_t(k - j)], inv[size_t(j)]));
    inv[size_t(k)] = a.K.neg(s);
  }
  LSeries r(a.K, -a.lowest, -a.lowest + n);
  for (int i = 0; i < n; i++) r.c[size_t(i)] = a.K.mul(inv[size_t(i)], c0inv);
  return r;
}

// Coefficient-wise inverse Frobenius (p-th root); perfect fields only.
inline LSeries ls_coeff_proot(const LSeries& a) {
  if (a.K.kind() != RingKind::PrimeField && a.K.kind() != RingKind::ExtensionField)
    throw std::domain_error("coefficient p-th roots require a perfect field");
  LSeries r = a;
  for (auto& v : r.c) v = a.K.frobenius(v, -1);
  return r;
}

// Substitute: a(g(t)) for g with strictly positive valuation.
inline LSeries ls_substitute(const LSeries& a, const LSeries& g) {
  if (!(a.K == g.K)) throw std::invalid_argument("series ring mismatch");
  LSeries gn = g;
  gn.normalize();
  int v = gn.val_or_prec();
  if (v < 1) throw std::domain_error("substitution needs positive valuation argument");
  if (a.lowest < 0) {
    // split off the principal part via inversion of g-powers
    LSeries princ = LSeries::zero(a.K, a.prec);
    LSeries ginv = ls_inv(gn);
    LSeries gpow = LSeries::constant(a.K, a.K.one(), a.prec - a.lowest * v);
    for (int e = -1; e >= a.lowest; e--) {
      gpow = ls_mul(gpow, ginv);
      if (!a.K.is_zero(a.coeff(e))) princ = ls_add(princ, ls_scale(gpow, a.coeff(e)));
    }
    LSeries tail(a.K, 0, a.prec);
    for (int e = 0; e < a.prec; e++) tail.c[size_t(e)] = a.coeff(e);
    return ls_add(princ, ls_substitute(tail, g));
  }
  // Horner on the nonnegative part
  LSeries r = LSeries::zero(a.K, a.prec);
  for (int e = a.prec - 1; e >= a.lowest; e--) {
    r = ls_mul(r, gn);
    if (!a.K.is_zero(a.coeff(e)))
      r = ls_add(r, LSeries::constant(a.K, a.coeff(e), r.prec));
  }
  return r;
}

// Formal derivative d/dt.
inline LSeries ls_derivative(const LSeries& a) {
  LSeries r(a.K, a.lowest - 1, a.prec - 1);
  for (int e = a.lowest; e < a.prec; e++)
    r.c[size_t(e - 1 - r.lowest)] = a.K.mul_int(a.coeff(e), e);
  return r.normalize();
}

// Square root of a series with unit square leading coefficient (odd p).
inline LSeries ls_sqrt(const LSeries& a0, const FqElem& root_of_lead) {
  // root_of_lead: a square root of the leading coefficient, supplied by the caller
  LSeries a = a0;
  a.normalize();
  int v = a.val_or_prec();
  if (v % 2 != 0) throw std::domain_error("series sqrt needs even valuation");
  const Fq& K = a.K;
  int n = a.prec - v;
  // a = c0 t^v (1 + u); sqrt(1+u) by Newton: s <- (s + (1+u)/s)/2
  auto c0 = a.c[0];
  auto c0inv = K.inv(c0);
  LSeries unit(K, 0, n);
  for (int i = 0; i < n; i++) unit.c[size_t(i)] = K.mul(a.coeff(v + i), c0inv);
  LSeries s = LSeries::constant(K, K.one(), n);
  auto half = K.inv(K.from_int(2));
  for (int it = 0; it < 2 * n + 2; it++) {
    LSeries next = ls_scale(ls_add(s, ls_mul(unit, ls_inv(s))), half);
    if (next.c == s.c && next.lowest == s.lowest) break;
    s = next;
  }
  LSeries r = ls_mul_tpow(ls_scale(s, root_of_lead), v / 2);
  return r;
}

} // namespace charp
