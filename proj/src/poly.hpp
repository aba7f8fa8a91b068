#pragma once

#include <stdexcept>
#include <vector>

namespace charp {

// Dense univariate polynomial over a ring descriptor R, lowest degree first.
// A "Poly" is just the coefficient vector; the ring travels alongside, the
// same way matrices work in linalg.hpp.
template <class R>
struct PolyOps {
  using Elem = typename R::Elem;
  using P = std::vector<Elem>;
  R K;

  explicit PolyOps(R ring) : K(std::move(ring)) {}

  P zero() const { return {}; }
  P one() const { return {K.one()}; }
  P x() const { return {K.zero(), K.one()}; }
  P constant(const Elem& c) const { return K.is_zero(c) ? P{} : P{c}; }

  P trim(P a) const {
    while (!a.empty() && K.is_zero(a.back())) a.pop_back();
    return a;
  }
  int deg(const P& a) const { return int(a.size()) - 1; } // deg(0) = -1
  bool is_zero(const P& a) const { return trim(a).empty(); }
  Elem lead(const P& a) const {
    P t = trim(a);
    if (t.empty()) throw std::domain_error("lead of zero polynomial");
    return t.back();
  }

  P add(const P& a, const P& b) const {
    P r = a;
    if (b.size() > r.size()) r.resize(b.size(), K.zero());
    for (size_t i = 0; i < b.size(); i++) r[i] = K.add(r[i], b[i]);
    return trim(std::move(r));
  }
  P sub(const P& a, const P& b) const {
    P r = a;
    if (b.size() > r.size()) r.resize(b.size(), K.zero());
    for (size_t i = 0; i < b.size(); i++) r[i] = K.sub(r[i], b[i]);
    return trim(std::move(r));
  }
  P neg(const P& a) const {
    P r = a;
    for (auto& c : r) c = K.neg(c);
    return r;
  }
  P mul(const P& a, const P& b) const {
    if (a.empty() || b.empty()) return {};
    P r(a.size() + b.size() - 1, K.zero());
    for (size_t i = 0; i < a.size(); i++) {
      if (K.is_zero(a[i])) continue;
      for (size_t j = 0; j < b.size(); j++)
        r[i + j] = K.add(r[i + j], K.mul(a[i], b[j]));
    }
    return trim(std::move(r));
  }
  P scale(const P& a, const Elem& s) const {
    P r = a;
    for (auto& c : r) c = K.mul(c, s);
    return trim(std::move(r));
  }
  P pow(P base, int64_t e) const {
    P r = one();
    while (e > 0) {
      if (e & 1) r = mul(r, base);
      base = mul(base, base);
      e >>= 1;
    }
    return r;
  }

  // Euclidean division; divisor must have unit leading coefficient.
  std::pair<P, P> divmod(const P& a, const P& b) const {
    P r = trim(a);
    P d = trim(b);
    if (d.empty()) throw std::domain_error("division by zero polynomial");
    auto linv = K.inv(d.back());
    P q(r.size() > d.size() - 1 ? r.size() - d.size() + 1 : 0, K.zero());
    while (r.size() >= d.size()) {
      auto f = K.mul(r.back(), linv);
      size_t shift = r.size() - d.size();
      q[shift] = f;
      for (size_t i = 0; i < d.size(); i++)
        r[shift + i] = K.sub(r[shift + i], K.mul(f, d[i]));
      r = trim(std::move(r));
      if (r.size() < d.size()) break;
    }
    return {trim(std::move(q)), std::move(r)};
  }
  P quo(const P& a, const P& b) const { return divmod(a, b).first; }
  P rem(const P& a, const P& b) const { return divmod(a, b).second; }

  P monic(const P& a) const {
    P t = trim(a);
    if (t.empty()) return t;
    return scale(t, K.inv(t.back()));
  }

  P gcd(P a, P b) const {
    a = trim(std::move(a));
    b = trim(std::move(b));
    while (!b.empty()) {
      P r = rem(a, b);
      a = std::move(b);
      b = std::move(r);
    }
    return monic(a);
  }

  Elem eval(const P& a, const Elem& x) const {
    Elem r = K.zero();
    for (size_t i = a.size(); i-- > 0;) r = K.add(K.mul(r, x), a[i]);
    return r;
  }

  P derivative(const P& a) const {
    if (a.size() <= 1) return {};
    P r(a.size() - 1, K.zero());
    for (size_t i = 1; i < a.size(); i++) r[i - 1] = K.mul_int(a[i], int64_t(i));
    return trim(std::move(r));
  }

  // a(x + c)
  P shift_arg(const P& a, const Elem& c) const {
    P r = zero();
    P base = {c, K.one()};
    P pw = one();
    for (size_t i = 0; i < a.size(); i++) {
      r = add(r, scale(pw, a[i]));
      if (i + 1 < a.size()) pw = mul(pw, base);
    }
    return r;
  }

  // substitute a(b(x))
  P compose(const P& a, const P& b) const {
    P r = zero();
    for (size_t i = a.size(); i-- > 0;) {
      r = mul(r, b);
      r = add(r, constant(a[i]));
    }
    return r;
  }

  int ord_at(const P& a, const Elem& root) const {
    // multiplicity of (x - root) in a; a must be nonzero
    P t = trim(a);
    if (t.empty()) throw std::domain_error("ord of zero polynomial");
    P lin = {K.neg(root), K.one()};
    int k = 0;
    while (true) {
      auto [q, r] = divmod(t, lin);
      if (!is_zero(r)) return k;
      t = q;
      k++;
      if (t.empty()) return k;
    }
  }
};

} // namespace charp
