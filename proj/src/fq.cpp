#include "fq.hpp"

#include <algorithm>
#include <cassert>

namespace charp {

namespace {

bool is_prime(int64_t n) {
  if (n < 2) return false;
  for (int64_t d = 2; d * d <= n; d++)
    if (n % d == 0) return false;
  return true;
}

// Polynomial arithmetic mod p (int64 coefficient vectors, lowest first).
std::vector<int64_t> poly_mod_trim(std::vector<int64_t> a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
  return a;
}

std::vector<int64_t> poly_mul_modp(const std::vector<int64_t>& a,
                                   const std::vector<int64_t>& b, int64_t p) {
  if (a.empty() || b.empty()) return {};
  std::vector<int64_t> r(a.size() + b.size() - 1, 0);
  for (size_t i = 0; i < a.size(); i++)
    for (size_t j = 0; j < b.size(); j++) r[i + j] = (r[i + j] + a[i] * b[j]) % p;
  return poly_mod_trim(std::move(r));
}

std::vector<int64_t> poly_rem_modp(std::vector<int64_t> a,
                                   const std::vector<int64_t>& mod, int64_t p) {
  // mod monic
  while (a.size() >= mod.size() && !a.empty()) {
    int64_t lead = a.back() % p;
    size_t shift = a.size() - mod.size();
    for (size_t i = 0; i < mod.size(); i++) {
      a[shift + i] = ((a[shift + i] - lead * mod[i]) % p + p) % p;
    }
    a = poly_mod_trim(std::move(a));
  }
  return a;
}

std::vector<int64_t> poly_powmod_modp(std::vector<int64_t> base, int64_t e,
                                      const std::vector<int64_t>& mod, int64_t p) {
  std::vector<int64_t> result{1};
  base = poly_rem_modp(std::move(base), mod, p);
  while (e > 0) {
    if (e & 1) result = poly_rem_modp(poly_mul_modp(result, base, p), mod, p);
    base = poly_rem_modp(poly_mul_modp(base, base, p), mod, p);
    e >>= 1;
  }
  return result;
}

std::vector<int64_t> poly_gcd_modp(std::vector<int64_t> a, std::vector<int64_t> b,
                                   int64_t p) {
  a = poly_mod_trim(std::move(a));
  b = poly_mod_trim(std::move(b));
  while (!b.empty()) {
    a = poly_rem_modp(std::move(a), b, p);
    // make b monic for stable reduction
    std::swap(a, b);
    if (!b.empty()) {
      int64_t lb = b.back();
      // normalize b monic: multiply by lb^{-1}
      int64_t inv = 1, base = lb % p, e = p - 2;
      while (e > 0) {
        if (e & 1) inv = inv * base % p;
        base = base * base % p;
        e >>= 1;
      }
      for (auto& c : b) c = c * inv % p;
    }
  }
  return a;
}

bool poly_irreducible_modp(const std::vector<int64_t>& f, int64_t p) {
  int m = int(f.size()) - 1;
  if (m <= 0) return false;
  // x^{p^m} == x mod f
  std::vector<int64_t> x{0, 1};
  std::vector<int64_t> xp = x;
  for (int i = 0; i < m; i++) xp = poly_powmod_modp(xp, p, f, p);
  std::vector<int64_t> diff = xp;
  if (diff.size() < 2) diff.resize(2, 0);
  diff[1] = ((diff[1] - 1) % p + p) % p;
  if (!poly_mod_trim(diff).empty()) return false;
  // gcd(x^{p^{m/q}} - x, f) = 1 for prime divisors q of m
  for (int q = 2; q <= m; q++) {
    if (m % q != 0) continue;
    bool qprime = true;
    for (int d = 2; d * d <= q; d++)
      if (q % d == 0) qprime = false;
    if (!qprime) continue;
    std::vector<int64_t> xq = x;
    for (int i = 0; i < m / q; i++) xq = poly_powmod_modp(xq, p, f, p);
    std::vector<int64_t> diff2 = xq;
    if (diff2.size() < 2) diff2.resize(2, 0);
    diff2[1] = ((diff2[1] - 1) % p + p) % p;
    auto g = poly_gcd_modp(diff2, f, p);
    if (g.size() != 1) return false;
  }
  return true;
}

std::vector<int64_t> find_irreducible(int64_t p, int m) {
  // Deterministic sweep over monic polynomials x^m + c_{m-1}x^{m-1} + ... + c_0.
  std::vector<int64_t> c(m, 0);
  while (true) {
    std::vector<int64_t> f = c;
    f.push_back(1);
    if (poly_irreducible_modp(f, p)) return f;
    int i = 0;
    while (i < m && ++c[i] == p) c[i++] = 0;
    if (i == m) throw std::runtime_error("no irreducible polynomial found");
  }
}

} // namespace

Fq Fq::prime_field(int64_t p) {
  if (!is_prime(p) || p <= 2) throw std::invalid_argument("prime field needs odd prime p > 2");
  auto d = std::make_shared<Data>();
  d->kind = RingKind::PrimeField;
  d->p = p;
  d->m = 1;
  d->r = 1;
  d->deg = 1;
  d->pm = p;
  d->modulus = {0, 1};
  return Fq(std::move(d));
}

Fq Fq::extension_field(int64_t p, int m) {
  if (m == 1) return prime_field(p);
  return extension_field(p, m, find_irreducible(p, m));
}

Fq Fq::extension_field(int64_t p, int m, const std::vector<int64_t>& modulus) {
  if (!is_prime(p) || p <= 2) throw std::invalid_argument("extension field needs odd prime p > 2");
  if (int(modulus.size()) != m + 1 || modulus.back() != 1)
    throw std::invalid_argument("modulus must be monic of degree m");
  std::vector<int64_t> mm = modulus;
  for (auto& c : mm) c = ((c % p) + p) % p;
  if (!poly_irreducible_modp(mm, p)) throw std::invalid_argument("modulus is not irreducible mod p");
  auto d = std::make_shared<Data>();
  d->kind = RingKind::ExtensionField;
  d->p = p;
  d->m = 1;
  d->r = 1;
  d->deg = m;
  d->pm = p;
  d->modulus = std::move(mm);
  return Fq(std::move(d));
}

Fq Fq::padic_truncation(int64_t p, int m) {
  if (!is_prime(p) || p <= 2) throw std::invalid_argument("truncation ring needs odd prime p > 2");
  if (m < 1) throw std::invalid_argument("precision exponent must be >= 1");
  auto d = std::make_shared<Data>();
  d->kind = RingKind::PadicTruncation;
  d->p = p;
  d->m = m;
  d->r = 1;
  d->deg = 1;
  d->pm = ipow(p, m);
  d->modulus = {0, 1};
  return Fq(std::move(d));
}

Fq Fq::truncated_cyclotomic(int64_t p, int r, int m) {
  if (!is_prime(p) || p <= 2) throw std::invalid_argument("cyclotomic ring needs odd prime p > 2");
  if (r < 1 || m < 1) throw std::invalid_argument("need r >= 1, m >= 1");
  auto d = std::make_shared<Data>();
  d->kind = RingKind::TruncatedCyclotomic;
  d->p = p;
  d->m = m;
  d->r = r;
  d->pm = ipow(p, m);
  // Phi_{p^r}(x) = sum_{i=0}^{p-1} x^{i p^{r-1}}
  int64_t deg = ipow(p, r - 1) * (p - 1);
  d->deg = int(deg);
  d->modulus.assign(deg + 1, 0);
  for (int64_t i = 0; i < p; i++) d->modulus[i * ipow(p, r - 1)] = 1;
  return Fq(std::move(d));
}

bool Fq::operator==(const Fq& o) const {
  return d_->kind == o.d_->kind && d_->p == o.d_->p && d_->m == o.d_->m &&
         d_->r == o.d_->r && d_->modulus == o.d_->modulus;
}

FqElem Fq::from_int(int64_t n) const {
  FqElem e = zero();
  e.c[0] = red(n);
  return e;
}

FqElem Fq::from_coeffs(std::vector<int64_t> cs) const {
  for (auto& c : cs) c = red(c);
  reduce_poly(cs);
  cs.resize(d_->deg, 0);
  return FqElem{std::move(cs)};
}

FqElem Fq::gen() const {
  if (d_->deg == 1) {
    // x reduces modulo (x) to 0 for constant rings
    return zero();
  }
  FqElem e = zero();
  e.c[1] = 1;
  return e;
}

void Fq::reduce_poly(std::vector<int64_t>& cs) const {
  const auto& mod = d_->modulus;
  const int64_t pm = d_->pm;
  while (int(cs.size()) >= int(mod.size())) {
    int64_t lead = cs.back() % pm;
    size_t shift = cs.size() - mod.size();
    if (lead != 0) {
      for (size_t i = 0; i < mod.size(); i++)
        cs[shift + i] = ((cs[shift + i] - lead * mod[i]) % pm + pm) % pm;
    } else {
      cs.back() = 0;
    }
    while (!cs.empty() && int(cs.size()) > d_->deg && cs.back() == 0) cs.pop_back();
    if (!cs.empty() && int(cs.size()) >= int(mod.size()) && cs.back() == 0) cs.pop_back();
  }
}

bool Fq::is_zero(const FqElem& a) const {
  for (auto v : a.c)
    if (v != 0) return false;
  return true;
}

FqElem Fq::add(const FqElem& a, const FqElem& b) const {
  FqElem r = a;
  for (int i = 0; i < d_->deg; i++) r.c[i] = red(r.c[i] + b.c[i]);
  return r;
}

FqElem Fq::sub(const FqElem& a, const FqElem& b) const {
  FqElem r = a;
  for (int i = 0; i < d_->deg; i++) r.c[i] = red(r.c[i] - b.c[i]);
  return r;
}

FqElem Fq::neg(const FqElem& a) const {
  FqElem r = a;
  for (int i = 0; i < d_->deg; i++) r.c[i] = red(-r.c[i]);
  return r;
}

FqElem Fq::mul(const FqElem& a, const FqElem& b) const {
  if (d_->deg == 1) {
    FqElem r = zero();
    r.c[0] = a.c[0] * b.c[0] % d_->pm;
    return r;
  }
  std::vector<int64_t> prod(2 * d_->deg - 1, 0);
  for (int i = 0; i < d_->deg; i++) {
    if (a.c[i] == 0) continue;
    for (int j = 0; j < d_->deg; j++)
      prod[i + j] = (prod[i + j] + a.c[i] * b.c[j]) % d_->pm;
  }
  reduce_poly(prod);
  prod.resize(d_->deg, 0);
  return FqElem{std::move(prod)};
}

FqElem Fq::mul_int(const FqElem& a, int64_t n) const {
  FqElem r = a;
  n = red(n);
  for (int i = 0; i < d_->deg; i++) r.c[i] = r.c[i] * n % d_->pm;
  return r;
}

FqElem Fq::pow(const FqElem& a, int64_t e) const {
  if (e < 0) throw std::invalid_argument("pow: negative exponent; use inv first");
  FqElem result = one();
  FqElem base = a;
  while (e > 0) {
    if (e & 1) result = mul(result, base);
    base = mul(base, base);
    e >>= 1;
  }
  return result;
}

bool Fq::is_unit(const FqElem& a) const {
  switch (d_->kind) {
    case RingKind::PrimeField:
    case RingKind::ExtensionField:
      return !is_zero(a);
    case RingKind::PadicTruncation:
      return a.c[0] % d_->p != 0;
    case RingKind::TruncatedCyclotomic: {
      // local ring with residue map zeta -> 1, then mod p
      int64_t s = 0;
      for (auto v : a.c) s = (s + v) % d_->p;
      return s != 0;
    }
  }
  return false;
}

FqElem Fq::inv(const FqElem& a) const {
  if (!is_unit(a)) throw std::domain_error("inv: element is not a unit in " + describe());
  switch (d_->kind) {
    case RingKind::PrimeField:
      return pow(a, d_->p - 2);
    case RingKind::ExtensionField:
      return pow(a, ipow(d_->p, d_->deg) - 2);
    case RingKind::PadicTruncation: {
      // invert mod p, lift by Newton b <- b(2 - ab)
      int64_t b = 1, base = a.c[0] % d_->p, e = d_->p - 2;
      while (e > 0) {
        if (e & 1) b = b * base % d_->p;
        base = base * base % d_->p;
        e >>= 1;
      }
      FqElem bb = from_int(b);
      for (int it = 0; it < 2 * d_->m + 2; it++) {
        FqElem err = sub(one(), mul(a, bb));
        if (is_zero(err)) return bb;
        bb = mul(bb, add(one(), err));
      }
      throw std::runtime_error("inv: Newton iteration failed");
    }
    case RingKind::TruncatedCyclotomic: {
      int64_t s = 0;
      for (auto v : a.c) s = (s + v) % d_->p;
      int64_t b = 1, base = s, e = d_->p - 2;
      while (e > 0) {
        if (e & 1) b = b * base % d_->p;
        base = base * base % d_->p;
        e >>= 1;
      }
      FqElem bb = from_int(b);
      // maximal ideal is (p, zeta-1); nilpotency index <= deg * m + 1,
      // Newton doubles the error order each step
      for (int it = 0; it < 64; it++) {
        FqElem err = sub(one(), mul(a, bb));
        if (is_zero(err)) return bb;
        bb = mul(bb, add(one(), err));
      }
      throw std::runtime_error("inv: Newton iteration failed");
    }
  }
  throw std::logic_error("unreachable");
}

FqElem Fq::frobenius(const FqElem& a, int e) const {
  if (d_->kind != RingKind::ExtensionField || e == 0) return a;
  int m = d_->deg;
  int ee = ((e % m) + m) % m; // phi has order m
  if (ee == 0) return a;
  // phi^ee = x -> x^{p^ee}
  FqElem r = a;
  for (int i = 0; i < ee; i++) r = pow(r, d_->p);
  return r;
}

Fq Fq::residue_field() const {
  if (d_->kind == RingKind::ExtensionField || d_->kind == RingKind::PrimeField)
    return *this;
  return prime_field(d_->p);
}

FqElem Fq::reduce_to_residue(const FqElem& a) const {
  switch (d_->kind) {
    case RingKind::PrimeField:
    case RingKind::ExtensionField:
      return a;
    case RingKind::PadicTruncation:
      return FqElem{{a.c[0] % d_->p}};
    case RingKind::TruncatedCyclotomic: {
      int64_t s = 0;
      for (auto v : a.c) s = (s + v) % d_->p;
      return FqElem{{s}};
    }
  }
  throw std::logic_error("unreachable");
}

FqElem Fq::lift_from_residue(const FqElem& a) const {
  if (d_->kind == RingKind::PrimeField || d_->kind == RingKind::ExtensionField) return a;
  return from_int(a.c[0]);
}

std::string Fq::to_string(const FqElem& a) const {
  if (d_->deg == 1) return std::to_string(a.c[0]);
  std::string s = "[";
  for (int i = 0; i < d_->deg; i++) {
    if (i) s += ",";
    s += std::to_string(a.c[i]);
  }
  return s + "]";
}

std::string Fq::describe() const {
  switch (d_->kind) {
    case RingKind::PrimeField:
      return "F_" + std::to_string(d_->p);
    case RingKind::ExtensionField:
      return "F_" + std::to_string(d_->p) + "^" + std::to_string(d_->deg);
    case RingKind::PadicTruncation:
      return "Z/" + std::to_string(d_->p) + "^" + std::to_string(d_->m);
    case RingKind::TruncatedCyclotomic:
      return "Z[mu_" + std::to_string(d_->p) + "^" + std::to_string(d_->r) + "]/p^" +
             std::to_string(d_->m);
  }
  return "?";
}

int64_t Fq::card() const {
  int64_t c = 1;
  for (int i = 0; i < d_->deg; i++) c *= d_->pm;
  return c;
}

FqElem Fq::unrank(int64_t idx) const {
  FqElem e = zero();
  for (int i = 0; i < d_->deg; i++) {
    e.c[i] = idx % d_->pm;
    idx /= d_->pm;
  }
  return e;
}

} // namespace charp
