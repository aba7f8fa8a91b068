#include "ssenum.hpp"

#include "dims.hpp"
#include "fq.hpp"
#include "poly.hpp"

#include <gmpxx.h>

#include <stdexcept>

namespace charp {

namespace {

// number of points of exact order N on an elliptic curve over an algebraically
// closed field of characteristic p with p not dividing N
int64_t exact_order_count(int64_t N) {
  int64_t nu = N * N, n = N;
  for (int64_t q = 2; q * q <= n; q++)
    if (n % q == 0) {
      nu = nu / (q * q) * (q * q - 1);
      while (n % q == 0) n /= q;
    }
  if (n > 1) nu = nu / (n * n) * (n * n - 1);
  return nu;
}

} // namespace

SupersingularData supersingular_count(int64_t p, int64_t N) {
  if (p < 3) throw std::invalid_argument("supersingular enumeration needs p >= 3");
  if (N < 4 || N % p == 0) throw std::invalid_argument("need N >= 4 with p not dividing N");
  SupersingularData out;
  out.p = p;
  out.N = N;
  if (p == 3) {
    // char 3: the unique supersingular curve has j = 0 = 1728 and #Aut = 12
    int64_t nu3 = exact_order_count(N);
    out.ss_j_count = 1;
    out.mass_formula_ok = true; // 1/12 = (3-1)/24
    if (nu3 % 12 != 0) throw std::logic_error("level-structure count not divisible by #Aut");
    out.delta = nu3 / 12;
    out.dual_path_ok = true;
    return out;
  }

  Fq F = Fq::extension_field(p, 2);
  PolyOps<Fq> P(F);
  const int64_t q = p * p;

  // quadratic character table over F_{p^2}
  std::vector<int> chi(size_t(F.card()), -1);
  for (int64_t i = 1; i < F.card(); i++) {
    FqElem x = F.unrank(i);
    if (F.is_zero(x)) continue;
    FqElem sq = F.mul(x, x);
    int64_t idx = 0, mul = 1;
    for (auto c : sq.c) {
      idx += c * mul;
      mul *= F.pm();
    }
    chi[size_t(idx)] = 1;
  }
  chi[0] = 0;
  auto chi_of = [&](const FqElem& x) {
    int64_t idx = 0, mul = 1;
    for (auto c : x.c) {
      idx += c * mul;
      mul *= F.pm();
    }
    return chi[size_t(idx)];
  };

  auto is_supersingular_curve = [&](const FqPoly& f) {
    // #E(F_{p^2}) = q + 1 + sum_x chi(f(x)); supersingular iff trace = 0 mod p
    int64_t s = 0;
    for (int64_t i = 0; i < F.card(); i++) s += chi_of(P.eval(f, F.unrank(i)));
    int64_t trace = -s; // a = q + 1 - #E = -sum chi
    return trace % p == 0;
  };

  mpq_class mass(0);
  int64_t nu = exact_order_count(N);
  out.delta = 0;
  for (int64_t i = 0; i < F.card(); i++) {
    FqElem j = F.unrank(i);
    FqPoly f;
    int64_t aut;
    if (F.is_zero(j)) {
      f = {F.one(), F.zero(), F.zero(), F.one()}; // y^2 = x^3 + 1
      aut = 6;
    } else if (j == F.from_int(1728)) {
      f = {F.zero(), F.one(), F.zero(), F.one()}; // y^2 = x^3 + x
      aut = 4;
    } else {
      // c = j/(j - 1728), E_j: y^2 = x^3 - 3c x - 2c
      FqElem c = F.mul(j, F.inv(F.sub(j, F.from_int(1728))));
      f = {F.mul_int(c, -2), F.mul_int(c, -3), F.zero(), F.one()};
      aut = 2;
    }
    if (!is_supersingular_curve(f)) continue;
    out.ss_j_count++;
    mass += mpq_class(1, long(aut));
    if (nu % aut != 0) throw std::logic_error("level-structure count not divisible by #Aut");
    out.delta += nu / aut;
  }
  mpq_class expected_mass(long(p - 1), 24);
  expected_mass.canonicalize();
  out.mass_formula_ok = mass == expected_mass;
  // dual path: delta = nu (p-1)/24 via the mass formula
  mpq_class dual = mpq_class(long(nu)) * expected_mass;
  dual.canonicalize();
  out.dual_path_ok = dual.get_den() == 1 && out.delta == dual.get_num().get_si();
  if (!out.mass_formula_ok)
    throw std::logic_error("Eichler mass formula cross-check failed");
  return out;
}

int64_t gamma_prank_oracle(int64_t p, int64_t N) {
  auto inv = gamma1_invariants(N);
  if (inv.genus == 0) return 0;
  if (N == 11) {
    // X_1(11): y^2 + y = x^3 - x^2, i.e. v^2 = 4x^3 - 4x^2 + 1
    Fq F = Fq::prime_field(p);
    PolyOps<Fq> P(F);
    FqPoly f{F.one(), F.zero(), F.from_int(-4), F.from_int(4)};
    int64_t count = 1; // point at infinity
    for (int64_t i = 0; i < p; i++) {
      FqElem v = P.eval(f, F.from_int(i));
      if (F.is_zero(v)) {
        count += 1;
        continue;
      }
      bool sq = false;
      for (int64_t y = 0; y < p && !sq; y++) sq = F.mul(F.from_int(y), F.from_int(y)) == v;
      if (sq) count += 2;
    }
    int64_t trace = p + 1 - count;
    return trace % p != 0 ? 1 : 0;
  }
  throw std::invalid_argument("p-rank oracle implemented for genus-0 levels and N = 11");
}

} // namespace charp
