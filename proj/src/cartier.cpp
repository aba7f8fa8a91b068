#include "cartier.hpp"

#include "exact.hpp"

#include <algorithm>
#include <map>

namespace charp {

namespace {

// Decompose a polynomial as sum_i x^i q_i(x)^p for 0 <= i < p:
// q_i[k] = (coefficient of x^{kp+i})^{1/p}.
std::vector<FqPoly> pth_power_decompose(const Fq& K, const FqPoly& f) {
  int64_t p = K.p();
  std::vector<FqPoly> out(size_t(p), FqPoly{});
  for (size_t n = 0; n < f.size(); n++) {
    int64_t i = int64_t(n) % p, k = int64_t(n) / p;
    auto& q = out[size_t(i)];
    if (int64_t(q.size()) <= k) q.resize(size_t(k) + 1, K.zero());
    q[size_t(k)] = K.frobenius(f[n], -1);
  }
  PolyOps<Fq> P(K);
  for (auto& q : out) q = P.trim(std::move(q));
  return out;
}

FqPoly poly_lcm(const PolyOps<Fq>& P, const FqPoly& a, const FqPoly& b) {
  if (P.is_zero(a) || P.is_zero(b)) throw std::domain_error("lcm of zero polynomial");
  return P.monic(P.quo(P.mul(a, b), P.gcd(a, b)));
}

} // namespace

// ---------------------------------------------------------------------------
// Cartier operator, global algorithm
// ---------------------------------------------------------------------------

MeroDiff cartier_apply(const CurveModel& c, const MeroDiff& w) {
  const Fq& K = c.field();
  const RatOps& R = c.rat();
  PolyOps<Fq> P(K);
  const int64_t p = K.p();

  switch (c.kind()) {
    case CurveKind::ProjectiveLine: {
      // g = A B^{p-1} / B^p; decompose the numerator
      const RatF& g = w.fn.comp[0];
      if (R.is_zero(g)) return MeroDiff{c.zero_fn()};
      FqPoly N = P.mul(g.num, P.pow(g.den, p - 1));
      auto dec = pth_power_decompose(K, N);
      CurveFunc out = c.zero_fn();
      out.comp[0] = R.make(dec[size_t(p - 1)], g.den);
      return MeroDiff{out};
    }
    case CurveKind::Elliptic: {
      // g = a/c + (b/c) y with y = y^p f^{-(p-1)/2}:
      // g = [a c^{p-1} f^p + y^p b c^{p-1} f^{(p+1)/2}] / (c f)^p
      RatF a = w.fn.comp[0], b = w.fn.comp[1];
      FqPoly cden = poly_lcm(P, a.den, b.den);
      FqPoly an = P.mul(a.num, P.quo(cden, a.den));
      FqPoly bn = P.mul(b.num, P.quo(cden, b.den));
      const FqPoly& f = c.elliptic_f();
      FqPoly n0 = P.mul(an, P.mul(P.pow(cden, p - 1), P.pow(f, p)));
      FqPoly n1 = P.mul(bn, P.mul(P.pow(cden, p - 1), P.pow(f, (p + 1) / 2)));
      auto d0 = pth_power_decompose(K, n0);
      auto d1 = pth_power_decompose(K, n1);
      FqPoly den = P.mul(cden, f);
      CurveFunc out = c.zero_fn();
      out.comp[0] = R.make(d0[size_t(p - 1)], den);
      out.comp[1] = R.make(d1[size_t(p - 1)], den);
      return MeroDiff{out};
    }
    case CurveKind::ArtinSchreier: {
      // substitute y^j = (y^p - f)^j and collect y^{pl} R_l(x)
      const RatF& f = c.as_f();
      std::vector<RatF> Rl(size_t(p), R.zero());
      // binomials mod p
      std::vector<std::vector<int64_t>> binom(size_t(p), std::vector<int64_t>(size_t(p), 0));
      for (int64_t i = 0; i < p; i++) {
        binom[size_t(i)][0] = 1;
        for (int64_t j = 1; j <= i; j++)
          binom[size_t(i)][size_t(j)] =
              (binom[size_t(i - 1)][size_t(j - 1)] + binom[size_t(i - 1)][size_t(j)]) % p;
      }
      for (int64_t j = 0; j < p; j++) {
        const RatF& bj = w.fn.comp[size_t(j)];
        if (R.is_zero(bj)) continue;
        // (y^p - f)^j = sum_l binom(j,l) y^{pl} (-f)^{j-l}
        for (int64_t l = 0; l <= j; l++) {
          RatF term = R.scale(R.mul(bj, R.pow(R.neg(f), j - l)),
                              K.from_int(binom[size_t(j)][size_t(l)]));
          Rl[size_t(l)] = R.add(Rl[size_t(l)], term);
        }
      }
      CurveFunc out = c.zero_fn();
      for (int64_t l = 0; l < p; l++) {
        if (R.is_zero(Rl[size_t(l)])) continue;
        const RatF& r = Rl[size_t(l)];
        FqPoly N = P.mul(r.num, P.pow(r.den, p - 1));
        auto dec = pth_power_decompose(K, N);
        // contributes (y^l dec_{p-1}/den)^... : V picks the i = p-1 slice
        out.comp[size_t(l)] = R.add(out.comp[size_t(l)], R.make(dec[size_t(p - 1)], r.den));
      }
      return MeroDiff{out};
    }
  }
  throw std::logic_error("unreachable");
}

LSeries cartier_local(const LSeries& s) {
  const Fq& K = s.K;
  const int64_t p = K.p();
  // output exponent e is known iff pe + p - 1 < s.prec
  auto floordiv = [](int64_t a, int64_t b) {
    return (a >= 0) ? a / b : -((-a + b - 1) / b);
  };
  int out_low = int(floordiv(s.lowest + p - 1, p)) - 1;
  int out_prec = int(floordiv(s.prec - p + 1 + p - 1, p)); // ceil((prec-p+1)/p)
  if (out_prec <= out_low) out_prec = out_low + 1;
  LSeries out(K, out_low, out_prec);
  for (int n = s.lowest; n < s.prec; n++) {
    if (((n % p) + p) % p != p - 1) continue;
    int e = int(floordiv(n + 1, p)) - 1;
    if (e < out_low || e >= out_prec) continue;
    out.c[size_t(e - out_low)] = K.frobenius(s.coeff(n), -1);
  }
  return out.normalize();
}

// ---------------------------------------------------------------------------
// Residues and trace
// ---------------------------------------------------------------------------

MeroDiff trace_pushforward(const CurveModel& cover, const MeroDiff& w) {
  if (cover.kind() != CurveKind::ArtinSchreier)
    throw std::domain_error("trace_pushforward: artin-schreier covers only");
  // Tr(y^j) = 0 for j < p-1 and Tr(y^{p-1}) = -1, so rho_*(g dx) = -b_{p-1} dx
  CurveFunc out;
  out.comp.assign(1, cover.rat().neg(w.fn.comp[size_t(cover.field().p() - 1)]));
  return MeroDiff{out};
}

MeroDiff pullback_to_cover(const CurveModel& cover, const MeroDiff& w_base) {
  CurveFunc g = cover.zero_fn();
  g.comp[0] = w_base.fn.comp[0];
  return MeroDiff{g};
}

FqElem residue_at(const CurveModel& c, const MeroDiff& w, const Place& pl) {
  if (c.kind() == CurveKind::ArtinSchreier && pl.ramified) {
    // single point over the branch point: res_y(w) = res_x(rho_* w)
    MeroDiff tr = trace_pushforward(c, w);
    CurveModel line = CurveModel::projective_line(c.field());
    return residue_at(line, tr, Place{pl.base, false, std::nullopt});
  }
  LSeries s = c.expand_diff(w, pl, 2);
  if (-1 < s.lowest) return c.field().zero();
  return s.coeff(-1);
}

// ---------------------------------------------------------------------------
// Bases of H^0(Omega(D))
// ---------------------------------------------------------------------------

namespace {

struct Conditions {
  // linear conditions on ansatz coefficients, rows built incrementally
  const Fq& K;
  int ncols;
  std::vector<std::vector<FqElem>> rows;

  Conditions(const Fq& k, int n) : K(k), ncols(n) {}
  void add_row(std::vector<FqElem> r) { rows.push_back(std::move(r)); }

  std::vector<std::vector<FqElem>> kernel() const {
    Mat<Fq> m(K, std::max<int>(1, int(rows.size())), ncols);
    for (size_t i = 0; i < rows.size(); i++)
      for (int j = 0; j < ncols; j++) m.at(int(i), j) = rows[i][size_t(j)];
    return kernel_basis(m);
  }
};

// multiplicity of a place inside a divisor (0 when absent)
int mult_of(const DivisorData& d, const Place& pl) {
  for (const auto& [q, m] : d.places)
    if (q == pl) return m;
  return 0;
}

// expansion-based conditions: ord_pl(omega) >= -mult for every generator
void add_expansion_conditions(const CurveModel& c, const std::vector<MeroDiff>& gens,
                              const Place& pl, int mult, Conditions& cond) {
  std::vector<LSeries> exps;
  int low = 0;
  for (const auto& g : gens) {
    LSeries s = c.expand_diff(g, pl, 1);
    low = std::min(low, s.lowest);
    exps.push_back(std::move(s));
  }
  for (int e = low; e <= -mult - 1; e++) {
    std::vector<FqElem> row(gens.size(), c.field().zero());
    bool nonzero = false;
    for (size_t i = 0; i < gens.size(); i++) {
      if (e >= exps[i].prec) throw std::logic_error("insufficient expansion precision");
      row[i] = exps[i].coeff(e);
      nonzero = nonzero || !c.field().is_zero(row[i]);
    }
    if (nonzero) cond.add_row(std::move(row));
  }
}

std::vector<MeroDiff> assemble(const CurveModel& c, const std::vector<MeroDiff>& gens,
                               const std::vector<std::vector<FqElem>>& kernel) {
  std::vector<MeroDiff> out;
  for (const auto& v : kernel) {
    CurveFunc acc = c.zero_fn();
    for (size_t i = 0; i < gens.size(); i++)
      if (!c.field().is_zero(v[i])) acc = c.fn_add(acc, c.fn_scale(gens[i].fn, v[i]));
    out.push_back(MeroDiff{acc});
  }
  return out;
}

std::vector<MeroDiff> basis_p1(const CurveModel& c, const DivisorData& d) {
  const Fq& K = c.field();
  const RatOps& R = c.rat();
  PolyOps<Fq> P(K);
  // x^j dx / prod (x - x_i)^{m_i}, 0 <= j <= deg D - 2
  FqPoly den = P.one();
  int64_t m_inf = 0;
  for (const auto& [pl, m] : d.places) {
    if (m == 0) continue;
    if (pl.base.at_infinity)
      m_inf = m;
    else
      den = P.mul(den, P.pow(FqPoly{K.neg(pl.base.x0), K.one()}, m));
  }
  // ord at infinity of x^j dx / den is (deg den - j) - 2 >= -m_inf exactly when
  // j <= deg D - 2, so the monomial numerators below are the whole space
  int64_t degd = d.degree();
  (void)m_inf;
  std::vector<MeroDiff> out;
  for (int64_t j = 0; j + 2 <= degd; j++) {
    FqPoly num(size_t(j) + 1, K.zero());
    num[size_t(j)] = K.one();
    out.push_back(MeroDiff{c.from_rat(R.make(num, den))});
  }
  return out;
}

std::vector<MeroDiff> basis_elliptic(const CurveModel& c, const DivisorData& d) {
  const Fq& K = c.field();
  const RatOps& R = c.rat();
  PolyOps<Fq> P(K);
  if (d.degree() == 0) {
    // the invariant differential dx/(2y) = y/(2f) dx
    CurveFunc g = c.zero_fn();
    g.comp[1] = R.make({K.inv(K.from_int(2))}, c.elliptic_f());
    return {MeroDiff{g}};
  }
  // ansatz (A(x) + B(x) y) / (f(x) den(x)) dx
  std::map<int64_t, int> supp; // unrank(x0) -> max multiplicity
  int n_inf = 0;
  for (const auto& [pl, m] : d.places) {
    if (pl.base.at_infinity)
      n_inf = std::max(n_inf, m);
    else {
      // key by a canonical integer encoding of x0
      int64_t key = 0, mul = 1;
      for (auto cc : pl.base.x0.c) {
        key += cc * mul;
        mul *= K.pm();
      }
      supp[key] = std::max(supp[key], m);
    }
  }
  FqPoly den = P.one();
  std::vector<FqElem> supp_x;
  for (const auto& [key, m] : supp) {
    int64_t k = key;
    FqElem x0 = K.zero();
    for (int i = 0; i < K.degree(); i++) {
      x0.c[size_t(i)] = k % K.pm();
      k /= K.pm();
    }
    supp_x.push_back(x0);
    den = P.mul(den, P.pow(FqPoly{K.neg(x0), K.one()}, m));
  }
  FqPoly fullden = P.mul(den, c.elliptic_f());
  int degden = P.deg(den);
  int amax = (n_inf + 3 + 2 * degden) / 2 + 3;
  int bmax = (n_inf + 2 * degden) / 2 + 3;
  std::vector<MeroDiff> gens;
  for (int a = 0; a <= amax; a++) {
    FqPoly num(size_t(a) + 1, K.zero());
    num[size_t(a)] = K.one();
    CurveFunc g = c.zero_fn();
    g.comp[0] = R.make(num, fullden);
    gens.push_back(MeroDiff{g});
  }
  for (int b = 0; b <= bmax; b++) {
    FqPoly num(size_t(b) + 1, K.zero());
    num[size_t(b)] = K.one();
    CurveFunc g = c.zero_fn();
    g.comp[1] = R.make(num, fullden);
    gens.push_back(MeroDiff{g});
  }
  Conditions cond(K, int(gens.size()));
  // condition places: fibers over supp, over roots of f, and the origin
  std::vector<Place> check;
  for (const auto& x0 : supp_x)
    for (const auto& pl : c.fiber(XPoint::finite(x0))) check.push_back(pl);
  for (const auto& r : R.roots(c.elliptic_f())) {
    Place pl{XPoint::finite(r), true, K.zero()};
    bool seen = false;
    for (const auto& q : check) seen = seen || q == pl;
    if (!seen) check.push_back(pl);
  }
  check.push_back(Place{XPoint::infinity(), true, std::nullopt});
  for (const auto& pl : check) add_expansion_conditions(c, gens, pl, mult_of(d, pl), cond);
  return assemble(c, gens, cond.kernel());
}

std::vector<MeroDiff> basis_artin_schreier(const CurveModel& c, const DivisorData& d) {
  const Fq& K = c.field();
  const RatOps& R = c.rat();
  PolyOps<Fq> P(K);
  const int64_t p = K.p();

  // requested pole bounds at ramified places (by branch x-point) and split places
  auto branch_mult = [&](const XPoint& x) {
    for (const auto& [pl, m] : d.places)
      if (pl.ramified && pl.base == x) return m;
    return 0;
  };

  // finite x-support of the ansatz denominators: branch points + split D-support
  struct XSupp {
    FqElem x0;
    bool branch;
    int m;     // pole order of f at branch points
    int dmult; // max divisor multiplicity at places over x0
  };
  std::vector<XSupp> xsupp;
  bool inf_branch = false;
  int inf_m = 0;
  for (const auto& [bx, m] : c.branch_points()) {
    if (bx.at_infinity) {
      inf_branch = true;
      inf_m = m;
    } else
      xsupp.push_back({bx.x0, true, m, branch_mult(bx)});
  }
  int inf_dmult = 0;
  for (const auto& [pl, m] : d.places) {
    if (pl.ramified) continue;
    if (pl.base.at_infinity) {
      inf_dmult = std::max(inf_dmult, m);
      continue;
    }
    bool found = false;
    for (auto& s : xsupp)
      if (s.x0 == pl.base.x0) {
        s.dmult = std::max(s.dmult, m);
        found = true;
      }
    if (!found) xsupp.push_back({pl.base.x0, false, 0, m});
  }
  if (inf_branch) inf_dmult = std::max(inf_dmult, branch_mult(XPoint::infinity()));

  auto ceildiv = [](int64_t a, int64_t b) {
    return (a >= 0) ? (a + b - 1) / b : -((-a) / b);
  };

  // per-power denominators and degree bounds
  std::vector<MeroDiff> gens;
  std::vector<std::tuple<int, int, int>> gen_index; // (j, a) bookkeeping, unused downstream
  for (int64_t j = 0; j < p; j++) {
    FqPoly den = P.one();
    for (const auto& s : xsupp) {
      int cap;
      if (s.branch) {
        // p*ord - j*m + (p-1)(m+1) >= -dmult  =>  ord >= ceil((j*m - (p-1)(m+1) - dmult)/p)
        int64_t t = ceildiv(j * s.m - (p - 1) * (s.m + 1) - s.dmult, p);
        cap = int(std::max<int64_t>(0, -t));
      } else {
        cap = s.dmult;
      }
      if (cap > 0) den = P.mul(den, P.pow(FqPoly{K.neg(s.x0), K.one()}, cap));
    }
    int degden = P.deg(den);
    int64_t degcap;
    if (inf_branch) {
      // ord_inf(b_j) >= ceil((j*m_inf - (p-1)(m_inf+1) + 2p - dmult_inf)/p)
      int64_t t = ceildiv(j * inf_m - (p - 1) * (inf_m + 1) + 2 * p - inf_dmult, p);
      degcap = degden - t;
    } else {
      degcap = degden + inf_dmult - 2;
    }
    degcap += 1; // safety margin; conditions cut the excess
    for (int64_t a = 0; a <= degcap; a++) {
      FqPoly num(size_t(a) + 1, K.zero());
      num[size_t(a)] = K.one();
      CurveFunc g = c.zero_fn();
      g.comp[size_t(j)] = R.make(num, den);
      gens.push_back(MeroDiff{g});
      gen_index.push_back({int(j), int(a), 0});
    }
  }

  Conditions cond(K, int(gens.size()));
  // ramified places: exact valuation conditions, one y-power at a time
  for (const auto& s : xsupp) {
    if (!s.branch) continue;
    for (int64_t j = 0; j < p; j++) {
      int64_t t = ceildiv(j * s.m - (p - 1) * (s.m + 1) - s.dmult, p);
      // coefficients of (x-x0)^k in b_j for k < t must vanish
      std::vector<LSeries> exps;
      int low = 0;
      for (const auto& g : gens) {
        const RatF& bj = g.fn.comp[size_t(j)];
        LSeries e = R.is_zero(bj) ? LSeries::zero(K, 2) : R.expand_at(bj, s.x0, int(t) + 1);
        low = std::min(low, e.lowest);
        exps.push_back(std::move(e));
      }
      for (int e = low; e < int(t); e++) {
        std::vector<FqElem> row(gens.size(), K.zero());
        bool nz = false;
        for (size_t i = 0; i < gens.size(); i++) {
          FqElem v = (e < exps[i].prec) ? exps[i].coeff(e) : K.zero();
          row[i] = v;
          nz = nz || !K.is_zero(v);
        }
        if (nz) cond.add_row(std::move(row));
      }
    }
  }
  if (inf_branch) {
    for (int64_t j = 0; j < p; j++) {
      int64_t t = ceildiv(j * inf_m - (p - 1) * (inf_m + 1) + 2 * p - inf_dmult, p);
      std::vector<LSeries> exps;
      int low = 0;
      for (const auto& g : gens) {
        const RatF& bj = g.fn.comp[size_t(j)];
        LSeries e = R.is_zero(bj) ? LSeries::zero(K, 2) : R.expand_at_infinity(bj, int(t) + 1);
        low = std::min(low, e.lowest);
        exps.push_back(std::move(e));
      }
      for (int e = low; e < int(t); e++) {
        std::vector<FqElem> row(gens.size(), K.zero());
        bool nz = false;
        for (size_t i = 0; i < gens.size(); i++) {
          FqElem v = (e < exps[i].prec) ? exps[i].coeff(e) : K.zero();
          row[i] = v;
          nz = nz || !K.is_zero(v);
        }
        if (nz) cond.add_row(std::move(row));
      }
    }
  }
  // split places: over split D-support and over infinity when not a branch point
  std::vector<XPoint> split_xs;
  for (const auto& s : xsupp)
    if (!s.branch) split_xs.push_back(XPoint::finite(s.x0));
  if (!inf_branch) split_xs.push_back(XPoint::infinity());
  for (const auto& x : split_xs) {
    auto fib = c.fiber(x);
    if (fib.empty())
      throw std::domain_error("artin-schreier basis: inert fiber in the divisor support");
    for (const auto& pl : fib) add_expansion_conditions(c, gens, pl, mult_of(d, pl), cond);
  }

  return assemble(c, gens, cond.kernel());
}

} // namespace

std::vector<MeroDiff> differentials_with_poles_basis(const CurveModel& c, const DivisorData& d) {
  for (const auto& [pl, m] : d.places) {
    if (m < 0) throw std::invalid_argument("divisor must be effective");
    if (c.kind() == CurveKind::ArtinSchreier && pl.ramified && !c.ramified_over(pl.base))
      throw std::invalid_argument("divisor marks a ramified place over a non-branch point");
  }
  std::vector<MeroDiff> basis;
  switch (c.kind()) {
    case CurveKind::ProjectiveLine: basis = basis_p1(c, d); break;
    case CurveKind::Elliptic: basis = basis_elliptic(c, d); break;
    case CurveKind::ArtinSchreier: basis = basis_artin_schreier(c, d); break;
  }
  // Riemann-Roch dimension check on the supported families
  int64_t g = c.genus(), deg = d.degree();
  int64_t expect = (deg >= 1) ? g - 1 + deg : g;
  if (int64_t(basis.size()) != expect)
    throw std::logic_error("differential space dimension " + std::to_string(basis.size()) +
                           " does not match Riemann-Roch " + std::to_string(expect));
  return basis;
}

std::optional<std::vector<FqElem>> express_in_basis(const CurveModel& c,
                                                    const std::vector<MeroDiff>& basis,
                                                    const MeroDiff& w) {
  const Fq& K = c.field();
  const RatOps& R = c.rat();
  PolyOps<Fq> P(K);
  int nc = c.ydeg();
  // common denominator per y-power
  std::vector<FqPoly> den(size_t(nc), P.one());
  for (int j = 0; j < nc; j++) {
    for (const auto& b : basis)
      if (!R.is_zero(b.fn.comp[size_t(j)])) den[size_t(j)] = poly_lcm(P, den[size_t(j)], b.fn.comp[size_t(j)].den);
    if (!R.is_zero(w.fn.comp[size_t(j)]))
      den[size_t(j)] = poly_lcm(P, den[size_t(j)], w.fn.comp[size_t(j)].den);
  }
  // numerator coefficient vectors over the common denominators
  auto coords = [&](const MeroDiff& m) {
    std::vector<FqPoly> nums(size_t(nc), FqPoly{});
    for (int j = 0; j < nc; j++) {
      const RatF& r = m.fn.comp[size_t(j)];
      nums[size_t(j)] = R.is_zero(r) ? FqPoly{} : P.mul(r.num, P.quo(den[size_t(j)], r.den));
    }
    return nums;
  };
  std::vector<size_t> width(size_t(nc), 0);
  std::vector<std::vector<FqPoly>> bnums;
  for (const auto& b : basis) bnums.push_back(coords(b));
  auto wnums = coords(w);
  for (int j = 0; j < nc; j++) {
    for (const auto& bn : bnums) width[size_t(j)] = std::max(width[size_t(j)], bn[size_t(j)].size());
    width[size_t(j)] = std::max(width[size_t(j)], wnums[size_t(j)].size());
  }
  size_t rows = 0;
  for (int j = 0; j < nc; j++) rows += width[size_t(j)];
  Mat<Fq> M(K, int(rows), int(basis.size()));
  std::vector<FqElem> target(rows, K.zero());
  size_t off = 0;
  for (int j = 0; j < nc; j++) {
    for (size_t k = 0; k < width[size_t(j)]; k++) {
      for (size_t i = 0; i < basis.size(); i++)
        if (k < bnums[i][size_t(j)].size()) M.at(int(off + k), int(i)) = bnums[i][size_t(j)][k];
      if (k < wnums[size_t(j)].size()) target[off + k] = wnums[size_t(j)][k];
    }
    off += width[size_t(j)];
  }
  return solve(M, target);
}

Mat<Fq> cartier_matrix(const CurveModel& c, const std::vector<MeroDiff>& basis) {
  const Fq& K = c.field();
  Mat<Fq> m(K, int(basis.size()), int(basis.size()));
  for (size_t j = 0; j < basis.size(); j++) {
    MeroDiff v = cartier_apply(c, basis[j]);
    auto coords = express_in_basis(c, basis, v);
    if (!coords) throw std::domain_error("cartier image leaves the given span");
    for (size_t i = 0; i < basis.size(); i++) m.at(int(i), int(j)) = (*coords)[i];
  }
  return m;
}

HasseWittResult hasse_witt(const CurveModel& c) {
  DivisorData d0;
  auto basis = differentials_with_poles_basis(c, d0);
  if (basis.empty()) return {Mat<Fq>(c.field(), 0, 0), 0, {}};
  Mat<Fq> vm = cartier_matrix(c, basis);
  SemilinearOp V(c.field(), vm, -1);
  auto fit = fitting_decompose(V);
  return {vm, int64_t(fit.ordinary_basis.size()), basis};
}

bool pole_improvement_check(const CurveModel& c, const DivisorData& d, int n) {
  const int64_t p = c.field().p();
  DivisorData nd, target;
  for (const auto& [pl, m] : d.places) {
    nd.places.push_back({pl, m * n});
    target.places.push_back({pl, int((int64_t(m) * n + p - 1) / p)});
  }
  auto big = differentials_with_poles_basis(c, nd);
  auto small = differentials_with_poles_basis(c, target);
  for (const auto& w : big) {
    MeroDiff vw = cartier_apply(c, w);
    if (c.fn_is_zero(vw.fn)) continue;
    if (!express_in_basis(c, small, vw)) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Nakajima
// ---------------------------------------------------------------------------

namespace {

// ordinary part of V on the span of basis: returns coordinates of an ordinary
// basis in the given differential basis
std::vector<std::vector<FqElem>> ordinary_part(const CurveModel& c,
                                               const std::vector<MeroDiff>& basis) {
  Mat<Fq> vm = cartier_matrix(c, basis);
  SemilinearOp V(c.field(), vm, -1);
  return fitting_decompose(V).ordinary_basis;
}

} // namespace

NakajimaResult nakajima_check(const CurveModel& cover) {
  if (cover.kind() != CurveKind::ArtinSchreier)
    throw std::domain_error("nakajima_check: artin-schreier covers only");
  const Fq& K = cover.field();
  NakajimaResult res;
  int64_t s = int64_t(cover.branch_points().size());
  res.expected_rank = s - 1; // gamma(P^1) - 1 + deg D_red = s - 1

  DivisorData dred;
  for (const auto& [x, m] : cover.branch_points())
    dred.places.push_back({Place{x, true, std::nullopt}, 1});

  auto basis = differentials_with_poles_basis(cover, dred);
  Mat<Fq> vm = cartier_matrix(cover, basis);
  SemilinearOp V(K, vm, -1);
  auto fit = fitting_decompose(V);
  res.ordinary_dim = int64_t(fit.ordinary_basis.size());

  // the deck transformation y -> y + 1 on the ordinary part
  Mat<Fq> sigma(K, int(basis.size()), int(basis.size()));
  for (size_t j = 0; j < basis.size(); j++) {
    MeroDiff moved{cover.fn_shift_y(basis[j].fn, K.one())};
    auto coords = express_in_basis(cover, basis, moved);
    if (!coords) throw std::logic_error("deck transformation leaves the differential space");
    for (size_t i = 0; i < basis.size(); i++) sigma.at(int(i), int(j)) = (*coords)[i];
  }
  // restrict sigma to the ordinary span
  if (!fit.ordinary_basis.empty()) {
    Mat<Fq> O = columns_to_matrix(K, int(basis.size()), fit.ordinary_basis);
    Mat<Fq> SO(K, int(fit.ordinary_basis.size()), int(fit.ordinary_basis.size()));
    for (size_t j = 0; j < fit.ordinary_basis.size(); j++) {
      auto img = sigma.apply(fit.ordinary_basis[j]);
      auto coords = solve(O, img);
      if (!coords) throw std::logic_error("ordinary part not stable under the deck action");
      for (size_t i = 0; i < fit.ordinary_basis.size(); i++) SO.at(int(i), int(j)) = (*coords)[i];
    }
    GroupRingModule gm(K, CyclicPLevel{K.p(), 2}, SO);
    auto fr = is_free_of_rank(gm);
    res.free = fr.free;
    res.rank = fr.rank ? *fr.rank : -1;
  } else {
    res.free = true; // the zero module is free of rank 0
    res.rank = 0;
  }

  // independence of n: compare the ordinary parts inside H^0(Omega(p D_red))
  DivisorData dp;
  for (const auto& [pl, m] : dred.places) dp.places.push_back({pl, int(K.p())});
  auto basis_p = differentials_with_poles_basis(cover, dp);
  auto ord_p = ordinary_part(cover, basis_p);
  res.independent_of_n = int64_t(ord_p.size()) == res.ordinary_dim;
  if (res.independent_of_n && !fit.ordinary_basis.empty()) {
    // each ordinary differential of the small space must lie in the big ordinary span
    Mat<Fq> OP = ord_p.empty() ? Mat<Fq>(K, int(basis_p.size()), 0)
                               : columns_to_matrix(K, int(basis_p.size()), ord_p);
    for (const auto& ov : fit.ordinary_basis) {
      CurveFunc acc = cover.zero_fn();
      for (size_t i = 0; i < basis.size(); i++)
        if (!K.is_zero(ov[i])) acc = cover.fn_add(acc, cover.fn_scale(basis[i].fn, ov[i]));
      auto coords = express_in_basis(cover, basis_p, MeroDiff{acc});
      if (!coords || !solve(OP, *coords)) res.independent_of_n = false;
    }
  }

  res.gamma_cover = hasse_witt(cover).gamma;
  return res;
}

// ---------------------------------------------------------------------------
// Rosenlicht sections
// ---------------------------------------------------------------------------

RosenlichtSections rosenlicht_sections_simple(const CrossedUnion& u) {
  if (u.components.empty()) return {};
  const Fq& K = u.components[0].field();
  for (const auto& c : u.components)
    if (!(c.field() == K)) throw std::invalid_argument("components over different fields");
  for (const auto& cr : u.crossings) {
    if (cr.size() != u.components.size())
      throw std::invalid_argument("each crossing needs one place per component");
  }
  // distinctness of the identified places on each component
  for (size_t i = 0; i < u.components.size(); i++)
    for (size_t a = 0; a < u.crossings.size(); a++)
      for (size_t b = a + 1; b < u.crossings.size(); b++)
        if (u.crossings[a][i] == u.crossings[b][i])
          throw std::invalid_argument("crossing places must be distinct on each component");

  // per component: differentials with at worst simple poles at its crossing places
  std::vector<std::vector<MeroDiff>> comp_basis;
  for (size_t i = 0; i < u.components.size(); i++) {
    DivisorData d;
    for (const auto& cr : u.crossings) d.places.push_back({cr[i], 1});
    comp_basis.push_back(differentials_with_poles_basis(u.components[i], d));
  }
  // residue-sum conditions at each crossing
  size_t total = 0;
  std::vector<size_t> offset;
  for (const auto& b : comp_basis) {
    offset.push_back(total);
    total += b.size();
  }
  Mat<Fq> condm(K, int(u.crossings.size()), int(total));
  for (size_t a = 0; a < u.crossings.size(); a++)
    for (size_t i = 0; i < u.components.size(); i++)
      for (size_t k = 0; k < comp_basis[i].size(); k++)
        condm.at(int(a), int(offset[i] + k)) =
            residue_at(u.components[i], comp_basis[i][k], u.crossings[a][i]);
  auto ker = kernel_basis(condm);
  RosenlichtSections out;
  for (const auto& v : ker) {
    std::vector<MeroDiff> tup;
    for (size_t i = 0; i < u.components.size(); i++) {
      CurveFunc acc = u.components[i].zero_fn();
      for (size_t k = 0; k < comp_basis[i].size(); k++)
        if (!K.is_zero(v[offset[i] + k]))
          acc = u.components[i].fn_add(acc,
                                       u.components[i].fn_scale(comp_basis[i][k].fn, v[offset[i] + k]));
      tup.push_back(MeroDiff{acc});
    }
    out.basis.push_back(std::move(tup));
  }
  out.dimension = int64_t(out.basis.size());
  return out;
}

} // namespace charp
