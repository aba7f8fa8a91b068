#include "curve.hpp"

#include <algorithm>

namespace charp {

// ---------------------------------------------------------------------------
// RatOps
// ---------------------------------------------------------------------------

RatF RatOps::make(FqPoly n, FqPoly d) const {
  n = P.trim(std::move(n));
  d = P.trim(std::move(d));
  if (d.empty()) throw std::domain_error("rational function with zero denominator");
  if (n.empty()) return RatF{{}, P.one()};
  FqPoly g = P.gcd(n, d);
  if (P.deg(g) > 0) {
    n = P.quo(n, g);
    d = P.quo(d, g);
  }
  // monic denominator
  FqElem lead = d.back();
  if (!(lead == K.one())) {
    FqElem li = K.inv(lead);
    n = P.scale(n, li);
    d = P.scale(d, li);
  }
  return RatF{std::move(n), std::move(d)};
}

bool RatOps::equal(const RatF& a, const RatF& b) const {
  return P.sub(P.mul(a.num, b.den), P.mul(b.num, a.den)).empty();
}

RatF RatOps::add(const RatF& a, const RatF& b) const {
  return make(P.add(P.mul(a.num, b.den), P.mul(b.num, a.den)), P.mul(a.den, b.den));
}

RatF RatOps::sub(const RatF& a, const RatF& b) const { return add(a, neg(b)); }

RatF RatOps::mul(const RatF& a, const RatF& b) const {
  return make(P.mul(a.num, b.num), P.mul(a.den, b.den));
}

RatF RatOps::inv(const RatF& a) const {
  if (is_zero(a)) throw std::domain_error("inverting zero rational function");
  return make(a.den, a.num);
}

RatF RatOps::pow(const RatF& a, int64_t e) const {
  if (e < 0) return pow(inv(a), -e);
  RatF r = one(), base = a;
  while (e > 0) {
    if (e & 1) r = mul(r, base);
    base = mul(base, base);
    e >>= 1;
  }
  return r;
}

int RatOps::ord_at(const RatF& a, const FqElem& x0) const {
  if (is_zero(a)) throw std::domain_error("ord of zero function");
  return P.ord_at(a.num, x0) - P.ord_at(a.den, x0);
}

int RatOps::ord_at_infinity(const RatF& a) const {
  if (is_zero(a)) throw std::domain_error("ord of zero function");
  return P.deg(a.den) - P.deg(a.num);
}

std::optional<FqElem> RatOps::eval(const RatF& a, const FqElem& x0) const {
  FqElem d = P.eval(a.den, x0);
  if (K.is_zero(d)) return std::nullopt;
  return K.mul(P.eval(a.num, x0), K.inv(d));
}

LSeries RatOps::expand_at(const RatF& a, const FqElem& x0, int prec) const {
  // substitute x = x0 + t into num/den
  FqPoly n = P.shift_arg(a.num, x0);
  FqPoly d = P.shift_arg(a.den, x0);
  int slack = P.deg(a.den) + 2;
  int wp = prec + slack + 2 * std::max(0, P.ord_at(a.den, x0));
  LSeries ns(K, 0, wp), ds(K, 0, wp);
  for (size_t i = 0; i < n.size() && int(i) < wp; i++) ns.c[i] = n[i];
  for (size_t i = 0; i < d.size() && int(i) < wp; i++) ds.c[i] = d[i];
  ns.normalize();
  ds.normalize();
  if (ns.known_zero()) return LSeries::zero(K, prec);
  return ls_mul(ns, ls_inv(ds));
}

LSeries RatOps::expand_at_infinity(const RatF& a, int prec) const {
  // substitute x = 1/t: num(1/t) = t^{-deg n} * rev(n)(t)
  int dn = P.deg(a.num), dd = P.deg(a.den);
  if (dn < 0) return LSeries::zero(K, prec);
  int wp = prec + dd + dn + 4;
  auto rev = [&](const FqPoly& f, int deg) {
    LSeries s(K, 0, wp);
    for (int i = 0; i <= deg; i++) s.c[size_t(i)] = f[size_t(deg - i)];
    return s;
  };
  LSeries ns = ls_mul_tpow(rev(a.num, dn), -dn);
  LSeries ds = ls_mul_tpow(rev(a.den, dd), -dd);
  ns.normalize();
  ds.normalize();
  return ls_mul(ns, ls_inv(ds));
}

std::vector<FqElem> RatOps::roots(const FqPoly& f) const {
  std::vector<FqElem> out;
  if (P.is_zero(f)) throw std::domain_error("roots of zero polynomial");
  for (int64_t i = 0; i < K.card(); i++) {
    FqElem v = K.unrank(i);
    if (K.is_zero(P.eval(f, v))) out.push_back(v);
  }
  return out;
}

// ---------------------------------------------------------------------------
// CurveModel construction
// ---------------------------------------------------------------------------

CurveModel CurveModel::projective_line(const Fq& K) {
  return CurveModel(CurveKind::ProjectiveLine, K);
}

CurveModel CurveModel::elliptic(const Fq& K, FqElem a2, FqElem a4, FqElem a6) {
  CurveModel c(CurveKind::Elliptic, K);
  c.ef_ = {a6, a4, a2, K.one()};
  // discriminant of the cubic x^3 + a2 x^2 + a4 x + a6 (nonzero iff E smooth, p > 2):
  // disc = 18 a2 a4 a6 - 4 a2^3 a6 + a2^2 a4^2 - 4 a4^3 - 27 a6^2
  const Fq& F = K;
  FqElem d = F.zero();
  d = F.add(d, F.mul_int(F.mul(F.mul(a2, a4), a6), 18));
  d = F.sub(d, F.mul_int(F.mul(F.pow(a2, 3), a6), 4));
  d = F.add(d, F.mul(F.pow(a2, 2), F.pow(a4, 2)));
  d = F.sub(d, F.mul_int(F.pow(a4, 3), 4));
  d = F.sub(d, F.mul_int(F.pow(a6, 2), 27));
  if (F.is_zero(d)) throw std::invalid_argument("elliptic model has zero discriminant");
  return c;
}

CurveModel CurveModel::artin_schreier(const Fq& K, RatF f) {
  CurveModel c(CurveKind::ArtinSchreier, K);
  RatOps R(K);
  f = R.make(f.num, f.den);
  if (R.is_zero(f)) throw std::invalid_argument("artin-schreier cover needs nonzero f");
  // branch points: poles of f, with orders; all orders must be coprime to p
  PolyOps<Fq> P(K);
  FqPoly den = f.den;
  auto rts = R.roots(den);
  // the denominator must split over K so that every branch point is rational
  int64_t root_mult = 0;
  for (const auto& r : rts) root_mult += P.ord_at(den, r);
  if (root_mult != P.deg(den))
    throw std::invalid_argument("artin-schreier: denominator must split over the base field");
  // distinct finite poles
  std::vector<FqElem> seen;
  for (const auto& r : rts) {
    bool dup = false;
    for (const auto& s : seen) dup = dup || s == r;
    if (dup) continue;
    seen.push_back(r);
    int m = P.ord_at(den, r) - P.ord_at(f.num, r);
    if (m <= 0) continue;
    if (m % K.p() == 0)
      throw std::invalid_argument("artin-schreier: pole order divisible by p (f not reduced)");
    c.branch_.push_back({XPoint::finite(r), m});
  }
  int m_inf = -R.ord_at_infinity(f);
  if (m_inf > 0) {
    if (m_inf % K.p() == 0)
      throw std::invalid_argument("artin-schreier: pole order at infinity divisible by p");
    c.branch_.push_back({XPoint::infinity(), m_inf});
  }
  if (c.branch_.empty())
    throw std::invalid_argument("artin-schreier cover must be ramified (f needs a pole)");
  c.asf_ = std::move(f);
  return c;
}

int CurveModel::ydeg() const {
  switch (kind_) {
    case CurveKind::ProjectiveLine: return 1;
    case CurveKind::Elliptic: return 2;
    case CurveKind::ArtinSchreier: return int(K_.p());
  }
  return 1;
}

int64_t CurveModel::genus() const {
  switch (kind_) {
    case CurveKind::ProjectiveLine: return 0;
    case CurveKind::Elliptic: return 1;
    case CurveKind::ArtinSchreier: {
      // 2g - 2 = p(2*0 - 2) + sum over branch points of (p-1)(m+1)
      int64_t p = K_.p();
      int64_t s = -2 * p;
      for (const auto& [x, m] : branch_) s += (p - 1) * (m + 1);
      return (s + 2) / 2;
    }
  }
  return 0;
}

// ---------------------------------------------------------------------------
// Function arithmetic
// ---------------------------------------------------------------------------

CurveFunc CurveModel::zero_fn() const {
  CurveFunc g;
  g.comp.assign(size_t(ydeg()), R_.zero());
  return g;
}

CurveFunc CurveModel::one_fn() const {
  CurveFunc g = zero_fn();
  g.comp[0] = R_.one();
  return g;
}

CurveFunc CurveModel::from_rat(RatF r) const {
  CurveFunc g = zero_fn();
  g.comp[0] = std::move(r);
  return g;
}

CurveFunc CurveModel::y_fn() const {
  if (ydeg() < 2) throw std::domain_error("projective line has no y coordinate");
  CurveFunc g = zero_fn();
  g.comp[1] = R_.one();
  return g;
}

bool CurveModel::fn_is_zero(const CurveFunc& g) const {
  for (const auto& c : g.comp)
    if (!R_.is_zero(c)) return false;
  return true;
}

bool CurveModel::fn_equal(const CurveFunc& a, const CurveFunc& b) const {
  return fn_is_zero(fn_sub(a, b));
}

CurveFunc CurveModel::fn_add(const CurveFunc& a, const CurveFunc& b) const {
  CurveFunc g = zero_fn();
  for (size_t j = 0; j < g.comp.size(); j++) g.comp[j] = R_.add(a.comp[j], b.comp[j]);
  return g;
}

CurveFunc CurveModel::fn_sub(const CurveFunc& a, const CurveFunc& b) const {
  CurveFunc g = zero_fn();
  for (size_t j = 0; j < g.comp.size(); j++) g.comp[j] = R_.sub(a.comp[j], b.comp[j]);
  return g;
}

void CurveModel::reduce_fn(CurveFunc& g) const {
  // reduce y-powers >= ydeg using the curve relation
  size_t d = size_t(ydeg());
  while (g.comp.size() > d) {
    RatF top = g.comp.back();
    g.comp.pop_back();
    size_t k = g.comp.size(); // reducing y^k, k >= d
    if (R_.is_zero(top)) continue;
    if (kind_ == CurveKind::Elliptic) {
      // y^k = y^{k-2} * f(x)
      RatF f = R_.from_poly(ef_);
      g.comp[k - 2] = R_.add(g.comp[k - 2], R_.mul(top, f));
    } else if (kind_ == CurveKind::ArtinSchreier) {
      // y^k = y^{k-p} (y + f)
      g.comp[k - int(K_.p()) + 1] = R_.add(g.comp[k - size_t(K_.p()) + 1], top);
      g.comp[k - size_t(K_.p())] = R_.add(g.comp[k - size_t(K_.p())], R_.mul(top, asf_));
    } else {
      throw std::logic_error("unexpected y power on P^1");
    }
  }
}

CurveFunc CurveModel::fn_mul(const CurveFunc& a, const CurveFunc& b) const {
  CurveFunc g;
  g.comp.assign(a.comp.size() + b.comp.size() - 1, R_.zero());
  for (size_t i = 0; i < a.comp.size(); i++) {
    if (R_.is_zero(a.comp[i])) continue;
    for (size_t j = 0; j < b.comp.size(); j++)
      g.comp[i + j] = R_.add(g.comp[i + j], R_.mul(a.comp[i], b.comp[j]));
  }
  reduce_fn(g);
  return g;
}

CurveFunc CurveModel::fn_scale(const CurveFunc& a, const FqElem& c) const {
  CurveFunc g = a;
  for (auto& r : g.comp) r = R_.scale(r, c);
  return g;
}

CurveFunc CurveModel::fn_scale_rat(const CurveFunc& a, const RatF& r) const {
  CurveFunc g = a;
  for (auto& c : g.comp) c = R_.mul(c, r);
  return g;
}

CurveFunc CurveModel::fn_shift_y(const CurveFunc& a, const FqElem& c) const {
  if (kind_ != CurveKind::ArtinSchreier)
    throw std::domain_error("deck transformation only on artin-schreier covers");
  // y -> y + c: expand (y + c)^j by binomials
  CurveFunc g = zero_fn();
  // binomial coefficients mod p via Pascal
  int n = ydeg();
  std::vector<std::vector<int64_t>> binom(size_t(n), std::vector<int64_t>(size_t(n), 0));
  for (int i = 0; i < n; i++) {
    binom[size_t(i)][0] = 1;
    for (int j = 1; j <= i; j++)
      binom[size_t(i)][size_t(j)] =
          (binom[size_t(i - 1)][size_t(j - 1)] + binom[size_t(i - 1)][size_t(j)]) % K_.p();
  }
  for (int j = 0; j < n; j++) {
    if (R_.is_zero(a.comp[size_t(j)])) continue;
    FqElem cpow = K_.one();
    for (int l = j; l >= 0; l--) {
      // coefficient of y^l in (y+c)^j: binom(j,l) c^{j-l}
      FqElem coef = K_.mul_int(cpow, binom[size_t(j)][size_t(l)]);
      g.comp[size_t(l)] = R_.add(g.comp[size_t(l)], R_.scale(a.comp[size_t(j)], coef));
      cpow = K_.mul(cpow, c);
    }
  }
  return g;
}

// ---------------------------------------------------------------------------
// Places
// ---------------------------------------------------------------------------

bool CurveModel::ramified_over(const XPoint& x) const {
  if (kind_ == CurveKind::ArtinSchreier) {
    for (const auto& [b, m] : branch_)
      if (b == x) return true;
    return false;
  }
  if (kind_ == CurveKind::Elliptic) {
    if (x.at_infinity) return true;
    PolyOps<Fq> P(K_);
    return K_.is_zero(P.eval(ef_, x.x0));
  }
  return false;
}

std::vector<Place> CurveModel::fiber(const XPoint& x) const {
  std::vector<Place> out;
  switch (kind_) {
    case CurveKind::ProjectiveLine:
      out.push_back(Place{x, false, std::nullopt});
      break;
    case CurveKind::Elliptic: {
      if (x.at_infinity) {
        out.push_back(Place{x, true, std::nullopt});
        break;
      }
      PolyOps<Fq> P(K_);
      FqElem c = P.eval(ef_, x.x0);
      if (K_.is_zero(c)) {
        out.push_back(Place{x, true, K_.zero()});
        break;
      }
      for (int64_t i = 0; i < K_.card(); i++) {
        FqElem y0 = K_.unrank(i);
        if (K_.mul(y0, y0) == c) out.push_back(Place{x, false, y0});
      }
      break;
    }
    case CurveKind::ArtinSchreier: {
      if (ramified_over(x)) {
        out.push_back(Place{x, true, std::nullopt});
        break;
      }
      FqElem c;
      if (x.at_infinity) {
        int o = R_.ord_at_infinity(asf_);
        if (o > 0)
          c = K_.zero();
        else {
          // o == 0: ratio of leading coefficients
          PolyOps<Fq> P(K_);
          c = K_.mul(asf_.num.back(), K_.inv(asf_.den.back()));
        }
      } else {
        auto v = R_.eval(asf_, x.x0);
        if (!v) throw std::logic_error("fiber: unexpected pole");
        c = *v;
      }
      for (int64_t i = 0; i < K_.card(); i++) {
        FqElem y0 = K_.unrank(i);
        if (K_.sub(K_.pow(y0, K_.p()), y0) == c) out.push_back(Place{x, false, y0});
      }
      break;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Charts and expansions
// ---------------------------------------------------------------------------

CurveModel::LocalChart CurveModel::chart_at(const Place& pl, int prec) const {
  const Fq& F = K_;
  switch (kind_) {
    case CurveKind::ProjectiveLine: {
      if (pl.base.at_infinity) {
        // x = 1/t, dx = -t^{-2} dt
        LSeries x = LSeries::monomial(F, -1, prec);
        LSeries dxdt = ls_scale(LSeries::monomial(F, -2, prec), F.from_int(-1));
        return {x, std::nullopt, dxdt};
      }
      LSeries x(F, 0, prec);
      x.c[0] = pl.base.x0;
      if (prec > 1) x.c[1] = F.one();
      return {x, std::nullopt, LSeries::constant(F, F.one(), prec)};
    }
    case CurveKind::Elliptic: {
      PolyOps<Fq> P(F);
      if (pl.base.at_infinity) {
        // u = 1/x satisfies u = t^2 (1 + a2 u + a4 u^2 + a6 u^3)
        int wp = prec + 8;
        LSeries u = LSeries::zero(F, wp);
        FqElem a2 = ef_[2], a4 = ef_[1], a6 = ef_[0];
        for (int it = 0; it < wp + 2; it++) {
          LSeries rhs = LSeries::constant(F, F.one(), wp);
          rhs = ls_add(rhs, ls_scale(u, a2));
          rhs = ls_add(rhs, ls_scale(ls_mul(u, u), a4));
          rhs = ls_add(rhs, ls_scale(ls_mul(ls_mul(u, u), u), a6));
          LSeries nu = ls_mul(LSeries::monomial(F, 2, wp), rhs);
          if (nu.c == u.c && nu.lowest == u.lowest) break;
          u = nu;
        }
        LSeries x = ls_inv(u);
        LSeries y = ls_mul(x, ls_inv(LSeries::monomial(F, 1, wp))); // y = x / t
        LSeries dxdt = ls_neg(ls_mul(ls_derivative(u), ls_mul(ls_inv(u), ls_inv(u))));
        return {x, y, dxdt};
      }
      FqElem x0 = pl.base.x0;
      if (!pl.y0) throw std::invalid_argument("elliptic affine place needs a y-coordinate");
      FqElem y0 = *pl.y0;
      if (!F.is_zero(y0)) {
        // t = x - x0; y = sqrt(f(x0 + t)) with constant term y0
        int wp = prec + 4;
        LSeries fx(F, 0, wp);
        FqPoly sh = P.shift_arg(ef_, x0);
        for (size_t i = 0; i < sh.size() && int(i) < wp; i++) fx.c[i] = sh[i];
        LSeries y = ls_sqrt(fx, y0);
        LSeries x(F, 0, wp);
        x.c[0] = x0;
        x.c[1] = F.one();
        return {x, y, LSeries::constant(F, F.one(), wp)};
      }
      // 2-torsion point: t = y, x = x0 + s(t), f(x0 + s) = t^2
      int wp = prec + 8;
      FqPoly sh = P.shift_arg(ef_, x0); // sh(s) = f(x0 + s), sh(0) = 0, sh'(0) != 0
      FqElem d1 = sh[1];
      if (F.is_zero(d1)) throw std::logic_error("singular elliptic point");
      FqElem d1i = F.inv(d1);
      LSeries s = LSeries::zero(F, wp);
      for (int it = 0; it < wp + 2; it++) {
        // s <- (t^2 - sum_{i>=2} sh[i] s^i) / sh[1]
        LSeries hs = LSeries::zero(F, wp);
        LSeries spow = ls_mul(s, s);
        for (size_t i = 2; i < sh.size(); i++) {
          if (!F.is_zero(sh[i])) hs = ls_add(hs, ls_scale(spow, sh[i]));
          if (i + 1 < sh.size()) spow = ls_mul(spow, s);
        }
        LSeries ns = ls_scale(ls_sub(LSeries::monomial(F, 2, wp), hs), d1i);
        if (ns.c == s.c && ns.lowest == s.lowest) break;
        s = ns;
      }
      LSeries x = ls_add(LSeries::constant(F, x0, wp), s);
      LSeries y = LSeries::monomial(F, 1, wp);
      return {x, y, ls_derivative(s)};
    }
    case CurveKind::ArtinSchreier: {
      if (pl.ramified)
        throw std::domain_error("no chart at totally ramified artin-schreier places");
      if (!pl.y0) throw std::invalid_argument("artin-schreier place needs a y-coordinate");
      int wp = prec + 4;
      LSeries x(F, 0, wp);
      LSeries dxdt(F, 0, wp);
      LSeries c(F, 0, wp);
      if (pl.base.at_infinity) {
        x = LSeries::monomial(F, -1, wp);
        dxdt = ls_scale(LSeries::monomial(F, -2, wp), F.from_int(-1));
        c = R_.expand_at_infinity(asf_, wp);
      } else {
        x.c[0] = pl.base.x0;
        x.c[1] = F.one();
        dxdt = LSeries::constant(F, F.one(), wp);
        c = R_.expand_at(asf_, pl.base.x0, wp);
      }
      // solve y^p - y = c by y <- y + (y^p - y - c), starting at y0
      LSeries y = LSeries::constant(F, *pl.y0, wp);
      for (int it = 0; it < wp + 2; it++) {
        LSeries ypow = y;
        for (int64_t k = 1; k < F.p(); k++) ypow = ls_mul(ypow, y);
        LSeries err = ls_sub(ls_sub(ypow, y), c);
        if (err.known_zero()) break;
        y = ls_add(y, err);
      }
      return {x, y, dxdt};
    }
  }
  throw std::logic_error("unreachable");
}

LSeries CurveModel::expand_fn(const CurveFunc& g, const Place& pl, int prec) const {
  // generous working precision: rational parts can lose precision on inversion
  int extra = 4;
  for (const auto& c : g.comp) {
    PolyOps<Fq> P(K_);
    extra += std::max(0, P.deg(c.den)) + std::max(0, P.deg(c.num)) / 2;
  }
  int wp = prec + 2 * extra + 16;
  auto chart = chart_at(pl, wp);
  LSeries acc = LSeries::zero(K_, wp);
  LSeries ypow = LSeries::constant(K_, K_.one(), wp);
  for (size_t j = 0; j < g.comp.size(); j++) {
    if (!R_.is_zero(g.comp[j])) {
      // evaluate the rational function at the x-series
      const RatF& r = g.comp[j];
      PolyOps<Fq> P(K_);
      auto eval_poly = [&](const FqPoly& f) {
        LSeries s = LSeries::zero(K_, wp);
        for (size_t i = f.size(); i-- > 0;) {
          s = ls_mul(s, chart.x);
          if (!K_.is_zero(f[i])) s = ls_add(s, LSeries::constant(K_, f[i], s.prec));
        }
        return s;
      };
      LSeries ns = eval_poly(r.num);
      LSeries ds = eval_poly(r.den);
      LSeries val = ns.known_zero() ? LSeries::zero(K_, wp) : ls_mul(ns, ls_inv(ds));
      acc = ls_add(acc, ls_mul(val, ypow));
    }
    if (j + 1 < g.comp.size()) {
      if (!chart.y) throw std::logic_error("y power on P^1 expansion");
      ypow = ls_mul(ypow, *chart.y);
    }
  }
  return acc;
}

LSeries CurveModel::expand_diff(const MeroDiff& w, const Place& pl, int prec) const {
  auto chart = chart_at(pl, prec + 8);
  LSeries g = expand_fn(w.fn, pl, prec + 8);
  return ls_mul(g, chart.dxdt);
}

int CurveModel::ramified_diff_valuation(const MeroDiff& w, const XPoint& x) const {
  if (kind_ != CurveKind::ArtinSchreier)
    throw std::domain_error("ramified valuation formula is for artin-schreier covers");
  int m = -1;
  for (const auto& [b, mm] : branch_)
    if (b == x) m = mm;
  if (m < 0) throw std::invalid_argument("not a branch point");
  int64_t p = K_.p();
  // v(dx) at the unique place over x
  int vdx = int((p - 1) * (m + 1)) + (x.at_infinity ? -2 * int(p) : 0);
  int best = INT32_MAX;
  for (size_t j = 0; j < w.fn.comp.size(); j++) {
    const RatF& b = w.fn.comp[j];
    if (R_.is_zero(b)) continue;
    int ordb = x.at_infinity ? R_.ord_at_infinity(b) : R_.ord_at(b, x.x0);
    // v(b_j y^j) = p ord(b_j) - j m; distinct j are distinct mod p, no cancellation
    best = std::min(best, int(p) * ordb - int(j) * m);
  }
  if (best == INT32_MAX) return INT32_MAX; // zero differential
  return best + vdx;
}

} // namespace charp
