#pragma once

#include "fq.hpp"
#include "poly.hpp"
#include "series.hpp"

#include <optional>
#include <vector>

namespace charp {

// Rational function over F_q, kept reduced with monic denominator.
struct RatF {
  FqPoly num, den;
};

struct RatOps {
  Fq K;
  PolyOps<Fq> P;

  explicit RatOps(Fq ring) : K(ring), P(ring) {}

  RatF make(FqPoly n, FqPoly d) const;
  RatF from_poly(FqPoly n) const { return RatF{P.trim(std::move(n)), P.one()}; }
  RatF zero() const { return RatF{{}, P.one()}; }
  RatF one() const { return RatF{P.one(), P.one()}; }
  bool is_zero(const RatF& a) const { return a.num.empty(); }
  bool equal(const RatF& a, const RatF& b) const;

  RatF add(const RatF& a, const RatF& b) const;
  RatF sub(const RatF& a, const RatF& b) const;
  RatF neg(const RatF& a) const { return RatF{P.neg(a.num), a.den}; }
  RatF mul(const RatF& a, const RatF& b) const;
  RatF inv(const RatF& a) const;
  RatF scale(const RatF& a, const FqElem& c) const { return RatF{P.scale(a.num, c), a.den}; }
  RatF pow(const RatF& a, int64_t e) const;

  // order of vanishing at x = x0 (negative at poles)
  int ord_at(const RatF& a, const FqElem& x0) const;
  // order of vanishing at infinity: deg den - deg num
  int ord_at_infinity(const RatF& a) const;

  std::optional<FqElem> eval(const RatF& a, const FqElem& x0) const; // nullopt at poles

  // Laurent expansion at x = x0 (in t = x - x0) or at infinity (in t = 1/x)
  LSeries expand_at(const RatF& a, const FqElem& x0, int prec) const;
  LSeries expand_at_infinity(const RatF& a, int prec) const;

  // all roots of a polynomial in F_q (brute force; desk-scale fields)
  std::vector<FqElem> roots(const FqPoly& f) const;
};

// A point of the projective x-line: finite x0 or infinity.
struct XPoint {
  bool at_infinity = false;
  FqElem x0;

  static XPoint infinity() { return XPoint{true, FqElem{}}; }
  static XPoint finite(FqElem v) { return XPoint{false, std::move(v)}; }
  bool operator==(const XPoint& o) const {
    return at_infinity == o.at_infinity && (at_infinity || x0 == o.x0);
  }
};

// Function on a curve: sum_j comp[j](x) y^j with j < y-degree of the model.
struct CurveFunc {
  std::vector<RatF> comp;
};

// omega = fn . dx
struct MeroDiff {
  CurveFunc fn;
};

enum class CurveKind { ProjectiveLine, Elliptic, ArtinSchreier };

// A closed point on the curve, always of residue degree one over the chosen
// base field (extension-field places are handled by constructing the curve
// over the larger field to begin with).
struct Place {
  XPoint base;              // image on the x-line
  bool ramified = false;    // totally ramified over base (Artin-Schreier branch, elliptic 2-torsion/origin handled separately)
  std::optional<FqElem> y0; // the y-coordinate for split/unramified places

  bool operator==(const Place& o) const {
    return base == o.base && ramified == o.ramified && y0 == o.y0;
  }
};

class CurveModel {
public:
  // the projective line over K
  static CurveModel projective_line(const Fq& K);
  // y^2 = x^3 + a2 x^2 + a4 x + a6 (p > 2), nonzero discriminant
  static CurveModel elliptic(const Fq& K, FqElem a2, FqElem a4, FqElem a6);
  // y^p - y = f(x), f with poles of order coprime to p (reduced form)
  static CurveModel artin_schreier(const Fq& K, RatF f);

  CurveKind kind() const { return kind_; }
  const Fq& field() const { return K_; }
  int ydeg() const;
  int64_t genus() const;

  const FqPoly& elliptic_f() const { return ef_; } // ydeg 2: y^2 = ef_(x)
  const RatF& as_f() const { return asf_; }        // ydeg p: y^p - y = asf_

  // branch data for Artin-Schreier covers: (x-point, pole order of f)
  const std::vector<std::pair<XPoint, int>>& branch_points() const { return branch_; }

  // --- function arithmetic modulo the curve relation ---
  CurveFunc zero_fn() const;
  CurveFunc one_fn() const;
  CurveFunc from_rat(RatF r) const;
  CurveFunc y_fn() const;
  bool fn_is_zero(const CurveFunc& g) const;
  bool fn_equal(const CurveFunc& a, const CurveFunc& b) const;
  CurveFunc fn_add(const CurveFunc& a, const CurveFunc& b) const;
  CurveFunc fn_sub(const CurveFunc& a, const CurveFunc& b) const;
  CurveFunc fn_mul(const CurveFunc& a, const CurveFunc& b) const;
  CurveFunc fn_scale(const CurveFunc& a, const FqElem& c) const;
  CurveFunc fn_scale_rat(const CurveFunc& a, const RatF& r) const;
  // Artin-Schreier deck transformation y -> y + c (c in F_p as a ring element)
  CurveFunc fn_shift_y(const CurveFunc& a, const FqElem& c) const;

  // --- places ---
  // all places of the curve lying over an x-point (empty when the fiber is
  // inert, i.e. has no degree-one point over K)
  std::vector<Place> fiber(const XPoint& x) const;
  // is this x-point an Artin-Schreier branch point (or elliptic ramified point)?
  bool ramified_over(const XPoint& x) const;

  // --- local expansions ---
  // parametrization (x(t), y(t), dx/dt) at a place; y-series absent for P^1
  struct LocalChart {
    LSeries x;
    std::optional<LSeries> y;
    LSeries dxdt;
  };
  // prec: number of known series coefficients past the leading exponent
  LocalChart chart_at(const Place& pl, int prec) const;

  // expansion of g(x, y) at a place (split/unramified places only)
  LSeries expand_fn(const CurveFunc& g, const Place& pl, int prec) const;
  // expansion of omega = g dx in the form (series) dt
  LSeries expand_diff(const MeroDiff& w, const Place& pl, int prec) const;

  // valuation of omega at a totally ramified Artin-Schreier place; exact,
  // computed from per-power valuations (no cancellation across y-powers)
  int ramified_diff_valuation(const MeroDiff& w, const XPoint& x) const;

  const RatOps& rat() const { return R_; }

private:
  CurveModel(CurveKind k, Fq K) : kind_(k), K_(K), R_(K) {}

  CurveKind kind_;
  Fq K_;
  RatOps R_;
  FqPoly ef_;
  RatF asf_;
  std::vector<std::pair<XPoint, int>> branch_;

  void reduce_fn(CurveFunc& g) const;
};

} // namespace charp
