#pragma once

#include "curve.hpp"
#include "group_ring.hpp"
#include "semilinear.hpp"

#include <vector>

namespace charp {

// Effective divisor on a curve: places with nonnegative multiplicities.
struct DivisorData {
  std::vector<std::pair<Place, int>> places;

  int64_t degree() const {
    int64_t d = 0;
    for (const auto& [pl, m] : places) d += m;
    return d;
  }
};

// ---------------------------------------------------------------------------
// The Cartier operator
// ---------------------------------------------------------------------------

// Global evaluation: write g = sum_i x^i h_i^p modulo the curve relation and
// return h_{p-1} dx.  The local expansion formula
//   V(sum a_n t^n dt) = sum_{n = -1 mod p} a_n^{1/p} t^{(n+1)/p - 1} dt
// is the ground truth; cartier_local below implements it as the oracle.
MeroDiff cartier_apply(const CurveModel& c, const MeroDiff& w);

// The local formula applied to a dt-coefficient series.
LSeries cartier_local(const LSeries& s);

// residue at a place: the t^{-1} coefficient of the local expansion; at
// totally ramified Artin-Schreier places this is computed through the trace
// (res_x(rho_* w), the Tate residue formula).
FqElem residue_at(const CurveModel& c, const MeroDiff& w, const Place& pl);

// trace of a differential along the Artin-Schreier covering map to P^1:
// rho_*(sum b_j y^j dx) = Tr(g) dx = -b_{p-1} dx.
MeroDiff trace_pushforward(const CurveModel& cover, const MeroDiff& w);
// pullback of a P^1 differential to the cover
MeroDiff pullback_to_cover(const CurveModel& cover, const MeroDiff& w_base);

// ---------------------------------------------------------------------------
// Spaces of differentials
// ---------------------------------------------------------------------------

// Basis of H^0(X, Omega^1(D)) = differentials with divisor >= -D, computed by
// exact linear conditions at places.  Supported:
//  - projective line: any effective divisor
//  - elliptic: D = 0 (the invariant differential) or divisors supported on
//    rational places
//  - artin-schreier: divisors supported on ramified places and split places
std::vector<MeroDiff> differentials_with_poles_basis(const CurveModel& c, const DivisorData& d);

// Coordinates of w in the span of basis (all over the same curve); nullopt if
// w is not in the span.
std::optional<std::vector<FqElem>> express_in_basis(const CurveModel& c,
                                                    const std::vector<MeroDiff>& basis,
                                                    const MeroDiff& w);

// Matrix of the Cartier operator on the span of basis (requires V-stability).
Mat<Fq> cartier_matrix(const CurveModel& c, const std::vector<MeroDiff>& basis);

// hasse_witt: the matrix of V on holomorphic differentials together with the
// Hasse-Witt invariant gamma = dim of the V-ordinary part.
struct HasseWittResult {
  Mat<Fq> v_matrix;
  int64_t gamma;
  std::vector<MeroDiff> basis;
};
HasseWittResult hasse_witt(const CurveModel& c);

// V maps H^0(Omega(nD)) into H^0(Omega(ceil(n/p) D)); checked on a basis.
bool pole_improvement_check(const CurveModel& c, const DivisorData& d, int n);

// ---------------------------------------------------------------------------
// Equivariant Deuring-Shafarevich (Nakajima) check
// ---------------------------------------------------------------------------

struct NakajimaResult {
  bool free = false;
  int64_t rank = -1;          // expected: gamma_base - 1 + #branch points
  int64_t expected_rank = -1;
  int64_t ordinary_dim = -1;  // should be rank * p
  bool independent_of_n = false; // H^0(Omega(D_red)) vs H^0(Omega(p D_red)) ordinary parts agree
  int64_t gamma_cover = -1;   // Hasse-Witt invariant of the cover
};

NakajimaResult nakajima_check(const CurveModel& cover);

// ---------------------------------------------------------------------------
// Rosenlicht sections on crossed unions
// ---------------------------------------------------------------------------

struct CrossedUnion {
  std::vector<CurveModel> components;
  // each crossing identifies one place on every component
  std::vector<std::vector<Place>> crossings;
};

struct RosenlichtSections {
  // basis vectors: per element, one differential per component
  std::vector<std::vector<MeroDiff>> basis;
  int64_t dimension = 0;
};

// Sections of the dualizing sheaf with at worst simple poles at the crossings:
// tuples, holomorphic outside the crossings, with total residue zero at each
// crossing.
RosenlichtSections rosenlicht_sections_simple(const CrossedUnion& u);

} // namespace charp
