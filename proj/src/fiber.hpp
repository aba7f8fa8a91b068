#pragma once

#include "group_ring.hpp"
#include "semilinear.hpp"
#include "tower.hpp"

#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace charp {

// Index of an irreducible component of the special fiber: a + b = r with
// u a unit modulo p^{min(a,b)} (trivial when min(a,b) = 0).
struct ComponentIndex {
  int a = 0, b = 0;
  int64_t u = 1;

  int level() const { return std::max(a, b); } // the component is Ig_{max(a,b)}
  int umod() const { return std::min(a, b); }  // u lives in (Z/p^umod)^x

  bool operator==(const ComponentIndex& o) const { return a == o.a && b == o.b && u == o.u; }
  bool operator<(const ComponentIndex& o) const {
    return std::tie(a, u) < std::tie(o.a, o.u);
  }
};

std::vector<ComponentIndex> list_components(int64_t p, int r);

// Linear model of the Igusa-tower carrier: one space per level 0..r with the
// operator algebra F_* (invertible on the modeled ordinary parts), trace and
// pullback maps between consecutive levels, diamond actions of (Z/p^s)^x and
// of (Z/N)^x, and optional residue functionals per supersingular marking.
class IgusaCarrier {
public:
  IgusaCarrier() : K(Fq::prime_field(3)) {}

  Fq K;
  int64_t p = 3;
  int r = 1;
  int64_t d = 1; // common group-ring rank of the modeled ordinary parts

  std::vector<int> dims;              // dims[s] = dim M_s, s = 0..r
  std::vector<Mat<Fq>> frob;          // F_* on M_s
  std::vector<Mat<Fq>> rho_down;      // rho_down[s]: M_s -> M_{s-1} (s >= 1)
  std::vector<Mat<Fq>> rho_up;        // rho_up[s]: M_{s-1} -> M_s   (s >= 1)
  std::vector<Mat<Fq>> tame;          // action of a fixed primitive root c mod p on M_s
  std::vector<Mat<Fq>> wild;          // action of 1+p on M_s (trivial for s <= 1)
  std::vector<Mat<Fq>> diamond_N;     // <v>_N generator action on M_s
  // residue functionals: residues[m][s] is a covector on M_s for marking m
  std::vector<std::vector<std::vector<FqElem>>> residues;

  // <u> for u a unit mod p^s acting on M_s
  Mat<Fq> diamond(int64_t u, int s) const;
  Mat<Fq> diamond_N_pow(int t, int s) const;

  // checks every declared relation exactly; throws on violation
  void validate() const;

  // dimensions of the product space indexed by the component list
  const std::vector<ComponentIndex>& components() const { return comps_; }
  int component_offset(const ComponentIndex& c) const;
  int product_dim() const { return product_dim_; }

  void finalize(); // compute component bookkeeping after the fields are set

  // Synthetic hypothesis-compliant carrier: free modules of rank d over the
  // wild group ring with regular wild action and block tame/diamond actions.
  static IgusaCarrier synthetic(int64_t p, int r, int64_t d, std::mt19937& rng,
                                bool with_residues = true);
  // Concrete level-1 carrier built from per-eigenspace ordinary dimensions
  // (weights[j] copies of the tame character j).
  static IgusaCarrier level1_concrete(int64_t p, const std::vector<int64_t>& eigendims,
                                      std::mt19937& rng);

private:
  std::vector<ComponentIndex> comps_;
  std::vector<int> offsets_;
  int product_dim_ = 0;
};

// Tuple of sections, one per component, living at level max(a,b).
struct MeroSection {
  std::vector<FqElem> v; // concatenated per the carrier's component order
};

MeroSection zero_section(const IgusaCarrier& c);

// The five-case component formulas for U_p and U_p^*.
MeroSection up_apply(const IgusaCarrier& c, const MeroSection& s);
MeroSection upstar_apply(const IgusaCarrier& c, const MeroSection& s);

// Closed form for U_p^n and U_p^{*n}, n >= r; must equal n-fold iteration.
MeroSection up_power_closed_form(const IgusaCarrier& c, const MeroSection& s, int n);
MeroSection upstar_power_closed_form(const IgusaCarrier& c, const MeroSection& s, int n);

// gamma maps on F-ordinary vectors nu in M_r
MeroSection gamma_map_inf(const IgusaCarrier& c, const std::vector<FqElem>& nu);
MeroSection gamma_map_zero(const IgusaCarrier& c, const std::vector<FqElem>& nu);

// projections onto the good components (r,0,1) / (0,r,1)
std::vector<FqElem> pullback_inf(const IgusaCarrier& c, const MeroSection& s);
std::vector<FqElem> pullback_zero(const IgusaCarrier& c, const MeroSection& s);

// matrices of up/upstar on the product space
Mat<Fq> up_matrix(const IgusaCarrier& c);
Mat<Fq> upstar_matrix(const IgusaCarrier& c);

struct ContractionReport {
  bool relations_ok = false;
  bool inf_iso = false;  // e_r (product) -> M_r via (i^inf)* is an isomorphism
  bool zero_iso = false; // e_r* (product) -> M_r via (i^0)* is an isomorphism
  bool gamma_sections_inverse = false; // gamma and i* are two-sided inverses
  int64_t ordinary_rank_inf = -1, ordinary_rank_zero = -1;
  std::string failure;
  bool ok() const { return relations_ok && inf_iso && zero_iso && gamma_sections_inverse; }
};

ContractionReport ordinary_contraction_check(const IgusaCarrier& c);

struct SplittingReport {
  bool h0_free = false, h1_free = false, middle_free = false;
  int64_t rank_h0 = -1, rank_middle = -1, rank_h1 = -1; // expect d, 2d, d
  bool control_ok = false; // trace maps give control isomorphisms down the tower
  std::string failure;
  bool ok() const { return h0_free && h1_free && middle_free && control_ok; }
};

SplittingReport frobenius_splitting_check(const IgusaCarrier& c);

// Teichmuller idempotents f_j of a (Z/p)^x-action given by the matrix of a
// fixed primitive root; requires p-1 invertible in the base ring.
struct TeichmullerDecomposition {
  std::vector<Mat<Fq>> idempotents; // f_0 .. f_{p-2}
  std::vector<int> eigendims;
  Mat<Fq> away_from_trivial; // f' = sum_{j != 0} f_j
};

TeichmullerDecomposition teichmuller_decompose(const Fq& K, int64_t p, const Mat<Fq>& tame_gen);

struct ResidueSumReport {
  bool functional_relations_ok = false;
  bool sums_vanish = false;      // total residue of gamma^star(nu) is 0 at each marking
  bool telescoping_ok = false;   // the multiplicity structure phi(p^b) collapses mod p
  bool skipped = false;          // carrier has no residue functionals
  std::string failure;
  bool ok() const { return skipped || (functional_relations_ok && sums_vanish && telescoping_ok); }
};

ResidueSumReport residue_sum_check(const IgusaCarrier& c, bool star_inf,
                                   const std::vector<FqElem>& nu);

} // namespace charp
