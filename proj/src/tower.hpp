#pragma once

#include "group_ring.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace charp {

// ---------------------------------------------------------------------------
// Additive linear algebra over Z/p^m.  Every finite module over the local
// coefficient rings here is a finite abelian p-group, so cardinality and
// solvability questions reduce to integer matrices mod p^m.
// ---------------------------------------------------------------------------

struct LocalSmith {
  // U * A * V = D with D diagonal given by p-valuations (entries p^{vals[i]}),
  // everything over Z/p^m
  std::vector<std::vector<int64_t>> U, V;
  std::vector<int> vals; // valuation per diagonal entry (>= m means zero)
  int rows = 0, cols = 0;
  int64_t p = 0;
  int m = 0;

  // log_p of the cardinality of the image of A : (Z/p^m)^cols -> (Z/p^m)^rows
  int64_t image_log_card() const;
  // solve A x = b; nullopt if inconsistent
  std::optional<std::vector<int64_t>> solve(const std::vector<int64_t>& b) const;
};

LocalSmith local_smith(std::vector<std::vector<int64_t>> a, int rows, int cols, int64_t p, int m);

// Additive representation of an Fq-matrix as a matrix over Z/p^m.
std::vector<std::vector<int64_t>> additive_matrix(const Mat<Fq>& mat);

// Solve mat * x = b over a local Fq ring (via the additive representation).
std::optional<std::vector<FqElem>> local_solve(const Mat<Fq>& mat, const std::vector<FqElem>& b);

// ---------------------------------------------------------------------------
// Towers
// ---------------------------------------------------------------------------

// The base rings A_1 <= A_2 <= ... of a tower, either one constant ring or the
// ascending truncated-cyclotomic chain Z_p[mu_{p^r}]/p^m with zeta_{p^s} mapped
// to zeta_{p^r}^{p^{r-s}}.
struct RingChain {
  std::vector<Fq> rings; // rings[i] is A_{i+1}

  static RingChain constant(const Fq& A, int r_max);
  static RingChain cyclotomic(int64_t p, int m, int r_max);

  const Fq& at(int level) const { return rings.at(size_t(level - 1)); }
  int r_max() const { return int(rings.size()); }
  bool is_constant() const;

  FqElem map_up(int s, int r, const FqElem& x) const; // A_s -> A_r, s <= r
  Mat<Fq> map_up(int s, int r, const Mat<Fq>& m) const;
};

// Truncated tower of modules over the group rings A_r[D_1/D_r]: one
// GroupRingModule per level 1..r_max plus consecutive transition maps
// rho_{r,r-1} : M_r -> M_{r-1} (x) A_r, stored as matrices over A_r.
struct TruncatedTower {
  RingChain chain;
  std::vector<GroupRingModule> levels;  // levels[i] is M_{i+1} over A_{i+1}
  std::vector<Mat<Fq>> down;            // down[i]: M_{i+2} -> M_{i+1} (x) A_{i+2}

  int r_max() const { return int(levels.size()); }
  const GroupRingModule& at(int level) const { return levels.at(size_t(level - 1)); }

  // composed transition rho_{r,s} over A_r
  Mat<Fq> transition(int r, int s) const;
  // gamma action of level s extended to A_r coefficients
  Mat<Fq> gamma_at(int s, int r) const;

  // structural sanity: orders of gamma actions, equivariance of transitions
  void validate() const;

  // The rank-d free synthetic tower: M_r = (A_r[D_1/D_r])^d with the regular
  // action and the canonical projections as transitions.
  static TruncatedTower regular(const RingChain& chain, int d);
};

enum class IdealKind {
  Zero,                  // I_r = 0
  Maximal,               // I_r = maximal ideal, reduction to the residue field
  CyclotomicAugmentation // I_r = (zeta - 1), reduction to Z/p^m
};

struct LevelHypotheses {
  bool free_of_common_rank = false; // "freehyp"
  bool transition_surjective = true; // "surjhyp" (for the map into this level)
  int64_t rank = -1;
  std::string note;
};

struct TowerHypothesesReport {
  bool all_hold = false;
  int64_t d = -1; // the common rank
  std::vector<LevelHypotheses> per_level;
  std::string failure;
};

TowerHypothesesReport check_tower_hypotheses(const TruncatedTower& t, IdealKind ideals);

struct ControlResult {
  bool holds = false;
  Mat<Fq> witness;        // matrix of the induced map rho_{r,s}
  int cokernel_dim = 0;   // over the residue field, 0 when surjective
  std::string note;
};

// The base-change map M_r (x)_{A_r[D_1/D_r]} A_r[D_1/D_s] -> M_s (x) A_r.
// Requires hypotheses verified; refuses otherwise.
ControlResult control_isomorphism(const TruncatedTower& t, int r, int s,
                                  const TowerHypothesesReport& hyp);

struct TruncatedLimit {
  // basis of M_{r_max} over the level-r_max group ring, chosen compatibly with
  // all transitions; column vectors over A_{r_max}
  std::vector<std::vector<FqElem>> basis;
  // the chosen compatible basis at every lower level
  std::vector<std::vector<std::vector<FqElem>>> basis_at_level; // [level-1][i]
  bool specialization_verified = false;
};

TruncatedLimit truncated_limit(const TruncatedTower& t, const TowerHypothesesReport& hyp);

// ---------------------------------------------------------------------------
// Duality pairings
// ---------------------------------------------------------------------------

// Per-level A_r-valued perfect pairings between two towers.
struct PairingFamily {
  std::vector<Mat<Fq>> gram; // gram[i]: M_{i+1} x M'_{i+1} -> A_{i+1}
};

struct PairingCompatReport {
  bool perfect_all_levels = false;
  bool group_self_adjoint = false;
  bool change_of_level = false; // eq: <rho m, rho' m'>_s = sum_delta <m, delta^{-1} m'>_r
  std::string failure;          // first violated identity, when any
  bool ok() const { return perfect_all_levels && group_self_adjoint && change_of_level; }
};

PairingCompatReport verify_pairing_compat(const PairingFamily& pf, const TruncatedTower& t,
                                          const TruncatedTower& t2);

// Group-ring-valued pairing at one level: (m, m')_r = sum_t <m, gamma^{-t} m'> gamma^t,
// stored as the list of coefficient matrices C_t.
struct LambdaPairingLevel {
  std::vector<Mat<Fq>> coeff; // coeff[t] = G_r * (gamma'^{-1})^t
};

struct LambdaPairingResult {
  std::vector<LambdaPairingLevel> levels;
  bool perfect_all_levels = false;      // Gram over the local group ring invertible
  bool levels_compatible = false;       // (rho m, rho' m')_s = (m, m')_r mod ker
  bool specialization_holds = false;    // augmentation recovers the level pairing
  std::string failure;
  bool ok() const { return perfect_all_levels && levels_compatible && specialization_holds; }
};

LambdaPairingResult build_lambda_pairing(const TruncatedTower& t, const TruncatedTower& t2,
                                         const PairingFamily& pf);

// The standard group-ring trace form on regular towers: <gamma^i e_a, gamma^j e_b>
// = delta_{ab} [i + j == 0 mod p^{r-1}], which satisfies all of the pairing
// hypotheses.
PairingFamily trace_pairing_family(const TruncatedTower& t);

} // namespace charp
