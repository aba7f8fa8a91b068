#pragma once

#include "manin.hpp"

namespace charp {

// Hecke/diamond/Atkin-Lehner matrices on the full quotient of a Manin-symbol
// space.  Restrict to the cuspidal subspace with ManinSymbolSpace::restrict_cuspidal.
class HeckeOps {
public:
  explicit HeckeOps(const ManinSymbolSpace& s) : S(s) {}

  // T_ell via Merel-Heilbronn matrices (computes U_ell when ell | M)
  Mat<QQ> hecke(int64_t ell) const;
  // diamond <u>
  Mat<QQ> diamond(int64_t u) const;
  // star involution
  Mat<QQ> star() const { return S.star_matrix(); }

  // weight-2 path-based operators
  Mat<QQ> u_ell_paths(int64_t ell) const;
  // full Atkin-Lehner w_M via W = (0,-1; M,0)
  Mat<QQ> atkin_lehner_full() const;
  // partial Atkin-Lehner W_Q for Q || M, normalized by
  //   W_Q = (Q x, y; M z, Q w), det = Q, y = 1 mod Q, x = 1 mod M/Q
  Mat<QQ> atkin_lehner_partial(int64_t Q) const;

private:
  const ManinSymbolSpace& S;
  Mat<QQ> path_operator(const std::vector<IMat>& cosets) const;
};

// Intersection pairing on the cuspidal subspace of a weight-2 space, computed
// from the ribbon structure of the Farey tessellation (corner crossings at the
// cusps).  Canonical up to one global sign.
Mat<QQ> intersection_pairing_cuspidal(const ManinSymbolSpace& S);

} // namespace charp
