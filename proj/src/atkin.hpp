#pragma once

#include "hecke.hpp"

#include <string>
#include <vector>

namespace charp {

// Atkin-Lehner verification at level M = Np, weight 2: the operator relations
// of the partial and full involutions, the intersection-pairing adjointness
// w T = T* w, and Hecke self-adjointness of the twisted pairing
// <x, y> := E(x, w U_p* y) on the U_p*-ordinary part.
struct AtkinLehnerReport {
  int64_t p = 0, N = 0;
  bool w_full_squares_to_minus_one_diamond = false; // w_r^2 = <-1>_N <-1>
  bool w_eps_squares = false;                       // w_eps^2 = <p>_N <-1>
  bool w_zeta_squares = false;                      // w_zeta^2 = <-1>_N <N>
  bool w_commutation_twist = false; // w_zeta w_eps = <p>_N^{-1} <N> w_eps w_zeta
  bool w_diamond_conjugation = false; // w <u><v>_N = <u^{-1}><v^{-1}>_N w (and partials)
  bool pairing_skew = false;
  bool pairing_nondegenerate = false;
  bool hecke_adjointness = false;   // E(T x, y) = E(x, w T w^{-1} y)
  bool up_star_intertwined = false; // w U_p w^{-1} = U_p' from the other partial route
  bool twisted_pairing_self_adjoint = false; // <T* x, y> = <x, T* y> on the ordinary part
  int64_t ordinary_rank = -1;       // rank of the U_p*-ordinary part (pairs of forms)
  std::string failure;

  bool all_ok() const {
    return w_full_squares_to_minus_one_diamond && w_eps_squares && w_zeta_squares &&
           w_commutation_twist && w_diamond_conjugation && pairing_skew &&
           pairing_nondegenerate && hecke_adjointness && up_star_intertwined &&
           twisted_pairing_self_adjoint;
  }
};

AtkinLehnerReport atkin_lehner_check(int64_t p, int64_t N);

} // namespace charp
