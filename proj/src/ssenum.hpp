#pragma once

#include <cstdint>
#include <vector>

namespace charp {

struct SupersingularData {
  int64_t p = 0, N = 0;
  int64_t delta = 0;           // number of supersingular points on X_1(N) over F_p-bar
  int64_t ss_j_count = 0;      // supersingular j-invariants in F_{p^2}
  bool mass_formula_ok = false; // sum 1/#Aut == (p-1)/24
  bool dual_path_ok = false;    // brute enumeration == nu * (p-1)/24
};

// Brute-force supersingular count: enumerate j in F_{p^2}, test by point count
// over F_{p^2}, weight level structures by automorphisms, and cross-check with
// the Eichler mass formula.  Requires p >= 5 and N >= 4 with p not dividing N.
SupersingularData supersingular_count(int64_t p, int64_t N);

// p-rank of Pic^0 of X_1(N) over F_p by point-count oracles: 0 for genus-0
// levels, and the explicit Weierstrass model for N = 11.
int64_t gamma_prank_oracle(int64_t p, int64_t N);

} // namespace charp
