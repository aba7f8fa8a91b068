#pragma once

#include "manin.hpp"

#include <cstdint>
#include <vector>

namespace charp {

// d_k = dimension of the U_p-ordinary part of weight-k level-N cusp forms mod
// p, computed as half the slope-zero length of the Newton polygon at p of the
// integral characteristic polynomial of T_p on cuspidal modular symbols, and
// cross-checked on the +1 eigenspace of the star involution.
int64_t ordinary_rank(const ManinSymbolSpace& s, int64_t p);

struct OrdinaryRankTable {
  int64_t p = 0, N = 0;
  std::vector<int64_t> d_k; // d_k[j] is d_{j+2} for k = 2 .. p+1
  int64_t gamma = -1;       // p-rank of Pic^0(X_1(N)) (point-count oracle)
  int64_t delta = -1;       // supersingular count (enumeration oracle)
  int64_t d = -1;           // gamma + delta - 1
  int64_t sum_dk = -1;      // sum of d_k for k = 3 .. p+1
  bool gamma_matches_d2 = false;
  // the headline identity as stated: d = sum_dk.  Honest computation refutes
  // this whenever ordinary forms of weight < p+1 exist; see identity_top.
  bool identity_holds = false;
  // the form of the identity every computed case satisfies: d = d_{p+1}
  bool identity_top = false;
};

OrdinaryRankTable verify_d_identity(int64_t p, int64_t N);

} // namespace charp
