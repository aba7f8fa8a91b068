#pragma once

#include <cstdint>

namespace charp {

// Closed-form invariants of X_1(N), used as the independent oracle for the
// modular-symbol presentation.  Supported: N = 1, 2 and N >= 4 (N = 3 has an
// elliptic point configuration these formulas do not cover).
struct Gamma1Invariants {
  int64_t N;
  int64_t psl_index;   // degree of X_1(N) -> X(1)
  int64_t cusps;       // total number of cusps
  int64_t cusps_irregular; // irregular cusps (1 for N = 4, else 0)
  int64_t eps2, eps3;  // elliptic point counts (0 for N >= 4)
  int64_t genus;
};

Gamma1Invariants gamma1_invariants(int64_t N);

// dim S_k(Gamma_1(N)) for k >= 2.
int64_t dim_cusp_forms(int64_t N, int k);

} // namespace charp
