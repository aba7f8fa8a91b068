#include "dims.hpp"

#include <stdexcept>

namespace charp {

namespace {

int64_t euler_phi(int64_t n) {
  int64_t r = n;
  for (int64_t q = 2; q * q <= n; q++)
    if (n % q == 0) {
      r -= r / q;
      while (n % q == 0) n /= q;
    }
  if (n > 1) r -= r / n;
  return r;
}

} // namespace

Gamma1Invariants gamma1_invariants(int64_t N) {
  if (N < 1 || N == 3) throw std::invalid_argument("gamma1_invariants: unsupported level");
  Gamma1Invariants v{};
  v.N = N;
  if (N == 1) return {1, 1, 1, 0, 1, 1, 0};
  if (N == 2) return {2, 3, 2, 0, 1, 0, 0};
  if (N == 4) return {4, 6, 3, 1, 0, 0, 0};
  // N >= 5: no elliptic points, -I not in Gamma_1(N)
  int64_t idx = N * N; // SL_2 index before the 1/2 for the PSL image
  int64_t n = N;
  for (int64_t q = 2; q * q <= n; q++)
    if (n % q == 0) {
      idx = idx / (q * q) * (q * q - 1);
      while (n % q == 0) n /= q;
    }
  if (n > 1) idx = idx / (n * n) * (n * n - 1);
  v.psl_index = idx / 2;
  int64_t c = 0;
  for (int64_t d = 1; d <= N; d++)
    if (N % d == 0) c += euler_phi(d) * euler_phi(N / d);
  v.cusps = c / 2;
  v.cusps_irregular = 0;
  v.eps2 = v.eps3 = 0;
  // 12 g = 12 + mu - 6 cusps (no elliptic points)
  int64_t twelve_g = 12 + v.psl_index - 6 * v.cusps;
  if (twelve_g % 12 != 0) throw std::logic_error("genus formula not integral");
  v.genus = twelve_g / 12;
  return v;
}

int64_t dim_cusp_forms(int64_t N, int k) {
  if (k < 2) throw std::invalid_argument("dim_cusp_forms: weight must be >= 2");
  auto v = gamma1_invariants(N);
  if (k == 2) return v.genus;
  int64_t g = v.genus;
  if (N <= 2) {
    // -I acts: odd weights vanish; use the classical PSL formula
    if (k % 2 == 1) return 0;
    return (k - 1) * (g - 1) + (k / 4) * v.eps2 + (k / 3) * v.eps3 + (k / 2 - 1) * v.cusps;
  }
  int64_t c_irr = v.cusps_irregular;
  int64_t c_reg = v.cusps - c_irr;
  if (k % 2 == 0) {
    // regular and irregular cusps contribute alike for even weight
    return (k - 1) * (g - 1) + (k / 2 - 1) * v.cusps;
  }
  // odd weight: 2 dim = 2(k-1)(g-1) + (k-2) c_reg + (k-1) c_irr
  int64_t twice = 2 * (k - 1) * (g - 1) + (k - 2) * c_reg + (k - 1) * c_irr;
  if (twice % 2 != 0) throw std::logic_error("odd-weight dimension not integral");
  return twice / 2;
}

} // namespace charp
