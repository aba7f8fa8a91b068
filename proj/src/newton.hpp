#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <utility>
#include <vector>

namespace charp {

struct NewtonPolygonResult {
  // lower convex hull vertices of {(i, v_p(a_i)) : a_i != 0}, left to right
  std::vector<std::pair<int64_t, int64_t>> vertices;
  int64_t slope_zero_length = 0; // number of p-adic unit roots
};

// f: monic polynomial with integer coefficients, lowest degree first.
// Throws std::invalid_argument on non-monic or non-integral input.
NewtonPolygonResult newton_unit_root_count(const std::vector<mpq_class>& f, int64_t p);
NewtonPolygonResult newton_unit_root_count_z(const std::vector<mpz_class>& f, int64_t p);

} // namespace charp
