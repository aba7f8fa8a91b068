#include "newton.hpp"

#include <stdexcept>

namespace charp {

namespace {

int64_t valuation(mpz_class a, int64_t p) {
  // a != 0
  int64_t v = 0;
  mpz_class q, r, pp{long(p)};
  while (true) {
    mpz_fdiv_qr(q.get_mpz_t(), r.get_mpz_t(), a.get_mpz_t(), pp.get_mpz_t());
    if (sgn(r) != 0) return v;
    a = q;
    v++;
  }
}

} // namespace

NewtonPolygonResult newton_unit_root_count_z(const std::vector<mpz_class>& f, int64_t p) {
  if (f.empty() || f.back() != 1)
    throw std::invalid_argument("newton polygon: polynomial must be monic");
  // valuation points (skip zero coefficients: infinite valuation)
  std::vector<std::pair<int64_t, int64_t>> pts;
  for (size_t i = 0; i < f.size(); i++)
    if (sgn(f[i]) != 0) pts.emplace_back(int64_t(i), valuation(f[i], p));
  // lower convex hull, left to right (Andrew monotone chain, lower part)
  std::vector<std::pair<int64_t, int64_t>> hull;
  for (const auto& pt : pts) {
    while (hull.size() >= 2) {
      auto& a = hull[hull.size() - 2];
      auto& b = hull[hull.size() - 1];
      // pop b if it is above or on segment a->pt (keep hull minimal: strict left turns only)
      __int128 cross = __int128(b.first - a.first) * (pt.second - a.second) -
                       __int128(b.second - a.second) * (pt.first - a.first);
      if (cross <= 0)
        hull.pop_back();
      else
        break;
    }
    hull.push_back(pt);
  }
  NewtonPolygonResult res;
  res.vertices = hull;
  res.slope_zero_length = 0;
  for (size_t i = 0; i + 1 < hull.size(); i++)
    if (hull[i].second == hull[i + 1].second)
      res.slope_zero_length += hull[i + 1].first - hull[i].first;
  return res;
}

NewtonPolygonResult newton_unit_root_count(const std::vector<mpq_class>& f, int64_t p) {
  std::vector<mpz_class> zf;
  zf.reserve(f.size());
  for (const auto& q : f) {
    if (q.get_den() != 1)
      throw std::invalid_argument("newton polygon: polynomial must have integer coefficients");
    zf.push_back(q.get_num());
  }
  return newton_unit_root_count_z(zf, p);
}

} // namespace charp
