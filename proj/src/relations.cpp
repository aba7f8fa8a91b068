#include "relations.hpp"

namespace charp {

namespace {

int64_t ipow(int64_t b, int e) { return Fq::ipow(b, e); }

int64_t umod_reduce(int64_t p, int64_t u, int m) {
  if (m <= 0) return 1;
  int64_t pm = ipow(p, m);
  int64_t v = ((u % pm) + pm) % pm;
  return v;
}

} // namespace

std::string OpWord::str() const {
  std::string s;
  auto piece = [&](const std::string& base, int e) {
    if (e == 0) return;
    if (!s.empty()) s += " ";
    s += base;
    if (e != 1) s += "^" + std::to_string(e);
  };
  piece("<u>", u_exp);
  if (chi_mod > 1) {
    if (!s.empty()) s += " ";
    s += "<" + std::to_string(chi_val) + ">^-1";
  }
  piece("<p>_N", pn_exp);
  piece("F", f);
  piece("rho", rho);
  if (s.empty()) s = "id";
  return s;
}

TableRow degeneracy_description(int64_t p, int r, DegeneracyMap map, const ComponentIndex& idx) {
  const int a = idx.a, b = idx.b;
  if (a + b != r + 1) throw std::invalid_argument("degeneracy tables live on level r+1 components");
  const int64_t u = idx.u;
  auto tgt = [&](int ta, int tb) {
    return ComponentIndex{ta, tb, umod_reduce(p, u, std::min(ta, tb))};
  };
  switch (map) {
    case DegeneracyMap::SigmaBar: {
      if (b < a) return {idx, tgt(a - 1, b), {1, 1, 0, 0}};        // F rho
      if (a == b) return {idx, tgt(a - 1, b), {1, 0, -1, 0}};      // <u>^{-1} F
      if (a == 0 && b == r + 1) return {idx, tgt(0, r), {0, 1, 0, 1}}; // <p>_N rho
      return {idx, tgt(a - 1, b), {1, 0, 0, 0}};                   // F
    }
    case DegeneracyMap::RhoBar: {
      if (a == r + 1 && b == 0) return {idx, tgt(r, 0), {0, 1, 0, 0}}; // rho
      if (b < a + 1) return {idx, tgt(a, b - 1), {1, 0, 0, 0}};        // F
      if (a + 1 == b) return {idx, tgt(a, b - 1), {1, 1, 1, 0}};       // <u> F rho
      return {idx, tgt(a, b - 1), {1, 1, 0, 0}};                       // F rho
    }
    case DegeneracyMap::Pi1Bar: {
      if (a == r + 1 && b == 0) return {idx, tgt(r, 0), {1, 0, 0, 0}};     // F
      if (a == 0 && b == r + 1) return {idx, tgt(0, r), {0, 0, 0, 1}};     // <p>_N
      if (b < a) return {idx, tgt(a - 1, b), {0, 1, 0, 0}};               // rho
      if (a == b) return {idx, tgt(a - 1, b), {0, 0, -1, 0}};             // <u>^{-1}
      return {idx, tgt(a - 1, b), {0, 0, 0, 0}};                           // id
    }
    case DegeneracyMap::Pi2Bar: {
      if (a == r + 1 && b == 0) return {idx, tgt(r, 0), {0, 0, 0, 0}};     // id
      if (a == 0 && b == r + 1) return {idx, tgt(0, r), {1, 0, 0, 0}};     // F
      if (b < a + 1) return {idx, tgt(a, b - 1), {0, 0, 0, 0}};            // id
      if (a + 1 == b) return {idx, tgt(a, b - 1), {0, 1, 1, 0}};           // <u> rho
      return {idx, tgt(a, b - 1), {0, 1, 0, 0}};                           // rho
    }
    case DegeneracyMap::PiBar: {
      // the canonical map to the correspondence curve: rho on the two good
      // components, F in the middle; component indices are preserved
      if ((a == r + 1 && b == 0) || (a == 0 && b == r + 1))
        return {idx, idx, {0, 1, 0, 0}};
      return {idx, idx, {1, 0, 0, 0}};
    }
  }
  throw std::logic_error("unreachable");
}

TableRow inertia_description(int64_t p, int r, int64_t chi, const ComponentIndex& idx) {
  if (idx.a + idx.b != r) throw std::invalid_argument("inertia table lives on level r components");
  int m = std::min(idx.a, idx.b);
  int64_t pm = std::max<int64_t>(1, ipow(p, m));
  if (m > 0 && chi % p == 0) throw std::invalid_argument("chi must be a unit");
  ComponentIndex tgt{idx.a, idx.b, umod_reduce(p, chi * idx.u, m)};
  if (idx.b <= idx.a) return {idx, tgt, {0, 0, 0, 0}};
  int64_t cv = ((chi % pm) + pm) % pm;
  if (cv == 1 || pm <= 1) return {idx, tgt, {0, 0, 0, 0}};
  return {idx, tgt, {0, 0, 0, 0, cv, pm}};
}

TableConsistency verify_relation_tables(int64_t p, int r) {
  TableConsistency out;
  out.rho_factorization = true;
  out.sigma_factorization = true;
  for (const auto& idx : list_components(p, r + 1)) {
    auto pi = degeneracy_description(p, r, DegeneracyMap::PiBar, idx);
    auto pi1 = degeneracy_description(p, r, DegeneracyMap::Pi1Bar, pi.target);
    auto pi2 = degeneracy_description(p, r, DegeneracyMap::Pi2Bar, pi.target);
    auto rho = degeneracy_description(p, r, DegeneracyMap::RhoBar, idx);
    auto sigma = degeneracy_description(p, r, DegeneracyMap::SigmaBar, idx);
    if (!(pi2.word.compose(pi.word) == rho.word) || !(pi2.target == rho.target)) {
      out.rho_factorization = false;
      if (out.failure.empty())
        out.failure = "rho != pi2 . pi at (" + std::to_string(idx.a) + "," + std::to_string(idx.b) +
                      "," + std::to_string(idx.u) + ")";
    }
    if (!(pi1.word.compose(pi.word) == sigma.word) || !(pi1.target == sigma.target)) {
      out.sigma_factorization = false;
      if (out.failure.empty())
        out.failure = "sigma != pi1 . pi at (" + std::to_string(idx.a) + "," +
                      std::to_string(idx.b) + "," + std::to_string(idx.u) + ")";
    }
  }
  // inertia composition: the row of chi1 chi2 equals the composite row
  out.inertia_group_action = true;
  for (const auto& idx : list_components(p, r)) {
    int m = std::min(idx.a, idx.b);
    int64_t pm = std::max<int64_t>(1, ipow(p, m));
    for (int64_t c1 = 1; c1 < std::max<int64_t>(2, pm); c1++) {
      if (m > 0 && c1 % p == 0) continue;
      for (int64_t c2 = 1; c2 < std::max<int64_t>(2, pm); c2++) {
        if (m > 0 && c2 % p == 0) continue;
        auto first = inertia_description(p, r, c1, idx);
        auto second = inertia_description(p, r, c2, first.target);
        auto direct = inertia_description(p, r, (c1 * c2) % std::max<int64_t>(pm, 1), idx);
        if (!(second.word.compose(first.word) == direct.word) ||
            !(second.target == direct.target)) {
          out.inertia_group_action = false;
          if (out.failure.empty()) out.failure = "inertia rows do not compose";
        }
        if (m == 0) break;
      }
      if (m == 0) break;
    }
  }
  return out;
}

} // namespace charp
