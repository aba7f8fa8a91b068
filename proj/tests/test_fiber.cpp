#include <doctest.h>

#include "exact.hpp"
#include "fiber.hpp"
#include "ordinary.hpp"
#include "relations.hpp"

#include <random>

using namespace charp;

namespace {

MeroSection random_section(const IgusaCarrier& c, std::mt19937& rng) {
  MeroSection s = zero_section(c);
  for (auto& v : s.v) v = c.K.from_int(int64_t(rng() % c.p));
  return s;
}

// Independent second transcription of the U_p component formulas, organized
// as a table of (target, source, operation) rows evaluated one by one; used
// as the dual-transcription oracle for up_apply.
MeroSection up_apply_table_oracle(const IgusaCarrier& c, const MeroSection& s) {
  const Fq& K = c.K;
  MeroSection out = zero_section(c);
  auto P = [&](int e) { return Fq::ipow(c.p, e); };
  for (const auto& t : c.components()) {
    std::vector<FqElem> acc(size_t(c.dims[size_t(t.level())]), K.zero());
    auto add = [&](const std::vector<FqElem>& w) {
      for (size_t i = 0; i < w.size(); i++) acc[i] = K.add(acc[i], w[i]);
    };
    if (t.b == 0) {
      // (r,0,1)
      int off = c.component_offset(t);
      std::vector<FqElem> comp(s.v.begin() + off, s.v.begin() + off + c.dims[size_t(c.r)]);
      add(c.frob[size_t(c.r)].apply(comp));
    } else {
      ComponentIndex srcbase{t.a + 1, t.b - 1, 1};
      int srclv = srcbase.level();
      int srcmod = srcbase.umod();
      for (int64_t u2 = 1; u2 < std::max<int64_t>(2, P(srcmod)); u2++) {
        if (srcmod > 0 && u2 % c.p == 0) continue;
        // does the source unit u2 contribute to target unit t.u?
        bool contributes;
        if (t.b <= t.a) {
          contributes = u2 == t.u % std::max<int64_t>(1, P(srcmod));
        } else {
          contributes = u2 % std::max<int64_t>(1, P(t.umod())) ==
                        t.u % std::max<int64_t>(1, P(t.umod()));
        }
        if (srcmod == 0) contributes = true;
        if (!contributes) {
          if (srcmod == 0) break;
          continue;
        }
        ComponentIndex src{t.a + 1, t.b - 1, srcmod == 0 ? 1 : u2};
        int off = c.component_offset(src);
        std::vector<FqElem> comp(s.v.begin() + off, s.v.begin() + off + c.dims[size_t(srclv)]);
        if (t.b <= t.a) {
          add(c.rho_down[size_t(t.a + 1)].apply(comp));
        } else if (srclv == t.level()) {
          // same-level case (r odd, a = b-1): sum the diamond lifts of the
          // single reduced source component
          for (int64_t lift = 1; lift < P(srclv); lift++) {
            if (lift % c.p == 0) continue;
            if (lift % std::max<int64_t>(1, P(t.umod())) !=
                t.u % std::max<int64_t>(1, P(t.umod())))
              continue;
            add(c.diamond(lift, srclv).apply(comp));
          }
        } else if (c.r % 2 == 0 && t.a == t.b - 2) {
          add(c.rho_up[size_t(t.b)].apply(c.diamond(u2, srclv).apply(comp)));
        } else {
          add(c.rho_up[size_t(t.b)].apply(comp));
        }
        if (srcmod == 0) break;
      }
    }
    int off = c.component_offset(t);
    for (size_t i = 0; i < acc.size(); i++) out.v[size_t(off) + i] = acc[i];
  }
  return out;
}

} // namespace

TEST_CASE("component enumeration") {
  // (p=5, r=1): 2 components
  auto c1 = list_components(5, 1);
  CHECK(c1.size() == 2);
  CHECK(c1[0] == ComponentIndex{1, 0, 1});
  CHECK(c1[1] == ComponentIndex{0, 1, 1});
  // (p=5, r=2): 6 components
  auto c2 = list_components(5, 2);
  CHECK(c2.size() == 6);
  int middle = 0;
  for (auto& c : c2)
    if (c.a == 1 && c.b == 1) middle++;
  CHECK(middle == 4);
  // (p=3, r=3): 2 + 2 phi(3) = 6
  CHECK(list_components(3, 3).size() == 6);
}

TEST_CASE("synthetic carriers satisfy the declared relations") {
  std::mt19937 rng(71);
  for (auto [p, r, d] : std::vector<std::tuple<int64_t, int, int64_t>>{
           {3, 1, 2}, {3, 2, 2}, {3, 3, 1}, {5, 2, 2}}) {
    auto c = IgusaCarrier::synthetic(p, r, d, rng);
    CHECK_NOTHROW(c.validate());
  }
}

TEST_CASE("up_apply matches the independent table transcription") {
  std::mt19937 rng(72);
  for (auto [p, r, d] : std::vector<std::tuple<int64_t, int, int64_t>>{
           {3, 1, 2}, {3, 2, 2}, {5, 2, 1}, {3, 3, 1}}) {
    auto c = IgusaCarrier::synthetic(p, r, d, rng);
    for (int trial = 0; trial < 5; trial++) {
      auto s = random_section(c, rng);
      auto a = up_apply(c, s);
      auto b = up_apply_table_oracle(c, s);
      CHECK(a.v == b.v);
    }
    // eta = 0 -> 0
    CHECK(up_apply(c, zero_section(c)).v == zero_section(c).v);
  }
}

TEST_CASE("r=1 case split of U_p") {
  // eta supported on (1,0,1): U_p eta has F_* on (1,0,1) and the diamond sum
  // on (0,1,1)
  std::mt19937 rng(73);
  auto c = IgusaCarrier::synthetic(5, 1, 2, rng);
  MeroSection s = zero_section(c);
  int off10 = c.component_offset(ComponentIndex{1, 0, 1});
  int off01 = c.component_offset(ComponentIndex{0, 1, 1});
  std::vector<FqElem> eta(size_t(c.dims[1]), c.K.zero());
  for (auto& v : eta) v = c.K.from_int(int64_t(rng() % 5));
  for (int i = 0; i < c.dims[1]; i++) s.v[size_t(off10 + i)] = eta[size_t(i)];
  auto u = up_apply(c, s);
  auto f = c.frob[1].apply(eta);
  std::vector<FqElem> dsum(size_t(c.dims[1]), c.K.zero());
  for (int64_t u2 = 1; u2 < 5; u2++) {
    auto dv = c.diamond(u2, 1).apply(eta);
    for (size_t i = 0; i < dsum.size(); i++) dsum[i] = c.K.add(dsum[i], dv[i]);
  }
  for (int i = 0; i < c.dims[1]; i++) {
    CHECK(u.v[size_t(off10 + i)] == f[size_t(i)]);
    CHECK(u.v[size_t(off01 + i)] == dsum[size_t(i)]);
  }
}

TEST_CASE("closed form for high powers of U_p and U_p*") {
  std::mt19937 rng(74);
  for (auto [p, r, d] : std::vector<std::tuple<int64_t, int, int64_t>>{
           {3, 1, 2}, {3, 2, 2}, {3, 3, 1}, {5, 2, 1}}) {
    auto c = IgusaCarrier::synthetic(p, r, d, rng);
    for (int n = r; n <= std::min(2 * r, r + 3); n++) {
      for (int trial = 0; trial < 3; trial++) {
        auto s = random_section(c, rng);
        // U_p^n
        MeroSection it = s;
        for (int t = 0; t < n; t++) it = up_apply(c, it);
        auto cf = up_power_closed_form(c, s, n);
        CHECK(it.v == cf.v);
        // U_p*^n including the <p>_N twists
        MeroSection it2 = s;
        for (int t = 0; t < n; t++) it2 = upstar_apply(c, it2);
        auto cf2 = upstar_power_closed_form(c, s, n);
        CHECK(it2.v == cf2.v);
      }
    }
    CHECK_THROWS(up_power_closed_form(c, zero_section(c), r - 1));
  }
}

TEST_CASE("high powers depend only on the good components") {
  std::mt19937 rng(75);
  auto c = IgusaCarrier::synthetic(3, 2, 2, rng);
  int n = 2 * c.r;
  auto s = random_section(c, rng);
  // zero all but (r,0,1): U_p^n unchanged
  MeroSection t = zero_section(c);
  int off = c.component_offset(ComponentIndex{c.r, 0, 1});
  for (int i = 0; i < c.dims[size_t(c.r)]; i++) t.v[size_t(off + i)] = s.v[size_t(off + i)];
  MeroSection a = s, b = t;
  for (int k = 0; k < n; k++) {
    a = up_apply(c, a);
    b = up_apply(c, b);
  }
  CHECK(a.v == b.v);
  // and U_p*^n only on (0,r,1)
  MeroSection t2 = zero_section(c);
  int off2 = c.component_offset(ComponentIndex{0, c.r, 1});
  for (int i = 0; i < c.dims[size_t(c.r)]; i++) t2.v[size_t(off2 + i)] = s.v[size_t(off2 + i)];
  MeroSection a2 = s, b2 = t2;
  for (int k = 0; k < n; k++) {
    a2 = upstar_apply(c, a2);
    b2 = upstar_apply(c, b2);
  }
  CHECK(a2.v == b2.v);
}

TEST_CASE("ordinary contraction: gamma and i* are inverse isomorphisms") {
  std::mt19937 rng(76);
  for (auto [p, r, d] : std::vector<std::tuple<int64_t, int, int64_t>>{
           {3, 1, 2}, {3, 2, 2}, {3, 3, 1}, {5, 2, 1}}) {
    auto c = IgusaCarrier::synthetic(p, r, d, rng);
    auto rep = ordinary_contraction_check(c);
    CHECK(rep.relations_ok);
    CHECK(rep.inf_iso);
    CHECK(rep.zero_iso);
    CHECK(rep.gamma_sections_inverse);
  }
  // gamma of 0 is 0
  auto c = IgusaCarrier::synthetic(3, 2, 2, rng);
  std::vector<FqElem> z(size_t(c.dims[size_t(c.r)]), c.K.zero());
  CHECK(gamma_map_inf(c, z).v == zero_section(c).v);
}

TEST_CASE("ordinary projectors of up/upstar commute with carrier diamonds") {
  std::mt19937 rng(77);
  auto c = IgusaCarrier::synthetic(3, 2, 2, rng);
  Mat<Fq> U = up_matrix(c);
  auto e = fitting_decompose(SemilinearOp(c.K, U, 0)).ordinary_projector;
  // diamond action on the product: componentwise <v> at the component level
  auto product_diamond = [&](int64_t u) {
    int n = c.product_dim();
    Mat<Fq> m(c.K, n, n);
    for (const auto& ci : c.components()) {
      int off = c.component_offset(ci);
      auto dm = c.diamond(u % Fq::ipow(c.p, ci.level()), ci.level());
      for (int i = 0; i < dm.rows(); i++)
        for (int j = 0; j < dm.cols(); j++) m.at(off + i, off + j) = dm.at(i, j);
    }
    return m;
  };
  auto D = product_diamond(1 + c.p); // wild generator, defined at every level
  CHECK(e.mul(D) == D.mul(e));
  // and with <v>_N componentwise
  {
    int n = c.product_dim();
    Mat<Fq> m(c.K, n, n);
    for (const auto& ci : c.components()) {
      int off = c.component_offset(ci);
      const auto& dm = c.diamond_N[size_t(ci.level())];
      for (int i = 0; i < dm.rows(); i++)
        for (int j = 0; j < dm.cols(); j++) m.at(off + i, off + j) = dm.at(i, j);
    }
    CHECK(e.mul(m) == m.mul(e));
  }
}

TEST_CASE("frobenius splitting: free ranks d, 2d, d and control") {
  std::mt19937 rng(78);
  // r = 1 concrete-style carrier: plain dimensions
  {
    auto c = IgusaCarrier::level1_concrete(5, {2, 1, 0, 3}, rng);
    auto rep = frobenius_splitting_check(c);
    CHECK(rep.h0_free);
    CHECK(rep.rank_h0 == 6);
    CHECK(rep.rank_middle == 12);
    CHECK(rep.control_ok);
  }
  // synthetic r = 2, p = 3, d = 2: ranks 2, 4, 2
  {
    auto c = IgusaCarrier::synthetic(3, 2, 2, rng);
    auto rep = frobenius_splitting_check(c);
    CHECK(rep.ok());
    CHECK(rep.rank_h0 == 2);
    CHECK(rep.rank_middle == 4);
    CHECK(rep.rank_h1 == 2);
  }
  // non-free counterexample: trivial wild action on a space of the wrong shape
  {
    auto c = IgusaCarrier::synthetic(3, 2, 2, rng);
    c.wild[2] = Mat<Fq>::identity(c.K, c.dims[2]); // breaks freeness
    auto rep = frobenius_splitting_check(c);
    CHECK(!rep.h0_free);
  }
}

TEST_CASE("teichmuller idempotents") {
  std::mt19937 rng(79);
  Fq F5 = Fq::prime_field(5);
  // regular representation of (Z/5)^x: 4 one-dimensional eigenspaces
  Mat<Fq> reg(F5, 4, 4);
  // primitive root 2 mod 5: cyclic shift in the regular representation
  for (int i = 0; i < 4; i++) reg.at((i + 1) % 4, i) = F5.one();
  auto t = teichmuller_decompose(F5, 5, reg);
  CHECK(t.idempotents.size() == 4);
  Mat<Fq> sum(F5, 4, 4);
  for (auto& f : t.idempotents) sum = sum.add(f);
  CHECK(sum == Mat<Fq>::identity(F5, 4));
  for (size_t i = 0; i < t.idempotents.size(); i++) {
    CHECK(t.idempotents[i].mul(t.idempotents[i]) == t.idempotents[i]);
    for (size_t j = i + 1; j < t.idempotents.size(); j++)
      CHECK(t.idempotents[i].mul(t.idempotents[j]).is_zero());
    CHECK(t.eigendims[i] == 1);
  }
  // trivial action: f_0 = 1, the rest 0
  auto tt = teichmuller_decompose(F5, 5, Mat<Fq>::identity(F5, 3));
  CHECK(tt.idempotents[0] == Mat<Fq>::identity(F5, 3));
  for (size_t j = 1; j < tt.idempotents.size(); j++) CHECK(tt.idempotents[j].is_zero());
  CHECK(tt.away_from_trivial.is_zero());
}

TEST_CASE("residue sums of gamma sections vanish and telescope") {
  std::mt19937 rng(80);
  for (auto [p, r, d] : std::vector<std::tuple<int64_t, int, int64_t>>{{3, 2, 2}, {3, 3, 2}, {5, 2, 2}}) {
    auto c = IgusaCarrier::synthetic(p, r, d, rng, true);
    REQUIRE(!c.residues.empty());
    // nu = 0
    std::vector<FqElem> z(size_t(c.dims[size_t(r)]), c.K.zero());
    auto rz = residue_sum_check(c, true, z);
    CHECK(rz.ok());
    // random ordinary nu (F invertible on the whole synthetic space)
    for (int trial = 0; trial < 4; trial++) {
      std::vector<FqElem> nu(size_t(c.dims[size_t(r)]), c.K.zero());
      for (auto& v : nu) v = c.K.from_int(int64_t(rng() % p));
      auto rep = residue_sum_check(c, true, nu);
      CHECK(rep.functional_relations_ok);
      CHECK(rep.sums_vanish);
      CHECK(rep.telescoping_ok);
      auto rep0 = residue_sum_check(c, false, nu);
      CHECK(rep0.sums_vanish);
    }
  }
  // carrier without functionals: skipped
  auto c0 = IgusaCarrier::synthetic(3, 2, 1, rng, false);
  std::vector<FqElem> nu(size_t(c0.dims[2]), c0.K.one());
  CHECK(residue_sum_check(c0, true, nu).skipped);
  // broken diamond-invariance is reported
  auto cb = IgusaCarrier::synthetic(3, 2, 2, rng, true);
  cb.residues[0][2][0] = cb.K.add(cb.residues[0][2][0], cb.K.one());
  auto rb = residue_sum_check(cb, true, nu);
  CHECK(!rb.ok());
}

TEST_CASE("degeneracy and inertia tables") {
  // spec-pinned rows
  {
    // pi2 on (r+1,0,1): target (r,0,1), word id
    auto row = degeneracy_description(5, 2, DegeneracyMap::Pi2Bar, {3, 0, 1});
    CHECK(row.target == ComponentIndex{2, 0, 1});
    CHECK(row.word == OpWord{});
    // pi1 on (0,r+1,1): target (0,r,1), word <p>_N
    auto row2 = degeneracy_description(5, 2, DegeneracyMap::Pi1Bar, {0, 3, 1});
    CHECK(row2.target == ComponentIndex{0, 2, 1});
    CHECK(row2.word == OpWord{0, 0, 0, 1});
    // sigma on (0,r+1,1): target (0,r,1), word <p>_N rho
    auto row3 = degeneracy_description(5, 2, DegeneracyMap::SigmaBar, {0, 3, 1});
    CHECK(row3.target == ComponentIndex{0, 2, 1});
    CHECK(row3.word == OpWord{0, 1, 0, 1});
  }
  // inertia rows: b <= a gives the identity word with u -> chi u
  {
    auto row = inertia_description(5, 2, 3, {1, 1, 2});
    CHECK(row.word == OpWord{});
    CHECK(row.target.u == (3 * 2) % 5);
  }
  {
    auto row = inertia_description(5, 3, 2, {1, 2, 3});
    CHECK(row.word == OpWord{0, 0, 0, 0, 2, 5});
    auto row2 = inertia_description(5, 3, 2, {2, 1, 3});
    CHECK(row2.word == OpWord{});
    // chi = 1: identity everywhere
    auto row3 = inertia_description(5, 3, 1, {1, 2, 3});
    CHECK(row3.word == OpWord{});
    CHECK(row3.target == ComponentIndex{1, 2, 3});
  }
  // factorization and group-action consistency
  for (auto [p, r] : std::vector<std::pair<int64_t, int>>{{3, 1}, {3, 2}, {5, 1}, {5, 2}, {7, 2}}) {
    auto con = verify_relation_tables(p, r);
    CHECK(con.rho_factorization);
    CHECK(con.sigma_factorization);
    CHECK(con.inertia_group_action);
  }
}
