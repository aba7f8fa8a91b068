#include <doctest.h>

#include "dims.hpp"
#include "hecke.hpp"
#include "ordinary.hpp"
#include "ssenum.hpp"

using namespace charp;

TEST_CASE("dimension oracle") {
  CHECK(gamma1_invariants(7).genus == 0);
  CHECK(gamma1_invariants(11).genus == 1);
  CHECK(gamma1_invariants(13).genus == 2);
  CHECK(gamma1_invariants(7).cusps == 6);
  CHECK(gamma1_invariants(4).cusps == 3);
  CHECK(dim_cusp_forms(1, 12) == 1);
  CHECK(dim_cusp_forms(1, 10) == 0);
  CHECK(dim_cusp_forms(1, 16) == 1);
  CHECK(dim_cusp_forms(7, 2) == 0);
  CHECK(dim_cusp_forms(11, 2) == 1);
  CHECK(dim_cusp_forms(7, 3) == 1);
  CHECK(dim_cusp_forms(5, 3) == 0);
  CHECK(dim_cusp_forms(5, 4) == 1);
  CHECK(dim_cusp_forms(4, 3) == 0);
  CHECK(dim_cusp_forms(4, 6) == 1);
}

TEST_CASE("manin presentations match the dimension oracle") {
  // the constructor hard-fails unless cuspidal dim = 2 dim S_k
  for (auto [N, k] : std::vector<std::pair<int64_t, int>>{
           {7, 2}, {11, 2}, {1, 12}, {4, 3}, {4, 7}, {5, 5}, {7, 6}, {11, 3}}) {
    ManinSymbolSpace s(N, k);
    CHECK(s.cuspidal_dim() == 2 * dim_cusp_forms(N, k));
  }
}

TEST_CASE("hecke eigenvalue oracles on classical spaces") {
  // level 1 weight 12: trace of T_ell on the cuspidal space = 2 tau(ell)
  ManinSymbolSpace s(1, 12);
  HeckeOps H(s);
  auto tr = [&](int64_t ell) {
    auto m = s.restrict_cuspidal(H.hecke(ell));
    mpq_class t = 0;
    for (int i = 0; i < m.rows(); i++) t += m.at(i, i);
    return t;
  };
  CHECK(tr(2) == -48);  // 2 tau(2)
  CHECK(tr(3) == 504);  // 2 tau(3)
  CHECK(tr(5) == 9660); // 2 tau(5)

  // level 11 weight 2: trace of T_2 = 2 a_2(11a) = -4
  ManinSymbolSpace s11(11, 2);
  HeckeOps H11(s11);
  auto t2 = s11.restrict_cuspidal(H11.hecke(2));
  mpq_class tt = 0;
  for (int i = 0; i < t2.rows(); i++) tt += t2.at(i, i);
  CHECK(tt == -4);
}

TEST_CASE("hecke operators commute and diamonds are trivial for u = +-1") {
  for (auto [N, k] : std::vector<std::pair<int64_t, int>>{{11, 2}, {7, 3}, {5, 4}}) {
    ManinSymbolSpace s(N, k);
    HeckeOps H(s);
    auto T2 = H.hecke(2), T3 = H.hecke(3);
    CHECK(T2.mul(T3) == T3.mul(T2));
    QQ Q;
    CHECK(H.diamond(1) == Mat<QQ>::identity(Q, s.dim()));
    // <-1> acts by (-1)^k
    auto dm1 = H.diamond(N - 1);
    auto expect = Mat<QQ>::identity(Q, s.dim());
    if (k % 2 == 1) expect = expect.neg();
    CHECK(dm1 == expect);
    // diamonds commute with Hecke
    auto D = H.diamond(2 % N == 0 ? 3 : 2);
    CHECK(D.mul(T2) == T2.mul(D));
    // star commutes with Hecke
    auto st = H.star();
    CHECK(st.mul(T2) == T2.mul(st));
    CHECK(st.mul(st) == Mat<QQ>::identity(Q, s.dim()));
  }
}

TEST_CASE("heilbronn count and path cross-validation at weight 2") {
  CHECK(heilbronn_matrices(2).size() == 4);
  // U_ell from Heilbronn matrices equals U_ell from explicit cosets (weight 2)
  for (int64_t M : {15, 22}) {
    ManinSymbolSpace s(M, 2);
    HeckeOps H(s);
    for (int64_t ell : {3LL, 11LL}) {
      if (M % ell != 0) continue;
      CHECK(H.hecke(ell) == H.u_ell_paths(ell));
    }
    // T_ell for ell not dividing M: Heilbronn vs paths-with-extra-coset
    // (the path version needs the <ell>-twisted coset, exercised implicitly by
    // the trace tests; here only the U_ell case is compared)
  }
}

TEST_CASE("supersingular counts and the mass formula") {
  // (p=5, N=7): one supersingular j (j = 0), delta = 48/6 = 8
  auto s57 = supersingular_count(5, 7);
  CHECK(s57.ss_j_count == 1);
  CHECK(s57.delta == 8);
  CHECK(s57.mass_formula_ok);
  CHECK(s57.dual_path_ok);

  for (auto [p, N] : std::vector<std::pair<int64_t, int64_t>>{{7, 4}, {11, 4}, {13, 4}, {5, 11}, {7, 5}}) {
    auto d = supersingular_count(p, N);
    CHECK(d.mass_formula_ok);
    CHECK(d.dual_path_ok);
  }
}

TEST_CASE("gamma oracle") {
  CHECK(gamma_prank_oracle(5, 7) == 0);
  CHECK(gamma_prank_oracle(7, 4) == 0);
  // 11a is ordinary at 5: a_5 = 1
  CHECK(gamma_prank_oracle(5, 11) == 1);
}

TEST_CASE("ordinary ranks: small oracle cases") {
  // (M=7, k=2, p=5): zero space
  ManinSymbolSpace s72(7, 2);
  CHECK(ordinary_rank(s72, 5) == 0);
  // (M=11, k=2, p=5): a_5(11a) = 1, ordinary, d_2 = 1
  ManinSymbolSpace s112(11, 2);
  CHECK(ordinary_rank(s112, 5) == 1);
  // (M=4, k=8, p=7): dual-path agreement is enforced inside ordinary_rank
  ManinSymbolSpace s48(4, 8);
  CHECK(ordinary_rank(s48, 7) >= 0);
}

TEST_CASE("the d-identity data for the smallest default pair") {
  auto t = verify_d_identity(5, 7);
  CHECK(t.gamma == 0);
  CHECK(t.delta == 8);
  CHECK(t.d == 7);
  CHECK(t.gamma_matches_d2);
  // honest ordinary ranks: d_3 = 0 (the CM form 7.3.b.a has a_5 = 0),
  // d_4 = 3 (16 = a_5(7.4.a.a) is a 5-adic unit and the character forms are
  // ordinary), d_5 = 4, d_6 = 7
  REQUIRE(t.d_k.size() == 5);
  CHECK(t.d_k[1] == 0);
  CHECK(t.d_k[2] == 3);
  CHECK(t.d_k[3] == 4);
  CHECK(t.d_k[4] == 7);
  CHECK(t.sum_dk == 14);
  // the summed form of the identity fails on honest data ...
  CHECK(!t.identity_holds);
  // ... while the top-weight form holds exactly
  CHECK(t.identity_top);
}

TEST_CASE("gamma + delta - 1 = d_{p+1} across small pairs") {
  for (auto [p, N] : std::vector<std::pair<int64_t, int64_t>>{{3, 5}, {3, 7}, {3, 4}, {5, 4}}) {
    auto t = verify_d_identity(p, N);
    CHECK(t.identity_top);
    CHECK(t.gamma_matches_d2);
  }
}

#include "atkin.hpp"

TEST_CASE("atkin-lehner relations and twisted pairing at level Np") {
  auto r = atkin_lehner_check(7, 4);
  CHECK(r.w_full_squares_to_minus_one_diamond);
  CHECK(r.w_eps_squares);
  CHECK(r.w_zeta_squares);
  CHECK(r.w_commutation_twist);
  CHECK(r.w_diamond_conjugation);
  CHECK(r.pairing_skew);
  CHECK(r.pairing_nondegenerate);
  CHECK(r.hecke_adjointness);
  CHECK(r.up_star_intertwined);
  CHECK(r.twisted_pairing_self_adjoint);
  // ordinary rank at level Np equals the summed tame-level ordinary ranks
  CHECK(r.ordinary_rank == 5);
}

#include "report.hpp"

TEST_CASE("config validation rejects bad pairs") {
  Json j;
  j["pairs"] = Json::array({Json::array({5, 5})});
  CHECK_THROWS(RunConfig::from_json(j));
  Json j2;
  j2["pairs"] = Json::array({Json::array({2, 7})});
  CHECK_THROWS(RunConfig::from_json(j2));
  Json j3;
  j3["pairs"] = Json::array({Json::array({3, 1})}); // Np = 3 <= 4
  CHECK_THROWS(RunConfig::from_json(j3));
  Json ok;
  ok["pairs"] = Json::array({Json::array({5, 7})});
  CHECK_NOTHROW(RunConfig::from_json(ok));
}
