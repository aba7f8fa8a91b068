#include "atkin.hpp"

#include "newton.hpp"

#include <numeric>

namespace charp {

namespace {

int64_t mod(int64_t a, int64_t m) {
  a %= m;
  return a < 0 ? a + m : a;
}

int64_t crt(int64_t a, int64_t p, int64_t b, int64_t N) {
  // x = a mod p, x = b mod N
  for (int64_t x = 0; x < p * N; x++)
    if (mod(x, p) == mod(a, p) && mod(x, N) == mod(b, N)) return x;
  throw std::logic_error("crt failed");
}

// smallest unit >= 2 modulo n (1 when n <= 2)
int64_t small_unit(int64_t n) {
  for (int64_t v = 2; v < n; v++)
    if (std::gcd(v, n) == 1) return v;
  return 1;
}

} // namespace

AtkinLehnerReport atkin_lehner_check(int64_t p, int64_t N) {
  AtkinLehnerReport rep;
  rep.p = p;
  rep.N = N;
  const int64_t M = p * N;
  if (std::gcd(p, N) != 1) throw std::invalid_argument("need p and N coprime");
  ManinSymbolSpace s(M, 2);
  HeckeOps H(s);
  QQ Q;
  const Mat<QQ> I = Mat<QQ>::identity(Q, s.dim());

  auto dia = [&](int64_t u) { return H.diamond(u); };
  auto dia2 = [&](int64_t up, int64_t vN) { return dia(crt(up, p, vN, N)); };

  // Partial involutions: the classical normalization (y = 1 mod Q, x = 1 mod
  // M/Q) squares to <-1 at Q><Q^{-1} away>; the moduli normalization used here
  // differs by a diamond twist, w_eps = <p>_N W_p and w_zeta = <N> W_N, which
  // squares to <p>_N<-1> resp. <-1>_N<N>.  w_r is the composite (w_zeta first).
  Mat<QQ> w_eps = dia2(1, p).mul(H.atkin_lehner_partial(p));
  Mat<QQ> w_zeta = dia2(N, 1).mul(H.atkin_lehner_partial(N));
  Mat<QQ> w_full = w_eps.mul(w_zeta);
  // sanity: the composite is the action of the canonical full-level matrix up
  // to a diamond twist
  {
    Mat<QQ> wm = H.atkin_lehner_full();
    auto wm_inv = inverse(wm);
    if (!wm_inv) throw std::logic_error("full Atkin-Lehner not invertible");
    Mat<QQ> ratio = wm_inv->mul(w_full);
    bool is_diamond = false;
    for (int64_t u = 1; u < M && !is_diamond; u++)
      if (std::gcd(u, M) == 1 && ratio == dia(u)) is_diamond = true;
    if (!is_diamond) throw std::logic_error("w_eps w_zeta is not a diamond twist of W_M");
  }

  // w_r^2 = <-1>_N <-1> (trivial at weight 2, but compare against the diamond)
  rep.w_full_squares_to_minus_one_diamond =
      w_full.mul(w_full) == dia(M - 1) && dia(M - 1) == I;
  // w_eps^2 = <p>_N <-1>
  rep.w_eps_squares = w_eps.mul(w_eps) == dia2(-1, p);
  // w_zeta^2 = <-1>_N <N>
  rep.w_zeta_squares = w_zeta.mul(w_zeta) == dia2(N, -1);
  // w_zeta w_eps = <p>_N^{-1} <N> w_eps w_zeta
  {
    int64_t pinv = 0;
    for (int64_t x = 1; x < N; x++)
      if (mod(x * p, N) == 1) pinv = x;
    rep.w_commutation_twist =
        w_zeta.mul(w_eps) == dia2(N, pinv).mul(w_eps).mul(w_zeta);
  }
  // diamond conjugation: w <u><v>_N = <u^{-1}><v^{-1}>_N w, and the partial rules
  {
    bool ok = true;
    for (auto [u, v] : std::vector<std::pair<int64_t, int64_t>>{{small_unit(p), small_unit(N)},
                                                                {p - 1, N - 1}}) {
      if (std::gcd(u, p) != 1 || std::gcd(v, N) != 1) continue;
      int64_t uinv = 0, vinv = 0;
      for (int64_t x = 1; x < p; x++)
        if (mod(x * u, p) == 1) uinv = x;
      for (int64_t x = 1; x < N; x++)
        if (mod(x * v, N) == 1) vinv = x;
      ok = ok && w_full.mul(dia2(u, v)) == dia2(uinv, vinv).mul(w_full);
      ok = ok && w_eps.mul(dia2(u, v)) == dia2(uinv, v).mul(w_eps);
      ok = ok && w_zeta.mul(dia2(u, v)) == dia2(u, vinv).mul(w_zeta);
    }
    rep.w_diamond_conjugation = ok;
  }

  // cuspidal restrictions for the pairing work
  Mat<QQ> E = intersection_pairing_cuspidal(s);
  Mat<QQ> up = s.restrict_cuspidal(H.u_ell_paths(p));
  Mat<QQ> w = s.restrict_cuspidal(w_full);
  auto winv = inverse(w);
  if (!winv) throw std::logic_error("w not invertible on the cuspidal subspace");
  Mat<QQ> up_star = w.mul(up).mul(*winv);

  rep.pairing_skew = E == E.transpose().neg();
  rep.pairing_nondegenerate = inverse(E).has_value();

  // E(T x, y) = E(x, w T w^{-1} y) for T = U_p, T_ell (ell prime to M), diamonds
  {
    bool ok = true;
    auto adj_ok = [&](const Mat<QQ>& T) {
      Mat<QQ> Tstar = w.mul(T).mul(*winv);
      return T.transpose().mul(E) == E.mul(Tstar);
    };
    ok = ok && adj_ok(up);
    int64_t ell = 3;
    while (M % ell == 0) ell += 2;
    ok = ok && adj_ok(s.restrict_cuspidal(H.hecke(ell)));
    ok = ok && adj_ok(s.restrict_cuspidal(dia(crt(small_unit(p), p, 1, N))));
    rep.hecke_adjointness = ok;
  }

  // U_p* from the p-part alone: conjugating by w_eps agrees with the full
  // conjugation up to a power of the diamond <p>_N
  {
    Mat<QQ> weps_c = s.restrict_cuspidal(w_eps);
    auto weps_c_inv = inverse(weps_c);
    bool found = false;
    if (weps_c_inv) {
      Mat<QQ> conj = weps_c.mul(up).mul(*weps_c_inv);
      for (int t = -2; t <= 2 && !found; t++) {
        int64_t pt = 1;
        for (int i = 0; i < std::abs(t); i++) pt = mod(pt * p, N);
        if (t < 0) {
          int64_t inv = 0;
          for (int64_t x = 1; x < N; x++)
            if (mod(x * pt, N) == 1) inv = x;
          pt = inv;
        }
        Mat<QQ> tw = s.restrict_cuspidal(dia2(1, pt));
        if (conj == tw.mul(up_star) || conj == up_star.mul(tw)) found = true;
      }
    }
    rep.up_star_intertwined = found;
  }

  // twisted pairing <x, y> := E(x, w U_p* y): Hecke self-adjointness, checked
  // on the whole cuspidal space (which contains the ordinary part); the
  // ordinary rank itself comes from the Newton polygon of U_p*
  {
    auto cp = charpoly(up_star);
    for (auto& c : cp)
      if (c.get_den() != 1) throw std::logic_error("U_p* characteristic polynomial not integral");
    rep.ordinary_rank = newton_unit_root_count(cp, p).slope_zero_length / 2;
    Mat<QQ> pairing = E.mul(w).mul(up_star);
    auto self_adjoint = [&](const Mat<QQ>& Tstar) {
      // <T* x, y> = <x, T* y>
      return Tstar.transpose().mul(pairing) == pairing.mul(Tstar);
    };
    bool ok = self_adjoint(up_star);
    int64_t ell = 3;
    while (M % ell == 0) ell += 2;
    Mat<QQ> tl = s.restrict_cuspidal(H.hecke(ell));
    ok = ok && self_adjoint(w.mul(tl).mul(*winv));
    Mat<QQ> du = s.restrict_cuspidal(dia(crt(small_unit(p), p, small_unit(N), N)));
    ok = ok && self_adjoint(w.mul(du).mul(*winv));
    rep.twisted_pairing_self_adjoint = ok;
  }

  if (!rep.all_ok()) rep.failure = "one or more Atkin-Lehner identities failed";
  return rep;
}

} // namespace charp
