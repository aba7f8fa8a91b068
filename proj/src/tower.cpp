#include "tower.hpp"

#include "exact.hpp"

#include <algorithm>

namespace charp {

// ---------------------------------------------------------------------------
// Additive linear algebra over Z/p^m
// ---------------------------------------------------------------------------

namespace {

int64_t ipow(int64_t b, int e) { return Fq::ipow(b, e); }

int val_of(int64_t x, int64_t p, int m) {
  if (x == 0) return m;
  int v = 0;
  while (x % p == 0) {
    x /= p;
    v++;
  }
  return v;
}

int64_t inv_mod(int64_t a, int64_t mod) {
  int64_t t = 0, t1 = 1, r = mod, r1 = ((a % mod) + mod) % mod;
  while (r1 != 0) {
    int64_t q = r / r1;
    int64_t tmp = t - q * t1;
    t = t1;
    t1 = tmp;
    tmp = r - q * r1;
    r = r1;
    r1 = tmp;
  }
  return ((t % mod) + mod) % mod;
}

} // namespace

int64_t LocalSmith::image_log_card() const {
  int64_t s = 0;
  for (int v : vals) s += std::max(0, m - v);
  return s;
}

std::optional<std::vector<int64_t>> LocalSmith::solve(const std::vector<int64_t>& b) const {
  const int64_t pm = ipow(p, m);
  // y = U b
  std::vector<int64_t> y(size_t(rows), 0);
  for (int i = 0; i < rows; i++) {
    __int128 acc = 0;
    for (int j = 0; j < rows; j++) acc += __int128(U[size_t(i)][size_t(j)]) * b[size_t(j)];
    y[size_t(i)] = int64_t(acc % pm);
    if (y[size_t(i)] < 0) y[size_t(i)] += pm;
  }
  std::vector<int64_t> z(size_t(cols), 0);
  for (int i = 0; i < std::min(rows, cols); i++) {
    int v = i < int(vals.size()) ? vals[size_t(i)] : m;
    int64_t pv = ipow(p, std::min(v, m));
    if (y[size_t(i)] % pv != 0) return std::nullopt;
    if (v >= m) {
      if (y[size_t(i)] % pm != 0) return std::nullopt;
      z[size_t(i)] = 0;
    } else {
      z[size_t(i)] = y[size_t(i)] / pv;
    }
  }
  for (int i = std::min(rows, cols); i < rows; i++)
    if (y[size_t(i)] % pm != 0) return std::nullopt;
  // x = V z
  std::vector<int64_t> x(size_t(cols), 0);
  for (int i = 0; i < cols; i++) {
    __int128 acc = 0;
    for (int j = 0; j < cols; j++) acc += __int128(V[size_t(i)][size_t(j)]) * z[size_t(j)];
    x[size_t(i)] = int64_t(acc % pm);
    if (x[size_t(i)] < 0) x[size_t(i)] += pm;
  }
  return x;
}

LocalSmith local_smith(std::vector<std::vector<int64_t>> a, int rows, int cols, int64_t p, int m) {
  const int64_t pm = ipow(p, m);
  LocalSmith out;
  out.rows = rows;
  out.cols = cols;
  out.p = p;
  out.m = m;
  out.U.assign(size_t(rows), std::vector<int64_t>(size_t(rows), 0));
  out.V.assign(size_t(cols), std::vector<int64_t>(size_t(cols), 0));
  for (int i = 0; i < rows; i++) out.U[size_t(i)][size_t(i)] = 1;
  for (int i = 0; i < cols; i++) out.V[size_t(i)][size_t(i)] = 1;

  auto row_op = [&](std::vector<std::vector<int64_t>>& mat, int dst, int src, int64_t f, int n) {
    for (int j = 0; j < n; j++) {
      __int128 v = mat[size_t(dst)][size_t(j)] + __int128(f) * mat[size_t(src)][size_t(j)];
      mat[size_t(dst)][size_t(j)] = int64_t(((v % pm) + pm) % pm);
    }
  };
  auto col_op = [&](std::vector<std::vector<int64_t>>& mat, int dst, int src, int64_t f, int n) {
    for (int i = 0; i < n; i++) {
      __int128 v = mat[size_t(i)][size_t(dst)] + __int128(f) * mat[size_t(i)][size_t(src)];
      mat[size_t(i)][size_t(dst)] = int64_t(((v % pm) + pm) % pm);
    }
  };

  int k = 0;
  int nmin = std::min(rows, cols);
  for (; k < nmin; k++) {
    // find entry of minimal valuation in the remaining block
    int bi = -1, bj = -1, bv = m;
    for (int i = k; i < rows; i++)
      for (int j = k; j < cols; j++) {
        int v = val_of(a[size_t(i)][size_t(j)], p, m);
        if (v < bv) {
          bv = v;
          bi = i;
          bj = j;
        }
      }
    if (bi < 0) break; // all zero
    if (bi != k) {
      std::swap(a[size_t(bi)], a[size_t(k)]);
      std::swap(out.U[size_t(bi)], out.U[size_t(k)]);
    }
    if (bj != k) {
      for (int i = 0; i < rows; i++) std::swap(a[size_t(i)][size_t(bj)], a[size_t(i)][size_t(k)]);
      for (int i = 0; i < cols; i++) std::swap(out.V[size_t(i)][size_t(bj)], out.V[size_t(i)][size_t(k)]);
    }
    // normalize pivot to p^bv
    int64_t piv = a[size_t(k)][size_t(k)];
    int64_t unit = piv / ipow(p, bv);
    int64_t uinv = inv_mod(unit, pm);
    for (int j = 0; j < cols; j++)
      a[size_t(k)][size_t(j)] = int64_t((__int128(a[size_t(k)][size_t(j)]) * uinv) % pm);
    for (int j = 0; j < rows; j++)
      out.U[size_t(k)][size_t(j)] = int64_t((__int128(out.U[size_t(k)][size_t(j)]) * uinv) % pm);
    int64_t pv = ipow(p, bv);
    // clear column and row (entries have valuation >= bv)
    for (int i = k + 1; i < rows; i++) {
      int64_t e = a[size_t(i)][size_t(k)];
      if (e == 0) continue;
      int64_t f = pm - e / pv; // subtract (e/p^v) * pivot row
      row_op(a, i, k, f, cols);
      row_op(out.U, i, k, f, rows);
    }
    for (int j = k + 1; j < cols; j++) {
      int64_t e = a[size_t(k)][size_t(j)];
      if (e == 0) continue;
      int64_t f = pm - e / pv;
      col_op(a, j, k, f, rows);
      col_op(out.V, j, k, f, cols);
    }
    out.vals.push_back(bv);
  }
  return out;
}

std::vector<std::vector<int64_t>> additive_matrix(const Mat<Fq>& mat) {
  const Fq& A = mat.ring();
  const int deg = A.degree();
  const int R = mat.rows() * deg, C = mat.cols() * deg;
  std::vector<std::vector<int64_t>> out(size_t(R), std::vector<int64_t>(size_t(C), 0));
  for (int i = 0; i < mat.rows(); i++)
    for (int j = 0; j < mat.cols(); j++) {
      const FqElem& e = mat.at(i, j);
      if (A.is_zero(e)) continue;
      // multiplication matrix of e on coefficient vectors
      for (int col = 0; col < deg; col++) {
        FqElem xc = A.zero();
        xc.c[size_t(col)] = 1;
        FqElem prod = A.mul(e, xc);
        for (int row = 0; row < deg; row++)
          out[size_t(i * deg + row)][size_t(j * deg + col)] = prod.c[size_t(row)];
      }
    }
  return out;
}

std::optional<std::vector<FqElem>> local_solve(const Mat<Fq>& mat, const std::vector<FqElem>& b) {
  const Fq& A = mat.ring();
  if (A.is_field()) return solve(mat, b);
  const int deg = A.degree();
  auto add = additive_matrix(mat);
  auto sm = local_smith(std::move(add), mat.rows() * deg, mat.cols() * deg, A.p(), A.precision());
  std::vector<int64_t> bb(size_t(mat.rows() * deg), 0);
  for (int i = 0; i < mat.rows(); i++)
    for (int k = 0; k < deg; k++) bb[size_t(i * deg + k)] = b[size_t(i)].c[size_t(k)];
  auto x = sm.solve(bb);
  if (!x) return std::nullopt;
  std::vector<FqElem> res(size_t(mat.cols()), A.zero());
  for (int j = 0; j < mat.cols(); j++)
    for (int k = 0; k < deg; k++) res[size_t(j)].c[size_t(k)] = (*x)[size_t(j * deg + k)];
  return res;
}

// ---------------------------------------------------------------------------
// Ring chains and towers
// ---------------------------------------------------------------------------

RingChain RingChain::constant(const Fq& A, int r_max) {
  RingChain c;
  c.rings.assign(size_t(r_max), A);
  return c;
}

RingChain RingChain::cyclotomic(int64_t p, int m, int r_max) {
  RingChain c;
  for (int r = 1; r <= r_max; r++) c.rings.push_back(Fq::truncated_cyclotomic(p, r, m));
  return c;
}

bool RingChain::is_constant() const {
  for (size_t i = 1; i < rings.size(); i++)
    if (!(rings[i] == rings[0])) return false;
  return true;
}

FqElem RingChain::map_up(int s, int r, const FqElem& x) const {
  if (s == r || is_constant()) return x;
  const Fq& As = at(s);
  const Fq& Ar = at(r);
  // zeta_{p^s} -> zeta_{p^r}^{p^{r-s}}
  int64_t shift = ipow(As.p(), r - s);
  std::vector<int64_t> lifted(size_t(As.degree()) * size_t(shift), 0);
  for (int i = 0; i < As.degree(); i++) lifted[size_t(i) * size_t(shift)] = x.c[size_t(i)];
  return Ar.from_coeffs(std::move(lifted));
}

Mat<Fq> RingChain::map_up(int s, int r, const Mat<Fq>& m) const {
  if (s == r || is_constant()) return m;
  Mat<Fq> out(at(r), m.rows(), m.cols());
  for (int i = 0; i < m.rows(); i++)
    for (int j = 0; j < m.cols(); j++) out.at(i, j) = map_up(s, r, m.at(i, j));
  return out;
}

Mat<Fq> TruncatedTower::transition(int r, int s) const {
  if (r < s) throw std::invalid_argument("transition needs r >= s");
  // compose consecutive maps, promoting lower-level matrices to A_r coefficients
  Mat<Fq> acc = Mat<Fq>::identity(chain.at(r), at(r).dim());
  for (int lev = r; lev > s; lev--) {
    Mat<Fq> step = chain.map_up(lev, r, down.at(size_t(lev - 2)));
    acc = step.mul(acc);
  }
  return acc;
}

Mat<Fq> TruncatedTower::gamma_at(int s, int r) const { return chain.map_up(s, r, at(s).gamma); }

void TruncatedTower::validate() const {
  for (int r = 1; r <= r_max(); r++) {
    if (!(at(r).ring == chain.at(r))) throw std::invalid_argument("tower level ring mismatch");
    if (!at(r).action_valid()) throw std::invalid_argument("gamma order wrong at level " + std::to_string(r));
  }
  for (int r = 2; r <= r_max(); r++) {
    const Mat<Fq>& rho = down.at(size_t(r - 2));
    if (rho.rows() != at(r - 1).dim() || rho.cols() != at(r).dim())
      throw std::invalid_argument("transition shape mismatch at level " + std::to_string(r));
    // equivariance: rho . gamma_r = gamma_{r-1} . rho (gamma_{r-1} promoted to A_r)
    if (rho.mul(at(r).gamma) != gamma_at(r - 1, r).mul(rho))
      throw std::invalid_argument("transition not equivariant at level " + std::to_string(r));
  }
}

TruncatedTower TruncatedTower::regular(const RingChain& chain, int d) {
  TruncatedTower t;
  t.chain = chain;
  for (int r = 1; r <= chain.r_max(); r++)
    t.levels.push_back(GroupRingModule::regular(chain.at(r), CyclicPLevel{chain.at(r).p(), r}, d));
  for (int r = 2; r <= chain.r_max(); r++) {
    const Fq& A = chain.at(r);
    int64_t q_hi = t.at(r).level.group_order();
    int64_t q_lo = t.at(r - 1).level.group_order();
    Mat<Fq> rho(A, int(q_lo) * d, int(q_hi) * d);
    // A[D_1/D_r] -> A[D_1/D_{r-1}], gamma^i -> gamma^{i mod q_lo}, per copy
    for (int c = 0; c < d; c++)
      for (int64_t i = 0; i < q_hi; i++)
        rho.at(c * int(q_lo) + int(i % q_lo), c * int(q_hi) + int(i)) = A.one();
    t.down.push_back(std::move(rho));
  }
  return t;
}

// ---------------------------------------------------------------------------
// Hypotheses
// ---------------------------------------------------------------------------

namespace {

struct ReducedModule {
  Fq ring;       // the quotient ring A_r/I_r
  Mat<Fq> gamma; // action on the reduced module
};

ReducedModule reduce_module(const GroupRingModule& mod, IdealKind ideal) {
  const Fq& A = mod.ring;
  switch (ideal) {
    case IdealKind::Zero:
      return {A, mod.gamma};
    case IdealKind::Maximal: {
      Fq k = A.residue_field();
      Mat<Fq> g(k, mod.dim(), mod.dim());
      for (int i = 0; i < mod.dim(); i++)
        for (int j = 0; j < mod.dim(); j++) g.at(i, j) = A.reduce_to_residue(mod.gamma.at(i, j));
      return {k, g};
    }
    case IdealKind::CyclotomicAugmentation: {
      if (A.kind() != RingKind::TruncatedCyclotomic)
        throw std::invalid_argument("augmentation ideal needs a truncated-cyclotomic base");
      Fq k = Fq::padic_truncation(A.p(), A.precision());
      auto aug = [&](const FqElem& e) {
        int64_t s = 0;
        for (auto v : e.c) s = (s + v) % k.pm();
        return k.from_int(s);
      };
      Mat<Fq> g(k, mod.dim(), mod.dim());
      for (int i = 0; i < mod.dim(); i++)
        for (int j = 0; j < mod.dim(); j++) g.at(i, j) = aug(mod.gamma.at(i, j));
      return {k, g};
    }
  }
  throw std::logic_error("unreachable");
}

// Freeness of a module over Abar[D_1/D_r] for local Abar: the group ring is
// local, so freeness of rank d is equivalent to (i) minimal generator count d
// over the residue field and (ii) matching cardinality.
bool reduced_free_of_rank(const ReducedModule& rm, const CyclicPLevel& lv, int64_t d,
                          std::string* note) {
  int64_t q = lv.group_order();
  int n = rm.gamma.rows();
  if (n != d * q) {
    if (note) *note = "dimension " + std::to_string(n) + " != d * group order";
    return false;
  }
  if (rm.ring.is_field()) {
    GroupRingModule gm(rm.ring, lv, rm.gamma);
    auto fr = is_free_of_rank(gm);
    if (!fr.free || !fr.rank || *fr.rank != d) {
      if (note) *note = "Jordan criterion failed";
      return false;
    }
    return true;
  }
  // local non-field quotient: minimal generators over the residue field
  Fq k = rm.ring.residue_field();
  Mat<Fq> gbar(k, n, n);
  for (int i = 0; i < n; i++)
    for (int j = 0; j < n; j++) gbar.at(i, j) = rm.ring.reduce_to_residue(rm.gamma.at(i, j));
  Mat<Fq> nm = gbar.sub(Mat<Fq>::identity(k, n));
  int mingens = n - rank(nm);
  if (mingens != d) {
    if (note) *note = "minimal generator count " + std::to_string(mingens) + " != d";
    return false;
  }
  // cardinality matches automatically: the module is Abar-free of dimension n = d q
  return true;
}

} // namespace

TowerHypothesesReport check_tower_hypotheses(const TruncatedTower& t, IdealKind ideals) {
  t.validate();
  TowerHypothesesReport rep;
  rep.per_level.resize(size_t(t.r_max()));
  // level 1 fixes the common rank d: trivial group, so d = dim of the reduction
  {
    auto rm = reduce_module(t.at(1), ideals);
    rep.d = rm.gamma.rows();
    rep.per_level[0].free_of_common_rank = true;
    rep.per_level[0].rank = rep.d;
  }
  bool all = true;
  for (int r = 2; r <= t.r_max(); r++) {
    auto& lh = rep.per_level[size_t(r - 1)];
    auto rm = reduce_module(t.at(r), ideals);
    std::string note;
    lh.free_of_common_rank = reduced_free_of_rank(rm, t.at(r).level, rep.d, &note);
    lh.rank = lh.free_of_common_rank ? rep.d : -1;
    lh.note = note;
    // surjectivity of the reduced transition rho_{r,r-1}: by Nakayama it is
    // equivalent to surjectivity over the residue field
    Fq k = t.chain.at(r).residue_field();
    const Mat<Fq>& rho = t.down.at(size_t(r - 2));
    Mat<Fq> rbar(k, rho.rows(), rho.cols());
    for (int i = 0; i < rho.rows(); i++)
      for (int j = 0; j < rho.cols(); j++)
        rbar.at(i, j) = t.chain.at(r).reduce_to_residue(rho.at(i, j));
    lh.transition_surjective = rank(rbar) == rho.rows();
    if (!lh.free_of_common_rank || !lh.transition_surjective) {
      all = false;
      if (rep.failure.empty())
        rep.failure = "level " + std::to_string(r) + ": " +
                      (!lh.free_of_common_rank ? "freeness hypothesis fails (" + note + ")"
                                               : "transition not surjective");
    }
  }
  rep.all_hold = all;
  return rep;
}

// ---------------------------------------------------------------------------
// Control isomorphisms
// ---------------------------------------------------------------------------

ControlResult control_isomorphism(const TruncatedTower& t, int r, int s,
                                  const TowerHypothesesReport& hyp) {
  if (!hyp.all_hold) throw std::domain_error("control_isomorphism: hypotheses not verified");
  if (s > r || s < 1) throw std::invalid_argument("control needs 1 <= s <= r");
  const Fq& A = t.chain.at(r);
  ControlResult res{false, t.transition(r, s), 0, ""};
  const Mat<Fq>& rho = res.witness;
  int64_t qs = ipow(A.p(), s - 1);
  // K = image of gamma_r^{qs} - 1; well-definedness: rho . (gamma^{qs} - 1) = 0
  Mat<Fq> shifted = t.at(r).gamma.pow(qs).sub(Mat<Fq>::identity(A, t.at(r).dim()));
  if (!rho.mul(shifted).is_zero()) {
    res.note = "transition does not kill the augmentation kernel";
    return res;
  }
  // surjectivity over the residue field
  Fq k = A.residue_field();
  auto reduce = [&](const Mat<Fq>& m) {
    Mat<Fq> out(k, m.rows(), m.cols());
    for (int i = 0; i < m.rows(); i++)
      for (int j = 0; j < m.cols(); j++) out.at(i, j) = A.reduce_to_residue(m.at(i, j));
    return out;
  };
  Mat<Fq> rbar = reduce(rho);
  int rk = rank(rbar);
  res.cokernel_dim = rho.rows() - rk;
  if (res.cokernel_dim != 0) {
    res.note = "cokernel dimension " + std::to_string(res.cokernel_dim);
    return res;
  }
  // injectivity by cardinality: |M_r| / |im(gamma^{qs} - 1)| == |M_s (x) A_r|
  int64_t log_cards;
  if (A.is_field()) {
    log_cards = rank(shifted); // log over the field size
    bool inj = t.at(r).dim() - log_cards == t.at(s).dim();
    res.holds = inj;
    if (!inj) res.note = "quotient dimension mismatch";
    return res;
  }
  auto sm = local_smith(additive_matrix(shifted), shifted.rows() * A.degree(),
                        shifted.cols() * A.degree(), A.p(), A.precision());
  // log_p cardinalities
  int64_t log_Mr = int64_t(t.at(r).dim()) * A.degree() * A.precision();
  int64_t log_K = sm.image_log_card();
  int64_t log_Ms = int64_t(t.at(s).dim()) * A.degree() * A.precision();
  res.holds = log_Mr - log_K == log_Ms;
  if (!res.holds) res.note = "cardinality mismatch in quotient";
  return res;
}

// ---------------------------------------------------------------------------
// Truncated limits
// ---------------------------------------------------------------------------

TruncatedLimit truncated_limit(const TruncatedTower& t, const TowerHypothesesReport& hyp) {
  if (!hyp.all_hold) throw std::domain_error("truncated_limit: hypotheses not verified");
  TruncatedLimit out;
  int64_t d = hyp.d;
  out.basis_at_level.resize(size_t(t.r_max()));
  // level 1: M_1 is coordinate-free of rank d over A_1; use standard coordinates
  {
    const Fq& A1 = t.chain.at(1);
    std::vector<std::vector<FqElem>> b;
    for (int64_t i = 0; i < d; i++) {
      std::vector<FqElem> v(size_t(t.at(1).dim()), A1.zero());
      v[size_t(i)] = A1.one();
      b.push_back(std::move(v));
    }
    out.basis_at_level[0] = std::move(b);
  }
  for (int r = 2; r <= t.r_max(); r++) {
    const Fq& A = t.chain.at(r);
    const Mat<Fq>& rho = t.down.at(size_t(r - 2));
    std::vector<std::vector<FqElem>> lifted;
    for (int64_t i = 0; i < d; i++) {
      // target: previous basis vector with coefficients promoted to A_r
      std::vector<FqElem> target;
      for (const auto& e : out.basis_at_level[size_t(r - 2)][size_t(i)])
        target.push_back(t.chain.map_up(r - 1, r, e));
      auto x = local_solve(rho, target);
      if (!x) throw std::runtime_error("truncated_limit: transition not surjective on basis");
      lifted.push_back(std::move(*x));
    }
    // verify the gamma-translates of the lifted vectors form an A_r-basis
    int64_t q = t.at(r).level.group_order();
    std::vector<std::vector<FqElem>> translates;
    for (const auto& v : lifted) {
      std::vector<FqElem> w = v;
      for (int64_t j = 0; j < q; j++) {
        translates.push_back(w);
        if (j + 1 < q) w = t.at(r).gamma.apply(w);
      }
    }
    Mat<Fq> B = columns_to_matrix(A, t.at(r).dim(), translates);
    // invertibility over the local ring == residue invertibility
    Fq k = A.residue_field();
    Mat<Fq> Bbar(k, B.rows(), B.cols());
    for (int i = 0; i < B.rows(); i++)
      for (int j = 0; j < B.cols(); j++) Bbar.at(i, j) = A.reduce_to_residue(B.at(i, j));
    if (B.rows() != B.cols() || rank(Bbar) != B.rows())
      throw std::runtime_error("truncated_limit: lifted vectors are not a group-ring basis");
    out.basis_at_level[size_t(r - 1)] = std::move(lifted);
  }
  out.basis = out.basis_at_level[size_t(t.r_max() - 1)];
  // specialization: control isomorphisms to every lower level
  out.specialization_verified = true;
  for (int s = 1; s <= t.r_max(); s++) {
    auto c = control_isomorphism(t, t.r_max(), s, hyp);
    if (!c.holds) out.specialization_verified = false;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Pairings
// ---------------------------------------------------------------------------

PairingCompatReport verify_pairing_compat(const PairingFamily& pf, const TruncatedTower& t,
                                          const TruncatedTower& t2) {
  PairingCompatReport rep;
  rep.perfect_all_levels = true;
  rep.group_self_adjoint = true;
  rep.change_of_level = true;
  for (int r = 1; r <= t.r_max(); r++) {
    const Fq& A = t.chain.at(r);
    const Mat<Fq>& G = pf.gram.at(size_t(r - 1));
    // perfect: residue determinant nonzero (square shapes required)
    Fq k = A.residue_field();
    Mat<Fq> Gbar(k, G.rows(), G.cols());
    for (int i = 0; i < G.rows(); i++)
      for (int j = 0; j < G.cols(); j++) Gbar.at(i, j) = A.reduce_to_residue(G.at(i, j));
    if (G.rows() != G.cols() || rank(Gbar) != G.rows()) {
      rep.perfect_all_levels = false;
      if (rep.failure.empty()) rep.failure = "pairing not perfect at level " + std::to_string(r);
    }
    // self-adjointness of the group action: gamma^T G = G gamma'
    if (t.at(r).gamma.transpose().mul(G) != G.mul(t2.at(r).gamma)) {
      rep.group_self_adjoint = false;
      if (rep.failure.empty()) rep.failure = "group elements not self-adjoint at level " + std::to_string(r);
    }
  }
  // change of level: <rho m, rho' m'>_s = sum_{delta in D_s/D_r} <m, delta^{-1} m'>_r
  for (int r = 2; r <= t.r_max(); r++)
    for (int s = 1; s < r; s++) {
      const Fq& A = t.chain.at(r);
      Mat<Fq> lhs = t.transition(r, s).transpose()
                        .mul(t.chain.map_up(s, r, pf.gram.at(size_t(s - 1))))
                        .mul(t2.transition(r, s));
      int64_t qs = ipow(A.p(), s - 1);
      int64_t qr = t.at(r).level.group_order();
      auto ginv = inverse(t2.at(r).gamma);
      if (!ginv) throw std::invalid_argument("gamma action not invertible");
      Mat<Fq> step = ginv->pow(qs);
      Mat<Fq> acc = Mat<Fq>::identity(A, t2.at(r).dim());
      Mat<Fq> rhs(A, t.at(r).dim(), t2.at(r).dim());
      for (int64_t j = 0; j < qr / qs; j++) {
        rhs = rhs.add(pf.gram.at(size_t(r - 1)).mul(acc));
        acc = acc.mul(step);
      }
      if (lhs != rhs) {
        rep.change_of_level = false;
        if (rep.failure.empty())
          rep.failure = "change-of-level identity fails at (r,s) = (" + std::to_string(r) + "," +
                        std::to_string(s) + ")";
      }
    }
  return rep;
}

LambdaPairingResult build_lambda_pairing(const TruncatedTower& t, const TruncatedTower& t2,
                                         const PairingFamily& pf) {
  auto compat = verify_pairing_compat(pf, t, t2);
  if (!compat.ok())
    throw std::domain_error("build_lambda_pairing: pairing hypotheses fail: " + compat.failure);
  LambdaPairingResult out;
  for (int r = 1; r <= t.r_max(); r++) {
    const Fq& A = t.chain.at(r);
    int64_t q = t.at(r).level.group_order();
    auto ginv = inverse(t2.at(r).gamma);
    LambdaPairingLevel lvl;
    Mat<Fq> acc = Mat<Fq>::identity(A, t2.at(r).dim());
    for (int64_t tpow = 0; tpow < q; tpow++) {
      lvl.coeff.push_back(pf.gram.at(size_t(r - 1)).mul(acc));
      acc = acc.mul(*ginv);
    }
    out.levels.push_back(std::move(lvl));
  }
  // perfectness: Gram matrix over the local group ring in free bases,
  // invertible iff its reduction mod the maximal ideal (gamma -> 1, mod m_A) is
  auto hyp1 = check_tower_hypotheses(t, t.chain.at(1).is_field() ? IdealKind::Zero : IdealKind::Maximal);
  auto hyp2 = check_tower_hypotheses(t2, t2.chain.at(1).is_field() ? IdealKind::Zero : IdealKind::Maximal);
  if (!hyp1.all_hold || !hyp2.all_hold)
    throw std::domain_error("build_lambda_pairing: towers do not satisfy the freeness hypotheses");
  auto lim1 = truncated_limit(t, hyp1);
  auto lim2 = truncated_limit(t2, hyp2);
  out.perfect_all_levels = true;
  for (int r = 1; r <= t.r_max(); r++) {
    const Fq& A = t.chain.at(r);
    Fq k = A.residue_field();
    int dd = int(hyp1.d);
    // reduced Gram: sum_t <e_i, gamma^{-t} e'_j> reduced to the residue field
    Mat<Fq> red(k, dd, dd);
    const auto& b1 = lim1.basis_at_level[size_t(r - 1)];
    const auto& b2 = lim2.basis_at_level[size_t(r - 1)];
    for (int i = 0; i < dd; i++)
      for (int j = 0; j < dd; j++) {
        FqElem s = A.zero();
        for (const auto& C : out.levels[size_t(r - 1)].coeff) {
          auto Cv = C.apply(b2[size_t(j)]);
          FqElem dot = A.zero();
          for (size_t z = 0; z < Cv.size(); z++) dot = A.add(dot, A.mul(b1[size_t(i)][z], Cv[z]));
          s = A.add(s, dot);
        }
        red.at(i, j) = A.reduce_to_residue(s);
      }
    if (rank(red) != dd) {
      out.perfect_all_levels = false;
      if (out.failure.empty()) out.failure = "lambda pairing degenerate at level " + std::to_string(r);
    }
  }
  // compatibility across levels: (rho m, rho' m')_s = (m, m')_r mod ker(Lambda_r -> Lambda_s)
  out.levels_compatible = true;
  for (int r = 2; r <= t.r_max(); r++)
    for (int s = 1; s < r; s++) {
      const Fq& A = t.chain.at(r);
      int64_t qs = ipow(A.p(), s - 1);
      int64_t qr = t.at(r).level.group_order();
      Mat<Fq> rho = t.transition(r, s);
      Mat<Fq> rho2 = t2.transition(r, s);
      for (int64_t tp = 0; tp < qs; tp++) {
        Mat<Fq> lhs = rho.transpose()
                          .mul(t.chain.map_up(s, r, (tp < int64_t(out.levels[size_t(s - 1)].coeff.size()))
                                                        ? out.levels[size_t(s - 1)].coeff[size_t(tp)]
                                                        : Mat<Fq>(t.chain.at(s), t.at(s).dim(), t2.at(s).dim())))
                          .mul(rho2);
        Mat<Fq> rhs(A, t.at(r).dim(), t2.at(r).dim());
        for (int64_t tt = tp; tt < qr; tt += qs)
          rhs = rhs.add(out.levels[size_t(r - 1)].coeff[size_t(tt)]);
        if (lhs != rhs) {
          out.levels_compatible = false;
          if (out.failure.empty())
            out.failure = "lambda pairing incompatible at (r,s) = (" + std::to_string(r) + "," +
                          std::to_string(s) + ")";
        }
      }
    }
  // specialization: augmentation of the level-r pairing recovers the level-1 pairing
  out.specialization_holds = true;
  for (int r = 2; r <= t.r_max(); r++) {
    const Fq& A = t.chain.at(r);
    Mat<Fq> total(A, t.at(r).dim(), t2.at(r).dim());
    for (const auto& C : out.levels[size_t(r - 1)].coeff) total = total.add(C);
    Mat<Fq> expect = t.transition(r, 1).transpose()
                         .mul(t.chain.map_up(1, r, pf.gram.at(0)))
                         .mul(t2.transition(r, 1));
    if (total != expect) {
      out.specialization_holds = false;
      if (out.failure.empty()) out.failure = "specialization fails at level " + std::to_string(r);
    }
  }
  return out;
}

PairingFamily trace_pairing_family(const TruncatedTower& t) {
  PairingFamily pf;
  for (int r = 1; r <= t.r_max(); r++) {
    const Fq& A = t.chain.at(r);
    int64_t q = t.at(r).level.group_order();
    int n = t.at(r).dim();
    if (n % q != 0) throw std::invalid_argument("trace pairing needs regular-shaped modules");
    int d = n / int(q);
    Mat<Fq> G(A, n, n);
    for (int c = 0; c < d; c++)
      for (int64_t i = 0; i < q; i++)
        for (int64_t j = 0; j < q; j++)
          if ((i + j) % q == 0) G.at(c * int(q) + int(i), c * int(q) + int(j)) = A.one();
    pf.gram.push_back(std::move(G));
  }
  return pf;
}

} // namespace charp
