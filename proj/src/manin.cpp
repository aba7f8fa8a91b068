#include "manin.hpp"

#include "dims.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace charp {

namespace {

int64_t gcd3(int64_t a, int64_t b, int64_t c) { return std::gcd(std::gcd(std::abs(a), std::abs(b)), c); }

int64_t mod(int64_t a, int64_t m) {
  a %= m;
  return a < 0 ? a + m : a;
}

// coefficients of (aX + bY)^i (cX + dY)^{k-2-i} in the basis X^j Y^{k-2-j}
std::vector<mpz_class> monomial_action(int64_t a, int64_t b, int64_t c, int64_t d, int i, int k) {
  int deg = k - 2;
  std::vector<mpz_class> acc{1};
  auto mul_linear = [&](int64_t u, int64_t v) {
    // multiply acc (coeffs in X-degree) by (uX + vY)
    std::vector<mpz_class> out(acc.size() + 1, mpz_class(0));
    for (size_t t = 0; t < acc.size(); t++) {
      out[t + 1] += acc[t] * long(u);
      out[t] += acc[t] * long(v);
    }
    acc = std::move(out);
  };
  for (int t = 0; t < i; t++) mul_linear(a, b);
  for (int t = 0; t < deg - i; t++) mul_linear(c, d);
  acc.resize(size_t(deg) + 1, mpz_class(0));
  return acc; // acc[j] = coefficient of X^j Y^{deg-j}
}

struct SignUF {
  std::vector<int> parent;
  std::vector<int> sign; // relative to parent
  std::vector<bool> zero;

  explicit SignUF(int n) : parent(n), sign(n, 1), zero(n, false) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  std::pair<int, int> find(int x) {
    if (parent[size_t(x)] == x) return {x, 1};
    auto [r, s] = find(parent[size_t(x)]);
    parent[size_t(x)] = r;
    sign[size_t(x)] *= s;
    return {r, sign[size_t(x)]};
  }
  bool is_zero(int x) {
    auto [r, s] = find(x);
    return zero[size_t(r)];
  }
  // impose x = s * y
  void unite(int x, int y, int s) {
    auto [rx, sx] = find(x);
    auto [ry, sy] = find(y);
    if (rx == ry) {
      if (sx != s * sy) zero[size_t(rx)] = true;
      return;
    }
    parent[size_t(rx)] = ry;
    sign[size_t(rx)] = sx * s * sy;
    zero[size_t(ry)] = zero[size_t(ry)] || zero[size_t(rx)];
  }
};

} // namespace

std::vector<IMat> heilbronn_matrices(int64_t p) {
  std::vector<IMat> out;
  for (int64_t a = 1; a <= p; a++)
    for (int64_t d = 1; a + d <= p + 1; d++) {
      int64_t bc = a * d - p;
      if (bc < 0) continue;
      if (bc == 0) {
        for (int64_t c = 0; c < d; c++) out.push_back({a, 0, c, d});
        for (int64_t b = 1; b < a; b++) out.push_back({a, b, 0, d});
      } else {
        for (int64_t b = 1; b < a; b++) {
          if (bc % b != 0) continue;
          int64_t c = bc / b;
          if (c < d) out.push_back({a, b, c, d});
        }
      }
    }
  return out;
}

IMat lift_to_sl2(int64_t c, int64_t d, int64_t M) {
  if (M == 1) return {1, 0, 0, 1};
  c = mod(c, M);
  d = mod(d, M);
  if (gcd3(c, d, M) != 1) throw std::invalid_argument("row not unimodular");
  // find a coprime integer representative (c0, d0)
  for (int64_t tc = 0; tc < M; tc++)
    for (int64_t td = 0; td < M; td++) {
      int64_t c0 = c + tc * M, d0 = d + td * M;
      if (c0 == 0 && d0 == 0) continue;
      if (std::gcd(std::abs(c0), std::abs(d0)) == 1) {
        // extended gcd: a d0 - b c0 = 1
        int64_t x = 0, y = 0;
        // solve x*d0 + y*c0 = 1
        int64_t r0 = d0, r1 = c0, s0 = 1, s1 = 0, t0 = 0, t1 = 1;
        while (r1 != 0) {
          int64_t q = r0 / r1;
          std::tie(r0, r1) = std::make_pair(r1, r0 - q * r1);
          std::tie(s0, s1) = std::make_pair(s1, s0 - q * s1);
          std::tie(t0, t1) = std::make_pair(t1, t0 - q * t1);
        }
        if (r0 == -1) {
          s0 = -s0;
          t0 = -t0;
          r0 = 1;
        }
        if (r0 != 1) continue;
        x = s0;
        y = t0; // x d0 + y c0 = 1
        IMat g{x, -y, c0, d0};
        if (g.det() != 1) throw std::logic_error("sl2 lift failed");
        return g;
      }
    }
  throw std::logic_error("no coprime representative found");
}

IMat diamond_matrix(int64_t u, int64_t M) {
  if (M == 1) return {1, 0, 0, 1};
  u = mod(u, M);
  if (std::gcd(u, M) != 1) throw std::invalid_argument("diamond needs a unit");
  // a = u^{-1} mod M
  int64_t a = 1;
  for (int64_t x = 1; x < M; x++)
    if (mod(x * u, M) == 1) a = x;
  int64_t dd = u;
  int64_t t = (a * dd - 1) / M;
  while ((a * dd - 1) % M != 0) {
    dd += M;
    t = (a * dd - 1) / M;
  }
  IMat g{a, t, M, dd};
  if (g.det() != 1) throw std::logic_error("diamond lift failed");
  return g;
}

int ManinSymbolSpace::row_index(int64_t c, int64_t d) const {
  int64_t key = mod(c, M_) * M_ + mod(d, M_);
  return row_lookup_[size_t(key)];
}

ManinSymbolSpace::ManinSymbolSpace(int64_t M, int k) : M_(M), k_(k) {
  if (M < 1 || M > 60) throw std::invalid_argument("level out of the supported range");
  if (M == 3) throw std::invalid_argument("level 3 is not supported by the dimension oracle");
  if (k < 2) throw std::invalid_argument("weight must be >= 2");
  row_lookup_.assign(size_t(M * M), -1);
  for (int64_t c = 0; c < M; c++)
    for (int64_t d = 0; d < M; d++)
      if (gcd3(c, d, M) == 1) {
        row_lookup_[size_t(c * M + d)] = int(rows_.size());
        rows_.push_back({c, d});
      }
  build_presentation();
  build_cuspidal();
}

void ManinSymbolSpace::build_presentation() {
  const int deg = k_ - 2;
  const int ngen = int(rows_.size()) * (k_ - 1);
  SignUF uf(ngen);

  // J-relation: gen(i, r) = (-1)^k gen(i, rJ)
  for (int r = 0; r < n_rows(); r++) {
    int rj = row_index(-rows_[size_t(r)].first, -rows_[size_t(r)].second);
    for (int i = 0; i <= deg; i++)
      uf.unite(gen_index(r, i), gen_index(rj, i), (k_ % 2 == 0) ? 1 : -1);
  }
  // S-relation: gen(i, r) + (-1)^i gen(k-2-i, rS) = 0, S = (0,-1;1,0)
  for (int r = 0; r < n_rows(); r++) {
    auto [c, d] = rows_[size_t(r)];
    int rs = row_index(d, -c); // (c,d) S = (d, -c)
    for (int i = 0; i <= deg; i++)
      uf.unite(gen_index(r, i), gen_index(rs, deg - i), (i % 2 == 0) ? -1 : 1);
  }

  // roots and their column indices
  std::vector<int> root_col(size_t(ngen), -1);
  std::vector<int> col_root;
  for (int x = 0; x < ngen; x++) {
    auto [r, s] = uf.find(x);
    if (uf.zero[size_t(r)]) continue;
    if (root_col[size_t(r)] < 0) {
      root_col[size_t(r)] = int(col_root.size());
      col_root.push_back(r);
    }
  }
  int ncols = int(col_root.size());

  // T-relations: x + xT + xT^2 = 0 with T = (0,-1;1,-1), T^2 = (-1,1;-1,0)
  using Row = std::vector<std::pair<int, mpq_class>>;
  auto add_term = [&](std::map<int, mpq_class>& row, int r, int i, const mpq_class& coef) {
    int g = gen_index(r, i);
    auto [root, sgn] = uf.find(g);
    if (uf.zero[size_t(root)]) return;
    row[root_col[size_t(root)]] += coef * sgn;
  };
  const IMat T{0, -1, 1, -1}, T2{-1, 1, -1, 0};
  std::vector<Row> rel_rows;
  for (int r = 0; r < n_rows(); r++) {
    auto [c, d] = rows_[size_t(r)];
    int rT = row_index(c * T.a + d * T.c, c * T.b + d * T.d);
    int rT2 = row_index(c * T2.a + d * T2.c, c * T2.b + d * T2.d);
    for (int i = 0; i <= deg; i++) {
      std::map<int, mpq_class> row;
      add_term(row, r, i, 1);
      auto pT = monomial_action(T.a, T.b, T.c, T.d, i, k_);
      for (int j = 0; j <= deg; j++)
        if (pT[size_t(j)] != 0) add_term(row, rT, j, mpq_class(pT[size_t(j)]));
      auto pT2 = monomial_action(T2.a, T2.b, T2.c, T2.d, i, k_);
      for (int j = 0; j <= deg; j++)
        if (pT2[size_t(j)] != 0) add_term(row, rT2, j, mpq_class(pT2[size_t(j)]));
      Row rv;
      for (auto& [col, v] : row)
        if (v != 0) rv.push_back({col, v});
      if (!rv.empty()) rel_rows.push_back(std::move(rv));
    }
  }

  // sparse elimination with recorded pivot rows
  std::vector<int> pivot_of_col(size_t(ncols), -1);
  std::vector<Row> pivot_rows;
  for (auto& row : rel_rows) {
    Row cur = std::move(row);
    while (true) {
      // reduce against existing pivots
      bool reduced = false;
      for (auto& [col, coef] : cur) {
        int pr = pivot_of_col[size_t(col)];
        if (pr < 0) continue;
        // cur -= coef * pivot_rows[pr] (pivot row is monic at col)
        mpq_class f = coef;
        std::map<int, mpq_class> tmp;
        for (auto& [c2, v2] : cur) tmp[c2] += v2;
        for (auto& [c2, v2] : pivot_rows[size_t(pr)]) tmp[c2] -= f * v2;
        Row next;
        for (auto& [c2, v2] : tmp)
          if (v2 != 0) next.push_back({c2, v2});
        cur = std::move(next);
        reduced = true;
        break;
      }
      if (!reduced) break;
    }
    if (cur.empty()) continue;
    // choose a pivot: prefer unit coefficients
    size_t pick = 0;
    for (size_t j = 0; j < cur.size(); j++)
      if (abs(cur[j].second) == 1) {
        pick = j;
        break;
      }
    int pcol = cur[pick].first;
    mpq_class pval = cur[pick].second;
    for (auto& [c2, v2] : cur) v2 /= pval;
    pivot_of_col[size_t(pcol)] = int(pivot_rows.size());
    // store with the pivot first
    std::swap(cur[0], cur[pick]);
    pivot_rows.push_back(std::move(cur));
  }

  // free columns form the basis
  std::vector<int> col_to_basis(size_t(ncols), -1);
  for (int c = 0; c < ncols; c++)
    if (pivot_of_col[size_t(c)] < 0) {
      col_to_basis[size_t(c)] = dim_;
      basis_gen_.push_back(col_root[size_t(c)]);
      dim_++;
    }
  // back-substitute pivot columns into the basis
  std::vector<std::vector<mpq_class>> col_expr(size_t(ncols), std::vector<mpq_class>{});
  std::vector<char> done(size_t(ncols), 0);
  std::function<const std::vector<mpq_class>&(int)> expr = [&](int col) -> const std::vector<mpq_class>& {
    if (done[size_t(col)]) return col_expr[size_t(col)];
    done[size_t(col)] = 1;
    col_expr[size_t(col)].assign(size_t(dim_), mpq_class(0));
    if (pivot_of_col[size_t(col)] < 0) {
      col_expr[size_t(col)][size_t(col_to_basis[size_t(col)])] = 1;
      return col_expr[size_t(col)];
    }
    const Row& prow = pivot_rows[size_t(pivot_of_col[size_t(col)])];
    // col = -sum_{other} coef * other
    for (size_t j = 1; j < prow.size(); j++) {
      const auto& sub = expr(prow[j].first);
      for (int t = 0; t < dim_; t++) col_expr[size_t(col)][size_t(t)] -= prow[j].second * sub[size_t(t)];
    }
    return col_expr[size_t(col)];
  };

  gen_image_.assign(size_t(ngen), {});
  for (int x = 0; x < ngen; x++) {
    auto [root, sgn] = uf.find(x);
    std::vector<mpq_class> v(size_t(dim_), mpq_class(0));
    if (!uf.zero[size_t(root)]) {
      const auto& e = expr(root_col[size_t(root)]);
      for (int t = 0; t < dim_; t++) v[size_t(t)] = mpq_class(long(sgn)) * e[size_t(t)];
    }
    gen_image_[size_t(x)] = std::move(v);
  }
}

void ManinSymbolSpace::build_cuspidal() {
  const int deg = k_ - 2;
  // signed cusp classes: orbit key of a primitive column (p, q) is
  // (q mod M, p mod gcd(q, M)); v and -v are identified with sign (-1)^k
  std::map<std::pair<int64_t, int64_t>, int> class_index;
  auto class_of = [&](int64_t pp, int64_t qq) -> std::pair<int, int> {
    auto key = [&](int64_t p, int64_t q) {
      int64_t qm = mod(q, M_);
      int64_t g = std::gcd(qm == 0 ? M_ : qm, M_);
      return std::make_pair(qm, mod(p, g));
    };
    auto kv = key(pp, qq), kn = key(-pp, -qq);
    int sign = 1;
    auto kc = kv;
    if (kn < kv) {
      kc = kn;
      sign = (k_ % 2 == 0) ? 1 : -1;
    } else if (kn == kv && k_ % 2 == 1) {
      return {-1, 0}; // self-paired cusp dies in odd weight
    }
    auto it = class_index.find(kc);
    if (it == class_index.end()) it = class_index.insert({kc, int(class_index.size())}).first;
    return {it->second, sign};
  };

  // boundary of each generator: the symbol [P, g] carries the transported
  // polynomial P . g^{-1}, so the cusp values are P(1,0) at g(oo) and P(0,1)
  // at g(0) -- only the extreme monomials contribute
  auto boundary_of_gen = [&](int r, int i) {
    std::vector<std::pair<int, mpq_class>> out;
    auto [c, d] = rows_[size_t(r)];
    IMat g = lift_to_sl2(c, d, M_);
    if (i == deg) { // P(1,0) = 1
      auto [c1, s1] = class_of(g.a, g.c);
      if (c1 >= 0) out.push_back({c1, mpq_class(long(s1))});
    }
    if (i == 0) { // P(0,1) = 1
      auto [c2, s2] = class_of(g.b, g.d);
      if (c2 >= 0) out.push_back({c2, mpq_class(-long(s2))});
    }
    return out;
  };

  // precompute boundaries of all generators, verify descent to the quotient,
  // and assemble the boundary matrix on the quotient basis
  const int ngen = n_rows() * (k_ - 1);
  std::vector<std::vector<std::pair<int, mpq_class>>> gb;
  gb.resize(size_t(ngen));
  for (int r = 0; r < n_rows(); r++)
    for (int i = 0; i <= deg; i++) gb[size_t(gen_index(r, i))] = boundary_of_gen(r, i);
  int nclass = int(class_index.size());

  QQ Q;
  Mat<QQ> delta(Q, nclass == 0 ? 1 : nclass, dim_);
  for (int t = 0; t < dim_; t++)
    for (auto& [cls, v] : gb[size_t(basis_gen_[size_t(t)])]) delta.at(cls, t) += v;

  // well-definedness: the boundary of every generator equals the boundary of
  // its expression in the basis
  for (int x = 0; x < ngen; x++) {
    std::vector<mpq_class> direct(size_t(nclass == 0 ? 1 : nclass), mpq_class(0));
    for (auto& [cls, v] : gb[size_t(x)]) direct[size_t(cls)] += v;
    auto via = delta.apply(gen_image_[size_t(x)]);
    for (size_t t = 0; t < via.size(); t++)
      if (via[t] != direct[t]) throw std::logic_error("boundary map does not descend (convention bug)");
  }

  cuspidal_ = kernel_basis(delta);
  int64_t expected = 2 * dim_cusp_forms(M_, k_);
  if (int64_t(cuspidal_.size()) != expected)
    throw std::logic_error("cuspidal dimension " + std::to_string(cuspidal_.size()) +
                           " does not match the oracle " + std::to_string(expected));
}

std::vector<mpq_class> ManinSymbolSpace::act_generator(int r, int i, const IMat& g) const {
  std::vector<mpq_class> out(size_t(dim_), mpq_class(0));
  auto [c, d] = rows_[size_t(r)];
  int64_t c2 = c * g.a + d * g.c, d2 = c * g.b + d * g.d;
  if (gcd3(c2, d2, M_) != 1) return out; // dropped term (Heilbronn convention)
  int r2 = row_index(c2, d2);
  auto poly = monomial_action(g.a, g.b, g.c, g.d, i, k_);
  for (int j = 0; j <= k_ - 2; j++) {
    if (poly[size_t(j)] == 0) continue;
    const auto& img = generator_image(r2, j);
    for (int t = 0; t < dim_; t++) out[size_t(t)] += mpq_class(poly[size_t(j)]) * img[size_t(t)];
  }
  return out;
}

Mat<QQ> ManinSymbolSpace::operator_matrix(const std::vector<IMat>& mats) const {
  QQ Q;
  Mat<QQ> m(Q, dim_, dim_);
  for (int t = 0; t < dim_; t++) {
    int x = basis_gen_[size_t(t)];
    int r = x / (k_ - 1), i = x % (k_ - 1);
    std::vector<mpq_class> acc(size_t(dim_), mpq_class(0));
    for (const auto& g : mats) {
      auto v = act_generator(r, i, g);
      for (int s = 0; s < dim_; s++) acc[size_t(s)] += v[size_t(s)];
    }
    for (int s = 0; s < dim_; s++) m.at(s, t) = acc[size_t(s)];
  }
  return m;
}

Mat<QQ> ManinSymbolSpace::diamond_matrix_on_quotient(int64_t u) const {
  if (std::gcd(mod(u, M_), M_) != 1) throw std::invalid_argument("diamond needs a unit");
  QQ Q;
  Mat<QQ> m(Q, dim_, dim_);
  for (int t = 0; t < dim_; t++) {
    int x = basis_gen_[size_t(t)];
    int r = x / (k_ - 1), i = x % (k_ - 1);
    auto [c, d] = rows_[size_t(r)];
    int r2 = row_index(u * c, u * d);
    const auto& img = generator_image(r2, i);
    for (int s = 0; s < dim_; s++) m.at(s, t) = img[size_t(s)];
  }
  return m;
}

Mat<QQ> ManinSymbolSpace::restrict_cuspidal(const Mat<QQ>& op) const {
  QQ Q;
  int cd = cuspidal_dim();
  Mat<QQ> C(Q, dim_, cd);
  for (int j = 0; j < cd; j++)
    for (int i = 0; i < dim_; i++) C.at(i, j) = cuspidal_[size_t(j)][size_t(i)];
  Mat<QQ> out(Q, cd, cd);
  for (int j = 0; j < cd; j++) {
    auto img = op.apply(cuspidal_[size_t(j)]);
    auto coords = solve(C, img);
    if (!coords) throw std::logic_error("operator does not preserve the cuspidal subspace");
    for (int i = 0; i < cd; i++) out.at(i, j) = (*coords)[size_t(i)];
  }
  return out;
}

std::vector<mpq_class> ManinSymbolSpace::path_class(int64_t a1, int64_t b1, int64_t a2,
                                                    int64_t b2) const {
  if (k_ != 2) throw std::domain_error("path symbols implemented for weight 2 only");
  // {a1/b1, a2/b2} = {oo, a2/b2} - {oo, a1/b1}
  std::vector<mpq_class> out(size_t(dim_), mpq_class(0));
  auto add_inf_path = [&](int64_t p, int64_t q, int sgn) {
    // {oo, p/q} via continued-fraction convergents
    if (q == 0) return; // {oo, oo} = 0
    // normalize
    if (q < 0) {
      p = -p;
      q = -q;
    }
    int64_t g = std::gcd(std::abs(p), q);
    if (g > 1) {
      p /= g;
      q /= g;
    }
    // convergents of p/q
    std::vector<int64_t> ps{1}, qs{0}; // p_{-1}/q_{-1} = oo
    int64_t x = p, y = q;
    int64_t pm2 = 0, qm2 = 1, pm1 = 1, qm1 = 0;
    while (y != 0) {
      int64_t a = (x >= 0 ? x / y : -((-x + y - 1) / y)); // floor division
      int64_t r = x - a * y;
      int64_t pc = a * pm1 + pm2, qc = a * qm1 + qm2;
      ps.push_back(pc);
      qs.push_back(qc);
      pm2 = pm1;
      qm2 = qm1;
      pm1 = pc;
      qm1 = qc;
      x = y;
      y = r;
    }
    // segments {p_{j-1}/q_{j-1}, p_j/q_j} = g_j {0, oo} with det(g_j) = 1
    for (size_t j = 1; j < ps.size(); j++) {
      int64_t pj = ps[j], qj = qs[j], pj1 = ps[j - 1], qj1 = qs[j - 1];
      // det (pj pj1; qj qj1) = pj qj1 - pj1 qj = +-1; fix sign on first column
      int64_t det = pj * qj1 - pj1 * qj;
      int64_t e = det; // +-1
      int64_t cc = e * qj, dd = qj1;
      int rr = row_index(cc, dd);
      const auto& img = generator_image(rr, 0);
      for (int t = 0; t < dim_; t++) out[size_t(t)] += mpq_class(long(sgn)) * img[size_t(t)];
    }
  };
  add_inf_path(a2, b2, +1);
  add_inf_path(a1, b1, -1);
  return out;
}

Mat<QQ> ManinSymbolSpace::star_matrix() const {
  QQ Q;
  Mat<QQ> m(Q, dim_, dim_);
  for (int t = 0; t < dim_; t++) {
    int x = basis_gen_[size_t(t)];
    int r = x / (k_ - 1), i = x % (k_ - 1);
    auto [c, d] = rows_[size_t(r)];
    int r2 = row_index(-c, d);
    const auto& img = generator_image(r2, i);
    // [X^i Y^{k-2-i}](-X, Y) = (-1)^i X^i Y^{k-2-i}
    mpq_class sgn = (i % 2 == 0) ? 1 : -1;
    for (int s = 0; s < dim_; s++) m.at(s, t) = sgn * img[size_t(s)];
  }
  return m;
}

} // namespace charp
