#include "hecke.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace charp {

namespace {

int64_t mod(int64_t a, int64_t m) {
  a %= m;
  return a < 0 ? a + m : a;
}

} // namespace

Mat<QQ> HeckeOps::hecke(int64_t ell) const {
  return S.operator_matrix(heilbronn_matrices(ell));
}

Mat<QQ> HeckeOps::diamond(int64_t u) const { return S.diamond_matrix_on_quotient(u); }

Mat<QQ> HeckeOps::path_operator(const std::vector<IMat>& cosets) const {
  if (S.weight() != 2) throw std::domain_error("path operators are weight-2 only");
  QQ Q;
  int n = S.dim();
  Mat<QQ> m(Q, n, n);
  // basis columns are generators (0, r); their paths are {g0, ginf}
  for (int t = 0; t < n; t++) {
    int found = S.basis_generator(t); // weight 2: generator index = row index
    auto [c, d] = S.row(found);
    IMat g = lift_to_sl2(c, d, S.level());
    std::vector<mpq_class> acc(size_t(n), mpq_class(0));
    for (const auto& gamma : cosets) {
      // path {gamma g 0, gamma g inf} = {gamma (b/d), gamma (a/c)}
      int64_t p1 = gamma.a * g.b + gamma.b * g.d, q1 = gamma.c * g.b + gamma.d * g.d;
      int64_t p2 = gamma.a * g.a + gamma.b * g.c, q2 = gamma.c * g.a + gamma.d * g.c;
      auto v = S.path_class(p1, q1, p2, q2);
      for (int s = 0; s < n; s++) acc[size_t(s)] += v[size_t(s)];
    }
    for (int s = 0; s < n; s++) m.at(s, t) = acc[size_t(s)];
  }
  return m;
}

Mat<QQ> HeckeOps::u_ell_paths(int64_t ell) const {
  std::vector<IMat> cosets;
  for (int64_t j = 0; j < ell; j++) cosets.push_back({1, j, 0, ell});
  return path_operator(cosets);
}

Mat<QQ> HeckeOps::atkin_lehner_full() const {
  return path_operator({IMat{0, -1, S.level(), 0}});
}

Mat<QQ> HeckeOps::atkin_lehner_partial(int64_t Qpart) const {
  int64_t M = S.level();
  if (Qpart <= 0 || M % Qpart != 0 || std::gcd(Qpart, M / Qpart) != 1)
    throw std::invalid_argument("partial Atkin-Lehner needs Q || M");
  if (Qpart == M) return atkin_lehner_full();
  // W_Q = (Q x, y; M z, Q w) with det Q, y = 1 mod Q, x = 1 mod M/Q
  int64_t R = M / Qpart;
  for (int64_t z = 1; z < 4 * M + 4; z++)
    for (int64_t y0 = 0; y0 < 4 * M + 4; y0++) {
      // y = 1 + Q*t possibly negative; scan small values of both signs
      for (int64_t sy : {1, -1}) {
        int64_t y = sy * (1 + Qpart * y0);
        if (sy < 0 && y0 == 0) continue; // avoid duplicate of +1? y=-1 allowed: 1+0=1, -1 distinct
        // solve Q^2 x w - M z y = Q, i.e. Q x w - R z y = 1
        // pick x = 1 mod R: x = 1 + R s
        for (int64_t s = -2 * M; s <= 2 * M; s++) {
          int64_t x = 1 + R * s;
          int64_t lhs = 1 + R * z * y;
          // need Q x w = 1 + R z y  => w = (1 + R z y) / (Q x) when divisible
          if (x == 0) continue;
          if (lhs % (Qpart * x) != 0) continue;
          int64_t w = lhs / (Qpart * x);
          IMat W{Qpart * x, y, M * z, Qpart * w};
          if (W.det() == Qpart) return path_operator({W});
        }
      }
    }
  throw std::logic_error("no partial Atkin-Lehner matrix found");
}

// ---------------------------------------------------------------------------
// Intersection pairing via the ribbon structure
// ---------------------------------------------------------------------------

namespace {

// chord at a vertex: strand entering at slot position a, leaving at position b
struct Chord {
  int in_pos, out_pos;
  mpq_class weight;
};

// resolve in/out flows around one vertex into chords (stack matching on the
// circle; rotate so matching never wraps)
std::vector<Chord> resolve_chords(const std::vector<mpq_class>& flow) {
  int w = int(flow.size());
  // rotate to a position of minimal prefix sum so that matching is linear
  std::vector<mpq_class> prefix(size_t(w) + 1, mpq_class(0));
  for (int i = 0; i < w; i++) prefix[size_t(i) + 1] = prefix[size_t(i)] + flow[size_t(i)];
  int start = 0;
  mpq_class best = prefix[0];
  for (int i = 1; i <= w; i++)
    if (prefix[size_t(i)] < best) {
      best = prefix[size_t(i)];
      start = i % w;
    }
  std::vector<Chord> chords;
  std::vector<std::pair<int, mpq_class>> stack; // open incoming strands
  for (int t = 0; t < w; t++) {
    int i = (start + t) % w;
    mpq_class f = flow[size_t(i)];
    if (f > 0) {
      stack.push_back({i, f});
    } else if (f < 0) {
      mpq_class need = -f;
      while (need > 0) {
        if (stack.empty()) throw std::logic_error("unbalanced vertex flow");
        auto& [pos, avail] = stack.back();
        mpq_class take = std::min(avail, need);
        chords.push_back({pos, i, take});
        avail -= take;
        need -= take;
        if (avail == 0) stack.pop_back();
      }
    }
  }
  if (!stack.empty()) throw std::logic_error("unbalanced vertex flow");
  return chords;
}

// Crossing sign of chord a against the perturbed copy of chord b.  The
// perturbation pushes the second cycle to one side of the first along every
// shared edge, which at a vertex disk means +eps at incoming ends and -eps at
// outgoing ends (so a chord never crosses its own parallel copy).  Positions
// are scaled by 4 to stay integer-exact.
int crossing_sign(int w, const Chord& a, const Chord& b) {
  int W4 = 4 * w;
  int x1 = 4 * a.in_pos, y1 = 4 * a.out_pos;
  int x2 = (4 * b.in_pos + 1) % W4, y2 = ((4 * b.out_pos - 1) % W4 + W4) % W4;
  auto in_arc = [&](int pos, int from, int to) {
    int span = ((to - from) % W4 + W4) % W4;
    int off = ((pos - from) % W4 + W4) % W4;
    return off > 0 && off < span;
  };
  bool bi_in = in_arc(x2, x1, y1);
  bool bo_in = in_arc(y2, x1, y1);
  if (bi_in == bo_in) return 0;
  // (x1, x2, y1, y2) in ccw order gives +1
  return bi_in ? +1 : -1;
}

} // namespace

Mat<QQ> intersection_pairing_cuspidal(const ManinSymbolSpace& S) {
  if (S.weight() != 2) throw std::domain_error("intersection pairing implemented for weight 2");
  QQ Q;
  const int nrows = S.n_rows();
  // geometric edge-ends are +-classes of rows (the J-identification glues the
  // cosets g and -g); slots are canonical representatives of those classes
  std::vector<int> slot_of(size_t(nrows), 0);
  for (int r = 0; r < nrows; r++) {
    auto [c, d] = S.row(r);
    int rj = S.row_index(-c, -d);
    slot_of[size_t(r)] = std::min(r, rj);
  }
  // slot successor: (c,d) -> (c, c+d), i.e. right multiplication by (1,1;0,1),
  // descended to +-classes; vertex = orbit of slots
  auto next_of = [&](int slot) {
    auto [c, d] = S.row(slot);
    return slot_of[size_t(S.row_index(c, c + d))];
  };
  std::vector<int> vertex_of(size_t(nrows), -1), pos_of(size_t(nrows), -1);
  std::vector<std::vector<int>> vertices;
  for (int r = 0; r < nrows; r++) {
    if (slot_of[size_t(r)] != r) continue; // canonical reps only
    if (vertex_of[size_t(r)] >= 0) continue;
    std::vector<int> orbit;
    int cur = r;
    while (vertex_of[size_t(cur)] < 0) {
      vertex_of[size_t(cur)] = int(vertices.size());
      pos_of[size_t(cur)] = int(orbit.size());
      orbit.push_back(cur);
      cur = next_of(cur);
    }
    vertices.push_back(std::move(orbit));
  }

  // 0-end slot of the edge of coset r: class of (c,d) S = (d, -c)
  std::vector<int> zero_end(size_t(nrows), 0);
  for (int r = 0; r < nrows; r++) {
    auto [c, d] = S.row(r);
    zero_end[size_t(r)] = slot_of[size_t(S.row_index(d, -c))];
  }

  // expand a cuspidal vector into per-vertex chords
  auto chords_of = [&](const std::vector<mpq_class>& cls) {
    // chain: coefficient on the edge of the representative coset per basis col
    std::vector<mpq_class> edge_coeff(size_t(nrows), mpq_class(0));
    for (int t = 0; t < S.dim(); t++) {
      if (cls[size_t(t)] == 0) continue;
      edge_coeff[size_t(S.basis_generator(t))] += cls[size_t(t)];
    }
    // flows: +c at the infinity-end slot, -c at the zero-end slot
    std::vector<std::vector<mpq_class>> flow(vertices.size());
    for (size_t v = 0; v < vertices.size(); v++)
      flow[v].assign(vertices[v].size(), mpq_class(0));
    for (int r = 0; r < nrows; r++) {
      if (edge_coeff[size_t(r)] == 0) continue;
      int e = slot_of[size_t(r)];
      flow[size_t(vertex_of[size_t(e)])][size_t(pos_of[size_t(e)])] += edge_coeff[size_t(r)];
      int z = zero_end[size_t(r)];
      flow[size_t(vertex_of[size_t(z)])][size_t(pos_of[size_t(z)])] -= edge_coeff[size_t(r)];
    }
    std::vector<std::vector<Chord>> out(vertices.size());
    for (size_t v = 0; v < vertices.size(); v++) out[v] = resolve_chords(flow[v]);
    return out;
  };

  const auto& cusp = S.cuspidal_basis();
  int cd = int(cusp.size());
  std::vector<std::vector<std::vector<Chord>>> all;
  for (int i = 0; i < cd; i++) all.push_back(chords_of(cusp[size_t(i)]));

  Mat<QQ> E(Q, cd, cd);
  for (int i = 0; i < cd; i++)
    for (int j = 0; j < cd; j++) {
      mpq_class total = 0;
      for (size_t v = 0; v < vertices.size(); v++) {
        int w = int(vertices[v].size());
        for (const auto& ca : all[size_t(i)][v])
          for (const auto& cb : all[size_t(j)][v]) {
            int s = crossing_sign(w, ca, cb);
            if (s != 0) total += mpq_class(long(s)) * ca.weight * cb.weight;
          }
      }
      E.at(i, j) = total;
    }
  return E;
}

} // namespace charp
