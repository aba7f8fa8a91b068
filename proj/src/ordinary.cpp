#include "ordinary.hpp"

#include "hecke.hpp"
#include "newton.hpp"
#include "ssenum.hpp"

#include <stdexcept>

namespace charp {

namespace {

int64_t slope_zero_of(const Mat<QQ>& op, int64_t p) {
  if (op.rows() == 0) return 0;
  auto cp = charpoly(op);
  for (const auto& c : cp)
    if (c.get_den() != 1)
      throw std::logic_error("characteristic polynomial of T_p is not integral");
  return newton_unit_root_count(cp, p).slope_zero_length;
}

} // namespace

int64_t ordinary_rank(const ManinSymbolSpace& s, int64_t p) {
  if (s.level() % p == 0) throw std::invalid_argument("ordinary_rank needs p not dividing the level");
  if (s.cuspidal_dim() == 0) return 0;
  HeckeOps H(s);
  Mat<QQ> tp = s.restrict_cuspidal(H.hecke(p));
  int64_t full = slope_zero_of(tp, p);
  if (full % 2 != 0)
    throw std::logic_error("odd slope-zero length: the doubling convention is violated");
  int64_t dk = full / 2;

  // dual path: restrict T_p to the +1 eigenspace of the star involution
  QQ Q;
  Mat<QQ> star = s.restrict_cuspidal(H.star());
  int cd = s.cuspidal_dim();
  Mat<QQ> shifted = star.sub(Mat<QQ>::identity(Q, cd));
  auto plus = kernel_basis(shifted); // star = +1 eigenvectors
  if (!plus.empty()) {
    Mat<QQ> B = columns_to_matrix(Q, cd, plus);
    Mat<QQ> tp_plus(Q, int(plus.size()), int(plus.size()));
    for (size_t j = 0; j < plus.size(); j++) {
      auto img = tp.apply(plus[j]);
      auto coords = solve(B, img);
      if (!coords) throw std::logic_error("T_p does not preserve the star eigenspace");
      for (size_t i = 0; i < plus.size(); i++) tp_plus.at(int(i), int(j)) = (*coords)[i];
    }
    int64_t dk_star = slope_zero_of(tp_plus, p);
    if (dk_star != dk)
      throw std::logic_error("ordinary rank disagrees between the full-space and star-eigenspace paths");
  } else if (dk != 0) {
    throw std::logic_error("empty star eigenspace with nonzero ordinary rank");
  }
  return dk;
}

OrdinaryRankTable verify_d_identity(int64_t p, int64_t N) {
  if (p <= 2 || N % p == 0 || N * p <= 4)
    throw std::invalid_argument("need p > 2, p not dividing N, Np > 4");
  OrdinaryRankTable t;
  t.p = p;
  t.N = N;
  for (int k = 2; k <= int(p) + 1; k++) {
    ManinSymbolSpace s(N, k);
    t.d_k.push_back(ordinary_rank(s, p));
  }
  t.gamma = gamma_prank_oracle(p, N);
  t.delta = supersingular_count(p, N).delta;
  t.d = t.gamma + t.delta - 1;
  t.sum_dk = 0;
  for (size_t j = 1; j < t.d_k.size(); j++) t.sum_dk += t.d_k[j];
  t.gamma_matches_d2 = t.gamma == t.d_k[0];
  t.identity_holds = t.d == t.sum_dk;
  t.identity_top = t.d == t.d_k.back();
  return t;
}

} // namespace charp
