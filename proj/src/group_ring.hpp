#pragma once

#include "fq.hpp"
#include "linalg.hpp"

#include <optional>
#include <vector>

namespace charp {

// The cyclic p-group D_1/D_r of order p^{r-1} (trivial at level 1), the wild
// quotient acting on everything at level r.
struct CyclicPLevel {
  int64_t p;
  int r; // level >= 1

  int64_t group_order() const { return Fq::ipow(p, r - 1); }
};

// Finite module over A[D_1/D_r]: an A-free module of the given dimension with
// the action of a fixed generator gamma of D_1/D_r.
struct GroupRingModule {
  Fq ring;
  CyclicPLevel level;
  Mat<Fq> gamma; // square, dim x dim, gamma^{p^{r-1}} = 1

  GroupRingModule(Fq A, CyclicPLevel lv, Mat<Fq> g)
      : ring(std::move(A)), level(lv), gamma(std::move(g)) {
    if (gamma.rows() != gamma.cols()) throw std::invalid_argument("gamma action must be square");
  }

  int dim() const { return gamma.rows(); }

  // gamma^{p^{r-1}} = identity; over characteristic p this forces gamma - 1 nilpotent.
  bool action_valid() const {
    return gamma.pow(level.group_order()) == Mat<Fq>::identity(ring, dim());
  }

  // The regular module A[D_1/D_r] itself: gamma acts by the cyclic shift.
  static GroupRingModule regular(const Fq& A, CyclicPLevel lv, int copies = 1);
};

struct FreenessResult {
  bool free = false;
  std::optional<int64_t> rank;
  // kernel-dimension sequence dim ker (gamma-1)^i for i = 0..p^{r-1}
  std::vector<int> kernel_dims;
};

// Freeness over the group ring of a field of characteristic p: free of rank d
// iff dim ker (gamma-1)^i = d*i for all 0 <= i <= p^{r-1}, i.e. all Jordan
// blocks of the nilpotent gamma-1 have full size p^{r-1}.
FreenessResult is_free_of_rank(const GroupRingModule& m);

} // namespace charp
