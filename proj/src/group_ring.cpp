#include "group_ring.hpp"

namespace charp {

GroupRingModule GroupRingModule::regular(const Fq& A, CyclicPLevel lv, int copies) {
  int64_t q = lv.group_order();
  int n = int(q) * copies;
  Mat<Fq> g(A, n, n);
  for (int c = 0; c < copies; c++) {
    int off = c * int(q);
    for (int i = 0; i < int(q); i++) g.at(off + (i + 1) % int(q), off + i) = A.one();
  }
  return GroupRingModule(A, lv, std::move(g));
}

FreenessResult is_free_of_rank(const GroupRingModule& m) {
  const Fq& A = m.ring;
  if (!A.is_field())
    throw std::domain_error("freeness test requires a field base; reduce the module first");
  if (!m.action_valid())
    throw std::invalid_argument("generator action does not have order dividing p^{r-1}");
  FreenessResult res;
  int64_t q = m.level.group_order();
  int n = m.dim();
  res.kernel_dims.assign(size_t(q) + 1, 0);
  if (n % q != 0) {
    // dimension not divisible by the group order: cannot be free, but still
    // report the kernel filtration
    res.free = false;
  }
  Mat<Fq> N = m.gamma.sub(Mat<Fq>::identity(A, n));
  Mat<Fq> Npow = Mat<Fq>::identity(A, n);
  bool ok = n % q == 0;
  int64_t d = n / q;
  for (int64_t i = 0; i <= q; i++) {
    res.kernel_dims[size_t(i)] = int(kernel_basis(Npow).size());
    if (res.kernel_dims[size_t(i)] != d * i) ok = false;
    if (i < q) Npow = Npow.mul(N);
  }
  res.free = ok;
  if (ok) res.rank = d;
  return res;
}

} // namespace charp
