#include "exact.hpp"

namespace charp {

Mat<Fq> residue_matrix(const Mat<Fq>& m) {
  Fq k = m.ring().residue_field();
  Mat<Fq> r(k, m.rows(), m.cols());
  for (int i = 0; i < m.rows(); i++)
    for (int j = 0; j < m.cols(); j++) r.at(i, j) = m.ring().reduce_to_residue(m.at(i, j));
  return r;
}

RankKernelImage<Fq> mat_rank_kernel_image(const Mat<Fq>& m, KernelMode mode) {
  if (m.ring().is_field()) return mat_rank_kernel_image_field(m);
  if (mode == KernelMode::ExactOnly) throw ResidueFieldOnly();
  auto out = mat_rank_kernel_image_field(residue_matrix(m));
  out.residue_field_only = true;
  return out;
}

} // namespace charp
