#pragma once

#include "fq.hpp"
#include "linalg.hpp"
#include "qq.hpp"

#include <stdexcept>
#include <vector>

namespace charp {

// Signalled when an exact kernel/image is requested over a local truncation
// ring where only residue-field data is defined.
struct ResidueFieldOnly : std::domain_error {
  ResidueFieldOnly() : std::domain_error("kernel/image over a truncation ring is residue-field-only") {}
};

enum class KernelMode { ExactOnly, AllowResidueReduction };

template <class R>
struct RankKernelImage {
  int rank = 0;
  std::vector<std::vector<typename R::Elem>> kernel;
  std::vector<std::vector<typename R::Elem>> image;
  bool residue_field_only = false;
};

// rank / kernel / image over a field, directly.
template <class R>
RankKernelImage<R> mat_rank_kernel_image_field(const Mat<R>& m) {
  RankKernelImage<R> out;
  out.rank = rank(m);
  out.kernel = kernel_basis(m);
  out.image = image_basis(m);
  out.residue_field_only = false;
  return out;
}

// Over non-field local rings the result is that of the reduction to the
// residue field, and is flagged as such; requesting exact data raises the
// residue-field-only signal.
RankKernelImage<Fq> mat_rank_kernel_image(const Mat<Fq>& m,
                                          KernelMode mode = KernelMode::AllowResidueReduction);

inline RankKernelImage<QQ> mat_rank_kernel_image(const Mat<QQ>& m,
                                                 KernelMode = KernelMode::ExactOnly) {
  return mat_rank_kernel_image_field(m);
}

// Reduce a matrix over a local truncation ring to its residue field.
Mat<Fq> residue_matrix(const Mat<Fq>& m);

} // namespace charp
