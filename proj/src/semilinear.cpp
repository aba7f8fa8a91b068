#include "semilinear.hpp"

#include "exact.hpp"

namespace charp {

FittingDecomposition fitting_decompose(const SemilinearOp& op) {
  const Fq& K = op.K;
  const int n = op.dim();
  // op^n and op^{n+1}; images and kernels stabilize within dim steps
  SemilinearOp pn = op.power(n);
  SemilinearOp pn1 = pn.compose(op);
  auto im_n = image_basis(pn.mat);
  auto im_n1 = image_basis(pn1.mat);
  if (im_n.size() != im_n1.size())
    throw std::logic_error("fitting: image chain failed to stabilize at n = dim");
  auto kerA = kernel_basis(pn.mat);
  // ker(op^n) = phi^{-n*twist}(ker of the matrix part)
  std::vector<std::vector<FqElem>> ker_n;
  ker_n.reserve(kerA.size());
  for (auto& v : kerA) {
    std::vector<FqElem> w(v.size());
    for (size_t i = 0; i < v.size(); i++) w[i] = K.frobenius(v[i], -pn.twist);
    ker_n.push_back(std::move(w));
  }
  if (int(im_n.size() + ker_n.size()) != n)
    throw std::logic_error("fitting: ordinary + nilpotent dimensions do not sum");

  // change of basis [ordinary | nilpotent]
  std::vector<std::vector<FqElem>> all = im_n;
  all.insert(all.end(), ker_n.begin(), ker_n.end());
  Mat<Fq> B = columns_to_matrix(K, n, all);
  auto Binv = inverse(B);
  if (!Binv) throw std::logic_error("fitting: ordinary and nilpotent parts do not span");
  Mat<Fq> D(K, n, n);
  for (size_t i = 0; i < im_n.size(); i++) D.at(int(i), int(i)) = K.one();
  Mat<Fq> proj = B.mul(D).mul(*Binv);

  return FittingDecomposition{std::move(im_n), std::move(ker_n), std::move(proj)};
}

SemilinearOp semilinear_dual(const SemilinearOp& op, const Mat<Fq>& pairing) {
  const Fq& K = op.K;
  auto Ginv = inverse(pairing);
  if (!Ginv) throw std::domain_error("semilinear_dual: degenerate pairing");
  // <op x, y> = phi^e <x, B y>  with  B = (G^-1) phi^{-e}(M^T) phi^{-e}(G)
  Mat<Fq> Bm = Ginv->mul(op.mat.transpose().frobenius(-op.twist)).mul(pairing.frobenius(-op.twist));
  return SemilinearOp(K, std::move(Bm), -op.twist);
}

} // namespace charp
