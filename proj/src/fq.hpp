#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace charp {

// Element of a finite coefficient ring: polynomial of degree < deg(modulus)
// with coefficients in Z/p^m, stored least-significant first.  The ring
// descriptor (Fq) owns all arithmetic; elements are plain data.
struct FqElem {
  std::vector<int64_t> c;

  bool operator==(const FqElem& o) const { return c == o.c; }
  bool operator!=(const FqElem& o) const { return c != o.c; }
};

// dense polynomial over a finite coefficient ring, lowest degree first
using FqPoly = std::vector<FqElem>;

enum class RingKind {
  PrimeField,         // F_p
  ExtensionField,     // F_{p^m} = F_p[x]/(modulus)
  PadicTruncation,    // Z/p^m
  TruncatedCyclotomic // Z_p[mu_{p^r}]/p^m = (Z/p^m)[x]/Phi_{p^r}(x)
};

// Finite coefficient ring descriptor.  All finite variants are quotients
// (Z/p^m)[x]/(g(x)); prime fields and p-adic truncations take g = x so that
// elements are constants.  Cheap to copy (shared immutable payload).
class Fq {
public:
  static Fq prime_field(int64_t p);
  static Fq extension_field(int64_t p, int m); // modulus found by search
  static Fq extension_field(int64_t p, int m, const std::vector<int64_t>& modulus);
  static Fq padic_truncation(int64_t p, int m);
  static Fq truncated_cyclotomic(int64_t p, int r, int m);

  RingKind kind() const { return d_->kind; }
  int64_t p() const { return d_->p; }
  int precision() const { return d_->m; }       // exponent m in p^m
  int cyclotomic_level() const { return d_->r; } // r for truncated cyclotomic
  int degree() const { return d_->deg; }         // deg over Z/p^m
  int64_t pm() const { return d_->pm; }          // p^m
  bool is_field() const {
    return d_->kind == RingKind::PrimeField ||
           (d_->kind == RingKind::ExtensionField) ||
           (d_->kind == RingKind::PadicTruncation && d_->m == 1) ||
           (d_->kind == RingKind::TruncatedCyclotomic && d_->m == 1 && d_->r == 1);
  }
  // Size of the residue field (always F_p for local variants, p^deg for fields).
  int64_t residue_card() const {
    return d_->kind == RingKind::ExtensionField ? ipow(d_->p, d_->deg) : d_->p;
  }

  bool operator==(const Fq& o) const;

  using Elem = FqElem;

  FqElem zero() const { return FqElem{std::vector<int64_t>(d_->deg, 0)}; }
  FqElem one() const { return from_int(1); }
  FqElem from_int(int64_t n) const;
  // Element with the given polynomial coefficients (reduced mod p^m, modulus).
  FqElem from_coeffs(std::vector<int64_t> cs) const;
  // The class of x (generator alpha for extensions, zeta for cyclotomic rings).
  FqElem gen() const;

  bool is_zero(const FqElem& a) const;
  FqElem add(const FqElem& a, const FqElem& b) const;
  FqElem sub(const FqElem& a, const FqElem& b) const;
  FqElem neg(const FqElem& a) const;
  FqElem mul(const FqElem& a, const FqElem& b) const;
  FqElem mul_int(const FqElem& a, int64_t n) const;
  FqElem pow(const FqElem& a, int64_t e) const; // e >= 0
  bool is_unit(const FqElem& a) const;
  FqElem inv(const FqElem& a) const; // throws on non-unit

  // p-power Frobenius phi^e (e may be negative; bijective on every variant,
  // identity except on genuine extension fields).
  FqElem frobenius(const FqElem& a, int e) const;

  // Image in the residue field (prime field for local variants, self for fields).
  Fq residue_field() const;
  FqElem reduce_to_residue(const FqElem& a) const;
  // Lift from the residue field (Teichmueller-free: coefficientwise lift).
  FqElem lift_from_residue(const FqElem& a) const;

  std::string to_string(const FqElem& a) const;
  std::string describe() const;

  // Enumeration support for small rings (tests, brute-force oracles).
  int64_t card() const;
  FqElem unrank(int64_t idx) const;

  static int64_t ipow(int64_t b, int e) {
    int64_t r = 1;
    while (e-- > 0) r *= b;
    return r;
  }

private:
  struct Data {
    RingKind kind;
    int64_t p;
    int m;
    int r;
    int deg;
    int64_t pm;
    std::vector<int64_t> modulus; // monic, length deg+1, coeffs mod p^m
  };
  explicit Fq(std::shared_ptr<const Data> d) : d_(std::move(d)) {}
  std::shared_ptr<const Data> d_;

  int64_t red(int64_t v) const {
    v %= d_->pm;
    if (v < 0) v += d_->pm;
    return v;
  }
  void reduce_poly(std::vector<int64_t>& cs) const;
};

// Rational field tag ring (elements are GMP rationals); provides the same
// interface shape as Fq so the dense linear algebra templates over both.
class QQ;

} // namespace charp
