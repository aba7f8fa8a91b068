#pragma once

#include <gmpxx.h>

#include <string>

namespace charp {

// The rationals as a ring descriptor, interface-compatible with Fq for the
// templated linear algebra.  Stateless.
class QQ {
public:
  using Elem = mpq_class;

  bool is_field() const { return true; }
  bool operator==(const QQ&) const { return true; }

  mpq_class zero() const { return mpq_class(0); }
  mpq_class one() const { return mpq_class(1); }
  mpq_class from_int(int64_t n) const { return mpq_class(long(n)); }

  bool is_zero(const mpq_class& a) const { return sgn(a) == 0; }
  mpq_class add(const mpq_class& a, const mpq_class& b) const { return a + b; }
  mpq_class sub(const mpq_class& a, const mpq_class& b) const { return a - b; }
  mpq_class neg(const mpq_class& a) const { return -a; }
  mpq_class mul(const mpq_class& a, const mpq_class& b) const { return a * b; }
  mpq_class mul_int(const mpq_class& a, int64_t n) const { return a * long(n); }
  bool is_unit(const mpq_class& a) const { return sgn(a) != 0; }
  mpq_class inv(const mpq_class& a) const { return mpq_class(1) / a; }
  mpq_class frobenius(const mpq_class& a, int) const { return a; }
  mpq_class pow(mpq_class a, int64_t e) const {
    mpq_class r(1);
    while (e > 0) {
      if (e & 1) r *= a;
      a *= a;
      e >>= 1;
    }
    return r;
  }

  std::string to_string(const mpq_class& a) const { return a.get_str(); }
  std::string describe() const { return "Q"; }
};

} // namespace charp
