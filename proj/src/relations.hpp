#pragma once

#include "fiber.hpp"

#include <string>

namespace charp {

// Operator word in the commuting alphabet {F, rho, <u>^e, <chi>^e, <p>_N^e, id};
// the <u>-power refers to the source component's unit, kept symbolic.
struct OpWord {
  int f = 0;           // power of F
  int rho = 0;         // power of rho (trace one level down)
  int u_exp = 0;       // power of <u>
  int pn_exp = 0;      // power of <p>_N
  int64_t chi_val = 1; // <chi_val>^{-1} factor from inertia, as a unit value
  int64_t chi_mod = 1; // modulus of chi_val (1 when absent)

  OpWord compose(const OpWord& o) const {
    int64_t m = std::max(chi_mod, o.chi_mod);
    int64_t v = m > 1 ? (chi_val * o.chi_val) % m : 1;
    if (v == 1) m = 1;
    return {f + o.f, rho + o.rho, u_exp + o.u_exp, pn_exp + o.pn_exp, m > 1 ? v : 1, m};
  }
  bool operator==(const OpWord& o) const {
    return f == o.f && rho == o.rho && u_exp == o.u_exp && pn_exp == o.pn_exp &&
           chi_val == o.chi_val && chi_mod == o.chi_mod;
  }
  std::string str() const;
};

struct TableRow {
  ComponentIndex source;
  ComponentIndex target;
  OpWord word;
};

enum class DegeneracyMap { SigmaBar, RhoBar, Pi1Bar, Pi2Bar, PiBar };

// The table row for a degeneracy map restricted to one component.
// sigma/rho/pi live on components with a+b = r+1 (mapping to level r);
// pi itself maps the special fiber at level r+1 to the U_p-correspondence
// curve at level r.
TableRow degeneracy_description(int64_t p, int r, DegeneracyMap map, const ComponentIndex& idx);

// Inertia action of an element with cyclotomic character value chi (a unit
// mod p^{min(a,b)}) on the (a,b,u)-component: identity for b <= a and
// <chi>^{-1} for a < b, with u multiplied by chi.
TableRow inertia_description(int64_t p, int r, int64_t chi, const ComponentIndex& idx);

// Cross-validation of the factorizations rho = pi2 . pi and sigma = pi1 . pi
// against the direct sigma/rho rows, for every component at level r+1.
struct TableConsistency {
  bool rho_factorization = false;
  bool sigma_factorization = false;
  bool inertia_group_action = false;
  std::string failure;
  bool ok() const { return rho_factorization && sigma_factorization && inertia_group_action; }
};

TableConsistency verify_relation_tables(int64_t p, int r);

} // namespace charp
