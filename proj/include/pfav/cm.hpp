// CM fields: conjugation, Weil numbers above a prime, the relative norm
// unit equation, characteristic polynomials and triple verification.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pfav/ideal.hpp"

namespace pfav {

struct CmField {
  const FieldDescriptor* K = nullptr;
  const FieldDescriptor* K0 = nullptr;  // maximal real subfield
  int conj = 0;
  int g = 1;
  std::vector<std::pair<const FieldDescriptor*, const ZMat*>> subfields;  // proper CM subfields
};

CmField cm_field(const FieldRegistry& reg, const std::string& name);

NfElement conj(const NfElement& x);  // x's field must be CM
bool is_weil_number(const NfElement& x, const mpz_class& q);

// Norm of an integral element modulo a prime m.
u64 norm_mod(const NfElement& x, u64 m);

struct DecompositionStats {
  u64 index_primes = 0;
  u64 ramified = 0;
  u64 non_primitive = 0;
};

// Ideals a with a * conj(a) = pO_K that do not descend to a configured
// proper CM subfield. Throws IndexPrimeError when p divides the index.
std::vector<NfIdeal> primitive_decompositions(u64 p, const CmField& K, DecompositionStats* stats = nullptr);

// eps with eps * conj(eps) = eta, eps = zeta^a * prod u_j^{b_j} with |b_j| <= box.
std::optional<NfElement> solve_relative_norm_unit(const NfElement& eta, const CmField& K, int box = 3);

// Weil generators of a, found as the vectors of T2 = 2gp in the ideal lattice.
std::vector<NfElement> weil_generators(const NfIdeal& a, u64 p, const CmField& K);
// Same set through the principal-ideal test and the unit equation.
struct UnitPipelineStats {
  u64 non_principal = 0;
  u64 unit_box_misses = 0;
};
std::vector<NfElement> weil_generators_via_units(const NfIdeal& a, u64 p, const CmField& K, int box = 3,
                                                 UnitPipelineStats* stats = nullptr);

std::vector<NfElement> weil_numbers_above(u64 p, const CmField& K, DecompositionStats* stats = nullptr);

ZPoly char_poly_of_weil(const NfElement& pi);

struct WeilTriple {
  u64 r = 0;
  u64 p = 0;
  int d = 1;
  int k = 0;
  int g = 1;
  ZPoly charpoly;
  double rho = 0;
  std::string field;
  ZVec witness;  // coordinates of pi (CM search, family) or tau (real search)
  std::string source;
  bool r_squared = false;  // r^2 | C(1)

  friend bool operator<(const WeilTriple& a, const WeilTriple& b) {
    if (a.r != b.r) return a.r < b.r;
    if (a.p != b.p) return a.p < b.p;
    return a.charpoly < b.charpoly;
  }
};

struct VerifyReport {
  std::vector<std::string> failures;
  bool ok() const { return failures.empty(); }
};

// Checks primality of r and p, the order of p^d mod r, r | C(1), the
// q-palindromic shape, real-root location of the real Weil polynomial and the
// Weil bounds on C(1).
VerifyReport verify_triple(const WeilTriple& t);

// h(y) of degree g with C(X) = X^g h(X + q/X); nullopt when C is not q-palindromic.
std::optional<ZPoly> real_weil_polynomial(const ZPoly& c, const mpz_class& q);
// Number of distinct real roots of f in (a, b].
int sturm_count(const QPoly& f, const mpq_class& a, const mpq_class& b);

}  // namespace pfav
