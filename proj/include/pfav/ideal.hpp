// Integral ideals as Hermite normal forms over the integral basis, prime
// ideals above rational primes, and principal-ideal testing.
#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "pfav/lattice.hpp"
#include "pfav/numfield.hpp"
#include "pfav/polymod.hpp"

namespace pfav {

// Rows span the ideal; upper triangular, positive diagonal, entries above
// the diagonal reduced modulo it. norm = product of the diagonal.
struct NfIdeal {
  const FieldDescriptor* field = nullptr;
  ZMat hnf;
  mpz_class norm;

  friend bool operator==(const NfIdeal& a, const NfIdeal& b) { return a.field == b.field && a.hnf == b.hnf; }
  std::string to_string() const;
};

struct PrimeIdeal {
  u64 p = 0;
  int f = 1;
  int e = 1;
  modp::Pol g;       // monic irreducible factor of the defining polynomial mod p
  NfElement alpha;   // g(theta); the ideal is (p, alpha)
  std::optional<u64> root;  // root of g when f = 1
  NfIdeal ideal;
};

struct IndexPrimeError : std::domain_error {
  explicit IndexPrimeError(const std::string& what) : std::domain_error(what) {}
};

// Echelon form of the Z-span of `rows` restricted to pivots in columns
// [0, pivot_cols); rows are reduced with unimodular operations only.
ZMat echelon(ZMat rows, int pivot_cols);
// Basis of {y in Z^k : a y = 0} for an m x k matrix a.
ZMat integer_kernel(const ZMat& a);
// HNF of the lattice spanned by `rows` together with d * Z^n.
ZMat hnf_mod(ZMat rows, int n, const mpz_class& d);

NfIdeal hnf_ideal(const FieldDescriptor& K, const ZMat& rows, const mpz_class& d);
NfIdeal unit_ideal(const FieldDescriptor& K);
NfIdeal principal_ideal(const NfElement& x);
NfIdeal ideal_from_generators(const FieldDescriptor& K, const std::vector<NfElement>& gens);
NfIdeal operator*(const NfIdeal& a, const NfIdeal& b);
NfIdeal operator+(const NfIdeal& a, const NfIdeal& b);
bool contains(const NfIdeal& a, const NfElement& x);
NfIdeal conjugate(const NfIdeal& a, int automorphism);

// Images of the integral basis in F_p[x]/(h); row j holds b_j, length deg h.
std::vector<modp::Pol> residue_images(const FieldDescriptor& K, u64 p, const modp::Pol& h);
// Kernel of O_K -> F_p[x]/(h) for a divisor h of the defining polynomial mod p.
NfIdeal ideal_from_residue_map(const FieldDescriptor& K, u64 p, const modp::Pol& h);

// Throws IndexPrimeError when p divides the index.
std::vector<PrimeIdeal> factor_rational_prime(u64 p, const FieldDescriptor& K);
// x mod P == 0 for a degree-one prime P.
bool ideal_divides(const NfElement& x, const PrimeIdeal& P);

// a intersected with the subfield S embedded by e (n x n_S, column j the image of S's basis element j).
NfIdeal ideal_contract(const NfIdeal& a, const FieldDescriptor& S, const ZMat& e);

// Lattice of the ideal under the exact T2 form, LLL-reduced.
FormLattice ideal_lattice(const NfIdeal& a);

struct PrincipalStats {
  long double bound = 0;
  u64 candidates = 0;
};

// A generator of a, or nullopt when none exists. Candidates are searched
// below a certified T2 bound derived from the norm and the unit lattice.
std::optional<NfElement> is_principal_with_generator(const NfIdeal& a, PrincipalStats* stats = nullptr);

}  // namespace pfav
