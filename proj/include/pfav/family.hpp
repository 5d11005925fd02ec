// Complete polynomial families (r0, pi0, p0) over a CM field, their
// algebraic validation, triple enumeration and the Bateman-Horn count.
#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pfav/search_cm.hpp"

namespace pfav {

// Polynomial with coefficients in a number field, lowest degree first.
using KPoly = std::vector<NfElement>;

struct CompleteFamily {
  std::string name;
  const FieldDescriptor* K = nullptr;  // CM field
  int k = 2;
  QPoly r0;
  KPoly pi0;
  QPoly p0;  // pi0 * conj(pi0); filled by make_family
  bool p0_rational = true;
  mpq_class leading() const { return r0.lead(); }
  int g() const { return K->n / 2; }
};

// Builds the family and derives p0. When pi0 * conj(pi0) has a non-rational
// coefficient, p0 keeps the rational parts and p0_rational is false.
CompleteFamily make_family(std::string name, const FieldDescriptor& K, int k, QPoly r0, KPoly pi0);

enum class CheckStatus { pass, fail, unverified };
std::string to_string(CheckStatus s);

struct FamilyReport {
  std::map<std::string, CheckStatus> checks;
  std::map<std::string, QPoly> witnesses;  // quotient polynomials
  mpq_class generic_rho;
  // True when no check failed.
  bool algebraic_ok() const;
};

KPoly kpoly_conj(const KPoly& f);
KPoly kpoly_mul(const KPoly& a, const KPoly& b);
NfElement kpoly_eval(const KPoly& f, const mpq_class& x);
// N_{K/Q}(f(x)) as a rational polynomial, by exact interpolation.
QPoly kpoly_norm(const KPoly& f);

FamilyReport validate_family(const CompleteFamily& fam);

// Barreto-Naehrig: K = Q(sqrt(-3)), k = 12, r0 = 36w^4 + 36w^3 + 18w^2 + 6w + 1,
// pi0 = (t0 + y0 sqrt(-3)) / 2 with t0 = 6w^2 + 1, y0 = 6w^2 + 4w + 1.
CompleteFamily bn_family(const FieldRegistry& reg);

// Families from a config text: sections "[Name]" with keys field, k,
// r0 (rational coefficients, lowest first) and pi0 (coefficients separated
// by ';', each a list of integral-basis coordinates).
std::vector<CompleteFamily> load_families(const FieldRegistry& reg, const std::string& text);

struct RWindow {
  u64 lo = 0;
  u64 hi = ~0ull;
};

// Triples at integers w in [wlo, whi] with r0(w), p0(w) prime and the order of
// p0(w) modulo r0(w) equal to k.
SearchResult enumerate_family_triples(const CompleteFamily& fam, i64 wlo, i64 whi, RWindow window = {});

struct FamilyEstimate {
  double value = 0;             // a' x^(1/deg r0) / (log x)^2
  double a_prime = 0;
  double euler_product = 0;     // truncated Bateman-Horn product
  double truncation_error = 0;  // |a'(B) - a'(B/2)|
  std::string label = "heuristic, truncated";
};

FamilyEstimate family_count_estimate(const CompleteFamily& fam, double x, u64 prime_bound);

enum class FamilyComparison { dominates, dominated, boundary };
std::string to_string(FamilyComparison c);

struct FamilyComparisonReport {
  FamilyComparison result;
  std::string inequality;
};

// Compares the family exponent 1/deg r0 with the heuristic exponent rho0/g - 1
// on the range generic_rho < rho0 < g (1 + 1/deg r0).
FamilyComparisonReport family_vs_heuristic(const CompleteFamily& fam, const mpq_class& rho0);

}  // namespace pfav
