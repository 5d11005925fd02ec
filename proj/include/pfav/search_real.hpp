// Fixed maximal real subfield search over tau = pi + conj(pi), the
// characteristic polynomial from tau, and the cluster predictor.
#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pfav/search_cm.hpp"

namespace pfav {

struct TauRecord {
  std::vector<i64> tau;  // integral coordinates in K0
  std::vector<long double> emb;
  long double max_abs = 0;
};

// Integral x in K0 with |sigma_i(x)| <= T for all i; T > 0 exact.
void enumerate_totally_bounded(const FieldDescriptor& K0, const mpq_class& T,
                               const std::function<void(const TauRecord&)>& visit);
u64 count_totally_bounded(const FieldDescriptor& K0, const mpq_class& T);

// Exact test that every |sigma_i(x)|^2 <= t2.
bool totally_bounded_exact(const NfElement& x, const mpq_class& t2);

// (r, P) with P a degree-one prime of K0 above r dividing Phi_k(tau - 1),
// rlo <= r <= rhi, r = 1 mod k. Sets *deferred when the norm could not be
// fully factored within the budget.
std::vector<std::pair<u64, PrimeIdeal>> degree_one_divisors_of_phi(const NfElement& tau, int k, u64 rlo, u64 rhi,
                                                                   bool* deferred = nullptr,
                                                                   const FactorBudget& budget = {});

// prod_i (X^2 - tau_i X + q); throws std::domain_error when some |tau_i| > 2 sqrt(q).
ZPoly char_poly_from_tau(const NfElement& tau, const mpz_class& q);

struct RealSearchSpec {
  int k = 2;
  mpq_class rho0 = 2;
  u64 rmin = 2;
  u64 rmax = 2;
  int d = 1;
  int threads = 1;
  // When nonzero, keep only tau with tau^2 - 4q = cm_disc * m^2 (g = 1 only).
  long cm_disc = 0;
};

// r-major enumeration: for each r and each p of order k, the tau with
// tau = q + 1 modulo a degree-one prime above r inside the Weil box.
SearchResult search_fixed_real(const FieldDescriptor& K0, const RealSearchSpec& spec);
// tau-major enumeration with per-tau norm factoring; d = 1 only. Meant for
// cross-checking on small ranges.
SearchResult search_fixed_real_tau_major(const FieldDescriptor& K0, const RealSearchSpec& spec,
                                         const FactorBudget& budget = {});

// Number of degree-one primes of K0 above r.
int degree_one_prime_count(const FieldDescriptor& K0, u64 r);

// Expected number of distinct characteristic polynomials sharing (r, p):
// 4^g p^(g/2) C / (r sqrt(d(K0)) #Aut(K0)).
double cluster_prediction(const FieldDescriptor& K0, u64 r, u64 p, int C);

}  // namespace pfav
