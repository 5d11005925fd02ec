// Fixed CM field search: triples (r, pi, p) with a <= r <= b, r = 1 mod k,
// p of order k modulo r and p <= r^(rho0/g).
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pfav/cm.hpp"

namespace pfav {

struct SearchDiagnostics {
  u64 r_scanned = 0;
  u64 r_skipped_prescreen = 0;
  u64 p_tested = 0;
  u64 p_skipped_prescreen = 0;
  u64 index_primes = 0;
  u64 ramified = 0;
  u64 non_primitive = 0;
  u64 r_squared = 0;
  u64 deferred = 0;  // incomplete factorizations (tau-major search)
  double seconds = 0;

  void add(const SearchDiagnostics& o);
};

enum class CountKey { triple, charpoly };

struct SearchResult {
  std::vector<WeilTriple> triples;  // sorted by (r, p, charpoly), unique
  SearchDiagnostics diag;
  CountKey key = CountKey::triple;

  // N for CM searches (distinct (charpoly, r, p)), R_c for real searches (distinct charpolys).
  size_t count() const;
  // Cumulative counts for each rho0 in the grid, using the exact p-bound test.
  std::vector<size_t> bucket(const std::vector<mpq_class>& grid) const;
};

// Sorts, removes duplicates and merges diagnostics.
SearchResult merge_results(std::vector<SearchResult> parts);

struct CmSearchSpec {
  int k = 2;
  mpq_class rho0 = 2;
  u64 rmin = 2;
  u64 rmax = 2;
  bool prescreen = true;
  bool resolvent_prescreen = false;  // non-abelian fields only
  int threads = 1;
};

// Residues p mod f that can carry a primitive decomposition: for abelian K
// the classes splitting completely, otherwise (when use_resolvent is set)
// the classes in the configured resolvent subgroup. nullopt when no
// prescreen applies. Primes dividing f always pass.
std::optional<ResidueFilter> residue_prescreen(const FieldDescriptor& K, bool use_resolvent = false);
// False only when no prime above r can avoid being fixed by conjugation.
bool r_prescreen(const FieldDescriptor& K, u64 r);

SearchResult search_fixed_cm(const CmField& C, const CmSearchSpec& spec);

// Rows (rho0, cumulative count).
std::vector<std::pair<mpq_class, size_t>> bucket_table(const SearchResult& result, const std::vector<mpq_class>& grid);

}  // namespace pfav
