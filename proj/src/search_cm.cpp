#include "pfav/search_cm.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <numeric>
#include <set>
#include <thread>

namespace pfav {

void SearchDiagnostics::add(const SearchDiagnostics& o) {
  r_scanned += o.r_scanned;
  r_skipped_prescreen += o.r_skipped_prescreen;
  p_tested += o.p_tested;
  p_skipped_prescreen += o.p_skipped_prescreen;
  index_primes += o.index_primes;
  ramified += o.ramified;
  non_primitive += o.non_primitive;
  r_squared += o.r_squared;
  deferred += o.deferred;
  seconds += o.seconds;
}

size_t SearchResult::count() const {
  if (key == CountKey::triple) return triples.size();
  std::set<ZPoly> polys;
  for (const auto& t : triples) polys.insert(t.charpoly);
  return polys.size();
}

std::vector<size_t> SearchResult::bucket(const std::vector<mpq_class>& grid) const {
  std::vector<size_t> out;
  for (const auto& rho0 : grid) {
    if (key == CountKey::triple) {
      size_t n = 0;
      for (const auto& t : triples)
        if (rho_at_most(t.r, t.p, t.g, t.d, rho0)) ++n;
      out.push_back(n);
    } else {
      std::set<ZPoly> polys;
      for (const auto& t : triples)
        if (rho_at_most(t.r, t.p, t.g, t.d, rho0)) polys.insert(t.charpoly);
      out.push_back(polys.size());
    }
  }
  return out;
}

SearchResult merge_results(std::vector<SearchResult> parts) {
  SearchResult out;
  if (!parts.empty()) out.key = parts.front().key;
  for (auto& part : parts) {
    out.diag.add(part.diag);
    for (auto& t : part.triples) out.triples.push_back(std::move(t));
  }
  std::sort(out.triples.begin(), out.triples.end(), [](const WeilTriple& a, const WeilTriple& b) {
    if (a < b || b < a) return a < b;
    return a.witness < b.witness;
  });
  out.triples.erase(std::unique(out.triples.begin(), out.triples.end(),
                                [](const WeilTriple& a, const WeilTriple& b) { return !(a < b) && !(b < a); }),
                    out.triples.end());
  return out;
}

namespace {

std::set<u64> generated_subgroup(u64 f, u64 r, const std::vector<u64>& h) {
  std::set<u64> out;
  u64 x = 1 % f;
  do {
    for (u64 e : h) out.insert(static_cast<u64>(static_cast<u128>(x) * e % f));
    x = static_cast<u64>(static_cast<u128>(x) * (r % f) % f);
  } while (x != 1 % f);
  return out;
}

}  // namespace

std::optional<ResidueFilter> residue_prescreen(const FieldDescriptor& K, bool use_resolvent) {
  const AbelianData* data = nullptr;
  if (K.is_abelian()) data = &*K.abelian;
  else if (use_resolvent && K.resolvent) data = &*K.resolvent;
  if (!data || data->conductor <= 1) return std::nullopt;
  ResidueFilter f;
  f.modulus = data->conductor;
  std::set<u64> allowed(data->subgroup.begin(), data->subgroup.end());
  for (u64 x = 0; x < f.modulus; ++x)
    if (std::gcd(x, f.modulus) != 1) allowed.insert(x);
  f.allowed.assign(allowed.begin(), allowed.end());
  return f;
}

bool r_prescreen(const FieldDescriptor& K, u64 r) {
  if (!K.is_abelian() || !K.is_cm()) return true;
  u64 f = K.abelian->conductor;
  if (f <= 2 || r % f == 0) return true;
  return !generated_subgroup(f, r, K.abelian->subgroup).count(f - 1);
}

SearchResult search_fixed_cm(const CmField& C, const CmSearchSpec& spec) {
  if (spec.k < 2) throw std::invalid_argument("embedding degree must be at least 2");
  if (spec.rho0 <= 0) throw std::invalid_argument("rho0 must be positive");
  auto start = std::chrono::steady_clock::now();
  const FieldDescriptor& K = *C.K;
  std::optional<ResidueFilter> pfilter;
  if (spec.prescreen) pfilter = residue_prescreen(K, spec.resolvent_prescreen);
  ResidueFilter rfilter{static_cast<u64>(spec.k), {1 % static_cast<u64>(spec.k)}};
  std::vector<u64> rs = primes_in_range(std::max<u64>(spec.rmin, 2), spec.rmax, rfilter);

  int nt = std::max(1, spec.threads);
  std::vector<SearchResult> parts(nt);
  auto worker = [&](int t) {
    SearchResult& out = parts[t];
    std::map<std::tuple<u64, u64, ZPoly>, WeilTriple> found;
    for (size_t i = t; i < rs.size(); i += nt) {
      u64 r = rs[i];
      ++out.diag.r_scanned;
      if (spec.prescreen && !r_prescreen(K, r)) {
        ++out.diag.r_skipped_prescreen;
        continue;
      }
      u64 pb = p_bound(r, spec.rho0, C.g, 1);
      for (u64 z : residues_of_order(r, spec.k, 1)) {
        for (u64 p = z; p <= pb; p += r) {
          if (p < 2) continue;
          if (pfilter && !pfilter->admits(p)) {
            ++out.diag.p_skipped_prescreen;
            continue;
          }
          if (!is_prime(p)) continue;
          ++out.diag.p_tested;
          DecompositionStats ds;
          std::vector<NfElement> weil;
          try {
            weil = weil_numbers_above(p, C, &ds);
          } catch (const IndexPrimeError&) {
            ++out.diag.index_primes;
            continue;
          }
          out.diag.ramified += ds.ramified;
          out.diag.non_primitive += ds.non_primitive;
          NfElement one = elem_rational(K, 1);
          for (const auto& pi : weil) {
            if (norm_mod(pi - one, r) != 0) continue;
            ZPoly cp = char_poly_of_weil(pi);
            auto key = std::make_tuple(r, p, cp);
            if (found.count(key)) continue;
            WeilTriple tr;
            tr.r = r;
            tr.p = p;
            tr.d = 1;
            tr.k = spec.k;
            tr.g = C.g;
            tr.charpoly = cp;
            tr.rho = rho_value(r, p, C.g, 1);
            tr.field = K.name;
            tr.witness = pi.coords();
            tr.source = "cm-search";
            mpz_class r2 = mpz_class(static_cast<unsigned long>(r)) * static_cast<unsigned long>(r);
            tr.r_squared = cp.eval(mpz_class(1)) % r2 == 0;
            if (tr.r_squared) ++out.diag.r_squared;
            found.emplace(key, std::move(tr));
          }
        }
      }
    }
    for (auto& [key, tr] : found) out.triples.push_back(std::move(tr));
  };
  if (nt == 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < nt; ++t) pool.emplace_back(worker, t);
    for (auto& th : pool) th.join();
  }
  SearchResult res = merge_results(std::move(parts));
  res.key = CountKey::triple;
  res.diag.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return res;
}

std::vector<std::pair<mpq_class, size_t>> bucket_table(const SearchResult& result, const std::vector<mpq_class>& grid) {
  for (size_t i = 1; i < grid.size(); ++i)
    if (grid[i] < grid[i - 1]) throw std::invalid_argument("rho grid must be ascending");
  auto counts = result.bucket(grid);
  std::vector<std::pair<mpq_class, size_t>> rows;
  for (size_t i = 0; i < grid.size(); ++i) rows.emplace_back(grid[i], counts[i]);
  return rows;
}

}  // namespace pfav
