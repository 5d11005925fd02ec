#include "common.hpp"
#include "oracles.hpp"
#include "pfav/search_cm.hpp"

using namespace pfav;

namespace {

std::set<oracle::Triple> as_oracle_set(const SearchResult& res) {
  std::set<oracle::Triple> out;
  for (const auto& t : res.triples) out.emplace(t.r, t.p, -t.charpoly[1].get_si());
  return out;
}

CmSearchSpec spec(int k, const char* rho0, u64 a, u64 b) {
  CmSearchSpec s;
  s.k = k;
  s.rho0 = parse_rational(rho0);
  s.rmin = a;
  s.rmax = b;
  return s;
}

bool same_triples(const SearchResult& a, const SearchResult& b) {
  if (a.triples.size() != b.triples.size()) return false;
  for (size_t i = 0; i < a.triples.size(); ++i)
    if (a.triples[i] < b.triples[i] || b.triples[i] < a.triples[i]) return false;
  return true;
}

}  // namespace

TEST_CASE("imaginary quadratic search matches brute force") {
  for (auto [name, D] : {std::pair{"Qi", -4}, std::pair{"Qsqrtm3", -3}}) {
    CmField C = cm_field(registry(), name);
    for (int k : {2, 3, 4, 6}) {
      auto res = search_fixed_cm(C, spec(k, "1.5", 3, 3000));
      auto want = oracle::imaginary_quadratic_triples(D, k, 3, 3000, 3, 2);
      CAPTURE(name);
      CAPTURE(k);
      CHECK(as_oracle_set(res) == want);
      for (const auto& t : res.triples) CHECK(verify_triple(t).ok());
    }
  }
}

TEST_CASE("prescreens, threads and shards do not change the result") {
  CmField C = cm_field(registry(), "Qzeta5");
  CmSearchSpec base = spec(2, "3", 1000, 6000);
  auto full = search_fixed_cm(C, base);
  CHECK(full.count() > 0);
  for (const auto& t : full.triples) {
    CHECK(verify_triple(t).ok());
    CHECK(t.k == 2);
    CHECK(t.g == 2);
    CHECK(rho_at_most(t.r, t.p, 2, 1, 3));
  }

  CmSearchSpec off = base;
  off.prescreen = false;
  CHECK(same_triples(full, search_fixed_cm(C, off)));

  CmSearchSpec two = base;
  two.threads = 2;
  CHECK(same_triples(full, search_fixed_cm(C, two)));

  std::vector<SearchResult> parts;
  for (auto [a, b] : {std::pair<u64, u64>{1000, 2500}, {2501, 4000}, {4001, 6000}})
    parts.push_back(search_fixed_cm(C, spec(2, "3", a, b)));
  parts.push_back(parts.front());
  CHECK(same_triples(full, merge_results(parts)));
}

TEST_CASE("bucketed counts are cumulative") {
  CmField C = cm_field(registry(), "Qi");
  auto res = search_fixed_cm(C, spec(3, "2", 100, 2000));
  std::vector<mpq_class> grid;
  for (int i = 10; i <= 20; ++i) grid.emplace_back(i, 10);
  auto counts = res.bucket(grid);
  CHECK(std::is_sorted(counts.begin(), counts.end()));
  CHECK(counts.back() == res.count());
  for (size_t i = 0; i < grid.size(); ++i) {
    auto direct = search_fixed_cm(C, [&] {
      CmSearchSpec s = spec(3, "2", 100, 2000);
      s.rho0 = grid[i];
      return s;
    }());
    CHECK(direct.count() == counts[i]);
  }
}

TEST_CASE("residue prescreen for abelian fields") {
  auto f = residue_prescreen(field("Qi"));
  REQUIRE(f.has_value());
  CHECK(f->modulus == 4);
  for (u64 p : primes_in_range(3, 1000)) CHECK(f->admits(p) == (p % 4 == 1));
}
