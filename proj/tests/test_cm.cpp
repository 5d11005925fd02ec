#include <cmath>
#include <random>
#include <set>

#include "common.hpp"
#include "pfav/cm.hpp"

using namespace pfav;

namespace {

// pi = a + b i with a^2 + b^2 = p, by direct enumeration.
size_t gaussian_weil_count(u64 p) {
  size_t n = 0;
  for (i64 a = -static_cast<i64>(p); a <= static_cast<i64>(p); ++a)
    for (i64 b = -static_cast<i64>(p); b <= static_cast<i64>(p); ++b)
      if (static_cast<u64>(a * a + b * b) == p) ++n;
  return n;
}

}  // namespace

TEST_CASE("conjugation and Weil numbers in Q(i)") {
  CmField C = cm_field(registry(), "Qi");
  CHECK(C.g == 1);
  CHECK(C.K0->name == "Q");
  NfElement pi = elem(*C.K, std::vector<i64>{1, 2});
  CHECK(conj(pi) == elem(*C.K, std::vector<i64>{1, -2}));
  CHECK(is_weil_number(pi, 5));
  CHECK_FALSE(is_weil_number(pi, 7));
  CHECK(char_poly_of_weil(pi) == ZPoly{5, -2, 1});
  for (u64 p : primes_in_range(2, 400)) {
    auto w = weil_numbers_above(p, C);
    CHECK(w.size() == gaussian_weil_count(p));
    for (const auto& x : w) CHECK(is_weil_number(x, p));
  }
}

TEST_CASE("Weil numbers in Q(zeta5)") {
  CmField Z = cm_field(registry(), "Qzeta5");
  CHECK(Z.g == 2);
  CHECK(primitive_decompositions(11, Z).size() == 4);
  auto w = weil_numbers_above(11, Z);
  CHECK(w.size() == 40);
  std::set<ZPoly> polys;
  for (const auto& x : w) {
    CHECK(is_weil_number(x, 11));
    for (auto e : embeddings(x)) CHECK(std::abs(std::abs(e) - std::sqrt(11.0L)) < 1e-12L);
    ZPoly c = char_poly_of_weil(x);
    CHECK(c.degree() == 4);
    CHECK(c[0] == 121);
    CHECK(c[1] == 11 * c[3]);
    CHECK(c.eval(mpz_class(1)) == norm(x - elem_rational(*Z.K, 1)));
    polys.insert(c);
  }
  CHECK(polys.size() == 10);
  CHECK(weil_numbers_above(7, Z).empty());
}

TEST_CASE("lattice and unit-equation generators agree") {
  for (const char* name : {"Qzeta5", "Q4_2", "Qzeta9"}) {
    CmField C = cm_field(registry(), name);
    int checked = 0;
    for (u64 p : primes_in_range(3, 200)) {
      std::vector<NfIdeal> decs;
      try {
        decs = primitive_decompositions(p, C);
      } catch (const IndexPrimeError&) {
        continue;
      }
      for (const auto& a : decs) {
        auto x = weil_generators(a, p, C), y = weil_generators_via_units(a, p, C);
        std::sort(x.begin(), x.end());
        std::sort(y.begin(), y.end());
        CHECK(x == y);
        ++checked;
      }
    }
    CHECK(checked > 0);
  }
}

TEST_CASE("relative norm unit equation") {
  CmField Z = cm_field(registry(), "Qzeta5");
  for (const auto& u : fundamental_units(*Z.K)) {
    for (int e = -2; e <= 2; ++e) {
      NfElement eta = pow(u, e) * conj(pow(u, e));
      auto eps = solve_relative_norm_unit(eta, Z);
      REQUIRE(eps.has_value());
      CHECK(*eps * conj(*eps) == eta);
    }
  }
  NfElement minus_one = elem_rational(*Z.K, -1);
  CHECK_FALSE(solve_relative_norm_unit(minus_one, Z).has_value());
}

TEST_CASE("norm_mod matches the exact norm") {
  std::mt19937_64 rng(5);
  for (const char* name : {"Qi", "Qzeta5", "Q8_13", "Qzeta9"}) {
    const auto& F = field(name);
    for (int i = 0; i < 30; ++i) {
      std::vector<i64> c(F.n);
      for (auto& x : c) x = static_cast<i64>(rng() % 2001) - 1000;
      NfElement x = elem(F, c);
      mpz_class n = norm(x).get_num();
      for (u64 m : {1000003ull, 97ull, 7ull}) {
        mpz_class want = n % m;
        if (want < 0) want += m;
        CHECK(norm_mod(x, m) == want.get_ui());
      }
    }
  }
}

TEST_CASE("real Weil polynomial and Sturm counts") {
  ZPoly c{25, -10, 11, -2, 1};  // (X^2 - X + 5)^2 at q = 5
  auto h = real_weil_polynomial(c, 5);
  REQUIRE(h.has_value());
  CHECK(*h == ZPoly{1, -2, 1});
  CHECK_FALSE(real_weil_polynomial(ZPoly{25, -10, 11, -3, 1}, 5).has_value());
  QPoly f{mpq_class(-2), 0, 1};
  CHECK(sturm_count(f, -2, 2) == 2);
  CHECK(sturm_count(f, 0, 2) == 1);
  CHECK(sturm_count(f, 2, 3) == 0);
}

TEST_CASE("verify_triple accepts valid triples and rejects damaged ones") {
  CmField C = cm_field(registry(), "Qi");
  WeilTriple t;
  t.p = 13;
  t.field = "Qi";
  t.source = "cm-search";
  NfElement pi2 = elem(*C.K, std::vector<i64>{2, 3});  // C(1) = 10, r = 5, order of 13 mod 5 is 4
  WeilTriple u = t;
  u.r = 5;
  u.k = 4;
  u.charpoly = char_poly_of_weil(pi2);
  u.witness = pi2.coords();
  u.rho = rho_value(5, 13, 1);
  CHECK(verify_triple(u).ok());

  WeilTriple bad = u;
  bad.k = 2;
  CHECK_FALSE(verify_triple(bad).ok());
  bad = u;
  bad.r = 7;
  CHECK_FALSE(verify_triple(bad).ok());
  bad = u;
  bad.p = 15;
  CHECK_FALSE(verify_triple(bad).ok());
  bad = u;
  bad.charpoly = ZPoly{13, -9, 1};  // |tau| > 2 sqrt(13)
  CHECK_FALSE(verify_triple(bad).ok());
  bad = u;
  bad.charpoly = ZPoly{14, -4, 1};
  CHECK_FALSE(verify_triple(bad).ok());
}
