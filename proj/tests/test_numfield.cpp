#include <cmath>
#include <random>

#include "common.hpp"
#include "pfav/ideal.hpp"

using namespace pfav;

namespace {

NfElement el(const std::string& f, std::vector<i64> c) { return elem(field(f), c); }

std::vector<i64> random_coords(std::mt19937_64& rng, int n, int span) {
  std::vector<i64> c(n);
  for (auto& x : c) x = static_cast<i64>(rng() % (2 * span + 1)) - span;
  return c;
}

}  // namespace

TEST_CASE("configured invariants") {
  const auto& qi = field("Qi");
  CHECK(qi.r1 == 0);
  CHECK(qi.r2 == 1);
  CHECK(qi.torsion == 4);
  CHECK(qi.discriminant == -4);
  const auto& q42 = field("Q4_2");
  CHECK(q42.n == 4);
  CHECK(q42.torsion == 2);
  CHECK(q42.aut_order() == 4);
  const auto& z5 = field("Qzeta5");
  CHECK(z5.torsion == 10);
  CHECK(z5.aut_order() == 4);
  for (const auto& name : registry().names()) {
    const auto& F = field(name);
    CHECK(static_cast<int>(torsion_units(F).size()) == F.torsion);
    CHECK(static_cast<int>(F.units.size()) == F.r1 + F.r2 - 1);
  }
}

TEST_CASE("load_field rejects inconsistent data") {
  std::string good = "[T]\npoly = 1 0 1\nbasis = 1 0 | 0 1\ndiscriminant = -4\nsignature = 0 1\nindex = 1\n"
                     "class_number = 1\ntorsion = 4\nautomorphisms = 1 0 0 1 | 1 0 0 -1\nconj = 1\n";
  CHECK_NOTHROW(load_field(good));
  std::string bad_disc = good;
  bad_disc.replace(bad_disc.find("-4"), 2, "-8");
  CHECK_THROWS_WITH_AS(load_field(bad_disc), doctest::Contains("T"), std::exception);
  std::string bad_torsion = good;
  bad_torsion.replace(bad_torsion.find("torsion = 4"), 11, "torsion = 6");
  CHECK_THROWS(load_field(bad_torsion));
  std::string bad_aut = good;
  bad_aut.replace(bad_aut.find("1 0 0 -1"), 8, "1 0 0 2 ");
  CHECK_THROWS(load_field(bad_aut));
}

TEST_CASE("element operations") {
  CHECK(norm(el("Qi", {1, 2})) == 5);
  CHECK(minimal_polynomial(el("Qsqrt2", {1, 1})) == ZPoly{-1, -2, 1});
  NfElement pi = el("Qi", {3, 2});
  CHECK(norm(pi - elem_rational(field("Qi"), 1)) == 8);
  CHECK(trace(el("Qsqrt2", {3, 5})) == 6);
  CHECK_THROWS(el("Qi", {1, 1}) + el("Qsqrt2", {1, 1}));

  std::mt19937_64 rng(3);
  for (const char* name : {"Qsqrt5", "Qzeta5", "Qzeta7plus", "Q8_13", "Qzeta9"}) {
    const auto& F = field(name);
    for (int i = 0; i < 20; ++i) {
      NfElement a = elem(F, random_coords(rng, F.n, 5)), b = elem(F, random_coords(rng, F.n, 5));
      CHECK(norm(a * b) == norm(a) * norm(b));
      CHECK(trace(a + b) == trace(a) + trace(b));
      if (!a.is_zero()) CHECK(a * inverse(a) == elem_rational(F, 1));
      QPoly cp = charpoly(a);
      NfElement acc = elem_rational(F, 0);
      for (int j = cp.degree(); j >= 0; --j) acc = acc * a + elem_rational(F, cp[j]);
      CHECK(acc.is_zero());
    }
  }
}

TEST_CASE("factor_rational_prime") {
  auto five = factor_rational_prime(5, field("Qi"));
  CHECK(five.size() == 2);
  for (const auto& P : five) CHECK(P.f == 1);
  auto three = factor_rational_prime(3, field("Qi"));
  REQUIRE(three.size() == 1);
  CHECK(three[0].f == 2);
  auto eleven = factor_rational_prime(11, field("Qzeta5"));
  CHECK(eleven.size() == 4);
  for (const char* name : {"Qi", "Qsqrt5", "Qzeta5", "Qzeta7plus", "Q4_2", "Q8_13", "Qzeta9", "Q24_144_27"}) {
    const auto& F = field(name);
    for (u64 p : primes_in_range(2, 200)) {
      std::vector<PrimeIdeal> ps;
      try {
        ps = factor_rational_prime(p, F);
      } catch (const IndexPrimeError&) {
        CHECK(F.index % p == 0);
        continue;
      }
      int sum = 0;
      NfIdeal prod = unit_ideal(F);
      for (const auto& P : ps) {
        sum += P.e * P.f;
        mpz_class pf;
        mpz_ui_pow_ui(pf.get_mpz_t(), p, P.f);
        CHECK(P.ideal.norm == pf);
        for (int i = 0; i < P.e; ++i) prod = prod * P.ideal;
      }
      CHECK(sum == F.n);
      CHECK(prod == principal_ideal(elem_rational(F, static_cast<unsigned long>(p))));
    }
  }
}

TEST_CASE("ideal_divides") {
  auto ps = factor_rational_prime(5, field("Qi"));
  NfElement five = elem_rational(field("Qi"), 5), x = el("Qi", {1, 2}), one = elem_rational(field("Qi"), 1);
  int hits = 0;
  for (const auto& P : ps) {
    CHECK(ideal_divides(five, P));
    CHECK_FALSE(ideal_divides(one, P));
    hits += ideal_divides(x, P);
  }
  CHECK(hits == 1);
}

TEST_CASE("principal ideal testing") {
  const auto& F = field("Qsqrtm5");
  NfIdeal a = ideal_from_generators(F, {elem_rational(F, 2), el("Qsqrtm5", {1, 1})});
  CHECK(a.norm == 2);
  CHECK_FALSE(is_principal_with_generator(a).has_value());
  auto g = is_principal_with_generator(principal_ideal(el("Qsqrtm5", {0, 1})));
  REQUIRE(g.has_value());
  CHECK(abs(norm(*g)) == 5);

  const auto& Z = field("Qzeta5");
  for (const auto& P : factor_rational_prime(11, Z)) {
    auto gen = is_principal_with_generator(P.ideal);
    REQUIRE(gen.has_value());
    CHECK(abs(norm(*gen)) == 11);
    CHECK(contains(P.ideal, *gen));
    CHECK(principal_ideal(*gen) == P.ideal);
  }
  int principal = 0, total = 0;
  for (u64 p : primes_in_range(3, 200)) {
    try {
      for (const auto& P : factor_rational_prime(p, field("Q8_13"))) {
        if (P.f != 1) continue;
        ++total;
        principal += is_principal_with_generator(P.ideal).has_value();
      }
    } catch (const IndexPrimeError&) {
    }
  }
  CHECK(total > 0);
  CHECK(principal > 0);
  CHECK(principal < total);
}

TEST_CASE("unit_reduce") {
  const auto& F = field("Qsqrt2");
  NfElement u = el("Qsqrt2", {1, 1});
  NfElement x = pow(u, 5);
  NfElement y = unit_reduce(x);
  CHECK(abs(norm(y)) == abs(norm(x)));
  long double lambda = 1 + std::sqrt(2.0L);
  for (auto e : embeddings(y)) {
    CHECK(std::abs(e) <= lambda + 1e-9L);
    CHECK(std::abs(e) >= 1 / lambda - 1e-9L);
  }
  NfElement m = el("Qsqrt2", {3, 1});
  NfElement mr = unit_reduce(m * pow(u, -7));
  CHECK(abs(norm(mr)) == 7);
  for (const auto& z : torsion_units(field("Qzeta5"))) {
    NfElement r = unit_reduce(z);
    CHECK(norm(r) == 1);
    CHECK(pow(r, 10) == elem_rational(field("Qzeta5"), 1));
  }
  (void)F;
}

TEST_CASE("torsion units") {
  auto t = torsion_units(field("Qi"));
  CHECK(t.size() == 4);
  auto z = torsion_units(field("Qzeta5"));
  CHECK(z.size() == 10);
  for (const auto& a : z)
    for (const auto& b : z) CHECK(std::find(z.begin(), z.end(), a * b) != z.end());
  CHECK(torsion_units(field("Qsqrt2")).size() == 2);
}

TEST_CASE("intersection degree e(k, F)") {
  CHECK(intersection_degree_e(12, field("Qsqrt3")) == 2);
  CHECK(intersection_degree_e(8, field("Qsqrt3")) == 1);
  CHECK(intersection_degree_e(7, field("Qzeta7plus")) == 3);
  CHECK(intersection_degree_e(3, field("Qzeta7plus")) == 1);
  CHECK(intersection_degree_e(16, field("Q4_2")) == 4);
  CHECK(intersection_degree_e(8, field("Qsqrt2")) == 2);
  CHECK(intersection_degree_e(5, field("Qzeta5")) == 4);
  CHECK(intersection_degree_e(10, field("Qzeta5")) == 4);
  CHECK(intersection_degree_e(2, field("Qzeta5")) == 1);
  CHECK(intersection_degree_e(5, field("Q")) == 1);
}
