#include <cmath>
#include <set>

#include "common.hpp"
#include "pfav/family.hpp"

using namespace pfav;

namespace {

bool trial_prime(i64 n) {
  if (n < 2) return false;
  for (i64 d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

u64 order_mod(u64 a, u64 m) {
  u64 x = a % m, k = 1;
  while (x != 1) {
    x = static_cast<u64>(static_cast<unsigned __int128>(x) * a % m);
    ++k;
  }
  return k;
}

}  // namespace

TEST_CASE("Barreto-Naehrig family identities") {
  auto bn = bn_family(registry());
  CHECK(bn.k == 12);
  CHECK(bn.p0_rational);
  CHECK(bn.p0.degree() == 4);
  CHECK(bn.r0.degree() == 4);
  CHECK(bn.p0.eval(mpq_class(1)) == 103);
  CHECK(bn.r0.eval(mpq_class(1)) == 97);
  CHECK(bn.p0 == QPoly{1, 6, 24, 36, 36});
  auto rep = validate_family(bn);
  for (const char* key : {"degrees_even", "ii_p0_rational", "iii_r0_divides_phi_k_p0",
                          "iii_r0_divides_norm_pi0_minus_1", "i_r0_irreducible", "i_reflex_subfield"}) {
    CAPTURE(key);
    REQUIRE(rep.checks.count(key) == 1);
    CHECK(rep.checks.at(key) == CheckStatus::pass);
  }
  CHECK(rep.algebraic_ok());
  CHECK(rep.generic_rho == 1);
  QPoly n1 = kpoly_norm([&] {
    KPoly f = bn.pi0;
    f[0] = f[0] - elem_rational(*bn.K, 1);
    return f;
  }());
  CHECK(rep.witnesses.at("norm_pi0_minus_1_over_r0") * bn.r0 == n1);
  QPoly phi12_p0 = bn.p0 * bn.p0 * bn.p0 * bn.p0 - bn.p0 * bn.p0 + QPoly{1};
  CHECK(rep.witnesses.at("phi_k_p0_over_r0") * bn.r0 == phi12_p0);
}

TEST_CASE("perturbed family fails validation") {
  auto bn = bn_family(registry());
  KPoly pi = bn.pi0;
  pi[0] = pi[0] + elem_rational(*bn.K, 1);
  auto bad = make_family("perturbed", *bn.K, 12, bn.r0, pi);
  auto rep = validate_family(bad);
  CHECK_FALSE(rep.algebraic_ok());
  CHECK(rep.checks.at("iii_r0_divides_norm_pi0_minus_1") == CheckStatus::fail);
}

TEST_CASE("family enumeration matches a double-primality scan") {
  auto bn = bn_family(registry());
  auto res = enumerate_family_triples(bn, -500, 500);
  std::set<std::pair<u64, u64>> want;
  for (i64 w = -500; w <= 500; ++w) {
    i64 r = 36 * w * w * w * w + 36 * w * w * w + 18 * w * w + 6 * w + 1;
    i64 p = 36 * w * w * w * w + 36 * w * w * w + 24 * w * w + 6 * w + 1;
    if (trial_prime(r) && trial_prime(p) && order_mod(static_cast<u64>(p), static_cast<u64>(r)) == 12)
      want.emplace(static_cast<u64>(r), static_cast<u64>(p));
  }
  std::set<std::pair<u64, u64>> got;
  for (const auto& t : res.triples) {
    got.emplace(t.r, t.p);
    CHECK(t.k == 12);
    CHECK(t.source == "family");
    CHECK(verify_triple(t).ok());
  }
  CHECK(got == want);
  CHECK(got.size() > 20);
}

TEST_CASE("family loading from text") {
  std::string text =
      "[BN]\nfield = Qsqrtm3\nk = 12\nr0 = 1 6 18 36 36\npi0 = 1 1 ; 2 4 ; 6 6\n";
  auto fams = load_families(registry(), text);
  REQUIRE(fams.size() == 1);
  auto bn = bn_family(registry());
  CHECK(fams[0].p0 == bn.p0);
  CHECK(validate_family(fams[0]).algebraic_ok());
  CHECK_THROWS(load_families(registry(), "[X]\nfield = Nope\nk = 12\nr0 = 1 1\npi0 = 1 0\n"));
}

TEST_CASE("Bateman-Horn estimate and comparison with the heuristic") {
  auto bn = bn_family(registry());
  auto e = family_count_estimate(bn, 1e8, 2000);
  CHECK(e.label == "heuristic, truncated");
  CHECK(e.a_prime > 0);
  CHECK(e.truncation_error < 0.05 * e.a_prime);
  CHECK(e.value == doctest::Approx(e.a_prime * std::pow(1e8, 0.25) / std::pow(std::log(1e8), 2)));
  CHECK(to_string(family_vs_heuristic(bn, parse_rational("1.2")).result) == "dominates");
  CHECK(to_string(family_vs_heuristic(bn, parse_rational("1.3")).result) == "dominated");
  CHECK(to_string(family_vs_heuristic(bn, parse_rational("1.25")).result) == "boundary");
}
