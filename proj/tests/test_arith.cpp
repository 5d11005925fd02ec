#include <random>

#include "common.hpp"
#include "pfav/arith.hpp"

using namespace pfav;

namespace {

bool trial_prime(u64 n) {
  if (n < 2) return false;
  for (u64 d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

u64 naive_order(u64 a, u64 m) {
  u64 x = a % m, k = 1;
  while (x != 1) {
    x = x * a % m;
    ++k;
  }
  return k;
}

}  // namespace

TEST_CASE("is_prime agrees with trial division") {
  for (u64 n = 0; n < 20000; ++n) CHECK(is_prime(n) == trial_prime(n));
  CHECK(is_prime((1ull << 61) - 1));
  CHECK_FALSE(is_prime((1ull << 61) + 1));
  CHECK(is_prime(mpz_class("170141183460469231731687303715884105727")));
  CHECK_FALSE(is_prime(mpz_class("170141183460469231731687303715884105729")));
}

TEST_CASE("factor_integer returns prime factors whose product is n") {
  mpz_class n = mpz_class(1) << 64;
  n += 1;
  Factorization f = factor_integer(n);
  CHECK(f.complete());
  CHECK(f.factors.size() == 2);
  CHECK(f.factors.count(mpz_class(274177)) == 1);
  CHECK(f.factors.count(mpz_class("67280421310721")) == 1);
  std::mt19937_64 rng(7);
  for (int i = 0; i < 200; ++i) {
    mpz_class m = static_cast<unsigned long>(rng() % 1000000000000ull + 2);
    Factorization g = factor_integer(m);
    CHECK(g.complete());
    CHECK(g.product() == m);
    for (const auto& [p, e] : g.factors) CHECK(is_prime(p));
  }
}

TEST_CASE("cyclotomic polynomials") {
  CHECK(cyclotomic(1) == ZPoly{-1, 1});
  CHECK(cyclotomic(12) == ZPoly{1, 0, -1, 0, 1});
  CHECK(cyclotomic(5) == ZPoly{1, 1, 1, 1, 1});
  CHECK(cyclotomic_value(12, 103) == 112540273);
  CHECK(mpz_class(112540273) % 97 == 0);
  for (int k = 1; k <= 40; ++k) CHECK(cyclotomic(k).degree() == static_cast<int>(euler_phi(k)));
}

TEST_CASE("orders and residues of order k") {
  CHECK(multiplicative_order(5, 23) == 22);
  CHECK(*embedding_degree(97, 103) == 12);
  CHECK_FALSE(embedding_degree(7, 8).has_value());
  CHECK_THROWS_AS(embedding_degree(7, 14), std::invalid_argument);
  for (u64 r : {31ull, 61ull, 73ull, 97ull}) {
    for (u64 k : divisors(r - 1)) {
      for (u64 d : {1ull, 2ull, 3ull}) {
        std::vector<u64> want;
        for (u64 y = 1; y < r; ++y)
          if (naive_order(powmod(y, d, r), r) == k) want.push_back(y);
        auto got = residues_of_order(r, k, d);
        std::sort(got.begin(), got.end());
        CHECK(got == want);
      }
    }
  }
}

TEST_CASE("exact p bound") {
  CHECK(p_bound(1051, 3, 3) == 1051);
  CHECK(p_bound(100, 2, 1) == 10000);
  std::mt19937_64 rng(11);
  for (int i = 0; i < 300; ++i) {
    u64 r = rng() % 100000 + 3;
    int g = static_cast<int>(rng() % 3) + 1, d = static_cast<int>(rng() % 2) + 1;
    mpq_class rho(static_cast<long>(rng() % 25 + 5), 10);
    rho.canonicalize();
    u64 pb = p_bound(r, rho, g, d);
    auto ok = [&](u64 p) {
      mpz_class lhs, rhs;
      mpz_ui_pow_ui(lhs.get_mpz_t(), p, static_cast<unsigned long>(g) * d * rho.get_den().get_ui());
      mpz_ui_pow_ui(rhs.get_mpz_t(), r, rho.get_num().get_ui());
      return lhs <= rhs;
    };
    CHECK(ok(pb));
    CHECK_FALSE(ok(pb + 1));
    CHECK(rho_at_most(r, pb, g, d, rho));
  }
  CHECK(rho_value(23, 5, 2) == doctest::Approx(1.0267).epsilon(1e-4));
}

TEST_CASE("prime streams with residue filters") {
  ResidueFilter f{12, {1, 5}};
  auto got = primes_in_range(1000, 50000, f);
  std::vector<u64> want;
  for (u64 n = 1000; n <= 50000; ++n)
    if (trial_prime(n) && (n % 12 == 1 || n % 12 == 5)) want.push_back(n);
  CHECK(got == want);
  CHECK(primes_in_range(24, 28).empty());
  CHECK(primes_in_range(2, 2) == std::vector<u64>{2});
}

TEST_CASE("polynomial arithmetic and rationals") {
  QPoly a{mpq_class(-1), 0, 1}, b{mpq_class(-1), 1}, q, r;
  poly_divrem(a, b, q, r);
  CHECK(q == QPoly{1, 1});
  CHECK(r.is_zero());
  CHECK(poly_gcd(a, QPoly{1, 2, 1}) == QPoly{1, 1});
  CHECK(parse_rational("2.25") == mpq_class(9, 4));
  CHECK(parse_rational("9/4") == mpq_class(9, 4));
  CHECK(parse_rational("0.25") == mpq_class(1, 4));
  CHECK(parse_rational("0.08") == mpq_class(2, 25));
  CHECK(parse_rational("010") == 10);
  CHECK_THROWS(parse_rational("x"));
  CHECK(iroot_floor(mpz_class(1000), 3) == 10);
  CHECK(iroot_floor(mpz_class(999), 3) == 9);
}
