// Integer primitives: polynomials over Z and Q, primality, factoring,
// multiplicative orders, cyclotomic polynomials and prime streams.
#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace pfav {

using u64 = std::uint64_t;
using i64 = std::int64_t;
using u128 = unsigned __int128;
using i128 = __int128;

// Dense polynomial, coefficients lowest degree first. The zero polynomial
// has no coefficients and degree -1.
template <class T>
class Poly {
 public:
  std::vector<T> c;

  Poly() = default;
  explicit Poly(std::vector<T> coeffs) : c(std::move(coeffs)) { trim(); }
  Poly(std::initializer_list<T> coeffs) : c(coeffs) { trim(); }
  static Poly constant(const T& v) { return Poly(std::vector<T>{v}); }
  static Poly monomial(int deg, const T& v = T(1)) {
    std::vector<T> cs(deg + 1, T(0));
    cs[deg] = v;
    return Poly(std::move(cs));
  }

  int degree() const { return static_cast<int>(c.size()) - 1; }
  bool is_zero() const { return c.empty(); }
  const T& lead() const { return c.back(); }
  T operator[](int i) const { return i < static_cast<int>(c.size()) && i >= 0 ? c[i] : T(0); }

  void trim() {
    while (!c.empty() && c.back() == 0) c.pop_back();
  }

  template <class U>
  U eval(const U& x) const {
    U acc(0);
    for (int i = degree(); i >= 0; --i) acc = acc * x + U(c[i]);
    return acc;
  }

  Poly derivative() const {
    std::vector<T> d;
    for (int i = 1; i <= degree(); ++i) d.push_back(c[i] * i);
    return Poly(std::move(d));
  }

  // p(q(x))
  Poly compose(const Poly& q) const {
    Poly acc;
    for (int i = degree(); i >= 0; --i) acc = acc * q + constant(c[i]);
    return acc;
  }

  friend Poly operator+(const Poly& a, const Poly& b) {
    std::vector<T> r(std::max(a.c.size(), b.c.size()), T(0));
    for (size_t i = 0; i < a.c.size(); ++i) r[i] += a.c[i];
    for (size_t i = 0; i < b.c.size(); ++i) r[i] += b.c[i];
    return Poly(std::move(r));
  }
  friend Poly operator-(const Poly& a, const Poly& b) {
    std::vector<T> r(std::max(a.c.size(), b.c.size()), T(0));
    for (size_t i = 0; i < a.c.size(); ++i) r[i] += a.c[i];
    for (size_t i = 0; i < b.c.size(); ++i) r[i] -= b.c[i];
    return Poly(std::move(r));
  }
  friend Poly operator-(const Poly& a) { return Poly() - a; }
  friend Poly operator*(const Poly& a, const Poly& b) {
    if (a.is_zero() || b.is_zero()) return Poly();
    std::vector<T> r(a.c.size() + b.c.size() - 1, T(0));
    for (size_t i = 0; i < a.c.size(); ++i)
      for (size_t j = 0; j < b.c.size(); ++j) r[i + j] += a.c[i] * b.c[j];
    return Poly(std::move(r));
  }
  friend Poly operator*(const T& s, const Poly& a) {
    std::vector<T> r(a.c);
    for (auto& v : r) v *= s;
    return Poly(std::move(r));
  }
  Poly& operator+=(const Poly& o) { return *this = *this + o; }
  Poly& operator-=(const Poly& o) { return *this = *this - o; }
  Poly& operator*=(const Poly& o) { return *this = *this * o; }
  friend bool operator==(const Poly& a, const Poly& b) { return a.c == b.c; }
  friend bool operator<(const Poly& a, const Poly& b) {
    if (a.c.size() != b.c.size()) return a.c.size() < b.c.size();
    for (int i = a.degree(); i >= 0; --i)
      if (a.c[i] != b.c[i]) return a.c[i] < b.c[i];
    return false;
  }

  std::string to_string(const std::string& var = "x") const;
};

using ZPoly = Poly<mpz_class>;
using QPoly = Poly<mpq_class>;

// Division with remainder. Over Z the leading coefficient of b must divide
// every leading term encountered; std::domain_error otherwise.
void poly_divrem(const ZPoly& a, const ZPoly& b, ZPoly& q, ZPoly& r);
void poly_divrem(const QPoly& a, const QPoly& b, QPoly& q, QPoly& r);
QPoly poly_gcd(QPoly a, QPoly b);  // monic
QPoly to_qpoly(const ZPoly& p);
// Clears denominators of a rational polynomial with integer values.
std::optional<ZPoly> to_zpoly(const QPoly& p);

struct Factorization {
  std::map<mpz_class, int> factors;
  mpz_class cofactor = 1;  // unfactored composite part, 1 when complete
  bool complete() const { return cofactor == 1; }
  mpz_class product() const;
};

struct FactorBudget {
  u64 trial_bound = 100000;
  u64 rho_iterations = 2000000;
};

bool is_prime(u64 n);
bool is_prime(const mpz_class& n);
Factorization factor_integer(const mpz_class& n, const FactorBudget& budget = {});
std::vector<u64> prime_factors(u64 n);

ZPoly cyclotomic(int k);
mpz_class cyclotomic_value(int k, const mpz_class& x);

u64 mulmod(u64 a, u64 b, u64 m);
u64 powmod(u64 a, u64 e, u64 m);
u64 invmod(u64 a, u64 m);  // throws std::domain_error if not invertible
u64 multiplicative_order(u64 a, u64 m_prime);
u64 primitive_root(u64 p);
// Residues y mod r (r prime) such that y^d has multiplicative order k.
std::vector<u64> residues_of_order(u64 r, u64 k, u64 d = 1);
u64 euler_phi(u64 n);
std::vector<u64> divisors(u64 n);

// Multiplicative order of p modulo r, or nullopt when it equals 1.
// Throws std::invalid_argument when r divides p.
std::optional<u64> embedding_degree(u64 r, const mpz_class& p);

mpz_class iroot_floor(const mpz_class& n, unsigned long k);

// Exact nonnegative rational parsed from "2.25", "9/4" or "3".
mpq_class parse_rational(const std::string& s);

// Exact rho bound: largest p with (p^d)^g <= r^rho0, i.e. g*d*log p <= rho0*log r.
u64 p_bound(u64 r, const mpq_class& rho0, int g, int d = 1);
// Exact comparison g*d*log(p) <= rho0*log(r).
bool rho_at_most(u64 r, u64 p, int g, int d, const mpq_class& rho0);
double rho_value(u64 r, u64 p, int g, int d = 1);

struct ResidueFilter {
  u64 modulus = 1;
  std::vector<u64> allowed;  // sorted residues
  bool admits(u64 n) const;
};

// Ascending primes in [a, b] from a segmented sieve.
class PrimeStream {
 public:
  PrimeStream(u64 a, u64 b, std::optional<ResidueFilter> filter = std::nullopt);
  std::optional<u64> next();

 private:
  void fill();
  u64 lo_, hi_, seg_start_;
  std::optional<ResidueFilter> filter_;
  std::vector<u64> base_;
  std::vector<u64> buf_;
  size_t pos_ = 0;
  bool done_ = false;
};

std::vector<u64> primes_in_range(u64 a, u64 b, std::optional<ResidueFilter> filter = std::nullopt);

}  // namespace pfav
