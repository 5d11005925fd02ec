#pragma once

#include <cmath>
#include <cstdint>
#include <set>
#include <tuple>
#include <vector>

// Brute-force triples for imaginary quadratic K = Q(sqrt(D)), D in {-3, -4}:
// every (tau, m) with tau^2 + |D| m^2 = 4p, m != 0, every prime r | p + 1 - tau
// in [rmin, rmax] with p of exact order k mod r and p^den <= r^num.
namespace oracle {

using u64 = std::uint64_t;
using i64 = std::int64_t;
using Triple = std::tuple<u64, u64, i64>;  // (r, p, tau)

inline std::vector<std::uint32_t> smallest_factor_sieve(u64 n) {
  std::vector<std::uint32_t> spf(n + 1, 0);
  for (u64 i = 2; i <= n; ++i)
    if (spf[i] == 0)
      for (u64 j = i; j <= n; j += i)
        if (spf[j] == 0) spf[j] = static_cast<std::uint32_t>(i);
  return spf;
}

inline u64 order_mod(u64 a, u64 m) {
  a %= m;
  if (a == 0) return 0;
  u64 x = a, k = 1;
  while (x != 1) {
    x = x * a % m;
    ++k;
  }
  return k;
}

inline bool power_le(u64 p, u64 r, unsigned num, unsigned den) {
  long double lhs = den * std::log(static_cast<long double>(p)), rhs = num * std::log(static_cast<long double>(r));
  if (std::fabs(lhs - rhs) > 1e-9L) return lhs < rhs;
  unsigned __int128 a = 1, b = 1;
  for (unsigned i = 0; i < den; ++i) a *= p;
  for (unsigned i = 0; i < num; ++i) b *= r;
  return a <= b;
}

inline std::set<Triple> imaginary_quadratic_triples(int D, u64 k, u64 rmin, u64 rmax, unsigned num, unsigned den) {
  u64 pmax = 1;
  while (power_le(pmax + 1, rmax, num, den)) ++pmax;
  u64 nmax = pmax + 2 + 2 * static_cast<u64>(std::sqrt(static_cast<double>(pmax))) + 2;
  auto spf = smallest_factor_sieve(nmax);
  std::set<Triple> out;
  u64 absd = static_cast<u64>(-D);
  for (u64 m = 1; absd * m * m <= 4 * pmax; ++m) {
    for (i64 tau = -static_cast<i64>(2 * std::sqrt(static_cast<double>(pmax))) - 1;; ++tau) {
      u64 four_p = static_cast<u64>(tau * tau) + absd * m * m;
      if (tau > 0 && four_p > 4 * pmax) break;
      if (four_p > 4 * pmax || four_p % 4) continue;
      u64 p = four_p / 4;
      if (p < 2 || spf[p] != p) continue;
      u64 n = static_cast<u64>(static_cast<i64>(p) + 1 - tau);
      while (n > 1) {
        u64 r = spf[n];
        while (n % r == 0) n /= r;
        if (r < rmin || r > rmax || p % r == 0) continue;
        if (order_mod(p, r) != k) continue;
        if (!power_le(p, r, num, den)) continue;
        out.emplace(r, p, tau);
      }
    }
  }
  return out;
}

}  // namespace oracle
