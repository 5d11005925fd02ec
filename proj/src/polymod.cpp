#include "pfav/polymod.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>

namespace pfav::modp {

void trim(Pol& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

int deg(const Pol& a) { return static_cast<int>(a.size()) - 1; }

Pol reduce(const ZPoly& f, u64 p) {
  Pol r;
  for (const auto& c : f.c) r.push_back(mpz_fdiv_ui(c.get_mpz_t(), p));
  trim(r);
  return r;
}

Pol add(const Pol& a, const Pol& b, u64 p) {
  Pol r(std::max(a.size(), b.size()), 0);
  for (size_t i = 0; i < r.size(); ++i) {
    u64 x = i < a.size() ? a[i] : 0, y = i < b.size() ? b[i] : 0;
    r[i] = x + y >= p ? x + y - p : x + y;
  }
  trim(r);
  return r;
}

Pol sub(const Pol& a, const Pol& b, u64 p) {
  Pol r(std::max(a.size(), b.size()), 0);
  for (size_t i = 0; i < r.size(); ++i) {
    u64 x = i < a.size() ? a[i] : 0, y = i < b.size() ? b[i] : 0;
    r[i] = x >= y ? x - y : x + p - y;
  }
  trim(r);
  return r;
}

Pol mul(const Pol& a, const Pol& b, u64 p) {
  if (a.empty() || b.empty()) return {};
  std::vector<u128> acc(a.size() + b.size() - 1, 0);
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j) acc[i + j] = (acc[i + j] + static_cast<u128>(a[i]) * b[j]) % p;
  Pol r(acc.size());
  for (size_t i = 0; i < acc.size(); ++i) r[i] = static_cast<u64>(acc[i]);
  trim(r);
  return r;
}

Pol scale(const Pol& a, u64 s, u64 p) {
  Pol r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = pfav::mulmod(a[i], s, p);
  trim(r);
  return r;
}

void divrem(const Pol& a, const Pol& b, u64 p, Pol* q, Pol* r) {
  if (b.empty()) throw std::domain_error("division by zero polynomial mod p");
  Pol rr = a;
  int db = deg(b);
  u64 inv = invmod(b.back(), p);
  Pol qq(std::max(0, deg(a) - db + 1), 0);
  for (int i = deg(a); i >= db; --i) {
    if (rr[i] == 0) continue;
    u64 t = pfav::mulmod(rr[i], inv, p);
    qq[i - db] = t;
    for (int j = 0; j <= db; ++j) {
      u64 s = pfav::mulmod(t, b[j], p);
      rr[i - db + j] = rr[i - db + j] >= s ? rr[i - db + j] - s : rr[i - db + j] + p - s;
    }
  }
  trim(rr);
  trim(qq);
  if (q) *q = std::move(qq);
  if (r) *r = std::move(rr);
}

Pol rem(const Pol& a, const Pol& b, u64 p) {
  Pol r;
  divrem(a, b, p, nullptr, &r);
  return r;
}

Pol monic(const Pol& a, u64 p) {
  if (a.empty()) return a;
  return scale(a, invmod(a.back(), p), p);
}

Pol gcd(Pol a, Pol b, u64 p) {
  while (!b.empty()) {
    Pol r = rem(a, b, p);
    a = std::move(b);
    b = std::move(r);
  }
  return monic(a, p);
}

Pol mulmod(const Pol& a, const Pol& b, const Pol& f, u64 p) { return rem(mul(a, b, p), f, p); }

Pol powmod(Pol a, u64 e, const Pol& f, u64 p) {
  Pol r{1};
  r = rem(r, f, p);
  a = rem(a, f, p);
  while (e) {
    if (e & 1) r = mulmod(r, a, f, p);
    e >>= 1;
    if (e) a = mulmod(a, a, f, p);
  }
  return r;
}

Pol compose_mod(const Pol& g, const Pol& h, const Pol& f, u64 p) {
  Pol acc;
  for (int i = deg(g); i >= 0; --i) acc = add(mulmod(acc, h, f, p), Pol{g[i]}, p);
  trim(acc);
  return rem(acc, f, p);
}

u64 eval(const Pol& a, u64 x, u64 p) {
  u64 acc = 0;
  for (int i = deg(a); i >= 0; --i) {
    acc = pfav::mulmod(acc, x, p) + a[i];
    if (acc >= p) acc -= p;
  }
  return acc;
}

namespace {

Pol derivative(const Pol& a, u64 p) {
  Pol d;
  for (int i = 1; i <= deg(a); ++i) d.push_back(pfav::mulmod(a[i], i % p, p));
  trim(d);
  return d;
}

bool pol_less(const Pol& a, const Pol& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return std::lexicographical_compare(a.rbegin(), a.rend(), b.rbegin(), b.rend());
}

// Trial division by monic polynomials of increasing degree; for tiny fields only.
std::vector<std::pair<Pol, int>> factor_small(Pol f, u64 p) {
  std::vector<std::pair<Pol, int>> out;
  f = monic(f, p);
  for (int d = 1; 2 * d <= deg(f); ++d) {
    Pol h(d + 1, 0);
    h[d] = 1;
    u64 count = 1;
    for (int i = 0; i < d; ++i) count *= p;
    for (u64 idx = 0; idx < count; ++idx) {
      u64 v = idx;
      for (int i = 0; i < d; ++i) {
        h[i] = v % p;
        v /= p;
      }
      int e = 0;
      while (deg(f) >= d) {
        Pol q, r;
        divrem(f, h, p, &q, &r);
        if (!r.empty()) break;
        f = q;
        ++e;
      }
      if (e) out.emplace_back(h, e);
      if (2 * d > deg(f)) break;
    }
  }
  if (deg(f) >= 1) {
    bool merged = false;
    for (auto& [g, e] : out)
      if (g == f) {
        ++e;
        merged = true;
      }
    if (!merged) out.emplace_back(f, 1);
  }
  return out;
}

// Cantor-Zassenhaus equal-degree splitting of a squarefree product of
// degree-d irreducibles, p odd.
void edf(const Pol& f, int d, u64 p, std::mt19937_64& rng, std::vector<Pol>& out) {
  if (deg(f) == d) {
    out.push_back(f);
    return;
  }
  mpz_class e;
  mpz_ui_pow_ui(e.get_mpz_t(), p, d);
  e = (e - 1) / 2;
  while (true) {
    Pol a(deg(f));
    for (auto& v : a) v = rng() % p;
    trim(a);
    if (a.empty()) continue;
    // a^e mod f via the binary expansion of the big exponent
    Pol r{1}, base = rem(a, f, p);
    size_t bits = mpz_sizeinbase(e.get_mpz_t(), 2);
    for (size_t i = bits; i-- > 0;) {
      r = mulmod(r, r, f, p);
      if (mpz_tstbit(e.get_mpz_t(), i)) r = mulmod(r, base, f, p);
    }
    Pol g = gcd(f, sub(r, Pol{1}, p), p);
    if (deg(g) > 0 && deg(g) < deg(f)) {
      Pol q;
      divrem(f, g, p, &q, nullptr);
      edf(g, d, p, rng, out);
      edf(monic(q, p), d, p, rng, out);
      return;
    }
  }
}

// Yun's squarefree decomposition, valid for p > deg f.
std::vector<std::pair<Pol, int>> squarefree(const Pol& f, u64 p) {
  std::vector<std::pair<Pol, int>> out;
  Pol fp = derivative(f, p);
  Pol a = gcd(f, fp, p);
  Pol b, c, dd;
  divrem(f, a, p, &b, nullptr);
  divrem(fp, a, p, &c, nullptr);
  dd = sub(c, derivative(b, p), p);
  for (int i = 1; deg(b) > 0; ++i) {
    Pol g = gcd(b, dd, p);
    Pol nb, nc;
    divrem(b, g, p, &nb, nullptr);
    divrem(dd, g, p, &nc, nullptr);
    if (deg(g) > 0) out.emplace_back(monic(g, p), i);
    b = nb;
    dd = sub(nc, derivative(b, p), p);
  }
  return out;
}

}  // namespace

std::vector<std::pair<Pol, int>> factor(const Pol& f_in, u64 p) {
  Pol f = monic(f_in, p);
  if (deg(f) < 1) return {};
  std::vector<std::pair<Pol, int>> out;
  u64 tiny = 1;
  for (int i = 0; i < deg(f) / 2 && tiny <= 512; ++i) tiny *= p;
  if (p == 2 || p <= static_cast<u64>(deg(f)) || tiny <= 512) {
    out = factor_small(f, p);
  } else {
    std::mt19937_64 rng(0x5eed + p);
    for (auto& [s, mult] : squarefree(f, p)) {
      // distinct-degree factorization
      Pol rest = s, h{0, 1};
      for (int d = 1; 2 * d <= deg(rest); ++d) {
        h = powmod(h, p, rest, p);
        Pol g = gcd(rest, sub(h, Pol{0, 1}, p), p);
        if (deg(g) > 0) {
          std::vector<Pol> parts;
          edf(g, d, p, rng, parts);
          for (auto& q : parts) out.emplace_back(q, mult);
          Pol q;
          divrem(rest, g, p, &q, nullptr);
          rest = monic(q, p);
          h = rem(h, rest, p);
        }
      }
      if (deg(rest) > 0) out.emplace_back(rest, mult);
    }
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return pol_less(a.first, b.first); });
  return out;
}

std::vector<u64> roots(const Pol& f_in, u64 p) {
  std::vector<u64> out;
  Pol f = f_in;
  trim(f);
  if (deg(f) < 1) return out;
  if (p < 2048) {
    for (u64 x = 0; x < p; ++x)
      if (eval(f, x, p) == 0) out.push_back(x);
    return out;
  }
  f = monic(f, p);
  Pol xp = powmod(Pol{0, 1}, p, f, p);
  Pol g = gcd(f, sub(xp, Pol{0, 1}, p), p);
  if (deg(g) < 1) return out;
  std::vector<Pol> lin;
  std::mt19937_64 rng(0x600d + p);
  edf(g, 1, p, rng, lin);
  for (const auto& l : lin) out.push_back(l[0] == 0 ? 0 : p - l[0]);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace pfav::modp
