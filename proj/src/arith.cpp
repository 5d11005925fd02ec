#include "pfav/arith.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace pfav {

template <class T>
std::string Poly<T>::to_string(const std::string& var) const {
  if (is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (int i = degree(); i >= 0; --i) {
    if (c[i] == 0) continue;
    T v = c[i];
    bool neg = v < 0;
    if (neg) v = -v;
    if (!first) os << (neg ? " - " : " + ");
    else if (neg) os << "-";
    first = false;
    if (i == 0 || v != 1) os << v;
    if (i >= 1) os << var;
    if (i >= 2) os << "^" << i;
  }
  return os.str();
}
template class Poly<mpz_class>;
template class Poly<mpq_class>;

void poly_divrem(const ZPoly& a, const ZPoly& b, ZPoly& q, ZPoly& r) {
  if (b.is_zero()) throw std::domain_error("polynomial division by zero");
  std::vector<mpz_class> rem = a.c;
  int db = b.degree();
  std::vector<mpz_class> quo(std::max(0, a.degree() - db + 1));
  for (int i = a.degree(); i >= db; --i) {
    if (rem[i] == 0) continue;
    if (!mpz_divisible_p(rem[i].get_mpz_t(), b.lead().get_mpz_t()))
      throw std::domain_error("inexact integer polynomial division");
    mpz_class t = rem[i] / b.lead();
    quo[i - db] = t;
    for (int j = 0; j <= db; ++j) rem[i - db + j] -= t * b.c[j];
  }
  q = ZPoly(std::move(quo));
  rem.resize(std::max(0, db));
  r = ZPoly(std::move(rem));
}

void poly_divrem(const QPoly& a, const QPoly& b, QPoly& q, QPoly& r) {
  if (b.is_zero()) throw std::domain_error("polynomial division by zero");
  std::vector<mpq_class> rem = a.c;
  int db = b.degree();
  std::vector<mpq_class> quo(std::max(0, a.degree() - db + 1));
  for (int i = a.degree(); i >= db; --i) {
    if (rem[i] == 0) continue;
    mpq_class t = rem[i] / b.lead();
    quo[i - db] = t;
    for (int j = 0; j <= db; ++j) rem[i - db + j] -= t * b.c[j];
  }
  q = QPoly(std::move(quo));
  rem.resize(std::max(0, db));
  r = QPoly(std::move(rem));
}

QPoly poly_gcd(QPoly a, QPoly b) {
  while (!b.is_zero()) {
    QPoly q, r;
    poly_divrem(a, b, q, r);
    a = std::move(b);
    b = std::move(r);
  }
  if (a.is_zero()) return a;
  mpq_class l = a.lead();
  for (auto& v : a.c) v /= l;
  return a;
}

QPoly to_qpoly(const ZPoly& p) {
  std::vector<mpq_class> c(p.c.begin(), p.c.end());
  return QPoly(std::move(c));
}

std::optional<ZPoly> to_zpoly(const QPoly& p) {
  std::vector<mpz_class> c;
  for (const auto& v : p.c) {
    if (v.get_den() != 1) return std::nullopt;
    c.push_back(v.get_num());
  }
  return ZPoly(std::move(c));
}

mpz_class Factorization::product() const {
  mpz_class acc = cofactor;
  for (const auto& [q, e] : factors) {
    mpz_class t;
    mpz_pow_ui(t.get_mpz_t(), q.get_mpz_t(), e);
    acc *= t;
  }
  return acc;
}

u64 mulmod(u64 a, u64 b, u64 m) { return static_cast<u64>(static_cast<u128>(a) * b % m); }

u64 powmod(u64 a, u64 e, u64 m) {
  u64 r = 1 % m;
  a %= m;
  while (e) {
    if (e & 1) r = mulmod(r, a, m);
    a = mulmod(a, a, m);
    e >>= 1;
  }
  return r;
}

u64 invmod(u64 a, u64 m) {
  i128 t = 0, nt = 1, r = m, nr = a % m;
  while (nr != 0) {
    i128 q = r / nr;
    std::tie(t, nt) = std::make_pair(nt, t - q * nt);
    std::tie(r, nr) = std::make_pair(nr, r - q * nr);
  }
  if (r != 1) throw std::domain_error("residue not invertible");
  if (t < 0) t += m;
  return static_cast<u64>(t);
}

namespace {

bool strong_probable_prime(u64 n, u64 a, u64 d, int s) {
  u64 x = powmod(a, d, n);
  if (x == 1 || x == n - 1) return true;
  for (int i = 1; i < s; ++i) {
    x = mulmod(x, x, n);
    if (x == n - 1) return true;
  }
  return false;
}

constexpr u64 kSmallPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};

}  // namespace

bool is_prime(u64 n) {
  if (n < 2) return false;
  for (u64 p : kSmallPrimes) {
    if (n % p == 0) return n == p;
  }
  if (n < 37 * 37) return true;
  u64 d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  // This witness set is deterministic below 3.3e24.
  for (u64 a : kSmallPrimes)
    if (!strong_probable_prime(n, a, d, s)) return false;
  return true;
}

bool is_prime(const mpz_class& n) {
  if (n < 2) return false;
  if (mpz_fits_ulong_p(n.get_mpz_t())) return is_prime(static_cast<u64>(n.get_ui()));
  // Baillie-PSW plus further Miller-Rabin rounds (GMP >= 6.2).
  return mpz_probab_prime_p(n.get_mpz_t(), 40) != 0;
}

namespace {

u64 gcd_u64(u64 a, u64 b) { return std::gcd(a, b); }

// Brent's variant of Pollard rho; returns a nontrivial factor or 0.
u64 rho_u64(u64 n, u64 max_iter) {
  if (n % 2 == 0) return 2;
  for (u64 c = 1; c < 64; ++c) {
    u64 y = 2, x = 2, q = 1, g = 1, ys = 2;
    u64 m = 128, r = 1, iters = 0;
    auto f = [&](u64 v) { return (mulmod(v, v, n) + c) % n; };
    do {
      x = y;
      for (u64 i = 0; i < r; ++i) y = f(y);
      u64 k = 0;
      do {
        ys = y;
        for (u64 i = 0; i < std::min(m, r - k); ++i) {
          y = f(y);
          q = mulmod(q, x > y ? x - y : y - x, n);
        }
        g = gcd_u64(q, n);
        k += m;
        iters += m;
      } while (k < r && g == 1);
      r <<= 1;
    } while (g == 1 && iters < max_iter);
    if (g == n) {
      do {
        ys = f(ys);
        g = gcd_u64(x > ys ? x - ys : ys - x, n);
      } while (g == 1);
    }
    if (g != n && g != 1) return g;
    if (iters >= max_iter) return 0;
  }
  return 0;
}

mpz_class rho_mpz(const mpz_class& n, u64 max_iter) {
  for (unsigned long c = 1; c < 32; ++c) {
    mpz_class x = 2, y = 2, ys = 2, q = 1, g = 1, t;
    u64 m = 128, r = 1, iters = 0;
    auto f = [&](mpz_class& v) {
      v = v * v + c;
      mpz_mod(v.get_mpz_t(), v.get_mpz_t(), n.get_mpz_t());
    };
    do {
      x = y;
      for (u64 i = 0; i < r; ++i) f(y);
      u64 k = 0;
      do {
        ys = y;
        for (u64 i = 0; i < std::min(m, r - k); ++i) {
          f(y);
          t = abs(x - y);
          q = q * t;
          mpz_mod(q.get_mpz_t(), q.get_mpz_t(), n.get_mpz_t());
        }
        mpz_gcd(g.get_mpz_t(), q.get_mpz_t(), n.get_mpz_t());
        k += m;
        iters += m;
      } while (k < r && g == 1);
      r <<= 1;
    } while (g == 1 && iters < max_iter);
    if (g == n) {
      do {
        f(ys);
        t = abs(x - ys);
        mpz_gcd(g.get_mpz_t(), t.get_mpz_t(), n.get_mpz_t());
      } while (g == 1);
    }
    if (g != n && g != 1) return g;
    if (iters >= max_iter) return 0;
  }
  return 0;
}

void split(const mpz_class& n, const FactorBudget& budget, Factorization& out) {
  if (n == 1) return;
  if (is_prime(n)) {
    out.factors[n] += 1;
    return;
  }
  mpz_class d;
  if (mpz_fits_ulong_p(n.get_mpz_t())) {
    d = static_cast<unsigned long>(rho_u64(n.get_ui(), budget.rho_iterations));
  } else {
    d = rho_mpz(n, budget.rho_iterations);
  }
  if (d == 0) {
    out.cofactor *= n;
    return;
  }
  split(d, budget, out);
  split(n / d, budget, out);
}

}  // namespace

Factorization factor_integer(const mpz_class& n_in, const FactorBudget& budget) {
  if (n_in < 1) throw std::invalid_argument("factor_integer needs n >= 1");
  Factorization out;
  mpz_class n = n_in;
  auto strip = [&](u64 p) {
    if (mpz_divisible_ui_p(n.get_mpz_t(), p)) {
      int e = 0;
      while (mpz_divisible_ui_p(n.get_mpz_t(), p)) {
        mpz_divexact_ui(n.get_mpz_t(), n.get_mpz_t(), p);
        ++e;
      }
      out.factors[mpz_class(static_cast<unsigned long>(p))] = e;
    }
  };
  strip(2);
  strip(3);
  for (u64 p = 5; p <= budget.trial_bound; p += 6) {
    if (mpz_cmp_ui(n.get_mpz_t(), p * p) < 0) break;
    strip(p);
    strip(p + 2);
  }
  if (n == 1) return out;
  split(n, budget, out);
  return out;
}

std::vector<u64> prime_factors(u64 n) {
  std::vector<u64> ps;
  auto f = factor_integer(mpz_class(static_cast<unsigned long>(n)));
  for (const auto& [q, e] : f.factors) ps.push_back(q.get_ui());
  if (!f.complete()) throw std::runtime_error("incomplete factorization of a 64-bit integer");
  return ps;
}

ZPoly cyclotomic(int k) {
  if (k < 1) throw std::invalid_argument("cyclotomic needs k >= 1");
  std::map<int, ZPoly> memo;
  auto rec = [&](auto&& self, int m) -> ZPoly {
    if (auto it = memo.find(m); it != memo.end()) return it->second;
    ZPoly num = ZPoly::monomial(m) - ZPoly::constant(1);
    for (int d = 1; d < m; ++d) {
      if (m % d) continue;
      ZPoly q, r;
      poly_divrem(num, self(self, d), q, r);
      num = q;
    }
    memo[m] = num;
    return num;
  };
  return rec(rec, k);
}

mpz_class cyclotomic_value(int k, const mpz_class& x) { return cyclotomic(k).eval(x); }

u64 multiplicative_order(u64 a, u64 m_prime) {
  a %= m_prime;
  if (a == 0) throw std::invalid_argument("zero has no multiplicative order");
  u64 ord = m_prime - 1;
  for (u64 q : prime_factors(m_prime - 1)) {
    while (ord % q == 0 && powmod(a, ord / q, m_prime) == 1) ord /= q;
  }
  return ord;
}

u64 primitive_root(u64 p) {
  if (p == 2) return 1;
  auto qs = prime_factors(p - 1);
  for (u64 g = 2; g < p; ++g) {
    bool ok = true;
    for (u64 q : qs) {
      if (powmod(g, (p - 1) / q, p) == 1) {
        ok = false;
        break;
      }
    }
    if (ok) return g;
  }
  throw std::runtime_error("no primitive root found");
}

std::vector<u64> divisors(u64 n) {
  std::vector<u64> ds{1};
  auto f = factor_integer(mpz_class(static_cast<unsigned long>(n)));
  for (const auto& [q, e] : f.factors) {
    size_t cur = ds.size();
    u64 pw = 1;
    for (int i = 1; i <= e; ++i) {
      pw *= q.get_ui();
      for (size_t j = 0; j < cur; ++j) ds.push_back(ds[j] * pw);
    }
  }
  std::sort(ds.begin(), ds.end());
  return ds;
}

u64 euler_phi(u64 n) {
  u64 r = n;
  for (u64 q : prime_factors(n)) r = r / q * (q - 1);
  return r;
}

std::vector<u64> residues_of_order(u64 r, u64 k, u64 d) {
  std::vector<u64> out;
  if (r == 2) {
    if (k == 1) out.push_back(1);
    return out;
  }
  u64 h = primitive_root(r);
  for (u64 m : divisors(r - 1)) {
    if (m / std::gcd(m, d) != k) continue;
    // Elements of order m are h^{(r-1)/m * j} with gcd(j, m) = 1.
    u64 base = powmod(h, (r - 1) / m, r);
    u64 cur = 1;
    for (u64 j = 1; j <= m; ++j) {
      cur = mulmod(cur, base, r);
      if (std::gcd(j, m) == 1) out.push_back(cur);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::optional<u64> embedding_degree(u64 r, const mpz_class& p) {
  u64 pm = mpz_fdiv_ui(p.get_mpz_t(), r);
  if (pm == 0) throw std::invalid_argument("r divides p");
  u64 k = multiplicative_order(pm, r);
  if (k == 1) return std::nullopt;
  return k;
}

mpz_class iroot_floor(const mpz_class& n, unsigned long k) {
  mpz_class r;
  mpz_root(r.get_mpz_t(), n.get_mpz_t(), k);
  return r;
}

mpq_class parse_rational(const std::string& s) {
  auto slash = s.find('/');
  if (slash != std::string::npos) {
    mpq_class q(mpz_class(s.substr(0, slash), 10), mpz_class(s.substr(slash + 1), 10));
    q.canonicalize();
    return q;
  }
  auto dot = s.find('.');
  if (dot == std::string::npos) return mpq_class(mpz_class(s, 10));
  std::string digits = s.substr(0, dot) + s.substr(dot + 1);
  mpz_class den;
  mpz_ui_pow_ui(den.get_mpz_t(), 10, s.size() - dot - 1);
  mpq_class q(mpz_class(digits.empty() ? "0" : digits, 10), den);
  q.canonicalize();
  return q;
}

bool rho_at_most(u64 r, u64 p, int g, int d, const mpq_class& rho0) {
  // p^(g d den) <= r^num
  mpz_class lhs, rhs;
  mpz_pow_ui(lhs.get_mpz_t(), mpz_class(static_cast<unsigned long>(p)).get_mpz_t(),
             static_cast<unsigned long>(g) * d * rho0.get_den().get_ui());
  mpz_pow_ui(rhs.get_mpz_t(), mpz_class(static_cast<unsigned long>(r)).get_mpz_t(),
             rho0.get_num().get_ui());
  return lhs <= rhs;
}

u64 p_bound(u64 r, const mpq_class& rho0, int g, int d) {
  mpz_class rhs;
  mpz_pow_ui(rhs.get_mpz_t(), mpz_class(static_cast<unsigned long>(r)).get_mpz_t(),
             rho0.get_num().get_ui());
  mpz_class b = iroot_floor(rhs, static_cast<unsigned long>(g) * d * rho0.get_den().get_ui());
  if (!mpz_fits_ulong_p(b.get_mpz_t())) throw std::overflow_error("p bound exceeds 64 bits");
  return b.get_ui();
}

double rho_value(u64 r, u64 p, int g, int d) {
  return g * d * std::log(static_cast<double>(p)) / std::log(static_cast<double>(r));
}

bool ResidueFilter::admits(u64 n) const {
  return std::binary_search(allowed.begin(), allowed.end(), n % modulus);
}

namespace {
constexpr u64 kSegment = 1 << 18;
}

PrimeStream::PrimeStream(u64 a, u64 b, std::optional<ResidueFilter> filter)
    : lo_(std::max<u64>(a, 2)), hi_(b), seg_start_(std::max<u64>(a, 2)), filter_(std::move(filter)) {
  u64 root = static_cast<u64>(std::sqrt(static_cast<long double>(b))) + 1;
  std::vector<bool> small(root + 1, true);
  for (u64 i = 2; i <= root; ++i) {
    if (!small[i]) continue;
    base_.push_back(i);
    for (u64 j = i * i; j <= root; j += i) small[j] = false;
  }
  if (lo_ > hi_) done_ = true;
}

void PrimeStream::fill() {
  buf_.clear();
  pos_ = 0;
  while (buf_.empty() && seg_start_ <= hi_) {
    u64 seg_end = std::min(hi_, seg_start_ + kSegment - 1);
    std::vector<char> mark(seg_end - seg_start_ + 1, 1);
    for (u64 p : base_) {
      if (p * p > seg_end) break;
      u64 start = std::max(p * p, (seg_start_ + p - 1) / p * p);
      for (u64 j = start; j <= seg_end; j += p) mark[j - seg_start_] = 0;
    }
    for (u64 i = 0; i < mark.size(); ++i) {
      u64 v = seg_start_ + i;
      if (mark[i] && v >= 2 && (!filter_ || filter_->admits(v))) buf_.push_back(v);
    }
    if (seg_end == hi_) {
      seg_start_ = hi_ + 1;
      break;
    }
    seg_start_ = seg_end + 1;
  }
  if (buf_.empty()) done_ = true;
}

std::optional<u64> PrimeStream::next() {
  if (done_) return std::nullopt;
  if (pos_ >= buf_.size()) {
    fill();
    if (done_) return std::nullopt;
  }
  return buf_[pos_++];
}

std::vector<u64> primes_in_range(u64 a, u64 b, std::optional<ResidueFilter> filter) {
  std::vector<u64> out;
  PrimeStream s(a, b, std::move(filter));
  while (auto p = s.next()) out.push_back(*p);
  return out;
}

}  // namespace pfav
