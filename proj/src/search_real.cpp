#include "pfav/search_real.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <thread>

namespace pfav {

namespace {

struct Ineq {
  std::vector<long double> a;
  long double c;  // sum a_l x_l <= c * T
};

// Enumerates integral points of { x : |sum_j E_ij x_j| <= T for all i } in
// the coordinates of a totally real field whose first basis element is 1.
// Outer coordinates are bounded by Fourier-Motzkin projections of the strip
// constraints; the innermost coordinate is an explicit interval.
class BoxEnumerator {
 public:
  explicit BoxEnumerator(const FieldDescriptor& K0) : K_(K0), g_(K0.n) {
    if (!K0.totally_real()) throw std::invalid_argument("field " + K0.name + " is not totally real");
    for (int j = 0; j < g_; ++j)
      if (K0.basis[0][j] != (j == 0 ? 1 : 0)) throw std::invalid_argument("field " + K0.name + ": first basis element must be 1");
    e_.assign(g_, std::vector<long double>(g_));
    for (int i = 0; i < g_; ++i)
      for (int j = 0; j < g_; ++j) e_[i][j] = K0.emb[i][j].real();
    std::vector<Ineq> sys;
    for (int i = 0; i < g_; ++i) {
      sys.push_back({e_[i], 1});
      std::vector<long double> neg(g_);
      for (int j = 0; j < g_; ++j) neg[j] = -e_[i][j];
      sys.push_back({neg, 1});
    }
    levels_.resize(g_);
    levels_[0] = sys;
    for (int j = 1; j < g_; ++j) {
      sys = eliminate(sys, j - 1);
      levels_[j] = sys;
    }
  }

  // level0(x, S, lo, hi): x_1.. filled in x, S_i = sum_{l>=1} E_il x_l, and
  // [lo, hi] the real interval of admissible x_0.
  template <class F>
  void run(long double T, F&& level0) const {
    std::vector<i64> x(g_, 0);
    std::vector<long double> s(g_, 0);
    rec(g_ - 1, T, x, s, level0);
  }

  const std::vector<std::vector<long double>>& emb() const { return e_; }
  int g() const { return g_; }

 private:
  static std::vector<Ineq> eliminate(const std::vector<Ineq>& sys, int v) {
    std::vector<Ineq> pos, negs, out;
    for (const auto& q : sys) {
      if (q.a[v] > 1e-15L) pos.push_back(q);
      else if (q.a[v] < -1e-15L) negs.push_back(q);
      else out.push_back(q);
    }
    for (const auto& p : pos)
      for (const auto& n : negs) {
        long double wp = -n.a[v], wn = p.a[v];
        Ineq c{std::vector<long double>(p.a.size()), wp * p.c + wn * n.c};
        long double scale = 0;
        for (size_t l = 0; l < c.a.size(); ++l) {
          c.a[l] = wp * p.a[l] + wn * n.a[l];
          scale = std::max(scale, std::fabs(c.a[l]));
        }
        c.a[v] = 0;
        if (scale < 1e-15L) continue;
        for (auto& t : c.a) t /= scale;
        c.c /= scale;
        bool dup = false;
        for (const auto& o : out) {
          bool same = std::fabs(o.c - c.c) < 1e-12L;
          for (size_t l = 0; same && l < c.a.size(); ++l) same = std::fabs(o.a[l] - c.a[l]) < 1e-12L;
          if (same) {
            dup = true;
            break;
          }
        }
        if (!dup) out.push_back(std::move(c));
      }
    return out;
  }

  template <class F>
  void rec(int j, long double T, std::vector<i64>& x, std::vector<long double>& s, F& level0) const {
    const long double slack = 1e-9L * (1 + T);
    if (j == 0) {
      long double lo = -std::numeric_limits<long double>::infinity(), hi = -lo;
      for (int i = 0; i < g_; ++i) {
        lo = std::max(lo, -T - s[i]);
        hi = std::min(hi, T - s[i]);
      }
      if (lo > hi + 2 * slack) return;
      level0(x, s, lo, hi);
      return;
    }
    long double lo = -std::numeric_limits<long double>::infinity(), hi = -lo;
    for (const auto& q : levels_[j]) {
      if (std::fabs(q.a[j]) < 1e-15L) continue;
      long double rhs = q.c * T;
      for (int l = j + 1; l < g_; ++l) rhs -= q.a[l] * static_cast<long double>(x[l]);
      long double b = rhs / q.a[j];
      if (q.a[j] > 0) hi = std::min(hi, b);
      else lo = std::max(lo, b);
    }
    if (lo > hi + 2 * slack) return;
    i64 a = static_cast<i64>(std::ceil(lo - slack)), b = static_cast<i64>(std::floor(hi + slack));
    for (i64 v = a; v <= b; ++v) {
      x[j] = v;
      for (int i = 0; i < g_; ++i) s[i] += e_[i][j] * static_cast<long double>(v);
      rec(j - 1, T, x, s, level0);
      for (int i = 0; i < g_; ++i) s[i] -= e_[i][j] * static_cast<long double>(v);
    }
    x[j] = 0;
  }

  const FieldDescriptor& K_;
  int g_;
  std::vector<std::vector<long double>> e_;
  std::vector<std::vector<Ineq>> levels_;
};

long double to_ld(const mpq_class& q) { return static_cast<long double>(q.get_d()); }

// det(X - M) for an integer matrix by Faddeev-LeVerrier.
std::vector<i128> charpoly_int(const std::vector<std::vector<i128>>& a) {
  int n = static_cast<int>(a.size());
  std::vector<i128> c(n + 1, 0);
  c[n] = 1;
  std::vector<std::vector<i128>> mk(n, std::vector<i128>(n, 0));
  for (int k = 1; k <= n; ++k) {
    std::vector<std::vector<i128>> next(n, std::vector<i128>(n, 0));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        i128 s = 0;
        for (int l = 0; l < n; ++l) s = checked_add(s, checked_mul(a[i][l], mk[l][j]));
        next[i][j] = s;
      }
    for (int i = 0; i < n; ++i) next[i][i] = checked_add(next[i][i], c[n - k + 1]);
    mk = std::move(next);
    i128 tr = 0;
    for (int i = 0; i < n; ++i)
      for (int l = 0; l < n; ++l) tr = checked_add(tr, checked_mul(a[i][l], mk[l][i]));
    c[n - k] = -tr / k;
  }
  return c;
}

std::vector<std::vector<i128>> mult_matrix_int(const FieldDescriptor& K, const std::vector<i64>& x) {
  int n = K.n;
  std::vector<std::vector<i128>> m(n, std::vector<i128>(n, 0));
  for (int i = 0; i < n; ++i) {
    if (!x[i]) continue;
    for (int j = 0; j < n; ++j)
      for (int l = 0; l < n; ++l) m[l][j] += static_cast<i128>(x[i]) * K.m(i, j, l);
  }
  return m;
}

mpz_class to_mpz(i128 v) { return mpz_class(i128_to_string(v)); }

// sum_j m_j (X^2 + q)^j X^(g - j)
ZPoly weil_from_real(const std::vector<mpz_class>& m, const mpz_class& q) {
  int g = static_cast<int>(m.size()) - 1;
  ZPoly out, x2q{q, 0, 1}, pw{1};
  for (int j = 0; j <= g; ++j) {
    out += m[j] * (pw * ZPoly::monomial(g - j));
    pw = pw * x2q;
  }
  return out;
}

ZPoly charpoly_from_coords(const FieldDescriptor& K0, const std::vector<i64>& x, const mpz_class& q) {
  auto c = charpoly_int(mult_matrix_int(K0, x));
  std::vector<mpz_class> m;
  for (i128 v : c) m.push_back(to_mpz(v));
  return weil_from_real(m, q);
}

bool perfect_square(const mpz_class& v) { return v >= 0 && mpz_perfect_square_p(v.get_mpz_t()); }

std::vector<u64> basis_at_root(const FieldDescriptor& K0, u64 r, u64 alpha) {
  std::vector<u64> beta(K0.n, 0);
  for (int j = 0; j < K0.n; ++j) {
    u64 acc = 0, pw = 1;
    for (int m = 0; m < K0.n; ++m) {
      const mpq_class& b = K0.basis[j][m];
      if (b != 0) {
        u64 num = mpz_fdiv_ui(b.get_num().get_mpz_t(), r);
        u64 den = mpz_fdiv_ui(b.get_den().get_mpz_t(), r);
        acc = (acc + mulmod(mulmod(num, invmod(den, r), r), pw, r)) % r;
      }
      pw = mulmod(pw, alpha, r);
    }
    beta[j] = acc;
  }
  return beta;
}

WeilTriple make_triple(const FieldDescriptor& K0, u64 r, u64 p, const RealSearchSpec& spec, ZPoly cp,
                       const std::vector<i64>& x, const char* source) {
  WeilTriple t;
  t.r = r;
  t.p = p;
  t.d = spec.d;
  t.k = spec.k;
  t.g = K0.n;
  t.charpoly = std::move(cp);
  t.rho = rho_value(r, p, K0.n, spec.d);
  t.field = K0.name;
  for (i64 v : x) t.witness.push_back(mpz_class(static_cast<long>(v)));
  t.source = source;
  mpz_class r2 = mpz_class(static_cast<unsigned long>(r)) * static_cast<unsigned long>(r);
  t.r_squared = t.charpoly.eval(mpz_class(1)) % r2 == 0;
  return t;
}

}  // namespace

bool totally_bounded_exact(const NfElement& x, const mpq_class& t2) {
  NfElement y = elem_rational(*x.field, t2) - x * x;
  QPoly cp = charpoly(y);
  int n = cp.degree();
  for (int i = 0; i <= n; ++i) {
    int s = sgn(cp[i]);
    if (s == 0) continue;
    if (((n - i) % 2 == 0) != (s > 0)) return false;
  }
  return true;
}

void enumerate_totally_bounded(const FieldDescriptor& K0, const mpq_class& T,
                               const std::function<void(const TauRecord&)>& visit) {
  if (T <= 0) throw std::invalid_argument("T must be positive");
  BoxEnumerator box(K0);
  long double tf = to_ld(T);
  mpq_class t2 = T * T;
  const long double slack = 1e-9L * (1 + tf);
  int g = K0.n;
  TauRecord rec;
  rec.emb.resize(g);
  box.run(tf, [&](std::vector<i64>& x, const std::vector<long double>& s, long double lo, long double hi) {
    i64 a = static_cast<i64>(std::ceil(lo - slack)), b = static_cast<i64>(std::floor(hi + slack));
    for (i64 x0 = a; x0 <= b; ++x0) {
      x[0] = x0;
      long double mx = 0;
      for (int i = 0; i < g; ++i) {
        rec.emb[i] = s[i] + static_cast<long double>(x0);
        mx = std::max(mx, std::fabs(rec.emb[i]));
      }
      if (mx > tf + slack) continue;
      if (mx > tf - slack && !totally_bounded_exact(elem(K0, x), t2)) continue;
      rec.tau = x;
      rec.max_abs = mx;
      visit(rec);
    }
    x[0] = 0;
  });
}

u64 count_totally_bounded(const FieldDescriptor& K0, const mpq_class& T) {
  if (T <= 0) throw std::invalid_argument("T must be positive");
  BoxEnumerator box(K0);
  long double tf = to_ld(T);
  mpq_class t2 = T * T;
  const long double slack = 1e-9L * (1 + tf);
  u64 count = 0;
  box.run(tf, [&](std::vector<i64>& x, const std::vector<long double>&, long double lo, long double hi) {
    i64 a = static_cast<i64>(std::ceil(lo - slack)), b = static_cast<i64>(std::floor(hi + slack));
    i64 ia = static_cast<i64>(std::ceil(lo + slack)), ib = static_cast<i64>(std::floor(hi - slack));
    if (ia <= ib) count += static_cast<u64>(ib - ia + 1);
    for (i64 x0 = a; x0 <= b; ++x0) {
      if (x0 >= ia && x0 <= ib) continue;
      x[0] = x0;
      if (totally_bounded_exact(elem(K0, x), t2)) ++count;
    }
    x[0] = 0;
  });
  return count;
}

std::vector<std::pair<u64, PrimeIdeal>> degree_one_divisors_of_phi(const NfElement& tau, int k, u64 rlo, u64 rhi,
                                                                   bool* deferred, const FactorBudget& budget) {
  const FieldDescriptor& K0 = *tau.field;
  NfElement y = elem_rational(K0, 0), t1 = tau - elem_rational(K0, 1);
  ZPoly phi = cyclotomic(k);
  for (int i = phi.degree(); i >= 0; --i) y = y * t1 + elem_rational(K0, mpq_class(phi.c[i]));
  std::vector<std::pair<u64, PrimeIdeal>> out;
  mpq_class nq = norm(y);
  if (nq == 0) throw std::domain_error("Phi_k(tau - 1) is zero");
  mpz_class n = abs(nq.get_num());
  Factorization f = factor_integer(n, budget);
  if (!f.complete() && deferred) *deferred = true;
  for (const auto& [pr, e] : f.factors) {
    if (!pr.fits_ulong_p()) continue;
    u64 r = pr.get_ui();
    if (r < rlo || r > rhi || r % k != 1 % static_cast<u64>(k)) continue;
    std::vector<PrimeIdeal> ps;
    try {
      ps = factor_rational_prime(r, K0);
    } catch (const IndexPrimeError&) {
      continue;
    }
    for (auto& P : ps)
      if (P.f == 1 && ideal_divides(y, P)) out.emplace_back(r, std::move(P));
  }
  return out;
}

ZPoly char_poly_from_tau(const NfElement& tau, const mpz_class& q) {
  if (!tau.integral()) throw std::domain_error("tau must be integral");
  if (!totally_bounded_exact(tau, mpq_class(4 * q))) throw std::domain_error("tau violates the Weil bound");
  auto m = to_zpoly(charpoly(tau));
  return weil_from_real(m->c, q);
}

SearchResult search_fixed_real(const FieldDescriptor& K0, const RealSearchSpec& spec) {
  if (spec.k < 2) throw std::invalid_argument("embedding degree must be at least 2");
  if (spec.rho0 <= 0) throw std::invalid_argument("rho0 must be positive");
  if (spec.d < 1) throw std::invalid_argument("d must be positive");
  if (spec.cm_disc && K0.n != 1) throw std::invalid_argument("cm_disc filter needs K0 = Q");
  auto start = std::chrono::steady_clock::now();
  BoxEnumerator box(K0);
  const int g = K0.n;
  ResidueFilter rfilter{static_cast<u64>(spec.k), {1 % static_cast<u64>(spec.k)}};
  std::vector<u64> rs = primes_in_range(std::max<u64>(spec.rmin, 2), spec.rmax, rfilter);
  modp::Pol unused;
  int nt = std::max(1, spec.threads);
  std::vector<SearchResult> parts(nt);

  auto worker = [&](int t) {
    SearchResult& out = parts[t];
    for (size_t i = t; i < rs.size(); i += nt) {
      u64 r = rs[i];
      ++out.diag.r_scanned;
      if (mpz_divisible_ui_p(K0.index.get_mpz_t(), r)) {
        ++out.diag.index_primes;
        continue;
      }
      std::vector<u64> alphas = modp::roots(modp::reduce(K0.poly, r), r);
      if (alphas.empty()) continue;
      std::vector<std::vector<u64>> betas;
      for (u64 a : alphas) betas.push_back(basis_at_root(K0, r, a));
      u64 pb = p_bound(r, spec.rho0, g, spec.d);
      for (u64 z : residues_of_order(r, spec.k, spec.d)) {
        for (u64 p = z; p <= pb; p += r) {
          if (p < 2 || !is_prime(p)) continue;
          ++out.diag.p_tested;
          mpz_class q;
          mpz_ui_pow_ui(q.get_mpz_t(), p, spec.d);
          if (q > mpz_class("1000000000000000000")) throw std::overflow_error("q exceeds the supported range");
          u64 qu = q.get_ui();
          long double T = 2 * std::sqrt(static_cast<long double>(qu));
          const long double slack = 1e-9L * (1 + T);
          u64 target = (qu % r + 1) % r;
          mpq_class t2 = mpq_class(4 * q);
          std::map<ZPoly, std::vector<i64>> local;
          for (const auto& beta : betas) {
            box.run(T, [&](std::vector<i64>& x, const std::vector<long double>& s, long double lo, long double hi) {
              u64 partial = 0;
              for (int j = 1; j < g; ++j) {
                u64 xm = x[j] >= 0 ? static_cast<u64>(x[j]) % r : (r - static_cast<u64>(-x[j]) % r) % r;
                partial = (partial + mulmod(xm, beta[j], r)) % r;
              }
              u64 c = (target + r - partial) % r;  // x0 = c mod r
              i64 a = static_cast<i64>(std::ceil(lo - slack));
              i64 b = static_cast<i64>(std::floor(hi + slack));
              i64 off = static_cast<i64>(((static_cast<i64>(c) - a) % static_cast<i64>(r) + static_cast<i64>(r)) % static_cast<i64>(r));
              for (i64 x0 = a + off; x0 <= b; x0 += static_cast<i64>(r)) {
                x[0] = x0;
                long double mx = 0;
                for (int i = 0; i < g; ++i) mx = std::max(mx, std::fabs(s[i] + static_cast<long double>(x0)));
                if (mx > T + slack) continue;
                if (mx > T - slack && !totally_bounded_exact(elem(K0, x), t2)) continue;
                if (spec.cm_disc) {
                  mpz_class disc = mpz_class(static_cast<long>(x0)) * x0 - 4 * q;
                  if (disc % spec.cm_disc != 0 || !perfect_square(disc / spec.cm_disc) || disc == 0) continue;
                }
                ZPoly cp = charpoly_from_coords(K0, x, q);
                if (!local.count(cp)) local.emplace(std::move(cp), x);
              }
              x[0] = 0;
            });
          }
          for (auto& [cp, x] : local) {
            WeilTriple tr = make_triple(K0, r, p, spec, cp, x, "real-search");
            if (tr.r_squared) ++out.diag.r_squared;
            out.triples.push_back(std::move(tr));
          }
        }
      }
    }
  };
  if (nt == 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < nt; ++t) pool.emplace_back(worker, t);
    for (auto& th : pool) th.join();
  }
  SearchResult res = merge_results(std::move(parts));
  res.key = CountKey::charpoly;
  res.diag.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return res;
}

SearchResult search_fixed_real_tau_major(const FieldDescriptor& K0, const RealSearchSpec& spec, const FactorBudget& budget) {
  if (spec.d != 1) throw std::invalid_argument("tau-major search supports d = 1 only");
  if (spec.k < 2) throw std::invalid_argument("embedding degree must be at least 2");
  auto start = std::chrono::steady_clock::now();
  const int g = K0.n;
  u64 pmax = p_bound(spec.rmax, spec.rho0, g, 1);
  mpq_class t2 = mpq_class(4 * mpz_class(static_cast<unsigned long>(pmax)));
  mpf_class tf = sqrt(mpf_class(t2, 128));
  mpq_class T(tf);
  T += 1;
  SearchResult out;
  out.key = CountKey::charpoly;
  std::set<std::tuple<u64, u64, ZPoly>> seen;
  long double rho0 = to_ld(spec.rho0);
  enumerate_totally_bounded(K0, T, [&](const TauRecord& rec) {
    NfElement tau = elem(K0, rec.tau);
    if (!totally_bounded_exact(tau, t2)) return;
    long double m2 = rec.max_abs / 2;
    u64 lo = spec.rmin;
    if (m2 > 1) {
      long double w = std::pow(m2, 2.0L * g / rho0);
      if (w > lo + 1) lo = std::max<u64>(lo, static_cast<u64>(w) - 1);
    }
    if (lo > spec.rmax) return;
    bool deferred = false;
    std::vector<std::pair<u64, PrimeIdeal>> divs;
    try {
      divs = degree_one_divisors_of_phi(tau, spec.k, lo, spec.rmax, &deferred, budget);
    } catch (const std::domain_error&) {
      return;
    }
    if (deferred) ++out.diag.deferred;
    for (const auto& [r, P] : divs) {
      std::vector<u64> beta = basis_at_root(K0, r, *P.root);
      u64 tr = 0;
      for (int j = 0; j < g; ++j) {
        i64 v = rec.tau[j];
        u64 vm = v >= 0 ? static_cast<u64>(v) % r : (r - static_cast<u64>(-v) % r) % r;
        tr = (tr + mulmod(vm, beta[j], r)) % r;
      }
      u64 c = (tr + r - 1) % r;
      u64 pb = p_bound(r, spec.rho0, g, 1);
      for (u64 p = c; p <= pb; p += r) {
        if (p < 2 || p == r || !is_prime(p)) continue;
        mpz_class q = static_cast<unsigned long>(p);
        if (!totally_bounded_exact(tau, mpq_class(4 * q))) continue;
        auto k = embedding_degree(r, q);
        if (!k || static_cast<int>(*k) != spec.k) continue;
        if (spec.cm_disc) {
          mpz_class disc = mpz_class(static_cast<long>(rec.tau[0])) * rec.tau[0] - 4 * q;
          if (disc % spec.cm_disc != 0 || !perfect_square(disc / spec.cm_disc) || disc == 0) continue;
        }
        ZPoly cp = charpoly_from_coords(K0, rec.tau, q);
        if (!seen.insert({r, p, cp}).second) continue;
        ++out.diag.p_tested;
        out.triples.push_back(make_triple(K0, r, p, spec, cp, rec.tau, "real-search"));
      }
    }
  });
  SearchResult res = merge_results({std::move(out)});
  res.key = CountKey::charpoly;
  res.diag.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return res;
}

int degree_one_prime_count(const FieldDescriptor& K0, u64 r) {
  return static_cast<int>(modp::roots(modp::reduce(K0.poly, r), r).size());
}

double cluster_prediction(const FieldDescriptor& K0, u64 r, u64 p, int C) {
  int g = K0.n;
  double d = std::fabs(K0.discriminant.get_d());
  return std::pow(4.0, g) * std::pow(static_cast<double>(p), g / 2.0) * C /
         (static_cast<double>(r) * std::sqrt(d) * K0.aut_order());
}

}  // namespace pfav
