#include "pfav/cm.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace pfav {

CmField cm_field(const FieldRegistry& reg, const std::string& name) {
  const FieldDescriptor& K = reg.get(name);
  if (!K.is_cm()) throw std::invalid_argument("field " + name + " has no CM structure");
  CmField c;
  c.K = &K;
  c.K0 = &reg.get(K.real_subfield);
  c.conj = *K.conj;
  c.g = K.n / 2;
  for (const auto& [sub, e] : K.cm_subfields) c.subfields.emplace_back(&reg.get(sub), &e);
  return c;
}

NfElement conj(const NfElement& x) {
  if (!x.field->conj) throw std::invalid_argument("field " + x.field->name + " has no conjugation");
  return apply_automorphism(x, *x.field->conj);
}

bool is_weil_number(const NfElement& x, const mpz_class& q) {
  if (!x.integral()) return false;
  return x * conj(x) == elem_rational(*x.field, mpq_class(q));
}

u64 norm_mod(const NfElement& x, u64 m) {
  const FieldDescriptor& K = *x.field;
  int n = K.n;
  std::vector<u64> xc(n);
  for (int i = 0; i < n; ++i) xc[i] = mpz_fdiv_ui(x.c[i].get_num().get_mpz_t(), m);
  std::vector<std::vector<u64>> a(n, std::vector<u64>(n, 0));
  for (int i = 0; i < n; ++i) {
    if (!xc[i]) continue;
    for (int j = 0; j < n; ++j)
      for (int l = 0; l < n; ++l) {
        i64 v = K.m(i, j, l);
        if (!v) continue;
        u64 vm = v >= 0 ? static_cast<u64>(v) % m : m - static_cast<u64>(-v) % m;
        a[l][j] = (a[l][j] + mulmod(xc[i], vm % m, m)) % m;
      }
  }
  u64 det = 1;
  for (int c = 0; c < n; ++c) {
    int piv = -1;
    for (int r = c; r < n; ++r)
      if (a[r][c]) {
        piv = r;
        break;
      }
    if (piv < 0) return 0;
    if (piv != c) {
      std::swap(a[piv], a[c]);
      det = (m - det) % m;
    }
    det = mulmod(det, a[c][c], m);
    u64 inv = invmod(a[c][c], m);
    for (int r = c + 1; r < n; ++r) {
      if (!a[r][c]) continue;
      u64 f = mulmod(a[r][c], inv, m);
      for (int cc = c; cc < n; ++cc) a[r][cc] = (a[r][cc] + m - mulmod(f, a[c][cc], m)) % m;
    }
  }
  return det;
}

std::vector<NfIdeal> primitive_decompositions(u64 p, const CmField& C, DecompositionStats* stats) {
  const FieldDescriptor& K = *C.K;
  std::vector<PrimeIdeal> primes;
  try {
    primes = factor_rational_prime(p, K);
  } catch (const IndexPrimeError&) {
    if (stats) ++stats->index_primes;
    throw;
  }
  int m = static_cast<int>(primes.size());
  std::vector<int> partner(m, -1);
  bool ramified = false;
  for (int i = 0; i < m; ++i) {
    if (primes[i].e > 1) ramified = true;
    NfIdeal ci = conjugate(primes[i].ideal, C.conj);
    for (int j = 0; j < m; ++j)
      if (ci == primes[j].ideal) partner[i] = j;
    if (partner[i] < 0) throw std::logic_error("conjugate prime not found above " + std::to_string(p));
  }
  if (ramified && stats) ++stats->ramified;
  for (int i = 0; i < m; ++i)
    if (partner[i] == i && primes[i].e % 2) return {};

  std::vector<int> reps;
  for (int i = 0; i < m; ++i)
    if (partner[i] >= i) reps.push_back(i);
  std::vector<int> v(m, 0);
  std::vector<NfIdeal> out;
  NfIdeal pS;
  auto rec = [&](auto&& self, size_t idx) -> void {
    if (idx == reps.size()) {
      modp::Pol h{1};
      for (int i = 0; i < m; ++i)
        for (int t = 0; t < v[i]; ++t) h = modp::mul(h, primes[i].g, p);
      NfIdeal a = ideal_from_residue_map(K, p, h);
      for (const auto& [S, E] : C.subfields) {
        NfIdeal b = ideal_contract(a, *S, *E);
        NfIdeal bc = ideal_contract(conjugate(a, C.conj), *S, *E);
        if (b * bc == hnf_ideal(*S, {}, mpz_class(static_cast<unsigned long>(p)))) {
          if (stats) ++stats->non_primitive;
          return;
        }
      }
      out.push_back(std::move(a));
      return;
    }
    int i = reps[idx];
    if (partner[i] == i) {
      v[i] = primes[i].e / 2;
      self(self, idx + 1);
      return;
    }
    for (int t = 0; t <= primes[i].e; ++t) {
      v[i] = t;
      v[partner[i]] = primes[i].e - t;
      self(self, idx + 1);
    }
  };
  rec(rec, 0);
  return out;
}

std::optional<NfElement> solve_relative_norm_unit(const NfElement& eta, const CmField& C, int box) {
  const FieldDescriptor& K = *C.K;
  auto units = fundamental_units(K);
  int rank = static_cast<int>(units.size());
  std::vector<std::vector<NfElement>> pw(rank);
  for (int j = 0; j < rank; ++j)
    for (int b = -box; b <= box; ++b) pw[j].push_back(pow(units[j], b));
  // zeta * conj(zeta) = 1, so only the free part is searched
  std::vector<int> e(rank, 0);
  std::optional<NfElement> found;
  auto rec = [&](auto&& self, int j, const NfElement& acc) -> void {
    if (found) return;
    if (j == rank) {
      if (acc * conj(acc) == eta) found = acc;
      return;
    }
    for (int b = 0; b <= 2 * box && !found; ++b) self(self, j + 1, acc * pw[j][b]);
  };
  rec(rec, 0, elem_rational(K, 1));
  return found;
}

std::vector<NfElement> weil_generators(const NfIdeal& a, u64 p, const CmField& C) {
  const FieldDescriptor& K = *C.K;
  i128 target = static_cast<i128>(K.n) * p;
  FormLattice L = ideal_lattice(a);
  std::vector<NfElement> out;
  NfElement q = elem_rational(K, static_cast<unsigned long>(p));
  L.enumerate(target, [&](const std::vector<i128>& v, i128 val) {
    if (val != target) return;
    std::vector<i64> c(v.begin(), v.end());
    NfElement x = elem(K, c);
    if (x * conj(x) == q) out.push_back(std::move(x));
  });
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<NfElement> weil_generators_via_units(const NfIdeal& a, u64 p, const CmField& C, int box,
                                                 UnitPipelineStats* stats) {
  const FieldDescriptor& K = *C.K;
  auto gamma = is_principal_with_generator(a);
  if (!gamma) {
    if (stats) ++stats->non_principal;
    return {};
  }
  NfElement g = unit_reduce(*gamma);
  NfElement eta = mpq_class(1, static_cast<unsigned long>(p)) * (g * conj(g));
  mpq_class ne = norm(eta);
  if (!eta.integral() || (ne != 1 && ne != -1)) return {};
  auto eps = solve_relative_norm_unit(eta, C, box);
  if (!eps) {
    if (stats) ++stats->unit_box_misses;
    return {};
  }
  NfElement pi = g * inverse(*eps);
  std::vector<NfElement> out;
  for (const auto& z : torsion_units(K)) out.push_back(z * pi);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<NfElement> weil_numbers_above(u64 p, const CmField& C, DecompositionStats* stats) {
  std::set<NfElement> all;
  for (const auto& a : primitive_decompositions(p, C, stats))
    for (auto& x : weil_generators(a, p, C)) all.insert(std::move(x));
  return {all.begin(), all.end()};
}

ZPoly char_poly_of_weil(const NfElement& pi) {
  if (!pi.integral()) throw std::domain_error("char_poly_of_weil needs an integral element");
  auto z = to_zpoly(charpoly(pi));
  if (!z) throw std::logic_error("nonintegral characteristic polynomial");
  return *z;
}

std::optional<ZPoly> real_weil_polynomial(const ZPoly& c, const mpz_class& q) {
  int n = c.degree();
  if (n < 0 || n % 2) return std::nullopt;
  int g = n / 2;
  ZPoly rest = c;
  std::vector<mpz_class> h(g + 1, 0);
  ZPoly x2q{q, 0, 1};
  for (int i = g; i >= 0; --i) {
    h[i] = rest[g + i];
    ZPoly term = ZPoly::monomial(g - i, h[i]);
    for (int t = 0; t < i; ++t) term = term * x2q;
    rest = rest - term;
  }
  if (!rest.is_zero()) return std::nullopt;
  return ZPoly(h);
}

int sturm_count(const QPoly& f, const mpq_class& a, const mpq_class& b) {
  std::vector<QPoly> seq{f, f.derivative()};
  while (!seq.back().is_zero()) {
    QPoly q, r;
    poly_divrem(seq[seq.size() - 2], seq.back(), q, r);
    if (r.is_zero()) break;
    seq.push_back(-r);
  }
  auto changes = [&](const mpq_class& x) {
    int count = 0, last = 0;
    for (const auto& s : seq) {
      mpq_class v = s.eval(x);
      int sg = sgn(v);
      if (sg == 0) continue;
      if (last && sg != last) ++count;
      last = sg;
    }
    return count;
  };
  return changes(a) - changes(b);
}

VerifyReport verify_triple(const WeilTriple& t) {
  VerifyReport rep;
  auto bad = [&](const std::string& s) { rep.failures.push_back(s); };
  if (!is_prime(t.r)) bad("r is not prime");
  if (!is_prime(t.p)) bad("p is not prime");
  if (t.d < 1) bad("d must be positive");
  if (!rep.ok()) return rep;
  mpz_class q;
  mpz_ui_pow_ui(q.get_mpz_t(), t.p, t.d);
  if (t.r == t.p) {
    bad("r divides q");
    return rep;
  }
  auto k = embedding_degree(t.r, q);
  if (!k || static_cast<int>(*k) != t.k) bad("embedding degree mismatch");
  const ZPoly& c = t.charpoly;
  if (c.degree() != 2 * t.g || c.lead() != 1) {
    bad("characteristic polynomial must be monic of degree 2g");
    return rep;
  }
  mpz_class c1 = c.eval(mpz_class(1));
  if (c1 % mpz_class(static_cast<unsigned long>(t.r)) != 0) bad("r does not divide C(1)");
  auto h = real_weil_polynomial(c, q);
  if (!h) {
    bad("C is not q-palindromic");
    return rep;
  }
  // P(t) = prod (t - y_i^2) from h(y) h(-y)
  ZPoly hm;
  for (int i = 0; i <= h->degree(); ++i) hm.c.push_back(i % 2 ? -(*h)[i] : (*h)[i]);
  hm.trim();
  ZPoly hh = *h * hm;
  std::vector<mpq_class> pc;
  for (int i = 0; i <= hh.degree(); i += 2) pc.push_back(t.g % 2 ? -mpq_class(hh[i]) : mpq_class(hh[i]));
  QPoly P(pc);
  QPoly sq = P;
  QPoly gd = poly_gcd(P, P.derivative());
  if (gd.degree() > 0) {
    QPoly quo, r;
    poly_divrem(P, gd, quo, r);
    sq = quo;
  }
  int extra = 0;
  if (sq[0] == 0) {
    sq = QPoly(std::vector<mpq_class>(sq.c.begin() + 1, sq.c.end()));
    extra = 1;
  }
  if (sturm_count(sq, 0, mpq_class(4 * q)) + extra != sq.degree() + extra) bad("roots of C do not all have modulus sqrt(q)");
  mpf_class sq_q(0, 512), one(1, 512);
  sq_q = sqrt(mpf_class(q, 512));
  mpf_class lo = one, hi = one, a = sq_q - 1, b = sq_q + 1;
  for (int i = 0; i < 2 * t.g; ++i) {
    lo *= a;
    hi *= b;
  }
  mpf_class cf(c1, 512);
  if (cf < lo - mpf_class(1e-50, 512) || cf > hi + mpf_class(1e-50, 512)) bad("C(1) outside the Weil bounds");
  double rho = t.g * t.d * std::log(static_cast<double>(t.p)) / std::log(static_cast<double>(t.r));
  if (std::fabs(rho - t.rho) > 1e-6) bad("rho value mismatch");
  return rep;
}

}  // namespace pfav
