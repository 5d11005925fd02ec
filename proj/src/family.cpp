#include "pfav/family.hpp"

#include <cmath>
#include <complex>
#include <numeric>
#include <set>
#include <sstream>

#include "pfav/polymod.hpp"

namespace pfav {

namespace {

void kpoly_trim(KPoly& f) {
  while (!f.empty() && f.back().is_zero()) f.pop_back();
}

mpq_class rational_value(const NfElement& x) { return to_power_basis(x)[0]; }

mpq_class parse_signed(const std::string& t) {
  if (!t.empty() && t[0] == '-') return -parse_rational(t.substr(1));
  return parse_rational(t);
}

KPoly to_kpoly(const FieldDescriptor& K, const QPoly& f) {
  KPoly out;
  for (const auto& c : f.c) out.push_back(elem_rational(K, c));
  return out;
}

KPoly kpoly_rem(KPoly a, const KPoly& b) {
  kpoly_trim(a);
  int db = static_cast<int>(b.size()) - 1;
  NfElement inv = inverse(b.back());
  while (static_cast<int>(a.size()) - 1 >= db) {
    int shift = static_cast<int>(a.size()) - 1 - db;
    NfElement f = a.back() * inv;
    for (int i = 0; i <= db; ++i) a[shift + i] = a[shift + i] - f * b[i];
    a.pop_back();
    kpoly_trim(a);
  }
  return a;
}

// Degree of the gcd over K[x].
int kpoly_gcd_degree(KPoly a, KPoly b) {
  kpoly_trim(a);
  kpoly_trim(b);
  while (!b.empty()) {
    KPoly r = kpoly_rem(a, b);
    a = std::move(b);
    b = std::move(r);
  }
  return static_cast<int>(a.size()) - 1;
}

// Newton interpolation through (i, y_i), i = 0..n-1.
QPoly interpolate(const std::vector<mpq_class>& ys) {
  int n = static_cast<int>(ys.size());
  std::vector<mpq_class> dd = ys;
  for (int j = 1; j < n; ++j)
    for (int i = n - 1; i >= j; --i) dd[i] = (dd[i] - dd[i - 1]) / j;
  QPoly out, basis{mpq_class(1)};
  for (int j = 0; j < n; ++j) {
    out += QPoly::constant(dd[j]) * basis;
    basis = basis * QPoly{mpq_class(-j), mpq_class(1)};
  }
  return out;
}

ZPoly primitive_integral(const QPoly& f) {
  mpz_class den = 1;
  for (const auto& c : f.c) den = lcm(den, mpz_class(c.get_den()));
  std::vector<mpz_class> z;
  for (const auto& c : f.c) z.push_back(mpz_class(c * den));
  mpz_class g = 0;
  for (const auto& c : z) g = gcd(g, c);
  if (g != 0)
    for (auto& c : z) c /= g;
  return ZPoly(std::move(z));
}

// Proper subset sums of the factor degrees modulo l.
std::set<int> degree_sums(const modp::Pol& f, u64 l) {
  std::vector<int> degs;
  for (const auto& [fac, e] : modp::factor(f, l))
    for (int i = 0; i < e; ++i) degs.push_back(modp::deg(fac));
  std::set<int> sums{0};
  for (int d : degs) {
    std::set<int> next = sums;
    for (int s : sums) next.insert(s + d);
    sums = std::move(next);
  }
  int n = modp::deg(f);
  sums.erase(0);
  sums.erase(n);
  return sums;
}

bool has_rational_root(const ZPoly& f) {
  if (f[0] == 0) return true;
  Factorization a = factor_integer(abs(f[0])), b = factor_integer(abs(f.lead()));
  if (!a.complete() || !b.complete()) return false;
  auto divs = [](const Factorization& fz) {
    std::vector<mpz_class> out{1};
    for (const auto& [p, e] : fz.factors) {
      std::vector<mpz_class> next;
      for (const auto& d : out) {
        mpz_class pw = 1;
        for (int i = 0; i <= e; ++i) {
          next.push_back(d * pw);
          pw *= p;
        }
      }
      out = std::move(next);
    }
    return out;
  };
  for (const auto& num : divs(a))
    for (const auto& den : divs(b))
      for (int s : {1, -1}) {
        mpq_class x(s * num, den);
        x.canonicalize();
        if (to_qpoly(f).eval(x) == 0) return true;
      }
  return false;
}

std::vector<std::complex<long double>> complex_roots(const ZPoly& f) {
  using cx = std::complex<long double>;
  int n = f.degree();
  std::vector<long double> a(n + 1);
  for (int i = 0; i <= n; ++i) a[i] = static_cast<long double>(f[i].get_d()) / static_cast<long double>(f.lead().get_d());
  std::vector<cx> z(n);
  for (int i = 0; i < n; ++i) z[i] = std::pow(cx(0.4L, 0.9L), i);
  for (int it = 0; it < 2000; ++it) {
    long double move = 0;
    for (int i = 0; i < n; ++i) {
      cx num = 0;
      for (int j = n; j >= 0; --j) num = num * z[i] + a[j];
      cx den = 1;
      for (int j = 0; j < n; ++j)
        if (j != i) den *= z[i] - z[j];
      cx step = num / den;
      z[i] -= step;
      move = std::max(move, std::abs(step));
    }
    if (move < 1e-16L) break;
  }
  return z;
}

// Exact search for a rational quadratic factor, guided by numerical roots:
// an integral factor c1 x^2 + a x + b has c1 | lead, so lead * (x - u)(x - v)
// has integer coefficients.
bool has_quadratic_factor(const ZPoly& f) {
  auto z = complex_roots(f);
  long double c = f.lead().get_d();
  for (size_t i = 0; i < z.size(); ++i)
    for (size_t j = i + 1; j < z.size(); ++j) {
      auto s = z[i] + z[j], p = z[i] * z[j];
      if (std::fabs(s.imag()) > 1e-6L || std::fabs(p.imag()) > 1e-6L) continue;
      QPoly cand{mpq_class(static_cast<long>(std::llround(c * p.real()))), mpq_class(static_cast<long>(std::llround(-c * s.real()))), mpq_class(f.lead())};
      QPoly q, r;
      poly_divrem(to_qpoly(f), cand, q, r);
      if (r.is_zero()) return true;
    }
  return false;
}

CheckStatus irreducibility(const QPoly& r0) {
  ZPoly f = primitive_integral(r0);
  int n = f.degree();
  if (n <= 0) return CheckStatus::fail;
  if (n == 1) return CheckStatus::pass;
  if (has_rational_root(f)) return CheckStatus::fail;
  if (n <= 3) return CheckStatus::pass;
  std::set<int> possible;
  for (int i = 1; i < n; ++i) possible.insert(i);
  for (u64 l : primes_in_range(3, 1300)) {
    if (possible.empty()) break;
    if (mpz_divisible_ui_p(f.lead().get_mpz_t(), l)) continue;
    modp::Pol fl = modp::reduce(f, l);
    if (modp::deg(modp::gcd(fl, modp::reduce(f.derivative(), l), l)) > 0) continue;
    std::set<int> s = degree_sums(fl, l), keep;
    for (int v : possible)
      if (s.count(v)) keep.insert(v);
    possible = std::move(keep);
  }
  if (possible.empty()) return CheckStatus::pass;
  if (n == 4) return has_quadratic_factor(f) ? CheckStatus::fail : CheckStatus::pass;
  return CheckStatus::unverified;
}

std::optional<mpz_class> integer_value(const QPoly& f, i64 w) {
  mpq_class v = f.eval(mpq_class(static_cast<long>(w)));
  if (v.get_den() != 1) return std::nullopt;
  return mpz_class(v.get_num());
}

u64 eval_mod(const std::vector<u64>& c, u64 x, u64 m) {
  u128 acc = 0;
  for (size_t i = c.size(); i-- > 0;) acc = (acc * x + c[i]) % m;
  return static_cast<u64>(acc);
}

std::vector<u64> reduce_coeffs(const ZPoly& f, u64 m) {
  std::vector<u64> out;
  for (const auto& c : f.c) out.push_back(mpz_fdiv_ui(c.get_mpz_t(), m));
  return out;
}

// Fraction of w modulo l*D with l | f(w) g(w), where f = fz / fden, g = gz / gden.
double local_density(const ZPoly& fz, u64 fden, const ZPoly& gz, u64 gden, u64 l, u64 D) {
  u64 period = l * D, hits = 0, fm = fden * l, gm = gden * l;
  std::vector<u64> fc = reduce_coeffs(fz, fm), gc = reduce_coeffs(gz, gm);
  for (u64 w = 0; w < period; ++w)
    if (eval_mod(fc, w % fm, fm) == 0 || eval_mod(gc, w % gm, gm) == 0) ++hits;
  return static_cast<double>(hits) / static_cast<double>(period);
}

double euler_product(const CompleteFamily& fam, u64 bound) {
  mpz_class fden = 1, gden = 1;
  for (const auto& c : fam.r0.c) fden = lcm(fden, mpz_class(c.get_den()));
  for (const auto& c : fam.p0.c) gden = lcm(gden, mpz_class(c.get_den()));
  std::vector<mpz_class> fc, gc;
  for (const auto& c : fam.r0.c) fc.push_back(mpz_class(c * fden));
  for (const auto& c : fam.p0.c) gc.push_back(mpz_class(c * gden));
  ZPoly fz(fc), gz(gc);
  if (!fden.fits_ulong_p() || !gden.fits_ulong_p() || fden * gden > 1000000)
    throw std::invalid_argument("family denominators too large for the local densities");
  u64 D = mpz_class(lcm(fden, gden)).get_ui();
  double prod = 1;
  for (u64 l : primes_in_range(2, bound)) {
    double nu = local_density(fz, fden.get_ui(), gz, gden.get_ui(), l, D);
    double one = 1.0 - 1.0 / static_cast<double>(l);
    prod *= (1 - nu) / (one * one);
  }
  return prod;
}

}  // namespace

std::string to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::pass: return "pass";
    case CheckStatus::fail: return "fail";
    default: return "unverified";
  }
}

std::string to_string(FamilyComparison c) {
  switch (c) {
    case FamilyComparison::dominates: return "dominates";
    case FamilyComparison::dominated: return "dominated";
    default: return "boundary";
  }
}

bool FamilyReport::algebraic_ok() const {
  for (const auto& [name, s] : checks)
    if (s == CheckStatus::fail) return false;
  return true;
}

KPoly kpoly_conj(const KPoly& f) {
  KPoly out;
  for (const auto& c : f) out.push_back(conj(c));
  return out;
}

KPoly kpoly_mul(const KPoly& a, const KPoly& b) {
  if (a.empty() || b.empty()) return {};
  const FieldDescriptor& K = *a.front().field;
  KPoly out(a.size() + b.size() - 1, elem_rational(K, 0));
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j) out[i + j] = out[i + j] + a[i] * b[j];
  kpoly_trim(out);
  return out;
}

NfElement kpoly_eval(const KPoly& f, const mpq_class& x) {
  if (f.empty()) throw std::invalid_argument("empty polynomial");
  NfElement acc = elem_rational(*f.front().field, 0);
  for (size_t i = f.size(); i-- > 0;) acc = x * acc + f[i];
  return acc;
}

QPoly kpoly_norm(const KPoly& f) {
  if (f.empty()) return {};
  int n = f.front().field->n;
  int deg = n * (static_cast<int>(f.size()) - 1);
  std::vector<mpq_class> ys;
  for (int i = 0; i <= deg; ++i) ys.push_back(norm(kpoly_eval(f, i)));
  return interpolate(ys);
}

CompleteFamily make_family(std::string name, const FieldDescriptor& K, int k, QPoly r0, KPoly pi0) {
  if (!K.is_cm()) throw std::invalid_argument("family field " + K.name + " is not CM");
  if (k < 2) throw std::invalid_argument("embedding degree must be at least 2");
  if (r0.degree() < 1) throw std::invalid_argument("r0 must be non-constant");
  for (const auto& c : pi0)
    if (c.field != &K) throw std::invalid_argument("pi0 coefficients lie in another field");
  CompleteFamily fam;
  fam.name = std::move(name);
  fam.K = &K;
  fam.k = k;
  fam.r0 = std::move(r0);
  fam.pi0 = std::move(pi0);
  kpoly_trim(fam.pi0);
  std::vector<mpq_class> p0;
  for (const auto& c : kpoly_mul(fam.pi0, kpoly_conj(fam.pi0))) {
    if (!c.is_rational()) fam.p0_rational = false;
    p0.push_back(rational_value(c));
  }
  fam.p0 = QPoly(std::move(p0));
  return fam;
}

FamilyReport validate_family(const CompleteFamily& fam) {
  FamilyReport rep;
  const FieldDescriptor& K = *fam.K;
  int dr = fam.r0.degree(), dp = fam.p0.degree();
  rep.checks["degrees_even"] = (dr % 2 == 0 && dp % 2 == 0) ? CheckStatus::pass : CheckStatus::fail;
  rep.checks["ii_p0_rational"] = fam.p0_rational ? CheckStatus::pass : CheckStatus::fail;
  rep.generic_rho = dr > 0 ? mpq_class(fam.g() * dp, dr) : mpq_class(0);
  rep.generic_rho.canonicalize();

  QPoly q, r;
  QPoly phi = to_qpoly(cyclotomic(fam.k)).compose(fam.p0);
  poly_divrem(phi, fam.r0, q, r);
  rep.checks["iii_r0_divides_phi_k_p0"] = r.is_zero() ? CheckStatus::pass : CheckStatus::fail;
  if (r.is_zero()) rep.witnesses["phi_k_p0_over_r0"] = q;

  KPoly shifted = fam.pi0;
  if (shifted.empty()) shifted.push_back(elem_rational(K, 0));
  shifted[0] = shifted[0] - elem_rational(K, 1);
  QPoly nrm = kpoly_norm(shifted);
  poly_divrem(nrm, fam.r0, q, r);
  rep.checks["iii_r0_divides_norm_pi0_minus_1"] = r.is_zero() ? CheckStatus::pass : CheckStatus::fail;
  if (r.is_zero()) rep.witnesses["norm_pi0_minus_1_over_r0"] = q;

  rep.checks["i_r0_irreducible"] = dr <= 4 ? irreducibility(fam.r0) : CheckStatus::unverified;
  if (fam.g() == 1) {
    int gd = kpoly_gcd_degree(to_kpoly(K, fam.r0), shifted);
    rep.checks["i_reflex_subfield"] = (gd >= 1 && gd < dr) ? CheckStatus::pass : CheckStatus::fail;
  } else {
    rep.checks["i_reflex_subfield"] = CheckStatus::unverified;
  }
  rep.checks["iv_prime_values"] = CheckStatus::unverified;
  return rep;
}

CompleteFamily bn_family(const FieldRegistry& reg) {
  const FieldDescriptor& K = reg.get("Qsqrtm3");
  // theta = (-1 + sqrt(-3)) / 2, so (t0 + y0 sqrt(-3)) / 2 = (t0 + y0) / 2 + y0 theta.
  auto c = [&](long a, long b) { return elem(K, std::vector<i64>{a, b}); };
  KPoly pi0{c(1, 1), c(2, 4), c(6, 6)};
  QPoly r0{1, 6, 18, 36, 36};
  return make_family("BN", K, 12, r0, pi0);
}

std::vector<CompleteFamily> load_families(const FieldRegistry& reg, const std::string& text) {
  std::vector<CompleteFamily> out;
  std::istringstream in(text);
  std::string line, name;
  std::map<std::string, std::string> kv;
  auto flush = [&]() {
    if (name.empty()) return;
    for (const char* key : {"field", "k", "r0", "pi0"})
      if (!kv.count(key)) throw std::invalid_argument("family " + name + ": missing key " + key);
    const FieldDescriptor& K = reg.get(kv["field"]);
    std::vector<mpq_class> r0;
    std::istringstream rs(kv["r0"]);
    for (std::string t; rs >> t;) r0.push_back(parse_signed(t));
    KPoly pi0;
    std::istringstream ps(kv["pi0"]);
    for (std::string part; std::getline(ps, part, ';');) {
      QVec cs;
      std::istringstream es(part);
      for (std::string t; es >> t;) cs.push_back(parse_signed(t));
      if (static_cast<int>(cs.size()) != K.n) throw std::invalid_argument("family " + name + ": pi0 coefficient needs " + std::to_string(K.n) + " coordinates");
      pi0.push_back(NfElement{&K, cs});
    }
    out.push_back(make_family(name, K, std::stoi(kv["k"]), QPoly(r0), pi0));
    kv.clear();
  };
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto b = line.find_first_not_of(" \t\r"), e = line.find_last_not_of(" \t\r");
    if (b == std::string::npos) continue;
    line = line.substr(b, e - b + 1);
    if (line.front() == '[') {
      flush();
      name = line.substr(1, line.size() - 2);
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos || name.empty()) throw std::invalid_argument("bad family line: " + line);
    auto key = line.substr(0, eq), val = line.substr(eq + 1);
    key.erase(key.find_last_not_of(" \t") + 1);
    val.erase(0, val.find_first_not_of(" \t"));
    kv[key] = val;
  }
  flush();
  return out;
}

SearchResult enumerate_family_triples(const CompleteFamily& fam, i64 wlo, i64 whi, RWindow window) {
  SearchResult out;
  out.key = CountKey::triple;
  const int g = fam.g();
  for (i64 w = wlo; w <= whi; ++w) {
    auto r = integer_value(fam.r0, w);
    auto p = integer_value(fam.p0, w);
    if (!r || !p || *r < 2 || *p < 2 || !r->fits_ulong_p() || !p->fits_ulong_p()) continue;
    u64 ru = r->get_ui(), pu = p->get_ui();
    if (ru < window.lo || ru > window.hi) continue;
    if (!is_prime(ru) || !is_prime(pu)) continue;
    auto k = embedding_degree(ru, *p);
    if (!k || static_cast<int>(*k) != fam.k) continue;
    NfElement pi = kpoly_eval(fam.pi0, mpq_class(static_cast<long>(w)));
    if (!pi.integral() || !is_weil_number(pi, *p)) continue;
    WeilTriple t;
    t.r = ru;
    t.p = pu;
    t.d = 1;
    t.k = fam.k;
    t.g = g;
    t.charpoly = char_poly_of_weil(pi);
    t.rho = rho_value(ru, pu, g, 1);
    t.field = fam.K->name;
    t.witness = pi.coords();
    t.source = "family";
    mpz_class r2 = *r * *r;
    t.r_squared = t.charpoly.eval(mpz_class(1)) % r2 == 0;
    if (t.r_squared) ++out.diag.r_squared;
    out.triples.push_back(std::move(t));
  }
  return merge_results({std::move(out)});
}

FamilyEstimate family_count_estimate(const CompleteFamily& fam, double x, u64 prime_bound) {
  if (prime_bound < 4) throw std::invalid_argument("prime bound too small");
  if (!(x > 1)) throw std::invalid_argument("x must exceed 1");
  int dr = fam.r0.degree(), dp = fam.p0.degree();
  double c = fam.r0.lead().get_d(), cp = fam.p0.lead().get_d();
  int sides = 0;
  if (c > 0 && cp > 0) ++sides;
  if ((dr % 2 == 0 ? c : -c) > 0 && (dp % 2 == 0 ? cp : -cp) > 0) ++sides;
  FamilyEstimate est;
  est.euler_product = euler_product(fam, prime_bound);
  double half = euler_product(fam, prime_bound / 2);
  double scale = sides * std::pow(std::fabs(c), -1.0 / dr) * dr / dp;
  est.a_prime = est.euler_product * scale;
  est.truncation_error = std::fabs(est.euler_product - half) * scale;
  double lx = std::log(x);
  est.value = est.a_prime * std::pow(x, 1.0 / dr) / (lx * lx);
  return est;
}

FamilyComparisonReport family_vs_heuristic(const CompleteFamily& fam, const mpq_class& rho0) {
  int dr = fam.r0.degree(), dp = fam.p0.degree(), g = fam.g();
  mpq_class generic(g * dp, dr), upper(g * (dr + 1), dr);
  generic.canonicalize();
  upper.canonicalize();
  std::ostringstream ineq;
  ineq << "generic rho " << generic.get_str() << ", upper " << upper.get_str() << ", rho0 " << rho0.get_str()
       << "; exponents 1/" << dr << " vs rho0/" << g << " - 1";
  FamilyComparison res;
  if (rho0 == generic || rho0 == upper) res = FamilyComparison::boundary;
  else if (rho0 > generic && rho0 < upper) res = FamilyComparison::dominates;
  else res = FamilyComparison::dominated;
  return {res, ineq.str()};
}

}  // namespace pfav
