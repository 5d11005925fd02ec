#include "pfav/ideal.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace pfav {

namespace {

mpz_class mod_pos(const mpz_class& a, const mpz_class& d) {
  mpz_class r = a % d;
  if (r < 0) r += d;
  return r;
}

// u*a + v*b = g >= 0
void xgcd(const mpz_class& a, const mpz_class& b, mpz_class& g, mpz_class& u, mpz_class& v) {
  mpz_gcdext(g.get_mpz_t(), u.get_mpz_t(), v.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
}

ZVec times_basis(const NfElement& x, int j) {
  const FieldDescriptor& K = *x.field;
  NfElement bj{&K, QVec(K.n, 0)};
  bj.c[j] = 1;
  return (x * bj).coords();
}

u64 q_mod(const mpq_class& v, u64 p) {
  u64 num = mpz_fdiv_ui(v.get_num().get_mpz_t(), p);
  u64 den = mpz_fdiv_ui(v.get_den().get_mpz_t(), p);
  return mulmod(num, invmod(den, p), p);
}

// Basis of the right kernel of a (rows x cols) over F_p.
std::vector<std::vector<u64>> kernel_mod_p(std::vector<std::vector<u64>> a, int cols, u64 p) {
  int rows = static_cast<int>(a.size());
  std::vector<int> pivot_col;
  int r = 0;
  for (int c = 0; c < cols && r < rows; ++c) {
    int piv = -1;
    for (int i = r; i < rows; ++i)
      if (a[i][c]) {
        piv = i;
        break;
      }
    if (piv < 0) continue;
    std::swap(a[piv], a[r]);
    u64 inv = invmod(a[r][c], p);
    for (auto& v : a[r]) v = mulmod(v, inv, p);
    for (int i = 0; i < rows; ++i) {
      if (i == r || !a[i][c]) continue;
      u64 f = a[i][c];
      for (int cc = 0; cc < cols; ++cc) a[i][cc] = (a[i][cc] + p - mulmod(f, a[r][cc], p)) % p;
    }
    pivot_col.push_back(c);
    ++r;
  }
  std::vector<std::vector<u64>> ker;
  std::vector<bool> is_pivot(cols, false);
  for (int c : pivot_col) is_pivot[c] = true;
  for (int free = 0; free < cols; ++free) {
    if (is_pivot[free]) continue;
    std::vector<u64> v(cols, 0);
    v[free] = 1;
    for (int i = 0; i < static_cast<int>(pivot_col.size()); ++i) v[pivot_col[i]] = (p - a[i][free]) % p;
    ker.push_back(std::move(v));
  }
  return ker;
}

}  // namespace

std::string NfIdeal::to_string() const {
  std::ostringstream os;
  os << "(";
  for (size_t i = 0; i < hnf.size(); ++i) {
    os << (i ? "; " : "");
    for (size_t j = 0; j < hnf[i].size(); ++j) os << (j ? " " : "") << hnf[i][j];
  }
  os << ")";
  return os.str();
}

ZMat echelon(ZMat rows, int pivot_cols) {
  int m = static_cast<int>(rows.size());
  int cur = 0;
  for (int c = 0; c < pivot_cols && cur < m; ++c) {
    int piv = -1;
    for (int i = cur; i < m; ++i)
      if (rows[i][c] != 0) {
        piv = i;
        break;
      }
    if (piv < 0) continue;
    std::swap(rows[piv], rows[cur]);
    for (int i = cur + 1; i < m; ++i) {
      if (rows[i][c] == 0) continue;
      mpz_class a = rows[cur][c], b = rows[i][c], g, u, v;
      xgcd(a, b, g, u, v);
      mpz_class ag = a / g, bg = b / g;
      for (size_t j = 0; j < rows[cur].size(); ++j) {
        mpz_class x = rows[cur][j], y = rows[i][j];
        rows[cur][j] = u * x + v * y;
        rows[i][j] = bg * x - ag * y;
      }
    }
    if (rows[cur][c] < 0)
      for (auto& v : rows[cur]) v = -v;
    ++cur;
  }
  return rows;
}

ZMat integer_kernel(const ZMat& a) {
  int m = static_cast<int>(a.size());
  int k = m ? static_cast<int>(a[0].size()) : 0;
  ZMat rows(k, ZVec(m + k, 0));
  for (int j = 0; j < k; ++j) {
    for (int i = 0; i < m; ++i) rows[j][i] = a[i][j];
    rows[j][m + j] = 1;
  }
  rows = echelon(std::move(rows), m);
  ZMat ker;
  for (const auto& r : rows) {
    if (!std::all_of(r.begin(), r.begin() + m, [](const mpz_class& v) { return v == 0; })) continue;
    ker.emplace_back(r.begin() + m, r.end());
  }
  return ker;
}

ZMat hnf_mod(ZMat rows, int n, const mpz_class& d_in) {
  mpz_class d = abs(d_in);
  if (d == 0) throw std::invalid_argument("hnf_mod needs a nonzero modulus");
  for (auto& r : rows)
    for (auto& v : r) v = mod_pos(v, d);
  ZMat h(n, ZVec(n, 0));
  for (int i = 0; i < n; ++i) {
    ZVec piv(n, 0);
    piv[i] = d;
    for (auto& r : rows) {
      if (r[i] == 0) continue;
      mpz_class a = piv[i], b = r[i], g, u, v;
      xgcd(a, b, g, u, v);
      mpz_class ag = a / g, bg = b / g;
      for (int j = i; j < n; ++j) {
        mpz_class x = piv[j], y = r[j];
        piv[j] = u * x + v * y;
        r[j] = bg * x - ag * y;
      }
      for (int j = i + 1; j < n; ++j) {
        piv[j] = mod_pos(piv[j], d);
        r[j] = mod_pos(r[j], d);
      }
    }
    h[i] = std::move(piv);
    rows.erase(std::remove_if(rows.begin(), rows.end(),
                              [](const ZVec& r) { return std::all_of(r.begin(), r.end(), [](const mpz_class& v) { return v == 0; }); }),
               rows.end());
  }
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < i; ++k) {
      mpz_class q;
      mpz_fdiv_q(q.get_mpz_t(), h[k][i].get_mpz_t(), h[i][i].get_mpz_t());
      if (q != 0)
        for (int j = i; j < n; ++j) h[k][j] -= q * h[i][j];
    }
  return h;
}

NfIdeal hnf_ideal(const FieldDescriptor& K, const ZMat& rows, const mpz_class& d) {
  NfIdeal a{&K, hnf_mod(rows, K.n, d), 1};
  for (int i = 0; i < K.n; ++i) a.norm *= a.hnf[i][i];
  return a;
}

NfIdeal unit_ideal(const FieldDescriptor& K) { return hnf_ideal(K, {}, 1); }

NfIdeal principal_ideal(const NfElement& x) {
  if (x.is_zero()) throw std::domain_error("principal ideal of zero");
  ZMat rows;
  for (int j = 0; j < x.field->n; ++j) rows.push_back(times_basis(x, j));
  return hnf_ideal(*x.field, rows, norm(x).get_num());
}

NfIdeal ideal_from_generators(const FieldDescriptor& K, const std::vector<NfElement>& gens) {
  ZMat rows;
  mpz_class d = 0;
  for (const auto& x : gens) {
    if (x.is_zero()) continue;
    mpz_class nx = abs(norm(x).get_num());
    d = gcd(d, nx);
    for (int j = 0; j < K.n; ++j) rows.push_back(times_basis(x, j));
  }
  if (d == 0) throw std::domain_error("zero ideal");
  return hnf_ideal(K, rows, d);
}

NfIdeal operator*(const NfIdeal& a, const NfIdeal& b) {
  const FieldDescriptor& K = *a.field;
  ZMat rows;
  for (const auto& x : a.hnf)
    for (const auto& y : b.hnf) rows.push_back((elem(K, x) * elem(K, y)).coords());
  return hnf_ideal(K, rows, a.norm * b.norm);
}

NfIdeal operator+(const NfIdeal& a, const NfIdeal& b) {
  ZMat rows = a.hnf;
  rows.insert(rows.end(), b.hnf.begin(), b.hnf.end());
  return hnf_ideal(*a.field, rows, gcd(a.norm, b.norm));
}

bool contains(const NfIdeal& a, const NfElement& x) {
  if (!x.integral()) return false;
  ZVec r = x.coords();
  int n = a.field->n;
  for (int i = 0; i < n; ++i) {
    if (r[i] == 0) continue;
    if (!mpz_divisible_p(r[i].get_mpz_t(), a.hnf[i][i].get_mpz_t())) return false;
    mpz_class z = r[i] / a.hnf[i][i];
    for (int j = i; j < n; ++j) r[j] -= z * a.hnf[i][j];
  }
  return true;
}

NfIdeal conjugate(const NfIdeal& a, int automorphism) {
  const FieldDescriptor& K = *a.field;
  ZMat rows;
  for (const auto& x : a.hnf) rows.push_back(apply_automorphism(elem(K, x), automorphism).coords());
  return hnf_ideal(K, rows, a.norm);
}

std::vector<modp::Pol> residue_images(const FieldDescriptor& K, u64 p, const modp::Pol& h) {
  std::vector<modp::Pol> powers;
  modp::Pol cur = modp::rem(modp::Pol{1}, h, p);
  for (int m = 0; m < K.n; ++m) {
    powers.push_back(cur);
    cur = modp::mulmod(cur, modp::Pol{0, 1}, h, p);
  }
  std::vector<modp::Pol> out;
  for (int j = 0; j < K.n; ++j) {
    modp::Pol acc;
    for (int m = 0; m < K.n; ++m) {
      if (K.basis[j][m] == 0) continue;
      acc = modp::add(acc, modp::scale(powers[m], q_mod(K.basis[j][m], p), p), p);
    }
    acc.resize(modp::deg(h), 0);
    out.push_back(std::move(acc));
  }
  return out;
}

NfIdeal ideal_from_residue_map(const FieldDescriptor& K, u64 p, const modp::Pol& h) {
  int dh = modp::deg(h);
  if (dh <= 0) return unit_ideal(K);
  auto img = residue_images(K, p, h);
  std::vector<std::vector<u64>> m(dh, std::vector<u64>(K.n, 0));
  for (int j = 0; j < K.n; ++j)
    for (int i = 0; i < dh; ++i) m[i][j] = img[j][i];
  ZMat rows;
  for (const auto& v : kernel_mod_p(m, K.n, p)) {
    ZVec z;
    for (u64 t : v) z.push_back(mpz_class(static_cast<unsigned long>(t)));
    rows.push_back(std::move(z));
  }
  return hnf_ideal(K, rows, mpz_class(static_cast<unsigned long>(p)));
}

std::vector<PrimeIdeal> factor_rational_prime(u64 p, const FieldDescriptor& K) {
  if (mpz_divisible_ui_p(K.index.get_mpz_t(), p))
    throw IndexPrimeError("prime " + std::to_string(p) + " divides the index of " + K.name);
  std::vector<PrimeIdeal> out;
  for (auto& [g, e] : modp::factor(modp::reduce(K.poly, p), p)) {
    PrimeIdeal P;
    P.p = p;
    P.f = modp::deg(g);
    P.e = e;
    P.g = g;
    QVec pb(K.n, 0);
    for (int i = 0; i <= modp::deg(g) && i < K.n; ++i) pb[i] = static_cast<unsigned long>(g[i]);
    NfElement a = from_power_basis(K, pb);
    if (modp::deg(g) == K.n) a = elem_rational(K, 0);  // g is the whole polynomial: (p) is inert
    P.alpha = a;
    if (P.f == 1) P.root = (p - g[0]) % p;
    P.ideal = ideal_from_residue_map(K, p, g);
    out.push_back(std::move(P));
  }
  return out;
}

bool ideal_divides(const NfElement& x, const PrimeIdeal& P) {
  if (P.f != 1) throw std::invalid_argument("ideal_divides needs a degree-one prime");
  if (!x.integral()) throw std::domain_error("ideal_divides needs an integral element");
  auto img = residue_images(*x.field, P.p, P.g);
  u64 acc = 0;
  for (int j = 0; j < x.field->n; ++j) {
    u64 c = mpz_fdiv_ui(x.c[j].get_num().get_mpz_t(), P.p);
    u64 b = img[j].empty() ? 0 : img[j][0];
    acc = (acc + mulmod(c, b, P.p)) % P.p;
  }
  return acc == 0;
}

NfIdeal ideal_contract(const NfIdeal& a, const FieldDescriptor& S, const ZMat& e) {
  const FieldDescriptor& K = *a.field;
  int n = K.n, n0 = S.n;
  // y is in the preimage iff H^{-T} E y is integral
  QMat ht(n, QVec(n, 0));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) ht[i][j] = a.hnf[j][i];
  QMat m(n, QVec(n0, 0));
  // forward substitution: H^T is lower triangular
  for (int c = 0; c < n0; ++c)
    for (int i = 0; i < n; ++i) {
      mpq_class s = mpq_class(e[i][c]);
      for (int j = 0; j < i; ++j) s -= ht[i][j] * m[j][c];
      m[i][c] = s / ht[i][i];
    }
  mpz_class delta = 1;
  for (const auto& row : m)
    for (const auto& v : row) delta = lcm(delta, v.get_den());
  ZMat sys(n, ZVec(n0 + n, 0));
  for (int i = 0; i < n; ++i) {
    for (int c = 0; c < n0; ++c) sys[i][c] = mpq_class(m[i][c] * delta).get_num();
    sys[i][n0 + i] = -delta;
  }
  ZMat rows;
  for (const auto& k : integer_kernel(sys)) rows.emplace_back(k.begin(), k.begin() + n0);
  return hnf_ideal(S, rows, a.norm);
}

FormLattice ideal_lattice(const NfIdeal& a) {
  const FieldDescriptor& K = *a.field;
  if (!K.has_t2()) throw std::logic_error("field " + K.name + " has no exact T2 form");
  std::vector<std::vector<i128>> rows;
  for (const auto& r : a.hnf) {
    std::vector<i128> v;
    for (const auto& x : r) {
      if (!x.fits_slong_p()) throw std::overflow_error("ideal basis entry exceeds 64 bits");
      v.push_back(x.get_si());
    }
    rows.push_back(std::move(v));
  }
  FormLattice L(std::move(rows), K.t2, K.n);
  L.lll();
  return L;
}

std::optional<NfElement> is_principal_with_generator(const NfIdeal& a, PrincipalStats* stats) {
  const FieldDescriptor& K = *a.field;
  int n = K.n;
  std::vector<long double> delta(n, 0);
  for (const auto& u : fundamental_units(K)) {
    auto e = embeddings(u);
    for (int i = 0; i < n; ++i) delta[i] += 0.5L * std::fabs(std::log(std::abs(e[i])));
  }
  long double base = std::pow(static_cast<long double>(a.norm.get_d()), 2.0L / n);
  long double bound = 0;
  for (int i = 0; i < n; ++i) bound += base * std::exp(2 * delta[i]);
  bound = bound * (1 + 1e-9L) + 1;
  if (bound > 1e30L) throw std::overflow_error("principal ideal search bound too large");
  if (stats) stats->bound = bound;
  FormLattice L = ideal_lattice(a);
  std::optional<NfElement> found;
  mpz_class target = a.norm;
  std::vector<std::pair<i128, std::vector<i128>>> cands;
  L.enumerate(static_cast<i128>(bound), [&](const std::vector<i128>& v, i128 val) { cands.emplace_back(val, v); });
  std::sort(cands.begin(), cands.end());
  for (const auto& [val, v] : cands) {
    if (stats) ++stats->candidates;
    ZVec z;
    for (i128 t : v) z.push_back(mpz_class(i128_to_string(t)));
    NfElement x = elem(K, z);
    if (abs(norm(x)) == mpq_class(target)) return x;
  }
  return std::nullopt;
}

}  // namespace pfav
