#include "pfav/numfield.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "pfav/lattice.hpp"

namespace pfav {

namespace {

[[noreturn]] void fail(const std::string& field, const std::string& what) {
  throw std::runtime_error("field " + field + ": " + what);
}

std::string strip(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

mpq_class parse_q(const std::string& tok) {
  mpq_class v;
  if (v.set_str(tok, 10) != 0) throw std::invalid_argument("bad rational '" + tok + "'");
  v.canonicalize();
  return v;
}

std::vector<std::string> tokens(const std::string& s) {
  std::istringstream is(s);
  std::vector<std::string> out;
  std::string t;
  while (is >> t) out.push_back(t);
  return out;
}

std::vector<std::vector<mpq_class>> parse_rows(const std::string& v) {
  std::vector<std::vector<mpq_class>> rows;
  std::string cur;
  std::istringstream is(v);
  while (std::getline(is, cur, '|')) {
    std::vector<mpq_class> row;
    for (const auto& t : tokens(cur)) row.push_back(parse_q(t));
    rows.push_back(std::move(row));
  }
  return rows;
}

ZVec to_zvec(const std::vector<mpq_class>& row, const std::string& name, const std::string& key) {
  ZVec z;
  for (const auto& q : row) {
    if (q.get_den() != 1) fail(name, key + " entries must be integers");
    z.push_back(q.get_num());
  }
  return z;
}

// Solves a x = b over Q; nullopt when a is singular.
std::optional<QVec> solve(QMat a, QVec b) {
  int n = static_cast<int>(a.size());
  for (int col = 0; col < n; ++col) {
    int piv = -1;
    for (int r = col; r < n; ++r)
      if (a[r][col] != 0) {
        piv = r;
        break;
      }
    if (piv < 0) return std::nullopt;
    std::swap(a[piv], a[col]);
    std::swap(b[piv], b[col]);
    for (int r = 0; r < n; ++r) {
      if (r == col || a[r][col] == 0) continue;
      mpq_class f = a[r][col] / a[col][col];
      for (int c = col; c < n; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  for (int i = 0; i < n; ++i) b[i] /= a[i][i];
  return b;
}

QMat inverse_matrix(const QMat& a) {
  int n = static_cast<int>(a.size());
  QMat inv(n, QVec(n));
  for (int j = 0; j < n; ++j) {
    QVec e(n, 0);
    e[j] = 1;
    auto col = solve(a, e);
    if (!col) throw std::domain_error("singular matrix");
    for (int i = 0; i < n; ++i) inv[i][j] = (*col)[i];
  }
  return inv;
}

// Power-basis product reduced modulo the monic defining polynomial.
QVec pb_mul(const QVec& a, const QVec& b, const ZPoly& f) {
  int n = f.degree();
  QVec prod(2 * n - 1, 0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) prod[i + j] += a[i] * b[j];
  for (int d = 2 * n - 2; d >= n; --d) {
    if (prod[d] == 0) continue;
    mpq_class t = prod[d];
    for (int i = 0; i <= n; ++i) prod[d - n + i] -= t * mpq_class(f.c[i]);
  }
  prod.resize(n);
  return prod;
}

QVec to_integral(const FieldDescriptor& K, const QVec& pb) {
  QVec w(K.n, 0);
  for (int i = 0; i < K.n; ++i)
    for (int m = 0; m < K.n; ++m) w[i] += K.basis_inverse[i][m] * pb[m];
  return w;
}

// Aberth iteration with Newton polishing in long double.
std::vector<cld> complex_roots(const ZPoly& f) {
  int n = f.degree();
  std::vector<cld> z(n);
  if (n == 1) {
    z[0] = cld(-f.c[0].get_d(), 0);
    return z;
  }
  long double bound = 0;
  for (int i = 0; i < n; ++i) bound = std::max(bound, std::fabs(static_cast<long double>(f.c[i].get_d())));
  bound = 1 + bound;
  for (int i = 0; i < n; ++i) {
    long double ang = 2.0L * M_PIl * (i + 0.25L) / n;
    z[i] = std::polar(0.5L * std::pow(bound, 1.0L / n), ang);
  }
  auto evalp = [&](cld x, cld& d) {
    cld v = 0;
    d = 0;
    for (int i = n; i >= 0; --i) {
      d = d * x + v;
      v = v * x + cld(static_cast<long double>(f.c[i].get_d()), 0);
    }
    return v;
  };
  for (int it = 0; it < 500; ++it) {
    long double moved = 0;
    for (int i = 0; i < n; ++i) {
      cld d;
      cld v = evalp(z[i], d);
      if (std::abs(v) == 0) continue;
      cld ratio = v / d;
      cld s = 0;
      for (int j = 0; j < n; ++j)
        if (j != i) s += 1.0L / (z[i] - z[j]);
      cld step = ratio / (1.0L - ratio * s);
      z[i] -= step;
      moved = std::max(moved, std::abs(step) / (1 + std::abs(z[i])));
    }
    if (moved < 1e-18L) break;
  }
  for (auto& x : z)
    for (int it = 0; it < 3; ++it) {
      cld d;
      cld v = evalp(x, d);
      if (std::abs(d) > 0) x -= v / d;
    }
  return z;
}

void order_roots(std::vector<cld>& z, int& r1, int& r2) {
  std::vector<long double> reals;
  std::vector<cld> upper;
  for (auto x : z) {
    long double tol = 1e-12L * (1 + std::abs(x));
    if (std::fabs(x.imag()) < tol) reals.push_back(x.real());
    else if (x.imag() > 0) upper.push_back(x);
  }
  std::sort(reals.begin(), reals.end());
  std::sort(upper.begin(), upper.end(), [](cld a, cld b) { return a.real() < b.real(); });
  r1 = static_cast<int>(reals.size());
  r2 = static_cast<int>(upper.size());
  z.clear();
  for (auto v : reals) z.emplace_back(v, 0);
  for (auto u : upper) {
    z.push_back(u);
    z.push_back(std::conj(u));
  }
}

ZMat parse_square(const std::vector<mpq_class>& flat, int rows, int cols, const std::string& name, const std::string& key) {
  if (static_cast<int>(flat.size()) != rows * cols) fail(name, key + " has wrong size");
  ZVec z = to_zvec(flat, name, key);
  ZMat m(rows, ZVec(cols));
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m[i][j] = z[i * cols + j];
  return m;
}

NfElement apply_matrix(const FieldDescriptor& K, const ZMat& a, const QVec& x) {
  NfElement r{&K, QVec(K.n, 0)};
  for (int i = 0; i < K.n; ++i)
    for (size_t j = 0; j < x.size(); ++j) r.c[i] += mpq_class(a[i][j]) * x[j];
  return r;
}

AbelianData parse_abelian(const std::string& cond, const std::string& sub, const std::string& name) {
  AbelianData a;
  a.conductor = std::stoull(cond);
  if (a.conductor == 0) fail(name, "conductor must be positive");
  for (const auto& t : tokens(sub)) a.subgroup.push_back(std::stoull(t) % a.conductor);
  std::sort(a.subgroup.begin(), a.subgroup.end());
  a.subgroup.erase(std::unique(a.subgroup.begin(), a.subgroup.end()), a.subgroup.end());
  std::set<u64> h(a.subgroup.begin(), a.subgroup.end());
  if (!h.count(1 % a.conductor)) fail(name, "abelian subgroup must contain 1");
  for (u64 x : h) {
    if (std::gcd(x, a.conductor) != 1 && a.conductor > 1) fail(name, "abelian subgroup element not a unit");
    for (u64 y : h)
      if (!h.count(static_cast<u64>(static_cast<u128>(x) * y % a.conductor)))
        fail(name, "abelian subgroup not closed under multiplication");
  }
  return a;
}

void derive(FieldDescriptor& K) {
  const std::string& name = K.name;
  int n = K.n;
  if (static_cast<int>(K.basis.size()) != n) fail(name, "basis needs n rows");
  for (const auto& row : K.basis)
    if (static_cast<int>(row.size()) != n) fail(name, "basis rows need n entries");
  QMat bt(n, QVec(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) bt[i][j] = K.basis[j][i];
  try {
    K.basis_inverse = inverse_matrix(bt);
  } catch (const std::domain_error&) {
    fail(name, "basis is singular");
  }
  mpq_class detb = determinant(K.basis);
  if (abs(detb) * mpq_class(K.index) != 1) fail(name, "index does not match the basis determinant");

  K.mult.assign(static_cast<size_t>(n) * n * n, 0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      QVec w = to_integral(K, pb_mul(K.basis[i], K.basis[j], K.poly));
      for (int l = 0; l < n; ++l) {
        if (w[l].get_den() != 1 || !w[l].get_num().fits_slong_p()) fail(name, "basis is not closed under multiplication");
        K.mult[(static_cast<size_t>(i) * n + j) * n + l] = w[l].get_num().get_si();
      }
    }

  // Newton sums for Tr(theta^m)
  std::vector<mpz_class> pw(n, 0);
  pw[0] = n;
  for (int m = 1; m < n; ++m) {
    mpz_class s = -mpz_class(m) * K.poly.c[n - m];
    for (int i = 1; i < m; ++i) s -= K.poly.c[n - i] * pw[m - i];
    pw[m] = s;
  }
  K.traces.assign(n, 0);
  for (int j = 0; j < n; ++j) {
    mpq_class t = 0;
    for (int m = 0; m < n; ++m) t += K.basis[j][m] * mpq_class(pw[m]);
    if (t.get_den() != 1) fail(name, "nonintegral trace");
    K.traces[j] = t.get_num().get_si();
  }
  QMat tr(n, QVec(n, 0));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      i64 s = 0;
      for (int l = 0; l < n; ++l) s += K.m(i, j, l) * K.traces[l];
      tr[i][j] = s;
    }
  if (determinant(tr) != mpq_class(K.discriminant)) fail(name, "discriminant mismatch");

  int r1 = 0, r2 = 0;
  K.roots = complex_roots(K.poly);
  order_roots(K.roots, r1, r2);
  if (r1 != K.r1 || r2 != K.r2) fail(name, "signature mismatch");
  K.emb.assign(n, std::vector<cld>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      cld acc = 0, pwr = 1;
      for (int m = 0; m < n; ++m) {
        acc += static_cast<long double>(K.basis[j][m].get_d()) * pwr;
        pwr *= K.roots[i];
      }
      K.emb[i][j] = acc;
    }

  NfElement one = elem_rational(K, 1);
  NfElement th = theta(K);
  for (size_t a = 0; a < K.automorphisms.size(); ++a) {
    const ZMat& A = K.automorphisms[a];
    if (static_cast<int>(A.size()) != n) fail(name, "automorphism has wrong size");
    if (!(apply_matrix(K, A, one.c) == one)) fail(name, "automorphism does not fix 1");
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        NfElement bi = elem_rational(K, 0), bj = elem_rational(K, 0);
        bi.c[i] = 1;
        bj.c[j] = 1;
        NfElement lhs = apply_matrix(K, A, (bi * bj).c);
        NfElement rhs = apply_matrix(K, A, bi.c) * apply_matrix(K, A, bj.c);
        if (!(lhs == rhs)) fail(name, "automorphism is not multiplicative");
      }
    NfElement st = apply_matrix(K, A, th.c);
    NfElement acc = elem_rational(K, 0);
    for (int i = K.poly.degree(); i >= 0; --i) acc = acc * st + elem_rational(K, mpq_class(K.poly.c[i]));
    if (!acc.is_zero()) fail(name, "automorphism does not map theta to a root");
  }

  if (K.conj) {
    if (*K.conj < 0 || *K.conj >= K.aut_order()) fail(name, "conj index out of range");
    if (K.r1 != 0) fail(name, "CM field must be totally imaginary");
    const ZMat& C = K.automorphisms[*K.conj];
    for (int j = 0; j < n; ++j) {
      QVec e(n, 0);
      e[j] = 1;
      NfElement x = apply_matrix(K, C, e);
      if (!(apply_matrix(K, C, x.c) == NfElement{&K, e})) fail(name, "conj is not an involution");
      auto ex = embeddings(x);
      for (int i = 0; i < n; ++i)
        if (std::abs(ex[i] - std::conj(K.emb[i][j])) > 1e-9L * (1 + std::abs(K.emb[i][j])))
          fail(name, "conj does not commute with complex conjugation");
    }
  }

  if (K.totally_real() || K.conj) {
    K.t2.assign(static_cast<size_t>(n) * n, 0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        QVec e(n, 0);
        e[j] = 1;
        QVec cj = K.conj ? apply_matrix(K, K.automorphisms[*K.conj], e).c : e;
        i64 s = 0;
        for (int l = 0; l < n; ++l) {
          if (cj[l] == 0) continue;
          i64 cl = cj[l].get_num().get_si();
          for (int t = 0; t < n; ++t) s += cl * K.m(i, l, t) * K.traces[t];
        }
        K.t2[i * n + j] = s;
      }
  }

  if (static_cast<int>(K.units.size()) != K.r1 + K.r2 - 1) fail(name, "unit rank does not match the signature");
  for (const auto& u : K.units) {
    if (static_cast<int>(u.size()) != n) fail(name, "unit has wrong length");
    mpq_class nu = norm(elem(K, u));
    if (nu != 1 && nu != -1) fail(name, "configured unit does not have norm +-1");
  }
  if (K.has_t2() && static_cast<int>(torsion_units(K).size()) != K.torsion)
    fail(name, "torsion order does not match the roots of unity");
  if (K.abelian && K.abelian->conductor > 0) {
    u64 phi = euler_phi(K.abelian->conductor);
    if (phi % K.abelian->subgroup.size() != 0) fail(name, "abelian subgroup order does not divide phi(f)");
    if (static_cast<u64>(n) % (phi / K.abelian->subgroup.size()) != 0)
      fail(name, "abelian subfield degree does not divide n");
  }
}

u64 fnv1a(const std::string& s) {
  u64 h = 1469598103934665603ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

// Checks that E maps the basis of `sub` into K as a ring homomorphism.
void check_embedding(const FieldDescriptor& K, const FieldDescriptor& sub, const ZMat& E, const std::string& what) {
  int g = sub.n;
  auto img = [&](const QVec& x) {
    NfElement r{&K, QVec(K.n, 0)};
    for (int i = 0; i < K.n; ++i)
      for (int j = 0; j < g; ++j) r.c[i] += mpq_class(E[i][j]) * x[j];
    return r;
  };
  if (!(img(elem_rational(sub, 1).c) == elem_rational(K, 1))) fail(K.name, what + " does not map 1 to 1");
  for (int i = 0; i < g; ++i)
    for (int j = 0; j < g; ++j) {
      QVec ei(g, 0), ej(g, 0);
      ei[i] = 1;
      ej[j] = 1;
      NfElement prod = NfElement{&sub, ei} * NfElement{&sub, ej};
      if (!(img(prod.c) == img(ei) * img(ej))) fail(K.name, what + " is not multiplicative");
    }
  if (K.conj && what == "real_embedding") {
    for (int j = 0; j < g; ++j) {
      QVec ej(g, 0);
      ej[j] = 1;
      NfElement x = img(ej);
      if (!(apply_automorphism(x, *K.conj) == x)) fail(K.name, "real_embedding image is not fixed by conj");
    }
  }
}

}  // namespace

bool FieldDescriptor::is_abelian() const {
  if (!abelian) return false;
  return euler_phi(abelian->conductor) / abelian->subgroup.size() == static_cast<u64>(n);
}

bool NfElement::integral() const {
  return std::all_of(c.begin(), c.end(), [](const mpq_class& v) { return v.get_den() == 1; });
}

bool NfElement::is_zero() const {
  return std::all_of(c.begin(), c.end(), [](const mpq_class& v) { return v == 0; });
}

bool NfElement::is_rational() const {
  if (is_zero()) return true;
  QVec pb = to_power_basis(*this);
  for (size_t i = 1; i < pb.size(); ++i)
    if (pb[i] != 0) return false;
  return true;
}

ZVec NfElement::coords() const {
  if (!integral()) throw std::domain_error("element is not integral");
  ZVec z;
  for (const auto& v : c) z.push_back(v.get_num());
  return z;
}

std::string NfElement::to_string() const {
  std::ostringstream os;
  os << "[";
  for (size_t i = 0; i < c.size(); ++i) os << (i ? ", " : "") << c[i];
  os << "]";
  return os.str();
}

NfElement elem(const FieldDescriptor& K, const ZVec& coords) {
  NfElement x{&K, QVec(K.n, 0)};
  for (size_t i = 0; i < coords.size() && i < static_cast<size_t>(K.n); ++i) x.c[i] = coords[i];
  return x;
}

NfElement elem(const FieldDescriptor& K, const std::vector<i64>& coords) {
  NfElement x{&K, QVec(K.n, 0)};
  for (size_t i = 0; i < coords.size() && i < static_cast<size_t>(K.n); ++i) x.c[i] = static_cast<long>(coords[i]);
  return x;
}

NfElement elem_rational(const FieldDescriptor& K, const mpq_class& v) {
  NfElement x{&K, QVec(K.n, 0)};
  for (int i = 0; i < K.n; ++i) x.c[i] = K.basis_inverse[i][0] * v;
  return x;
}

NfElement from_power_basis(const FieldDescriptor& K, const QVec& pb) {
  QVec v(K.n, 0);
  for (size_t i = 0; i < pb.size() && i < static_cast<size_t>(K.n); ++i) v[i] = pb[i];
  return NfElement{&K, to_integral(K, v)};
}

QVec to_power_basis(const NfElement& x) {
  const FieldDescriptor& K = *x.field;
  QVec pb(K.n, 0);
  for (int j = 0; j < K.n; ++j) {
    if (x.c[j] == 0) continue;
    for (int m = 0; m < K.n; ++m) pb[m] += x.c[j] * K.basis[j][m];
  }
  return pb;
}

NfElement theta(const FieldDescriptor& K) {
  QVec pb(K.n, 0);
  if (K.n == 1) pb[0] = -mpq_class(K.poly.c[0]);
  else pb[1] = 1;
  return NfElement{&K, to_integral(K, pb)};
}

static void same_field(const NfElement& a, const NfElement& b) {
  if (a.field != b.field) throw std::invalid_argument("operands lie in different fields");
}

NfElement operator+(const NfElement& a, const NfElement& b) {
  same_field(a, b);
  NfElement r = a;
  for (size_t i = 0; i < r.c.size(); ++i) r.c[i] += b.c[i];
  return r;
}

NfElement operator-(const NfElement& a, const NfElement& b) {
  same_field(a, b);
  NfElement r = a;
  for (size_t i = 0; i < r.c.size(); ++i) r.c[i] -= b.c[i];
  return r;
}

NfElement operator-(const NfElement& a) {
  NfElement r = a;
  for (auto& v : r.c) v = -v;
  return r;
}

NfElement operator*(const NfElement& a, const NfElement& b) {
  same_field(a, b);
  const FieldDescriptor& K = *a.field;
  int n = K.n;
  NfElement r{&K, QVec(n, 0)};
  for (int i = 0; i < n; ++i) {
    if (a.c[i] == 0) continue;
    for (int j = 0; j < n; ++j) {
      if (b.c[j] == 0) continue;
      mpq_class t = a.c[i] * b.c[j];
      for (int l = 0; l < n; ++l) {
        i64 m = K.m(i, j, l);
        if (m) r.c[l] += t * static_cast<long>(m);
      }
    }
  }
  return r;
}

NfElement operator*(const mpq_class& s, const NfElement& a) {
  NfElement r = a;
  for (auto& v : r.c) v *= s;
  return r;
}

NfElement pow(const NfElement& a, long e) {
  if (e < 0) return pow(inverse(a), -e);
  NfElement r = elem_rational(*a.field, 1), b = a;
  while (e) {
    if (e & 1) r = r * b;
    e >>= 1;
    if (e) b = b * b;
  }
  return r;
}

NfElement inverse(const NfElement& a) {
  auto sol = solve(mult_matrix(a), elem_rational(*a.field, 1).c);
  if (!sol) throw std::domain_error("inverse of zero");
  return NfElement{a.field, *sol};
}

NfElement apply_automorphism(const NfElement& x, int idx) {
  const FieldDescriptor& K = *x.field;
  if (idx < 0 || idx >= K.aut_order()) throw std::out_of_range("automorphism index");
  return apply_matrix(K, K.automorphisms[idx], x.c);
}

QMat mult_matrix(const NfElement& x) {
  const FieldDescriptor& K = *x.field;
  int n = K.n;
  QMat m(n, QVec(n, 0));
  for (int i = 0; i < n; ++i) {
    if (x.c[i] == 0) continue;
    for (int j = 0; j < n; ++j)
      for (int l = 0; l < n; ++l) {
        i64 v = K.m(i, j, l);
        if (v) m[l][j] += x.c[i] * static_cast<long>(v);
      }
  }
  return m;
}

mpq_class norm(const NfElement& x) { return determinant(mult_matrix(x)); }

mpq_class trace(const NfElement& x) {
  mpq_class t = 0;
  for (int j = 0; j < x.field->n; ++j) t += x.c[j] * static_cast<long>(x.field->traces[j]);
  return t;
}

QPoly charpoly(const NfElement& x) {
  // Faddeev-LeVerrier
  QMat a = mult_matrix(x);
  int n = static_cast<int>(a.size());
  std::vector<mpq_class> c(n + 1, 0);
  c[n] = 1;
  QMat mk(n, QVec(n, 0));
  for (int k = 1; k <= n; ++k) {
    QMat next(n, QVec(n, 0));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        mpq_class s = 0;
        for (int l = 0; l < n; ++l)
          if (a[i][l] != 0 && mk[l][j] != 0) s += a[i][l] * mk[l][j];
        next[i][j] = s;
      }
    for (int i = 0; i < n; ++i) next[i][i] += c[n - k + 1];
    mk = std::move(next);
    mpq_class tr = 0;
    for (int i = 0; i < n; ++i)
      for (int l = 0; l < n; ++l) tr += a[i][l] * mk[l][i];
    c[n - k] = -tr / k;
  }
  return QPoly(std::move(c));
}

QPoly minimal_polynomial_q(const NfElement& x) {
  QPoly cp = charpoly(x);
  QPoly g = poly_gcd(cp, cp.derivative());
  QPoly q, r;
  poly_divrem(cp, g, q, r);
  mpq_class l = q.lead();
  for (auto& v : q.c) v /= l;
  return q;
}

ZPoly minimal_polynomial(const NfElement& x) {
  if (!x.integral()) throw std::domain_error("minimal_polynomial needs an integral element");
  auto z = to_zpoly(minimal_polynomial_q(x));
  if (!z) throw std::logic_error("integral element with nonintegral minimal polynomial");
  return *z;
}

std::vector<cld> embeddings(const NfElement& x) {
  const FieldDescriptor& K = *x.field;
  std::vector<cld> out(K.n, 0);
  for (int j = 0; j < K.n; ++j) {
    if (x.c[j] == 0) continue;
    long double v = x.c[j].get_d();
    for (int i = 0; i < K.n; ++i) out[i] += v * K.emb[i][j];
  }
  return out;
}

i128 t2_exact(const FieldDescriptor& K, const std::vector<i128>& x) {
  if (!K.has_t2()) throw std::logic_error("field has no exact T2 form");
  i128 s = 0;
  for (int i = 0; i < K.n; ++i) {
    if (!x[i]) continue;
    for (int j = 0; j < K.n; ++j)
      if (x[j]) s = checked_add(s, checked_mul(checked_mul(x[i], x[j]), K.t2[i * K.n + j]));
  }
  return s;
}

FieldDescriptor load_field(const std::string& config_text) {
  FieldDescriptor K;
  std::map<std::string, std::string> kv;
  std::vector<std::string> cm_subs;
  std::istringstream is(config_text);
  std::string line;
  while (std::getline(is, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = strip(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']' || !K.name.empty()) throw std::runtime_error("bad section header '" + line + "'");
      K.name = strip(line.substr(1, line.size() - 2));
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos) throw std::runtime_error("expected key = value, got '" + line + "'");
    std::string key = strip(line.substr(0, eq)), val = strip(line.substr(eq + 1));
    if (key == "cm_subfield") cm_subs.push_back(val);
    else kv[key] = val;
  }
  if (K.name.empty()) K.name = kv.count("name") ? kv["name"] : "unnamed";
  const std::string& name = K.name;
  auto need = [&](const std::string& k) -> const std::string& {
    auto it = kv.find(k);
    if (it == kv.end()) fail(name, "missing key " + k);
    return it->second;
  };
  static const std::set<std::string> known = {
      "name", "poly", "basis", "discriminant", "signature", "index", "class_number", "torsion", "units",
      "automorphisms", "abelian_conductor", "abelian_subgroup", "resolvent_conductor", "resolvent_subgroup",
      "conj", "real_subfield", "real_embedding", "h_sigma_hat", "h_k_hat", "hypothesis_star", "embedding_precision"};
  for (const auto& [k, v] : kv)
    if (!known.count(k)) fail(name, "unknown key " + k);

  try {
    ZVec pc;
    for (const auto& t : tokens(need("poly"))) pc.push_back(mpz_class(t, 10));
    K.poly = ZPoly(pc);
    K.n = K.poly.degree();
    if (K.n < 1 || K.poly.lead() != 1) fail(name, "defining polynomial must be monic of positive degree");
    K.basis = parse_rows(need("basis"));
    K.discriminant = mpz_class(need("discriminant"));
    auto sig = tokens(need("signature"));
    if (sig.size() != 2) fail(name, "signature needs two entries");
    K.r1 = std::stoi(sig[0]);
    K.r2 = std::stoi(sig[1]);
    if (K.r1 + 2 * K.r2 != K.n) fail(name, "signature inconsistent with degree");
    K.index = mpz_class(need("index"));
    K.class_number = std::stoi(need("class_number"));
    K.torsion = std::stoi(need("torsion"));
    if (kv.count("units") && !strip(kv["units"]).empty())
      for (const auto& row : parse_rows(kv["units"])) K.units.push_back(to_zvec(row, name, "units"));
    for (const auto& row : parse_rows(need("automorphisms")))
      K.automorphisms.push_back(parse_square(row, K.n, K.n, name, "automorphisms"));
    if (kv.count("abelian_conductor"))
      K.abelian = parse_abelian(kv["abelian_conductor"], need("abelian_subgroup"), name);
    if (kv.count("resolvent_conductor"))
      K.resolvent = parse_abelian(kv["resolvent_conductor"], need("resolvent_subgroup"), name);
    if (kv.count("conj")) K.conj = std::stoi(kv["conj"]);
    if (kv.count("real_subfield")) {
      K.real_subfield = kv["real_subfield"];
      auto flat = parse_rows(need("real_embedding"));
      if (flat.size() != 1 || K.n % 2) fail(name, "real_embedding must be a single n x g matrix");
      K.real_embedding = parse_square(flat[0], K.n, K.n / 2, name, "real_embedding");
    }
    for (const auto& s : cm_subs) {
      auto colon = s.find(':');
      if (colon == std::string::npos) fail(name, "cm_subfield needs 'Name : matrix'");
      auto flat = parse_rows(s.substr(colon + 1));
      if (flat.size() != 1 || flat[0].size() % K.n) fail(name, "cm_subfield matrix has wrong size");
      int cols = static_cast<int>(flat[0].size()) / K.n;
      K.cm_subfields.emplace_back(strip(s.substr(0, colon)), parse_square(flat[0], K.n, cols, name, "cm_subfield"));
    }
    if (kv.count("h_sigma_hat")) K.h_sigma_hat = std::stoi(kv["h_sigma_hat"]);
    if (kv.count("h_k_hat")) K.h_k_hat = std::stoi(kv["h_k_hat"]);
    if (kv.count("hypothesis_star")) K.hypothesis_star = kv["hypothesis_star"];
    if (kv.count("embedding_precision")) K.embedding_precision_bits = std::stoi(kv["embedding_precision"]);
  } catch (const std::invalid_argument& e) {
    fail(name, e.what());
  }
  derive(K);
  return K;
}

FieldRegistry FieldRegistry::load_text(const std::string& text) {
  FieldRegistry reg;
  std::istringstream is(text);
  std::string line, cur;
  auto flush = [&]() {
    if (strip(cur).empty()) return;
    auto f = std::make_unique<FieldDescriptor>(load_field(cur));
    if (reg.fields_.count(f->name)) throw std::runtime_error("duplicate field " + f->name);
    reg.order_.push_back(f->name);
    reg.fields_[f->name] = std::move(f);
  };
  bool in_section = false;
  while (std::getline(is, line)) {
    std::string s = strip(line);
    if (!s.empty() && s.front() == '[') {
      if (in_section) flush();
      cur.clear();
      in_section = true;
    }
    if (in_section) cur += line + "\n";
  }
  if (in_section) flush();

  for (const auto& name : reg.order_) {
    FieldDescriptor& K = *reg.fields_[name];
    if (!K.real_subfield.empty()) {
      if (!reg.contains(K.real_subfield)) fail(name, "unknown real_subfield " + K.real_subfield);
      const FieldDescriptor& K0 = reg.get(K.real_subfield);
      if (2 * K0.n != K.n || !K0.totally_real()) fail(name, "real_subfield must be totally real of half degree");
      check_embedding(K, K0, K.real_embedding, "real_embedding");
    }
    for (const auto& [sub, E] : K.cm_subfields) {
      if (!reg.contains(sub)) fail(name, "unknown cm_subfield " + sub);
      const FieldDescriptor& S = reg.get(sub);
      if (!S.is_cm() || static_cast<int>(E[0].size()) != S.n) fail(name, "cm_subfield " + sub + " is not a CM field of matching degree");
      check_embedding(K, S, E, "cm_subfield " + sub);
      if (K.conj)
        for (int j = 0; j < S.n; ++j) {
          QVec e(S.n, 0);
          e[j] = 1;
          NfElement x{&K, QVec(K.n, 0)}, y{&K, QVec(K.n, 0)};
          NfElement cs = apply_automorphism(NfElement{&S, e}, *S.conj);
          for (int i = 0; i < K.n; ++i) {
            x.c[i] = mpq_class(E[i][j]);
            for (int l = 0; l < S.n; ++l) y.c[i] += mpq_class(E[i][l]) * cs.c[l];
          }
          if (!(apply_automorphism(x, *K.conj) == y)) fail(name, "cm_subfield " + sub + " embedding does not commute with conj");
        }
    }
  }
  std::ostringstream hex;
  hex << std::hex << fnv1a(text);
  reg.digest_ = hex.str();
  return reg;
}

FieldRegistry FieldRegistry::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open field config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return load_text(ss.str());
}

const FieldDescriptor& FieldRegistry::get(const std::string& name) const {
  auto it = fields_.find(name);
  if (it == fields_.end()) throw std::out_of_range("unknown field " + name);
  return *it->second;
}

std::vector<NfElement> torsion_units(const FieldDescriptor& K) {
  if (!K.has_t2()) return {elem_rational(K, 1), elem_rational(K, -1)};
  std::vector<std::vector<i128>> basis(K.n, std::vector<i128>(K.n, 0));
  for (int i = 0; i < K.n; ++i) basis[i][i] = 1;
  FormLattice L(basis, K.t2, K.n);
  L.lll();
  std::vector<NfElement> out;
  L.enumerate(K.n, [&](const std::vector<i128>& v, i128 val) {
    if (val != K.n) return;
    std::vector<i64> c(v.begin(), v.end());
    out.push_back(elem(K, c));
  });
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<NfElement> fundamental_units(const FieldDescriptor& K) {
  std::vector<NfElement> out;
  for (const auto& u : K.units) out.push_back(elem(K, u));
  return out;
}

NfElement unit_reduce(const NfElement& x) {
  const FieldDescriptor& K = *x.field;
  if (x.is_zero()) throw std::domain_error("unit_reduce of zero");
  int rank = static_cast<int>(K.units.size());
  if (rank == 0) return x;
  int places = K.r1 + K.r2;
  auto logs = [&](const NfElement& y) {
    auto e = embeddings(y);
    std::vector<long double> l(places);
    for (int i = 0; i < K.r1; ++i) l[i] = std::log(std::abs(e[i]));
    for (int i = 0; i < K.r2; ++i) l[K.r1 + i] = std::log(std::abs(e[K.r1 + 2 * i]));
    return l;
  };
  auto spread = [&](const NfElement& y) {
    auto l = logs(y);
    long double mean = 0;
    for (int i = 0; i < places; ++i) mean += (i < K.r1 ? 1 : 2) * l[i];
    mean /= K.n;
    long double s = 0;
    for (auto v : l) s = std::max(s, std::fabs(v - mean));
    return s;
  };
  auto units = fundamental_units(K);
  std::vector<std::vector<long double>> ul;
  for (const auto& u : units) ul.push_back(logs(u));
  auto lx = logs(x);
  long double mean = 0;
  for (int i = 0; i < places; ++i) mean += (i < K.r1 ? 1 : 2) * lx[i];
  mean /= K.n;
  // least squares: minimise |lx - mean - sum a_j ul_j|
  std::vector<std::vector<long double>> g(rank, std::vector<long double>(rank + 1, 0));
  for (int a = 0; a < rank; ++a) {
    for (int b = 0; b < rank; ++b)
      for (int i = 0; i < places; ++i) g[a][b] += ul[a][i] * ul[b][i];
    for (int i = 0; i < places; ++i) g[a][rank] += ul[a][i] * (lx[i] - mean);
  }
  for (int c = 0; c < rank; ++c) {
    int piv = c;
    for (int r = c + 1; r < rank; ++r)
      if (std::fabs(g[r][c]) > std::fabs(g[piv][c])) piv = r;
    std::swap(g[piv], g[c]);
    for (int r = 0; r < rank; ++r) {
      if (r == c) continue;
      long double f = g[r][c] / g[c][c];
      for (int cc = c; cc <= rank; ++cc) g[r][cc] -= f * g[c][cc];
    }
  }
  NfElement y = x;
  for (int a = 0; a < rank; ++a) {
    long e = std::lround(g[a][rank] / g[a][a]);
    if (e) y = y * pow(units[a], -e);
  }
  std::vector<NfElement> steps;
  for (const auto& u : units) {
    steps.push_back(u);
    steps.push_back(inverse(u));
  }
  long double best = spread(y);
  for (bool improved = true; improved;) {
    improved = false;
    for (const auto& s : steps) {
      NfElement z = y * s;
      long double v = spread(z);
      if (v < best - 1e-12L) {
        best = v;
        y = z;
        improved = true;
      }
    }
  }
  return y;
}

int intersection_degree_e(int k, const FieldDescriptor& F) {
  if (k < 1) throw std::invalid_argument("k must be positive");
  if (F.n == 1) return 1;
  if (F.abelian) {
    u64 f = F.abelian->conductor;
    u64 m = std::gcd(f, static_cast<u64>(k));
    std::set<u64> sub;
    // subgroup generated by H and the kernel of reduction mod m
    for (u64 h : F.abelian->subgroup)
      for (u64 x = 1; x < std::max<u64>(f, 2); ++x) {
        if (std::gcd(x, f) != 1) continue;
        if (m > 1 && x % m != 1 % m) continue;
        sub.insert(static_cast<u64>(static_cast<u128>(h) * x % std::max<u64>(f, 1)));
      }
    u64 units = f <= 1 ? 1 : euler_phi(f);
    return static_cast<int>(units / std::max<size_t>(sub.size(), 1));
  }
  if (F.n == 2) {
    mpz_class d = F.discriminant;
    return mpz_class(k) % d == 0 ? 2 : 1;
  }
  throw std::runtime_error("field " + F.name + ": intersection degree needs abelian subfield data");
}

mpq_class determinant(QMat a) {
  int n = static_cast<int>(a.size());
  mpq_class det = 1;
  for (int col = 0; col < n; ++col) {
    int piv = -1;
    for (int r = col; r < n; ++r)
      if (a[r][col] != 0) {
        piv = r;
        break;
      }
    if (piv < 0) return 0;
    if (piv != col) {
      std::swap(a[piv], a[col]);
      det = -det;
    }
    det *= a[col][col];
    for (int r = col + 1; r < n; ++r) {
      if (a[r][col] == 0) continue;
      mpq_class f = a[r][col] / a[col][col];
      for (int c = col; c < n; ++c) a[r][c] -= f * a[col][c];
    }
  }
  return det;
}

}  // namespace pfav
