#include "pfav/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pfav {

i128 checked_mul(i128 a, i128 b) {
  i128 r;
  if (__builtin_mul_overflow(a, b, &r)) throw std::overflow_error("128-bit overflow in lattice arithmetic");
  return r;
}

i128 checked_add(i128 a, i128 b) {
  i128 r;
  if (__builtin_add_overflow(a, b, &r)) throw std::overflow_error("128-bit overflow in lattice arithmetic");
  return r;
}

std::string i128_to_string(i128 v) {
  if (v == 0) return "0";
  bool neg = v < 0;
  u128 u = neg ? static_cast<u128>(-(v + 1)) + 1 : static_cast<u128>(v);
  std::string s;
  while (u) {
    s.push_back(static_cast<char>('0' + static_cast<int>(u % 10)));
    u /= 10;
  }
  if (neg) s.push_back('-');
  std::reverse(s.begin(), s.end());
  return s;
}

FormLattice::FormLattice(std::vector<std::vector<i128>> basis, std::vector<i64> q, int n)
    : b_(std::move(basis)), q_(std::move(q)), n_(n), m_(static_cast<int>(b_.size())) {
  recompute_gram();
}

void FormLattice::recompute_gram() {
  g_.assign(static_cast<size_t>(m_) * m_, 0);
  std::vector<i128> qb(n_);
  for (int i = 0; i < m_; ++i) {
    for (int r = 0; r < n_; ++r) {
      i128 acc = 0;
      for (int c = 0; c < n_; ++c)
        if (q_[r * n_ + c] && b_[i][c]) acc = checked_add(acc, checked_mul(q_[r * n_ + c], b_[i][c]));
      qb[r] = acc;
    }
    for (int j = 0; j <= i; ++j) {
      i128 acc = 0;
      for (int r = 0; r < n_; ++r)
        if (b_[j][r] && qb[r]) acc = checked_add(acc, checked_mul(b_[j][r], qb[r]));
      g_[i * m_ + j] = g_[j * m_ + i] = acc;
    }
  }
}

void FormLattice::gso(std::vector<long double>& mu, std::vector<long double>& bstar) const {
  mu.assign(static_cast<size_t>(m_) * m_, 0.0L);
  bstar.assign(m_, 0.0L);
  for (int i = 0; i < m_; ++i) {
    for (int j = 0; j < i; ++j) {
      long double s = static_cast<long double>(g_[i * m_ + j]);
      for (int l = 0; l < j; ++l) s -= mu[j * m_ + l] * mu[i * m_ + l] * bstar[l];
      mu[i * m_ + j] = s / bstar[j];
    }
    long double s = static_cast<long double>(g_[i * m_ + i]);
    for (int l = 0; l < i; ++l) s -= mu[i * m_ + l] * mu[i * m_ + l] * bstar[l];
    bstar[i] = s;
  }
}

void FormLattice::lll(long double delta) {
  if (m_ < 2) return;
  std::vector<long double> mu, bstar;
  int k = 1;
  int guard = 0;
  while (k < m_) {
    if (++guard > 100000) throw std::runtime_error("LLL failed to converge");
    // size reduction of b_k, repeated until the floating coefficients settle
    for (int pass = 0; pass < 8; ++pass) {
      gso(mu, bstar);
      bool changed = false;
      for (int j = k - 1; j >= 0; --j) {
        long double mkj = mu[k * m_ + j];
        if (std::fabs(mkj) <= 0.51L) continue;
        i128 r = static_cast<i128>(std::llround(mkj));
        if (std::fabs(mkj) > 9e18L) throw std::overflow_error("size reduction coefficient too large");
        for (int c = 0; c < n_; ++c) b_[k][c] = checked_add(b_[k][c], checked_mul(-r, b_[j][c]));
        for (int l = 0; l <= j; ++l) mu[k * m_ + l] -= static_cast<long double>(r) * (l == j ? 1.0L : mu[j * m_ + l]);
        changed = true;
      }
      if (!changed) break;
      recompute_gram();
    }
    gso(mu, bstar);
    long double mkk = mu[k * m_ + k - 1];
    if (bstar[k] >= (delta - mkk * mkk) * bstar[k - 1]) {
      ++k;
    } else {
      std::swap(b_[k], b_[k - 1]);
      recompute_gram();
      k = std::max(k - 1, 1);
    }
  }
}

void FormLattice::enumerate(i128 bound, const std::function<void(const std::vector<i128>&, i128)>& visit) const {
  if (bound <= 0 || m_ == 0) return;
  std::vector<long double> mu, bstar;
  gso(mu, bstar);
  for (long double v : bstar)
    if (!(v > 0)) throw std::runtime_error("degenerate lattice in enumeration");
  const long double fbound = static_cast<long double>(bound) * (1.0L + 1e-12L) + 1e-6L;
  std::vector<i64> x(m_, 0);
  std::vector<i128> v(n_);

  auto emit = [&]() {
    bool zero = std::all_of(x.begin(), x.end(), [](i64 t) { return t == 0; });
    if (zero) return;
    i128 val = 0;
    for (int i = 0; i < m_; ++i) {
      if (!x[i]) continue;
      for (int j = 0; j < m_; ++j) {
        if (!x[j]) continue;
        val = checked_add(val, checked_mul(checked_mul(x[i], x[j]), g_[i * m_ + j]));
      }
    }
    if (val > bound) return;
    for (int c = 0; c < n_; ++c) {
      i128 acc = 0;
      for (int i = 0; i < m_; ++i)
        if (x[i]) acc = checked_add(acc, checked_mul(x[i], b_[i][c]));
      v[c] = acc;
    }
    visit(v, val);
  };

  auto rec = [&](auto&& self, int i, long double remaining) -> void {
    long double center = 0;
    for (int j = i + 1; j < m_; ++j) center -= mu[j * m_ + i] * static_cast<long double>(x[j]);
    long double radius = std::sqrt(std::max(0.0L, remaining / bstar[i]));
    i64 lo = static_cast<i64>(std::ceil(center - radius - 1e-9L));
    i64 hi = static_cast<i64>(std::floor(center + radius + 1e-9L));
    for (i64 xi = lo; xi <= hi; ++xi) {
      long double t = static_cast<long double>(xi) - center;
      long double rest = remaining - bstar[i] * t * t;
      if (rest < -1e-9L * fbound) continue;
      x[i] = xi;
      if (i == 0) emit();
      else self(self, i - 1, rest);
    }
    x[i] = 0;
  };
  rec(rec, m_ - 1, fbound);
}

}  // namespace pfav
