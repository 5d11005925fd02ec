// Lattices in Z^n under an exact integer quadratic form: LLL reduction with
// exact basis updates and Fincke-Pohst enumeration with exact acceptance.
#pragma once

#include <functional>
#include <vector>

#include "pfav/arith.hpp"

namespace pfav {

// Overflow-checked 128-bit arithmetic; throws std::overflow_error.
i128 checked_mul(i128 a, i128 b);
i128 checked_add(i128 a, i128 b);
std::string i128_to_string(i128 v);

class FormLattice {
 public:
  // basis: linearly independent vectors of length n; q: n x n symmetric, row-major.
  FormLattice(std::vector<std::vector<i128>> basis, std::vector<i64> q, int n);

  void lll(long double delta = 0.99L);

  // Visits every nonzero lattice vector v with Q(v) <= bound, both v and -v.
  void enumerate(i128 bound, const std::function<void(const std::vector<i128>&, i128)>& visit) const;

  const std::vector<std::vector<i128>>& basis() const { return b_; }
  i128 gram(int i, int j) const { return g_[i * m_ + j]; }
  int rank() const { return m_; }

 private:
  void recompute_gram();
  void gso(std::vector<long double>& mu, std::vector<long double>& bstar) const;

  std::vector<std::vector<i128>> b_;
  std::vector<i64> q_;
  int n_;
  int m_;
  std::vector<i128> g_;
};

}  // namespace pfav
