// Number fields given by configured integral bases: element arithmetic,
// embeddings, units and the degree e(k, F) of F intersected with Q(zeta_k).
#pragma once

#include <complex>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "pfav/arith.hpp"

namespace pfav {

using ZVec = std::vector<mpz_class>;
using QVec = std::vector<mpq_class>;
using ZMat = std::vector<ZVec>;  // row-major
using QMat = std::vector<QVec>;
using cld = std::complex<long double>;

struct AbelianData {
  u64 conductor = 1;
  std::vector<u64> subgroup;  // sorted elements of H in (Z/f)^*
};

struct FieldDescriptor {
  std::string name;
  ZPoly poly;
  int n = 0;
  QMat basis;          // row j: power-basis coordinates of basis element j
  QMat basis_inverse;  // column m: integral-basis coordinates of theta^m
  mpz_class discriminant;
  mpz_class index;
  int r1 = 0, r2 = 0;
  int class_number = 1;
  int torsion = 2;
  std::vector<ZVec> units;
  std::vector<ZMat> automorphisms;  // n x n, column j is the image of basis element j
  std::optional<AbelianData> abelian;
  std::optional<AbelianData> resolvent;

  std::optional<int> conj;  // index into automorphisms
  std::string real_subfield;
  ZMat real_embedding;  // n x g
  std::vector<std::pair<std::string, ZMat>> cm_subfields;
  int h_sigma_hat = 1;
  int h_k_hat = 1;
  std::string hypothesis_star;
  int embedding_precision_bits = 64;

  std::vector<i64> mult;    // structure constants, mult[(i*n+j)*n+l]
  std::vector<i64> traces;  // Tr(b_j)
  std::vector<i64> t2;      // exact T2 Gram matrix (CM or totally real fields)
  std::vector<cld> roots;   // real roots ascending, then pairs (z, conj z) with Im z > 0
  std::vector<std::vector<cld>> emb;  // emb[i][j] = sigma_i(b_j)

  int aut_order() const { return static_cast<int>(automorphisms.size()); }
  bool totally_real() const { return r2 == 0; }
  bool is_cm() const { return conj.has_value(); }
  bool has_t2() const { return !t2.empty(); }
  bool is_abelian() const;
  i64 m(int i, int j, int l) const { return mult[(static_cast<size_t>(i) * n + j) * n + l]; }
};

// Element with rational coordinates over the integral basis of `field`.
struct NfElement {
  const FieldDescriptor* field = nullptr;
  QVec c;

  bool integral() const;
  bool is_zero() const;
  bool is_rational() const;  // lies in Q
  ZVec coords() const;       // integral coordinates; throws if not integral
  std::string to_string() const;
  friend bool operator==(const NfElement& a, const NfElement& b) { return a.field == b.field && a.c == b.c; }
  friend bool operator<(const NfElement& a, const NfElement& b) { return a.c < b.c; }
};

NfElement elem(const FieldDescriptor& K, const ZVec& coords);
NfElement elem(const FieldDescriptor& K, const std::vector<i64>& coords);
NfElement elem_rational(const FieldDescriptor& K, const mpq_class& v);
NfElement from_power_basis(const FieldDescriptor& K, const QVec& pb);
QVec to_power_basis(const NfElement& x);
NfElement theta(const FieldDescriptor& K);

NfElement operator+(const NfElement& a, const NfElement& b);
NfElement operator-(const NfElement& a, const NfElement& b);
NfElement operator-(const NfElement& a);
NfElement operator*(const NfElement& a, const NfElement& b);
NfElement operator*(const mpq_class& s, const NfElement& a);
NfElement pow(const NfElement& a, long e);
NfElement inverse(const NfElement& a);
NfElement apply_automorphism(const NfElement& x, int idx);

QMat mult_matrix(const NfElement& x);  // column j = x * b_j
mpq_class norm(const NfElement& x);
mpq_class trace(const NfElement& x);
QPoly charpoly(const NfElement& x);  // degree n, monic
QPoly minimal_polynomial_q(const NfElement& x);
ZPoly minimal_polynomial(const NfElement& x);  // integral x only
std::vector<cld> embeddings(const NfElement& x);

// Exact T2 value of integral coordinates; needs K.has_t2().
i128 t2_exact(const FieldDescriptor& K, const std::vector<i128>& x);

// Config loading. A file holds sections "[Name]" followed by "key = value".
FieldDescriptor load_field(const std::string& config_text);

class FieldRegistry {
 public:
  static FieldRegistry load_file(const std::string& path);
  static FieldRegistry load_text(const std::string& text);
  const FieldDescriptor& get(const std::string& name) const;
  bool contains(const std::string& name) const { return fields_.count(name) != 0; }
  std::vector<std::string> names() const { return order_; }
  std::string digest() const { return digest_; }

 private:
  std::map<std::string, std::unique_ptr<FieldDescriptor>> fields_;
  std::vector<std::string> order_;
  std::string digest_;
};

std::vector<NfElement> torsion_units(const FieldDescriptor& K);
std::vector<NfElement> fundamental_units(const FieldDescriptor& K);
NfElement unit_reduce(const NfElement& x);
int intersection_degree_e(int k, const FieldDescriptor& F);

// Determinant of a square rational matrix.
mpq_class determinant(QMat a);

}  // namespace pfav
