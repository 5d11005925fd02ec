#include "pfav/heuristics.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace pfav {

namespace {

double euler_phi_int(int k) { return static_cast<double>(euler_phi(static_cast<u64>(k))); }

void require_range(double a, double b) {
  if (!(a >= 2) || !(b >= a)) throw std::invalid_argument("quadrature needs 2 <= a <= b");
}

}  // namespace

Quadrature quadrature(double s, double t, double a, double b, double tol) {
  require_range(a, b);
  if (a == b) return {};
  auto f = [s, t](double v) { return std::exp((s + 1) * v) / std::pow(v, t); };
  double err = 0;
  double val = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, std::log(a), std::log(b), 20, tol, &err);
  if (err > tol * std::fabs(val) + 1e-300) {
    std::ostringstream os;
    os << "quadrature did not converge: error " << err << " for value " << val;
    throw std::runtime_error(os.str());
  }
  return {val, err};
}

Quadrature log_integral(double x, double tol) {
  if (x <= 2) return {};
  return quadrature(0, 1, 2, x, tol);
}

HeuristicEstimate integral_I(const FieldDescriptor& K, int k, double rho0, double a, double b, double tol) {
  if (!K.is_cm()) throw std::invalid_argument("integral I needs a CM field");
  if (rho0 <= 0) throw std::invalid_argument("rho0 must be positive");
  int g = K.n / 2;
  int e = intersection_degree_e(k, K);
  double c = static_cast<double>(e) * g * K.torsion * K.h_sigma_hat / (K.aut_order() * rho0 * K.h_k_hat);
  Quadrature q = quadrature(rho0 / g - 2, 2, a, b, tol);
  HeuristicEstimate est;
  est.formula_id = "I";
  est.constant = c;
  est.value = c * q.value;
  est.quadrature_error = c * q.error;
  est.ingredients = {{"e", e}, {"g", g}, {"w", K.torsion}, {"h_sigma_hat", K.h_sigma_hat}, {"h_k_hat", K.h_k_hat},
                     {"aut", K.aut_order()}, {"rho0", rho0}};
  return est;
}

HeuristicEstimate integral_J(const FieldDescriptor& K0, int k, double rho0, double a, double b, double tol) {
  if (!K0.totally_real()) throw std::invalid_argument("integral J needs a totally real field");
  if (rho0 <= 0) throw std::invalid_argument("rho0 must be positive");
  int g = K0.n;
  int e = intersection_degree_e(k, K0);
  double sqrt_d = std::sqrt(std::fabs(K0.discriminant.get_d()));
  double literal = g * std::pow(4.0, g + 1) * e / (K0.aut_order() * rho0 * (g + 2) * sqrt_d);
  double c = literal / 2;
  Quadrature q = quadrature(rho0 * (0.5 + 1.0 / g) - 2, 2, a, b, tol);
  HeuristicEstimate est;
  est.formula_id = "J";
  est.constant = c;
  est.value = c * q.value;
  est.literal_value = literal * q.value;
  est.quadrature_error = c * q.error;
  est.ingredients = {{"e", e}, {"g", g}, {"aut", K0.aut_order()}, {"rho0", rho0}, {"g+2", g + 2}, {"sqrt_disc", sqrt_d}};
  return est;
}

HeuristicEstimate heuristic_R_prime_power(const FieldDescriptor& K0, int k, double rho0, double a, double b, int d,
                                          double tol) {
  if (!K0.totally_real()) throw std::invalid_argument("prime-power estimate needs a totally real field");
  if (d < 1) throw std::invalid_argument("d must be positive");
  if (rho0 <= 0) throw std::invalid_argument("rho0 must be positive");
  int g = K0.n;
  int e = intersection_degree_e(k, K0);
  double sqrt_d = std::sqrt(std::fabs(K0.discriminant.get_d()));
  double c = static_cast<double>(d) * g * std::pow(4.0, g + 1) * e / (K0.aut_order() * rho0 * (d * g + 2) * sqrt_d);
  Quadrature q = quadrature(rho0 * (0.5 + 1.0 / (d * g)) - 2, 2, a, b, tol);
  HeuristicEstimate est;
  est.formula_id = "R_prime_power";
  est.constant = c;
  est.value = c * q.value;
  est.quadrature_error = c * q.error;
  est.ingredients = {{"d", d}, {"g", g}, {"e", e}, {"aut", K0.aut_order()}, {"rho0", rho0}, {"dg+2", d * g + 2},
                     {"sqrt_disc", sqrt_d}};
  return est;
}

double weil_density_estimate(const FieldDescriptor& K, double x) {
  if (x <= 2) return 0;
  return K.torsion * static_cast<double>(K.h_sigma_hat) / K.h_k_hat * log_integral(x).value;
}

double I_asymptote(const FieldDescriptor& K, int k, double rho0, double x) {
  if (!K.is_cm()) throw std::invalid_argument("asymptote needs a CM field");
  int g = K.n / 2;
  if (rho0 <= g) throw std::domain_error("asymptote needs rho0 > g");
  int e = intersection_degree_e(k, K);
  double lx = std::log(x);
  return static_cast<double>(e) * g * g * K.torsion * K.h_sigma_hat /
         (K.aut_order() * rho0 * (rho0 - g) * K.h_k_hat) * std::pow(x, rho0 / g - 1) / (lx * lx);
}

std::string to_string(Feasibility f) {
  switch (f) {
    case Feasibility::finite_unconditional: return "finite_unconditional";
    case Feasibility::finite_expected: return "finite_expected";
    default: return "infinite_expected";
  }
}

FeasibilityReport feasibility(int g, int k, double rho0, FeasibilityMode mode, int d) {
  if (g < 1 || k < 2 || d < 1) throw std::invalid_argument("feasibility needs g >= 1, k >= 2, d >= 1");
  std::ostringstream os;
  double bound = g / euler_phi_int(k);
  if (rho0 < bound) {
    os << "rho0 = " << rho0 << " < g/phi(k) = " << bound;
    return {Feasibility::finite_unconditional, os.str()};
  }
  if (mode == FeasibilityMode::fixed_cm) {
    bool inf = rho0 > g;
    os << "rho0 = " << rho0 << (inf ? " > " : " <= ") << "g = " << g;
    return {inf ? Feasibility::infinite_expected : Feasibility::finite_expected, os.str()};
  }
  double lhs = rho0 * (0.5 + 1.0 / (static_cast<double>(d) * g));
  bool inf = lhs >= 1;
  os << "rho0 (1/2 + 1/(dg)) = " << lhs << (inf ? " >= 1" : " < 1");
  return {inf ? Feasibility::infinite_expected : Feasibility::finite_expected, os.str()};
}

}  // namespace pfav
