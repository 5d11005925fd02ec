// Predicted counts: the fixed-CM integral I, the fixed-real integral J, the
// prime-power variant, the Weil-number density, the closed-form asymptote
// and the feasibility classifier.
#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pfav/numfield.hpp"

namespace pfav {

struct Quadrature {
  double value = 0;
  double error = 0;
};

// Integral of u^s / (log u)^t over [a, b] with error estimate <= tol (relative
// to the value). Throws std::runtime_error when the tolerance is not met.
Quadrature quadrature(double s, double t, double a, double b, double tol = 1e-10);

// li(x) - li(2).
Quadrature log_integral(double x, double tol = 1e-10);

struct HeuristicEstimate {
  double value = 0;
  double constant = 0;
  std::vector<std::pair<std::string, double>> ingredients;
  double quadrature_error = 0;
  std::string formula_id;
  // J only: the value with the printed #Aut(K0) divisor.
  std::optional<double> literal_value;
};

HeuristicEstimate integral_I(const FieldDescriptor& K, int k, double rho0, double a, double b, double tol = 1e-10);
// Calibrated value divides by 2 #Aut(K0); literal_value divides by #Aut(K0).
HeuristicEstimate integral_J(const FieldDescriptor& K0, int k, double rho0, double a, double b, double tol = 1e-10);
HeuristicEstimate heuristic_R_prime_power(const FieldDescriptor& K0, int k, double rho0, double a, double b, int d,
                                          double tol = 1e-10);
double weil_density_estimate(const FieldDescriptor& K, double x);
// Requires rho0 > g; throws std::domain_error otherwise.
double I_asymptote(const FieldDescriptor& K, int k, double rho0, double x);

enum class FeasibilityMode { fixed_cm, fixed_real };
enum class Feasibility { finite_unconditional, finite_expected, infinite_expected };
std::string to_string(Feasibility f);

struct FeasibilityReport {
  Feasibility result;
  std::string inequality;
};

FeasibilityReport feasibility(int g, int k, double rho0, FeasibilityMode mode, int d = 1);

}  // namespace pfav
