// Polynomials over F_p for word-size p.
#pragma once

#include <utility>
#include <vector>

#include "pfav/arith.hpp"

namespace pfav::modp {

using Pol = std::vector<u64>;  // lowest degree first, no trailing zeros

void trim(Pol& a);
int deg(const Pol& a);
Pol reduce(const ZPoly& f, u64 p);
Pol add(const Pol& a, const Pol& b, u64 p);
Pol sub(const Pol& a, const Pol& b, u64 p);
Pol mul(const Pol& a, const Pol& b, u64 p);
Pol scale(const Pol& a, u64 s, u64 p);
void divrem(const Pol& a, const Pol& b, u64 p, Pol* q, Pol* r);
Pol rem(const Pol& a, const Pol& b, u64 p);
Pol monic(const Pol& a, u64 p);
Pol gcd(Pol a, Pol b, u64 p);
Pol mulmod(const Pol& a, const Pol& b, const Pol& f, u64 p);
Pol powmod(Pol a, u64 e, const Pol& f, u64 p);
Pol compose_mod(const Pol& g, const Pol& h, const Pol& f, u64 p);  // g(h) mod f
u64 eval(const Pol& a, u64 x, u64 p);

// Monic irreducible factors with multiplicities, sorted by (degree, coefficients).
std::vector<std::pair<Pol, int>> factor(const Pol& f, u64 p);
// Distinct roots in ascending order.
std::vector<u64> roots(const Pol& f, u64 p);

}  // namespace pfav::modp
