// Torus-invariant divisors: Cartier data, support functions, rounding,
// linear equivalence, pullback and transform, section polyhedra.
#pragma once

#include <optional>
#include <variant>

#include "tmmp/fan.hpp"

namespace tmmp {

struct DivisorError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Coefficient per ray, indexed like fan.rays.
using TDivisor = QVec;

// One rational linear functional per maximal cone, with
// <m_sigma, u_rho> = -coeff(rho) for every ray rho of sigma.
struct CartierData {
  std::vector<QVec> m;  // parallel to fan.cones
};

struct NotQCartier {
  int offendingCone;
};

using CartierResult = std::variant<CartierData, NotQCartier>;

CartierResult cartierData(const TDivisor& d, const Fan& f);
bool isQCartier(const TDivisor& d, const Fan& f);
// Every Q-Weil divisor Q-Cartier <=> every cone simplicial; the Cartier-data
// cross-check on the prime divisors is run too.
bool isQFactorial(const Fan& f);

// Support function value psi_D(x) with psi_D(u_rho) = -coeff(rho), linear on
// each cone. x must lie in the support.
Rat supportFunctionValue(const CartierData& cd, const Fan& f, const QVec& x);

TDivisor canonicalDivisor(const Fan& f);

struct RoundedDivisors {
  TDivisor floorD, ceilD, fracD;
};
RoundedDivisors roundOps(const TDivisor& a);
TDivisor meet(const TDivisor& a, const TDivisor& b);

// Witness m with coeff1(rho) - coeff2(rho) = <m, u_rho> for all rays.
std::optional<QVec> linearlyEquivalent(const TDivisor& d1, const TDivisor& d2, const Fan& f);
TDivisor principalDivisor(const QVec& m, const Fan& f);

// Pullback along the toric morphism given by `map : source -> target`;
// d lives on the target and must be Q-Cartier there.
TDivisor pullbackDivisor(const LatticeMap& map, const Fan& source, const Fan& target,
                         const TDivisor& dOnTarget);

// Birational transform: coefficients copied along matching rays, rays absent
// in the target dropped, rays new to the target get 0.
TDivisor birationalTransform(const Fan& source, const Fan& target, const TDivisor& dOnSource);

// P_D = {m : <m, u_rho> >= -coeff(rho)}.
Polyhedron sectionPolyhedron(const TDivisor& d, const Fan& f);
bool effectivityTest(const TDivisor& d, const Fan& f);
// Fixed part of |D| from the lattice points of P_D (complete fans).
TDivisor fixedPart(const TDivisor& d, const Fan& f);
// n! times the euclidean volume of P_D; requires a complete fan.
Rat divisorVolume(const TDivisor& d, const Fan& f);

}  // namespace tmmp
