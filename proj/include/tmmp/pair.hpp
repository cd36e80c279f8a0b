// Log pairs (X, Delta) on toric models: discrepancies, singularity types,
// terminalization.
#pragma once

#include "tmmp/divisor.hpp"

namespace tmmp {

struct PairError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Relative setting: the base fan and the fan map realizing pi : X -> Z.
struct BaseData {
  Fan fan;
  LatticeMap map;
};

struct Pair {
  Fan fan;
  TDivisor boundary;  // Delta, coefficients >= 0
  std::optional<BaseData> base;

  TDivisor logCanonical() const;  // K + Delta
};

// Checks boundary sanity, Q-Cartier K+Delta, and (when present) that the base
// map is a proper toric morphism.
void validatePair(const Pair& p);

// a(v, X, Delta) = psi_{K+Delta}(v) - 1 for primitive v in the support;
// equals -coeff_Delta(rho) when v = u_rho.
Rat discrepancy(const Pair& p, const QVec& v);

struct SingularityReport {
  bool terminal = false, canonical = false, klt = false, lc = false;
  // Strongest applicable label, or "none".
  std::string label;
};
SingularityReport classifyPair(const Pair& p);

// Crepant terminalization via star subdivisions at nonpositive-discrepancy
// lattice points. Requires klt and Q-factorial; the morphism down is the
// identity lattice map.
Pair terminalize(const Pair& p);

// Star subdivision bundled with transform of the boundary (strict transform;
// new rays enter with coefficient 0).
Pair starSubdividePair(const Pair& p, const QVec& v);

}  // namespace tmmp
