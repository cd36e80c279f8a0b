// Fans of strongly convex rational polyhedral cones and maps between them.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tmmp/polyhedra.hpp"

namespace tmmp {

struct FanError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using ConeIdx = std::vector<int>;  // sorted ray indices

struct Fan {
  int latticeRank = 0;
  QMat rays;                    // primitive integer vectors
  std::vector<ConeIdx> cones;   // maximal cones

  int rayIndex(const QVec& v) const;  // -1 if absent
};

struct FanReport {
  bool simplicial = false;
  bool complete = false;
  std::vector<std::string> errors;
};

Fan makeFan(int rank, QMat rays, std::vector<ConeIdx> maximalCones);
FanReport validateFan(const Fan& f);
bool isSimplicialFan(const Fan& f);
bool isCompleteFan(const Fan& f);

PolyCone coneOf(const Fan& f, const ConeIdx& c);
// Smallest cone of f whose relative interior contains v; nullopt if v is
// outside the support.
std::optional<ConeIdx> coneContaining(const Fan& f, const QVec& v);
// Index of the sublattice generated by the cone's rays in its saturation.
Int coneMultiplicity(const Fan& f, const ConeIdx& c);

// Canonical form: rays sorted lexicographically, cones renumbered and sorted.
Fan canonicalFan(const Fan& f);
bool fanEquals(const Fan& a, const Fan& b);

// Integer lattice map N -> N' compatible with given fans when used as a
// toric morphism (checked by mapsFanInto).
struct LatticeMap {
  QMat matrix;  // rows: images of basis vectors? No: matrix acts as y = M x.
};

QVec applyMap(const LatticeMap& m, const QVec& v);
bool mapsFanInto(const LatticeMap& m, const Fan& source, const Fan& target);
// Proper <=> |source| = preimage of |target| (toric properness criterion);
// checked on the generated cones by sampling facets exactly.
bool isProperMap(const LatticeMap& m, const Fan& source, const Fan& target);
LatticeMap identityMap(int rank);

// Star subdivision at a primitive lattice point of the support.
// Returns the refined fan; the morphism to f is the identity lattice map.
Fan starSubdivision(const Fan& f, const QVec& v);

// Simplicial refinement using only the existing rays (small morphism).
Fan qFactorialize(const Fan& f);

// All walls: codimension-one cones shared by exactly two maximal cones.
struct Wall {
  ConeIdx tau;       // the wall
  int sideA, sideB;  // indices into f.cones
};
std::vector<Wall> wallsOf(const Fan& f);

}  // namespace tmmp
