// Exact polyhedral geometry: cones with dual descriptions, polyhedra,
// projections, faces, triangulations, volumes, lattice points, Hilbert bases.
#pragma once

#include <optional>
#include <vector>

#include "tmmp/lp.hpp"
#include "tmmp/qvec.hpp"

namespace tmmp {

struct PolyhedraError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// cone(generators) + span(lineality)
//   = {x : n.x >= 0 for n in facetNormals, e.x = 0 for e in spanEq}.
// generators are the extreme rays (primitive integer, lex-sorted, irredundant);
// facetNormals are irredundant and lie in the linear span of the cone.
struct PolyCone {
  int ambientDim = 0;
  QMat generators;
  QMat lineality;
  QMat facetNormals;
  QMat spanEq;

  int dim() const;          // dimension of the linear span
  bool isPointed() const { return lineality.empty(); }
  bool isZero() const { return generators.empty() && lineality.empty(); }
  bool contains(const QVec& x) const;
  bool containsStrictly(const QVec& x) const;  // relative interior membership
};

PolyCone coneFromGenerators(const QMat& gens, int ambientDim);
PolyCone coneFromGeneratorsAndLineality(const QMat& gens, const QMat& lin, int ambientDim);
// {x : A x >= 0, E x = 0}
PolyCone coneFromInequalities(const QMat& A, const QMat& E, int ambientDim);
PolyCone coneDual(const PolyCone& c);
PolyCone coneIntersect(const PolyCone& a, const PolyCone& b);
bool coneEquals(const PolyCone& a, const PolyCone& b);
// Containment of a in b tested on generators and lineality.
bool coneSubset(const PolyCone& a, const PolyCone& b);
QVec coneRelativeInteriorPoint(const PolyCone& c);

// All faces of codimension k (within the cone's own dimension).
std::vector<PolyCone> facesOfCodim(const PolyCone& c, int k);

// Common refinement of subdivisions of one support cone. Each input is a list
// of full-dimensional (within the support) cells. Throws if supports disagree.
std::vector<PolyCone> commonRefinement(const std::vector<std::vector<PolyCone>>& subdivisions,
                                       const PolyCone& support);

// {x : A x >= b, E x = f}
struct Polyhedron {
  int ambientDim = 0;
  QMat A;
  QVec b;
  QMat E;
  QVec f;
};

struct VRep {
  QMat points;     // at least one per minimal face; vertices when pointed
  QMat rays;       // recession cone extreme rays
  QMat lineality;  // recession lineality
};

Polyhedron polyhedronFromInequalities(const QMat& A, const QVec& b, int ambientDim);
// Exact optimum of a linear functional over a polyhedron.
LpResult lpOverPolyhedron(const QVec& objective, const Polyhedron& p, bool maximize);
bool isEmptyPolyhedron(const Polyhedron& p);
std::optional<QVec> anyPoint(const Polyhedron& p);
// Point satisfying every non-implicit inequality strictly; nullopt if empty.
std::optional<QVec> relativeInteriorPoint(const Polyhedron& p);
VRep vertexEnumeration(const Polyhedron& p);
// Affine dimension; -1 for the empty set.
int polyhedronDim(const Polyhedron& p);
bool isBoundedPolyhedron(const Polyhedron& p);

// Eliminates all variables with index >= keep (Fourier-Motzkin with LP-based
// redundancy elimination); result lives in the first `keep` coordinates.
Polyhedron projectPolyhedron(const Polyhedron& p, int keep);

// Exact euclidean volume of a bounded polyhedron (0 if not full-dimensional).
Rat polytopeVolume(const Polyhedron& p);

// All lattice points of a bounded polyhedron.
std::vector<QVec> latticePoints(const Polyhedron& p);

// Lattice points w = sum t_i g_i with t_i in [0,1) for independent gens.
std::vector<QVec> halfOpenBoxPoints(const QMat& gens);

// Pulling triangulation of a pointed cone using only its extreme rays;
// returns simplicial cones as generator-index subsets into c.generators.
std::vector<std::vector<int>> pullingTriangulation(const PolyCone& c);

// Minimal generating set of the semigroup (cone ∩ Z^n), pointed cones only.
QMat hilbertBasis(const PolyCone& c, std::size_t capCandidates = 200000);

// Expresses a lattice point as an N-combination of basis elements, if possible.
std::optional<std::vector<int>> decomposeOverBasis(const QVec& x, const QMat& basis,
                                                   const PolyCone& c);

}  // namespace tmmp
