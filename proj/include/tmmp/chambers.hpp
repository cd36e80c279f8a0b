// Polytopes of boundaries, asymptotic orders, support cones and their
// coarsest linear-chamber decompositions, Hilbert-basis witnesses.
#pragma once

#include "tmmp/numerical.hpp"

namespace tmmp {

struct ChambersError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// V = sum of R*S_i for distinct prime divisors S_i (given by ray indices).
struct DivisorSpan {
  std::vector<int> rays;
};

// The unit cube L(V) in span coordinates.
Polyhedron polytopeL(const DivisorSpan& v);

// E_A(V) = {B in L(V) : |K+A+B|_Q nonempty}, computed by exact projection.
Polyhedron computeEAV(const Pair& p, const TDivisor& a, const DivisorSpan& v);

// B_A^S(V) = {B in L(V) : o_S(K+S+A+B) = 0}.
Polyhedron computeBSAV(const Pair& p, int sRay, const TDivisor& a, const DivisorSpan& v);

// o_v(D) = c_v(D) + min_{m in P_D} <m, v>; nullopt when |D| is empty.
std::optional<Rat> asymptoticOrder(const Pair& p, const QVec& v, const TDivisor& d);

// {t >= 0 : sum t_i D_i effective up to ~_Q}, projected exactly.
PolyCone supportCone(const Pair& p, const std::vector<TDivisor>& ds);

struct ChamberCell {
  PolyCone cone;
  // forms[k]: values of o_{v_k}'s linear form on a canonical basis of the
  // support span (functionals off the span are not meaningful).
  QMat forms;
};

struct ChamberDecomposition {
  PolyCone support;
  std::vector<ChamberCell> cells;
  QMat valuations;
  std::vector<TDivisor> generators;
};

// Cells of linearity of every o_v over the support cone; coarsest for the
// given valuation family (cells with identical form tuples are merged, and
// adjacent cells certifiably differ in some form).
ChamberDecomposition chamberDecomposition(const Pair& p, const std::vector<TDivisor>& ds,
                                          const QMat& valuations);

// The unique cell equal to Supp ∩ phi^{-1}(Nef), when some cell meets the
// ample preimage.
std::optional<int> nefChamber(const Pair& p, const ChamberDecomposition& cd);

struct AmpleShiftWitness {
  bool inSet = false;
  Rat c;                      // positive multiplier
  TDivisor deltaA;            // klt boundary with u = c[K+Delta_a] + [w]
  TDivisor ampleW;            // the ample residue w
  std::vector<Rat> ampleDegrees;
};
// Membership of [u] in the ample-shifted set over one patch; set c = 1 by
// passing forceCIsOne.
AmpleShiftWitness inAmpleShiftedSet(const Pair& p, const TDivisor& u, bool forceCIsOne = false);

struct BoundaryStructure {
  std::vector<QVec> hyperplanes;  // supporting-normal list in N_1 pairing coords
  bool covered = false;           // Int(P) ∩ ∂Nef inside the union of faces
};
// P is the cube of the given radius around [u]; u must be nef.
BoundaryStructure boundaryStructure(const Pair& p, const TDivisor& u, const Rat& radius);

// Hilbert basis of {(t, m) : m in P_{sum t_i D_i}}; throws when the instance
// exceeds the enumeration cap.
QMat hilbertBasisWitness(const Pair& p, const std::vector<TDivisor>& ds);
PolyCone adjointSupportConeLifted(const Pair& p, const std::vector<TDivisor>& ds);

// o_v(D) on x1 versus o_{g_*v}(g_*D) on x2 for a small modification g
// (identical ray sets). Throws when g is not small or |D| is empty.
bool transformOrderInvariance(const Pair& x1, const Pair& x2, const QVec& v, const TDivisor& d);

// g^{-1} is a morphism iff g_*A is nef on the target; certifies that the
// target fan refines (for toric small maps: equals) the source when true.
bool inverseIsMorphism(const Pair& x1, const Pair& x2, const TDivisor& ampleOnX1);

}  // namespace tmmp
