// Numerical classes over the base: contracted curves, intersection pairing,
// Mori and nef cones, positivity tests, extremal faces.
#pragma once

#include "tmmp/pair.hpp"

namespace tmmp {

struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A torus-invariant curve V(tau) for a wall tau, together with its pairing
// vector: classVec[rho] = (D_rho . C).
struct CurveClass {
  ConeIdx wall;
  int sideA = -1, sideB = -1;  // indices into fan.cones
  QVec classVec;
};

// (D . C) from the wall relation; Q-Cartierness of d is the caller's business.
Rat intersectionNumber(const TDivisor& d, const CurveClass& c);
// Independent oracle: (D . C) = mult(tau)/mult(sigma') * <m_sigma - m_sigma', u'>
// where u' is the off-wall ray of sigma'.
Rat intersectionViaCartierDegree(const TDivisor& d, const Fan& f, const CurveClass& c);

// The wall curve with the multiplicity-normalized relation vector.
CurveClass wallCurve(const Fan& f, const Wall& w);

// Smallest cone of f containing all the given points; nullopt if none does.
std::optional<ConeIdx> smallestConeContaining(const Fan& f, const QMat& points);

// Walls whose curves map to points of the base (all walls over a point base).
std::vector<CurveClass> contractedCurves(const Pair& p);

struct NumSpace {
  int rankN1 = 0;
  QMat basisCurves;  // basis of N_1 inside the ray-coordinate pairing space
  std::vector<CurveClass> curves;
};

NumSpace buildN1(const Pair& p);
// Coordinates of [D] in the basis dual to basisCurves.
QVec divisorClassCoords(const NumSpace& ns, const TDivisor& d);
// Coordinates of a curve class in basisCurves.
QVec curveClassCoords(const NumSpace& ns, const QVec& classVec);

PolyCone moriCone(const Pair& p, const NumSpace& ns);
PolyCone nefCone(const Pair& p, const NumSpace& ns);

bool isNef(const Pair& p, const TDivisor& d);
bool isAmple(const Pair& p, const TDivisor& d);
bool isBig(const Pair& p, const TDivisor& d);
bool isPseudoeffective(const Pair& p, const TDivisor& d);

struct KodairaDecomposition {
  TDivisor ample;      // A
  TDivisor effective;  // E with D ~_Q A + E
  QVec shift;          // the principal witness used
};
std::optional<KodairaDecomposition> kodairaDecompose(const Pair& p, const TDivisor& d);

struct SupportingData {
  QVec hyperplane;                     // the class of D as a functional on N_1
  PolyCone extremalFace;               // in N_1 coordinates
  std::vector<CurveClass> faceCurves;  // contracted curves spanning the face
  bool isRay = false;
};
// D nef and not ample; F = {gamma in NE-bar : (D.gamma) = 0}.
SupportingData supportingData(const Pair& p, const TDivisor& d);

struct ConeTheoremData {
  PolyCone kNonNegativePart;  // in N_1 coordinates
  std::vector<CurveClass> negativeRays;
  std::vector<Int> rayDenominators;  // v_j for a fixed ample A
  Int cartierIdx = 1;                // a
  int maxFiberDimension = 0;         // b
};
ConeTheoremData coneTheoremDecomposition(const Pair& p);

// A divisor with (D.C) >= 1 on every contracted curve; throws when the model
// is not projective over its base.
TDivisor findAmpleDivisor(const Pair& p);

// Least e > 0 with e*D Cartier.
Int cartierIndex(const TDivisor& d, const Fan& f);
// Largest closed-fiber dimension of pi.
int maxFiberDim(const Pair& p);

struct RestrictedFamily {
  Pair pair;
  int ambientRayCount = 0;
  std::vector<int> rayMap;      // restricted ray index -> ambient ray index
  std::vector<int> baseRayMap;  // restricted base ray index -> ambient base ray index
};
// Restriction to the open torus-invariant subset of the base given by a
// subfan (list of base maximal cones).
RestrictedFamily restrictToOpen(const Pair& p, const std::vector<ConeIdx>& baseCones);
TDivisor restrictDivisor(const RestrictedFamily& r, const TDivisor& d);
// Zero-extension of a restricted curve's pairing vector to the ambient rays.
QVec extendCurveVec(const RestrictedFamily& r, const QVec& classVec);

}  // namespace tmmp
