// The relative MMP with scaling: nef thresholds, extremal rays, contraction
// surgery, flips, termination ledger, continuous-index outputs.
#pragma once

#include "tmmp/numerical.hpp"

namespace tmmp {

struct MmpError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// lambda = min{t >= 0 : K+Delta+tA nef}; throws when no t works.
Rat nefThreshold(const Pair& p, const TDivisor& a);

struct ThresholdBound {
  Rat lambda;
  Int cartierIdx;  // a = min{e : e(K+Delta) Cartier}
  int fiberDim;    // b
  Int denominator; // v with (1/lambda)/a = u/v reduced
  bool applies;    // lambda > 0 and finite
};
// The Rationality-theorem bound data: v <= a(b+1) whenever it applies.
ThresholdBound nefThresholdWithBound(const Pair& p, const TDivisor& a);

// Extremal ray attaining the threshold; deterministic lexicographic tie rule.
CurveClass selectExtremalRay(const Pair& p, const TDivisor& a, const Rat& lambda);

enum class StepKind { MoriFiber, Divisorial, Flip };

struct Contraction {
  StepKind kind;
  Pair target;                  // quotient / contracted model / the small target Y
  std::vector<int> removedRays; // ambient ray indices (divisorial only)
  QMat quotientMatrix;          // lattice projection (Mori fiber only)
  TDivisor supportingDivisor;   // nef divisor vanishing exactly on the ray
};
Contraction contractRay(const Pair& p, const CurveClass& ray);

struct FlipResult {
  Pair target;  // X^+
  Pair smallY;  // the non-Q-factorial middle
  CurveClass flippedCurve;  // the new wall on X^+
};
FlipResult flip(const Pair& p, const CurveClass& ray);

struct FlipAxiomReport {
  bool normalValid = false;      // (i)  X^+ normal integral (valid fan)
  bool smallNonIso = false;      // (ii) f^+ small and not an isomorphism
  bool qCartierAmple = false;    // (iii) K+Delta^+ Q-Cartier and f^+-ample
  std::vector<std::string> notes;
  std::vector<Rat> ampleDegrees;  // certificates for (iii)
  bool pass() const { return normalValid && smallNonIso && qCartierAmple; }
};
FlipAxiomReport checkFlipAxioms(const Pair& xplus, const Fan& yFan, const TDivisor& boundaryPlus);

// Negativity lemma self-test for a refinement h : W -> X (identity lattice).
// Throws on hypothesis failure; otherwise returns whether B is effective.
bool negativityCheck(const Fan& upper, const Fan& lower, const TDivisor& bUpper);

struct GoodScalingReport {
  bool good = false;
  std::string reason;
  QVec shift;        // m with A' = A + div(m)
  TDivisor aPrime;   // effective representative keeping the pair klt
};
GoodScalingReport isGoodScalingDivisor(const Pair& p, const TDivisor& a);

struct LedgerEntry {
  QVec valuation;
  Rat before, after;  // boundary multiplicities -a(v,.) : non-increasing
};

struct MMPStep {
  StepKind kind;
  CurveClass ray;
  Rat lambda;
  Pair source, target;
  TDivisor sourceScaling, targetScaling;
  int rankBefore = 0, rankAfter = 0;
  std::vector<LedgerEntry> ledger;
};

enum class MmpOutcome { MinimalModel, MoriFibration };

struct MMPTrace {
  std::vector<MMPStep> steps;
  MmpOutcome outcome = MmpOutcome::MinimalModel;
  Pair finalPair;
  TDivisor finalScaling;  // transform of A on the last birational model
};

MMPTrace runMMPWithScaling(const Pair& p, const TDivisor& a);

// X^r: composite of the steps with threshold >= r. Throws when a Mori-fiber
// face occurs at threshold >= r (the r-th output does not exist).
Pair outputAtScale(const Pair& p, const TDivisor& a, const Rat& r);

struct OutputCharacterization {
  bool birationalContraction = false;
  bool pushforwardAmple = false;
  bool onlyNonBigDivisorsContracted = false;
  std::vector<std::string> notes;
  bool pass() const {
    return birationalContraction && pushforwardAmple && onlyNonBigDivisorsContracted;
  }
};
OutputCharacterization verifyOutputCharacterization(const Pair& p, const TDivisor& a,
                                                    const Pair& candidate, const Rat& r);

// Fills per-step ledgers over a fixed valuation family and certifies
// monotonicity plus a strict decrease per nontrivial step.
void discrepancyLedger(MMPTrace& trace);

struct BasepointFreeResult {
  std::optional<Int> m0;
  std::optional<CurveClass> counterexample;
};
BasepointFreeResult basepointFreeCheck(const Pair& p, const TDivisor& h);

bool isSemiample(const Pair& p, const TDivisor& d);

// Restriction of a divisor to the invariant divisor of a ray, as a divisor on
// the star fan. Used by the non-big-restriction clause of the output check.
struct StarRestriction {
  Fan star;
  TDivisor restricted;
};
StarRestriction restrictToInvariantDivisor(const Fan& f, int rayIdx, const TDivisor& d);

}  // namespace tmmp
