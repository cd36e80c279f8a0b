// Run the scaled MMP over a torus-invariant affine cover of the base and
// glue the certified local outputs into the global one.
#pragma once

#include "tmmp/chambers.hpp"
#include "tmmp/mmp.hpp"

namespace tmmp {

struct GluingError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Patches are subfans of the base fan, each given by base maximal cones.
struct BaseCover {
  std::vector<std::vector<ConeIdx>> patches;
};

// The patches must cover the base support.
void validateCover(const Pair& p, const BaseCover& cover);

struct LocalRun {
  int patchId = -1;
  RestrictedFamily family;
  TDivisor scaling;               // restriction of A
  std::vector<Rat> rs;
  std::vector<Pair> outputs;      // X^r per requested r
};

// Restriction of the family to one patch, with the Picard-surjectivity
// hypothesis of the localization lemma checked.
RestrictedFamily restrictFamily(const Pair& p, const std::vector<ConeIdx>& patch);

// Local r-th outputs on every patch, each certified by the uniqueness
// characterization. Throws with the patch id on local failure.
std::vector<LocalRun> runLocalMMPs(const Pair& p, const TDivisor& a, const BaseCover& cover,
                                   const std::vector<Rat>& rs);

struct MismatchReport {
  int patchA = -1, patchB = -1;
  Fan restrictedA, restrictedB;
};

struct GlueResult {
  bool glued = false;
  Pair global;
  std::optional<MismatchReport> mismatch;
};

// Compares local outputs on pairwise overlaps by canonical fan equality and
// assembles the global output over the base.
GlueResult glueOutputs(const Pair& p, const BaseCover& cover,
                       const std::vector<LocalRun>& runs, std::size_t rIndex);

// Restriction of the global r-th output to a patch equals the r-th output of
// the restricted family.
bool baseChangeCheck(const Pair& p, const TDivisor& a, const std::vector<ConeIdx>& patch,
                     const Rat& r);

}  // namespace tmmp
