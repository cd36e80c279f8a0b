#include "tmmp/gluing.hpp"

#include <algorithm>
#include <set>

#include "tmmp/linalg.hpp"

namespace tmmp {

namespace {

// Support membership for a subfan given by base maximal cones.
bool inPatchSupport(const Fan& base, const std::vector<ConeIdx>& patch, const QVec& x) {
  for (const auto& c : patch)
    if (coneOf(base, c).contains(x)) return true;
  return false;
}

}  // namespace

void validateCover(const Pair& p, const BaseCover& cover) {
  if (!p.base) throw GluingError("cover over a pair with no base");
  const Fan& bf = p.base->fan;
  if (cover.patches.empty()) throw GluingError("empty cover");
  for (const auto& patch : cover.patches)
    for (const auto& c : patch)
      if (std::find(bf.cones.begin(), bf.cones.end(), c) == bf.cones.end()) {
        // Allow faces of base cones too; they must at least use valid rays.
        for (int i : c)
          if (i < 0 || i >= static_cast<int>(bf.rays.size()))
            throw GluingError("patch cone is not part of the base fan");
      }
  // Coverage: every base maximal cone lies in some patch's support (affine
  // patches list whole cones, so membership of generators suffices).
  for (const auto& c : bf.cones) {
    QVec sample = coneRelativeInteriorPoint(coneOf(bf, c));
    bool covered = false;
    for (const auto& patch : cover.patches)
      if (inPatchSupport(bf, patch, sample)) covered = true;
    if (!covered) throw GluingError("cover misses part of the base");
  }
}

RestrictedFamily restrictFamily(const Pair& p, const std::vector<ConeIdx>& patch) {
  if (patch.empty()) throw GluingError("restrictFamily: empty patch");
  RestrictedFamily fam = restrictToOpen(p, patch);
  // Picard surjectivity of the restriction: every ray of the restricted fan
  // comes from an ambient ray, so coefficient vectors extend by zero.
  for (std::size_t i = 0; i < fam.pair.fan.rays.size(); ++i)
    if (p.fan.rayIndex(fam.pair.fan.rays[i]) < 0)
      throw GluingError("restrictFamily: restriction introduced a new ray");
  return fam;
}

std::vector<LocalRun> runLocalMMPs(const Pair& p, const TDivisor& a, const BaseCover& cover,
                                   const std::vector<Rat>& rs) {
  validateCover(p, cover);
  std::vector<LocalRun> out;
  for (std::size_t pi = 0; pi < cover.patches.size(); ++pi) {
    LocalRun run;
    run.patchId = static_cast<int>(pi);
    try {
      run.family = restrictFamily(p, cover.patches[pi]);
      run.scaling = restrictDivisor(run.family, a);
      run.rs = rs;
      for (const auto& r : rs) {
        Pair local = outputAtScale(run.family.pair, run.scaling, r);
        OutputCharacterization oc =
            verifyOutputCharacterization(run.family.pair, run.scaling, local, r);
        if (!oc.pass())
          throw GluingError("local output fails the uniqueness characterization");
        run.outputs.push_back(local);
      }
    } catch (const std::exception& e) {
      throw GluingError("patch " + std::to_string(pi) + ": " + e.what());
    }
    out.push_back(std::move(run));
  }
  return out;
}

GlueResult glueOutputs(const Pair& p, const BaseCover& cover,
                       const std::vector<LocalRun>& runs, std::size_t rIndex) {
  GlueResult res;
  if (!p.base) throw GluingError("glueOutputs: no base");
  const Fan& bf = p.base->fan;
  // Pairwise overlap comparison: restrict both local outputs to the subfan of
  // base cones contained in both patch supports.
  for (std::size_t i = 0; i < runs.size(); ++i)
    for (std::size_t j = i + 1; j < runs.size(); ++j) {
      // Overlap subfan: faces of base cones inside both supports.
      std::vector<ConeIdx> overlap;
      std::set<ConeIdx> seen;
      std::vector<ConeIdx> frontier = bf.cones;
      while (!frontier.empty()) {
        std::vector<ConeIdx> next;
        for (const auto& c : frontier) {
          if (!seen.insert(c).second) continue;
          PolyCone pc = coneOf(bf, c);
          QVec sample = coneRelativeInteriorPoint(pc);
          bool inA = inPatchSupport(bf, cover.patches[runs[i].patchId], sample);
          bool inB = inPatchSupport(bf, cover.patches[runs[j].patchId], sample);
          if (inA && inB) {
            overlap.push_back(c);
            continue;
          }
          for (const auto& nrm : pc.facetNormals) {
            ConeIdx face;
            for (int rr : c)
              if (dot(nrm, bf.rays[rr]) == 0) face.push_back(rr);
            std::sort(face.begin(), face.end());
            next.push_back(face);
          }
        }
        frontier = next;
      }
      if (overlap.empty()) continue;
      RestrictedFamily ra = restrictToOpen(runs[i].outputs[rIndex], overlap);
      RestrictedFamily rb = restrictToOpen(runs[j].outputs[rIndex], overlap);
      if (!fanEquals(ra.pair.fan, rb.pair.fan)) {
        res.mismatch = MismatchReport{runs[i].patchId, runs[j].patchId, ra.pair.fan,
                                      rb.pair.fan};
        return res;
      }
    }
  // Assemble: union of the local cones, keyed by ray vectors (canonical).
  QMat rays;
  auto rayIdx = [&](const QVec& v) {
    for (std::size_t i = 0; i < rays.size(); ++i)
      if (rays[i] == v) return static_cast<int>(i);
    rays.push_back(v);
    return static_cast<int>(rays.size()) - 1;
  };
  std::vector<ConeIdx> cones;
  TDivisor boundaryByRay;
  for (const auto& run : runs) {
    const Pair& local = run.outputs[rIndex];
    for (const auto& c : local.fan.cones) {
      ConeIdx nc;
      for (int i : c) {
        int gi = rayIdx(local.fan.rays[i]);
        if (gi == static_cast<int>(boundaryByRay.size()))
          boundaryByRay.push_back(local.boundary[i]);
        else if (boundaryByRay[gi] != local.boundary[i])
          throw GluingError("glueOutputs: boundary coefficients disagree on overlap");
        nc.push_back(gi);
      }
      std::sort(nc.begin(), nc.end());
      cones.push_back(nc);
    }
  }
  Pair global;
  global.fan = makeFan(p.fan.latticeRank, rays, cones);
  global.boundary = boundaryByRay;
  global.base = p.base;
  FanReport rep = validateFan(global.fan);
  if (!rep.errors.empty())
    throw GluingError("glueOutputs: assembled fan invalid: " + rep.errors.front());
  validatePair(global);
  // Round trip: the global fan restricts back to each local output.
  for (const auto& run : runs) {
    RestrictedFamily back = restrictToOpen(global, cover.patches[run.patchId]);
    if (!fanEquals(back.pair.fan, run.outputs[rIndex].fan))
      throw GluingError("glueOutputs: restriction does not reproduce a local output");
  }
  res.glued = true;
  res.global = global;
  return res;
}

bool baseChangeCheck(const Pair& p, const TDivisor& a, const std::vector<ConeIdx>& patch,
                     const Rat& r) {
  Pair global = outputAtScale(p, a, r);
  RestrictedFamily restrictedGlobal = restrictToOpen(global, patch);
  RestrictedFamily fam = restrictFamily(p, patch);
  Pair local = outputAtScale(fam.pair, restrictDivisor(fam, a), r);
  return fanEquals(restrictedGlobal.pair.fan, local.fan);
}

}  // namespace tmmp
