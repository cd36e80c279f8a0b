#include "tmmp/numerical.hpp"

#include <algorithm>
#include <set>

#include "tmmp/linalg.hpp"

namespace tmmp {

Rat intersectionNumber(const TDivisor& d, const CurveClass& c) { return dot(d, c.classVec); }

CurveClass wallCurve(const Fan& f, const Wall& w) {
  auto offRay = [&](int side) {
    for (int i : f.cones[side])
      if (std::find(w.tau.begin(), w.tau.end(), i) == w.tau.end()) return i;
    throw NumericalError("wall equals its side cone");
  };
  const ConeIdx& coneA = f.cones[w.sideA];
  const ConeIdx& coneB = f.cones[w.sideB];
  QMat gensA, gensB, gensT;
  for (int i : coneA) gensA.push_back(f.rays[i]);
  for (int i : coneB) gensB.push_back(f.rays[i]);
  for (int i : w.tau) gensT.push_back(f.rays[i]);
  if (rankOf(gensA) != static_cast<int>(coneA.size()) ||
      rankOf(gensB) != static_cast<int>(coneB.size()))
    throw NumericalError("non-simplicial wall encountered");
  int offA = offRay(w.sideA);
  int offB = offRay(w.sideB);
  Int multT = w.tau.empty() ? Int(1) : latticeIndex(gensT);
  Rat bA = Rat(multT) / Rat(latticeIndex(gensA));
  Rat bB = Rat(multT) / Rat(latticeIndex(gensB));
  // bA*uA + bB*uB + sum_{rho in tau} c_rho u_rho = 0.
  QVec rhs = scale(add(scale(f.rays[offA], bA), scale(f.rays[offB], bB)), Rat(-1));
  QVec cs;
  if (!w.tau.empty()) {
    auto sol = coordinatesIn(gensT, rhs);
    if (!sol) throw NumericalError("wall relation has no solution");
    cs = *sol;
  }
  QVec classVec = zeroVec(static_cast<int>(f.rays.size()));
  classVec[offA] = bA;
  classVec[offB] = bB;
  for (std::size_t k = 0; k < w.tau.size(); ++k) classVec[w.tau[k]] = cs[k];
  CurveClass c;
  c.wall = w.tau;
  c.sideA = w.sideA;
  c.sideB = w.sideB;
  c.classVec = classVec;
  return c;
}

Rat intersectionViaCartierDegree(const TDivisor& d, const Fan& f, const CurveClass& c) {
  CartierResult cr = cartierData(d, f);
  if (std::holds_alternative<NotQCartier>(cr))
    throw NumericalError("intersection with a non-Q-Cartier divisor");
  const CartierData& cd = std::get<CartierData>(cr);
  int offB = -1;
  for (int i : f.cones[c.sideB])
    if (std::find(c.wall.begin(), c.wall.end(), i) == c.wall.end()) offB = i;
  QMat gensT, gensB;
  for (int i : c.wall) gensT.push_back(f.rays[i]);
  for (int i : f.cones[c.sideB]) gensB.push_back(f.rays[i]);
  Int multT = c.wall.empty() ? Int(1) : latticeIndex(gensT);
  Rat bB = Rat(multT) / Rat(latticeIndex(gensB));
  QVec diff = sub(cd.m[c.sideA], cd.m[c.sideB]);
  return bB * dot(diff, f.rays[offB]);
}

std::optional<ConeIdx> smallestConeContaining(const Fan& f, const QMat& points) {
  for (const auto& cone : f.cones) {
    PolyCone pc = coneOf(f, cone);
    bool all = true;
    for (const auto& x : points)
      if (!pc.contains(x)) {
        all = false;
        break;
      }
    if (!all) continue;
    ConeIdx face = cone;
    for (const auto& nrm : pc.facetNormals) {
      bool tight = true;
      for (const auto& x : points)
        if (dot(nrm, x) != 0) tight = false;
      if (!tight) continue;
      ConeIdx keep;
      for (int i : face)
        if (dot(nrm, f.rays[i]) == 0) keep.push_back(i);
      face = keep;
    }
    std::sort(face.begin(), face.end());
    return face;
  }
  return std::nullopt;
}

std::vector<CurveClass> contractedCurves(const Pair& p) {
  std::vector<CurveClass> out;
  const Fan& f = p.fan;
  for (const Wall& w : wallsOf(f)) {
    CurveClass c = wallCurve(f, w);
    if (!p.base || p.base->fan.latticeRank == 0) {
      out.push_back(c);
      continue;
    }
    const Fan& bf = p.base->fan;
    const LatticeMap& m = p.base->map;
    QMat wallImages;
    for (int i : w.tau) wallImages.push_back(applyMap(m, f.rays[i]));
    if (w.tau.empty()) wallImages.push_back(zeroVec(bf.latticeRank));
    auto tz = smallestConeContaining(bf, wallImages);
    if (!tz) throw NumericalError("wall image outside the base support");
    QMat span;
    for (int i : *tz) span.push_back(bf.rays[i]);
    int baseRank = rankOf(span);
    // Contracted iff both side cones map into the linear span of tz.
    bool contracted = true;
    for (int side : {w.sideA, w.sideB})
      for (int i : f.cones[side]) {
        QMat test = span;
        test.push_back(applyMap(m, f.rays[i]));
        if (rankOf(test) != baseRank) contracted = false;
      }
    if (contracted) out.push_back(c);
  }
  return out;
}

NumSpace buildN1(const Pair& p) {
  NumSpace ns;
  ns.curves = contractedCurves(p);
  QMat acc;
  for (const auto& c : ns.curves) {
    QMat test = acc;
    test.push_back(c.classVec);
    if (rankOf(test) > static_cast<int>(acc.size())) {
      acc = test;
      ns.basisCurves.push_back(c.classVec);
    }
  }
  ns.rankN1 = static_cast<int>(ns.basisCurves.size());
  return ns;
}

QVec divisorClassCoords(const NumSpace& ns, const TDivisor& d) {
  QVec out;
  for (const auto& b : ns.basisCurves) out.push_back(dot(d, b));
  return out;
}

QVec curveClassCoords(const NumSpace& ns, const QVec& classVec) {
  auto coords = coordinatesIn(ns.basisCurves, classVec);
  if (!coords) throw NumericalError("curve class outside N_1");
  return *coords;
}

PolyCone moriCone(const Pair& p, const NumSpace& ns) {
  QMat gens;
  for (const auto& c : ns.curves) gens.push_back(curveClassCoords(ns, c.classVec));
  return coneFromGenerators(gens, ns.rankN1);
}

PolyCone nefCone(const Pair& p, const NumSpace& ns) { return coneDual(moriCone(p, ns)); }

bool isNef(const Pair& p, const TDivisor& d) {
  if (!isQCartier(d, p.fan)) throw NumericalError("isNef: divisor is not Q-Cartier");
  for (const auto& c : contractedCurves(p))
    if (intersectionNumber(d, c) < 0) return false;
  return true;
}

bool isAmple(const Pair& p, const TDivisor& d) {
  if (!isQCartier(d, p.fan)) throw NumericalError("isAmple: divisor is not Q-Cartier");
  for (const auto& c : contractedCurves(p))
    if (intersectionNumber(d, c) <= 0) return false;
  return true;
}

bool isBig(const Pair& p, const TDivisor& d) {
  return polyhedronDim(sectionPolyhedron(d, p.fan)) == p.fan.latticeRank;
}

bool isPseudoeffective(const Pair& p, const TDivisor& d) {
  // The toric effective cone is closed, so limits add nothing.
  return effectivityTest(d, p.fan);
}

std::optional<KodairaDecomposition> kodairaDecompose(const Pair& p, const TDivisor& d) {
  if (!isBig(p, d)) return std::nullopt;
  TDivisor a0 = findAmpleDivisor(p);
  Rat eps = 1;
  for (int tries = 0; tries < 200; ++tries, eps /= 2) {
    TDivisor rest = d;
    for (std::size_t i = 0; i < rest.size(); ++i) rest[i] -= eps * a0[i];
    Polyhedron sp = sectionPolyhedron(rest, p.fan);
    auto m = anyPoint(sp);
    if (!m) continue;
    KodairaDecomposition kd;
    kd.ample = TDivisor(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) kd.ample[i] = eps * a0[i];
    kd.effective = rest;
    TDivisor shift = principalDivisor(*m, p.fan);
    for (std::size_t i = 0; i < d.size(); ++i) kd.effective[i] += shift[i];
    kd.shift = *m;
    return kd;
  }
  throw NumericalError("kodairaDecompose: no effective shift found for a big divisor");
}

SupportingData supportingData(const Pair& p, const TDivisor& d) {
  if (!isNef(p, d)) throw NumericalError("supportingData: divisor is not nef");
  if (isAmple(p, d))
    throw NumericalError("supportingData: ample divisor has no supporting hyperplane");
  NumSpace ns = buildN1(p);
  SupportingData sd;
  sd.hyperplane = divisorClassCoords(ns, d);
  QMat gens;
  for (const auto& c : ns.curves)
    if (intersectionNumber(d, c) == 0) {
      sd.faceCurves.push_back(c);
      gens.push_back(curveClassCoords(ns, c.classVec));
    }
  sd.extremalFace = coneFromGenerators(gens, ns.rankN1);
  sd.isRay = sd.extremalFace.dim() == 1;
  return sd;
}

TDivisor findAmpleDivisor(const Pair& p) {
  auto curves = contractedCurves(p);
  LpProblem lp;
  for (const auto& c : curves) {
    lp.Age.push_back(c.classVec);
    lp.bge.push_back(Rat(1));
  }
  lp.c = zeroVec(static_cast<int>(p.fan.rays.size()));
  LpResult r = lpSolve(lp);
  if (!lpIsOptimal(r))
    throw NumericalError("model is not projective over its base (no ample divisor)");
  TDivisor d = lpOpt(r).witness;
  if (!isQCartier(d, p.fan)) throw NumericalError("ample search produced a non-Q-Cartier divisor");
  return d;
}

Int cartierIndex(const TDivisor& d, const Fan& f) {
  Int a = 1;
  for (const auto& cone : f.cones) {
    QMat gens;
    QVec coeffs;
    for (int i : cone) {
      gens.push_back(f.rays[i]);
      coeffs.push_back(d[i]);
    }
    QMat sat = saturatedRowLattice(gens, f.latticeRank);
    for (const auto& b : sat) {
      auto lambda = coordinatesIn(gens, b);
      if (!lambda) throw NumericalError("cartierIndex: saturation outside the span");
      Rat val = 0;
      for (std::size_t k = 0; k < lambda->size(); ++k) val += (*lambda)[k] * coeffs[k];
      a = lcmInt(a, denomOf(val));
    }
  }
  return a;
}

namespace {

// All cones of the fan including faces and the origin, as ray-index sets.
std::vector<ConeIdx> allConesWithFaces(const Fan& f) {
  std::set<ConeIdx> out;
  out.insert(ConeIdx{});
  for (const auto& cone : f.cones) {
    std::vector<ConeIdx> frontier = {cone};
    out.insert(cone);
    while (!frontier.empty()) {
      std::vector<ConeIdx> next;
      for (const auto& cur : frontier) {
        PolyCone sub = coneOf(f, cur);
        for (const auto& nrm : sub.facetNormals) {
          ConeIdx face;
          for (int i : cur)
            if (dot(nrm, f.rays[i]) == 0) face.push_back(i);
          std::sort(face.begin(), face.end());
          if (out.insert(face).second) next.push_back(face);
        }
      }
      frontier = next;
    }
  }
  return std::vector<ConeIdx>(out.begin(), out.end());
}

}  // namespace

int maxFiberDim(const Pair& p) {
  const Fan& f = p.fan;
  const int n = f.latticeRank;
  if (!p.base || p.base->fan.latticeRank == 0) return n;
  const Fan& bf = p.base->fan;
  int best = 0;
  for (const auto& cone : allConesWithFaces(f)) {
    QMat gens;
    for (int i : cone) gens.push_back(f.rays[i]);
    QMat images;
    for (const auto& g : gens) images.push_back(applyMap(p.base->map, g));
    if (images.empty()) images.push_back(zeroVec(bf.latticeRank));
    auto tz = smallestConeContaining(bf, images);
    if (!tz) continue;
    QMat tzGens;
    for (int i : *tz) tzGens.push_back(bf.rays[i]);
    int dimSigma = rankOf(gens);
    int dimTau = rankOf(tzGens);
    // dim of the fiber through the orbit of sigma over a closed point of
    // the orbit of tau: orbit dimensions (n - dim sigma) - (n_Z - dim tau).
    int fiber = (n - dimSigma) - (bf.latticeRank - dimTau);
    best = std::max(best, fiber);
  }
  return best;
}

ConeTheoremData coneTheoremDecomposition(const Pair& p) {
  if (!classifyPair(p).klt) throw NumericalError("coneTheoremDecomposition: pair is not klt");
  NumSpace ns = buildN1(p);
  TDivisor kd = p.logCanonical();
  ConeTheoremData out;
  out.cartierIdx = cartierIndex(kd, p.fan);
  out.maxFiberDimension = maxFiberDim(p);
  PolyCone mori = moriCone(p, ns);
  // K-nonnegative part: intersect with the halfspace (K+Delta) >= 0.
  QMat ineqs = mori.facetNormals;
  ineqs.push_back(divisorClassCoords(ns, kd));
  out.kNonNegativePart = coneFromInequalities(ineqs, mori.spanEq, ns.rankN1);
  // Negative extremal rays.
  TDivisor ample = findAmpleDivisor(p);
  int dim = mori.dim();
  if (dim >= 1) {
    for (const auto& rayCone : facesOfCodim(mori, dim - 1)) {
      if (rayCone.generators.empty()) continue;
      const QVec& g = rayCone.generators[0];
      // Find a contracted curve generating this ray.
      const CurveClass* rep = nullptr;
      for (const auto& c : ns.curves) {
        QVec coords = curveClassCoords(ns, c.classVec);
        QVec prim = primitive(coords);
        if (prim == g) {
          rep = &c;
          break;
        }
      }
      if (!rep) continue;
      Rat kDeg = intersectionNumber(kd, *rep);
      if (kDeg >= 0) continue;
      out.negativeRays.push_back(*rep);
      Rat ratio = intersectionNumber(ample, *rep) / (Rat(out.cartierIdx) * kDeg);
      out.rayDenominators.push_back(denomOf(ratio));
    }
  }
  return out;
}

RestrictedFamily restrictToOpen(const Pair& p, const std::vector<ConeIdx>& baseCones) {
  if (!p.base) throw NumericalError("restrictToOpen: pair has no base");
  const Fan& bf = p.base->fan;
  for (const auto& c : baseCones)
    for (int i : c)
      if (i < 0 || i >= static_cast<int>(bf.rays.size()))
        throw NumericalError("restrictToOpen: not a subfan of the base");
  // The open subset's fan.
  std::set<int> baseRaysUsed;
  for (const auto& c : baseCones)
    for (int i : c) baseRaysUsed.insert(i);
  std::vector<int> baseRayMap(baseRaysUsed.begin(), baseRaysUsed.end());
  std::vector<int> baseOld2New(bf.rays.size(), -1);
  QMat baseRays;
  for (std::size_t k = 0; k < baseRayMap.size(); ++k) {
    baseOld2New[baseRayMap[k]] = static_cast<int>(k);
    baseRays.push_back(bf.rays[baseRayMap[k]]);
  }
  std::vector<ConeIdx> baseConesNew;
  for (const auto& c : baseCones) {
    ConeIdx nc;
    for (int i : c) nc.push_back(baseOld2New[i]);
    std::sort(nc.begin(), nc.end());
    baseConesNew.push_back(nc);
  }
  Fan baseOpen = makeFan(bf.latticeRank, baseRays, baseConesNew);

  // Keep the largest faces of X's cones that map into |U|.
  auto mapsIn = [&](const ConeIdx& cone) {
    QMat pts;
    for (int i : cone) pts.push_back(applyMap(p.base->map, p.fan.rays[i]));
    if (pts.empty()) pts.push_back(zeroVec(bf.latticeRank));
    for (const auto& c : baseOpen.cones) {
      PolyCone pc = coneOf(baseOpen, c);
      bool all = true;
      for (const auto& x : pts)
        if (!pc.contains(x)) all = false;
      if (all) return true;
    }
    return false;
  };
  std::set<ConeIdx> kept;
  std::vector<ConeIdx> frontier = p.fan.cones;
  std::set<ConeIdx> visited;
  while (!frontier.empty()) {
    std::vector<ConeIdx> next;
    for (const auto& cone : frontier) {
      if (!visited.insert(cone).second) continue;
      if (mapsIn(cone)) {
        kept.insert(cone);
        continue;
      }
      PolyCone pc = coneOf(p.fan, cone);
      for (const auto& nrm : pc.facetNormals) {
        ConeIdx face;
        for (int i : cone)
          if (dot(nrm, p.fan.rays[i]) == 0) face.push_back(i);
        std::sort(face.begin(), face.end());
        next.push_back(face);
      }
    }
    frontier = next;
  }
  std::set<int> raysUsed;
  std::vector<ConeIdx> keptMax;
  for (const auto& c : kept) {
    bool dominated = false;
    for (const auto& d : kept)
      if (c != d && std::includes(d.begin(), d.end(), c.begin(), c.end())) dominated = true;
    if (!dominated) {
      keptMax.push_back(c);
      for (int i : c) raysUsed.insert(i);
    }
  }
  RestrictedFamily out;
  out.ambientRayCount = static_cast<int>(p.fan.rays.size());
  out.rayMap.assign(raysUsed.begin(), raysUsed.end());
  std::vector<int> old2new(p.fan.rays.size(), -1);
  QMat rays;
  for (std::size_t k = 0; k < out.rayMap.size(); ++k) {
    old2new[out.rayMap[k]] = static_cast<int>(k);
    rays.push_back(p.fan.rays[out.rayMap[k]]);
  }
  std::vector<ConeIdx> cones;
  for (const auto& c : keptMax) {
    ConeIdx nc;
    for (int i : c) nc.push_back(old2new[i]);
    std::sort(nc.begin(), nc.end());
    cones.push_back(nc);
  }
  out.pair.fan = makeFan(p.fan.latticeRank, rays, cones);
  out.pair.boundary.clear();
  for (int i : out.rayMap) out.pair.boundary.push_back(p.boundary[i]);
  out.pair.base = BaseData{baseOpen, p.base->map};
  out.baseRayMap = baseRayMap;
  validatePair(out.pair);
  return out;
}

TDivisor restrictDivisor(const RestrictedFamily& r, const TDivisor& d) {
  TDivisor out;
  for (int i : r.rayMap) out.push_back(d[i]);
  return out;
}

QVec extendCurveVec(const RestrictedFamily& r, const QVec& classVec) {
  QVec out = zeroVec(r.ambientRayCount);
  for (std::size_t k = 0; k < r.rayMap.size(); ++k) out[r.rayMap[k]] = classVec[k];
  return out;
}

}  // namespace tmmp
