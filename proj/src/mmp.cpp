#include "tmmp/mmp.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>

#include "tmmp/linalg.hpp"

namespace tmmp {

namespace {

TDivisor addDiv(const TDivisor& a, const TDivisor& b) {
  TDivisor r(a);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] += b[i];
  return r;
}

TDivisor scaleDiv(const TDivisor& a, const Rat& t) {
  TDivisor r(a);
  for (auto& x : r) x *= t;
  return r;
}

}  // namespace

Rat nefThreshold(const Pair& p, const TDivisor& a) {
  TDivisor kd = p.logCanonical();
  if (!isQCartier(kd, p.fan)) throw MmpError("nefThreshold: K+Delta is not Q-Cartier");
  if (!isQCartier(a, p.fan)) throw MmpError("nefThreshold: scaling divisor is not Q-Cartier");
  Rat lambda = 0;
  for (const auto& c : contractedCurves(p)) {
    Rat kDeg = intersectionNumber(kd, c);
    if (kDeg >= 0) continue;
    Rat aDeg = intersectionNumber(a, c);
    if (aDeg <= 0)
      throw MmpError("nefThreshold: K+Delta+tA is never nef along a contracted curve");
    lambda = std::max(lambda, Rat(-kDeg / aDeg));
  }
  return lambda;
}

ThresholdBound nefThresholdWithBound(const Pair& p, const TDivisor& a) {
  ThresholdBound out;
  out.lambda = nefThreshold(p, a);
  out.cartierIdx = cartierIndex(p.logCanonical(), p.fan);
  out.fiberDim = maxFiberDim(p);
  // The theorem takes H in Pic(X): the scaling divisor must be Cartier.
  out.applies = out.lambda > 0 && cartierIndex(a, p.fan) == 1;
  if (out.applies) {
    // Rationality theorem: r = max{t : A + t(K+Delta) nef} = 1/lambda;
    // write r/a = u/v reduced, then v <= a(b+1).
    Rat rOverA = Rat(1) / (out.lambda * Rat(out.cartierIdx));
    out.denominator = denomOf(rOverA);
  } else {
    out.denominator = 1;
  }
  return out;
}

CurveClass selectExtremalRay(const Pair& p, const TDivisor& a, const Rat& lambda) {
  if (lambda <= 0) throw MmpError("selectExtremalRay: threshold is zero, nothing to select");
  TDivisor kd = p.logCanonical();
  TDivisor support = addDiv(kd, scaleDiv(a, lambda));
  NumSpace ns = buildN1(p);
  PolyCone mori = moriCone(p, ns);
  std::vector<CurveClass> attaining;
  for (const auto& c : ns.curves) {
    if (intersectionNumber(support, c) != 0) continue;
    if (intersectionNumber(kd, c) >= 0) continue;
    // Extremality: the ray spanned by c is a one-dimensional face.
    QVec coords = primitive(curveClassCoords(ns, c.classVec));
    bool extremal = false;
    int dim = mori.dim();
    for (const auto& rayFace : facesOfCodim(mori, dim - 1))
      if (!rayFace.generators.empty() && rayFace.generators[0] == coords) extremal = true;
    if (extremal) attaining.push_back(c);
  }
  if (attaining.empty()) throw MmpError("selectExtremalRay: no extremal ray attains the threshold");
  // Lexicographically smallest wall by sorted ray indices.
  std::sort(attaining.begin(), attaining.end(),
            [](const CurveClass& x, const CurveClass& y) { return x.wall < y.wall; });
  return attaining[0];
}

namespace {

struct CircuitGroup {
  std::vector<int> coneIdxs;   // fan.cones indices merged by the contraction
  ConeIdx rays;                // union of their rays (ambient indices)
  QVec relation;               // per entry of `rays`; positive on off-wall rays
  std::vector<int> positive, negative, zero;  // positions into `rays`
};

// Decomposes the contracted locus into circuit groups.
std::vector<CircuitGroup> circuitGroups(const Pair& p, const CurveClass& ray,
                                        std::vector<CurveClass>* wallsInRay = nullptr) {
  NumSpace ns = buildN1(p);
  QVec target = primitive(curveClassCoords(ns, ray.classVec));
  std::vector<CurveClass> contracted;
  for (const auto& c : ns.curves) {
    QVec coords = primitive(curveClassCoords(ns, c.classVec));
    if (coords == target) contracted.push_back(c);
  }
  if (wallsInRay) *wallsInRay = contracted;
  // Union-find over maximal cones through the contracted walls.
  std::map<int, int> comp;
  std::function<int(int)> find = [&](int x) {
    auto it = comp.find(x);
    if (it == comp.end() || it->second == x) {
      comp[x] = x;
      return x;
    }
    return comp[x] = find(it->second);
  };
  for (const auto& c : contracted) comp[find(c.sideA)] = find(c.sideB);
  std::map<int, CircuitGroup> groups;
  for (const auto& c : contracted) {
    int root = find(c.sideA);
    auto& g = groups[root];
    for (int side : {c.sideA, c.sideB})
      if (std::find(g.coneIdxs.begin(), g.coneIdxs.end(), side) == g.coneIdxs.end())
        g.coneIdxs.push_back(side);
  }
  std::vector<CircuitGroup> out;
  for (auto& [root, g] : groups) {
    std::set<int> rays;
    for (int ci : g.coneIdxs)
      for (int r : p.fan.cones[ci]) rays.insert(r);
    g.rays.assign(rays.begin(), rays.end());
    QMat gens;
    for (int r : g.rays) gens.push_back(p.fan.rays[r]);
    QMat rel = nullspaceBasis(
        [&] {
          // transpose: relation on the rays means sum rel_k * u_k = 0
          QMat t(p.fan.latticeRank, QVec(g.rays.size(), Rat(0)));
          for (std::size_t k = 0; k < g.rays.size(); ++k)
            for (int j = 0; j < p.fan.latticeRank; ++j) t[j][k] = gens[k][j];
          return t;
        }(),
        static_cast<int>(g.rays.size()));
    if (rel.size() != 1)
      throw InternalError("contraction: merged component is not a circuit cone");
    g.relation = primitive(rel[0]);
    // Orientation: positive on a contracted wall's off-rays.
    const CurveClass* wall = nullptr;
    for (const auto& c : contracted)
      if (std::find(g.coneIdxs.begin(), g.coneIdxs.end(), c.sideA) != g.coneIdxs.end())
        wall = &c;
    int offA = -1;
    for (int i : p.fan.cones[wall->sideA])
      if (std::find(wall->wall.begin(), wall->wall.end(), i) == wall->wall.end()) offA = i;
    int posInRays =
        static_cast<int>(std::find(g.rays.begin(), g.rays.end(), offA) - g.rays.begin());
    if (g.relation[posInRays] < 0) g.relation = scale(g.relation, Rat(-1));
    if (g.relation[posInRays] == 0)
      throw MmpError("contraction: off-wall ray missing from the circuit relation");
    for (std::size_t k = 0; k < g.rays.size(); ++k) {
      if (g.relation[k] > 0)
        g.positive.push_back(static_cast<int>(k));
      else if (g.relation[k] < 0)
        g.negative.push_back(static_cast<int>(k));
      else
        g.zero.push_back(static_cast<int>(k));
    }
    out.push_back(g);
  }
  if (out.empty()) throw MmpError("contraction: no wall carries the given ray class");
  return out;
}

Fan removeRayFromFan(const Fan& f, const std::set<int>& removed,
                     const std::vector<ConeIdx>& newMaximal) {
  std::vector<int> old2new(f.rays.size(), -1);
  QMat rays;
  for (std::size_t i = 0; i < f.rays.size(); ++i) {
    if (removed.count(static_cast<int>(i))) continue;
    old2new[i] = static_cast<int>(rays.size());
    rays.push_back(f.rays[i]);
  }
  std::vector<ConeIdx> cones;
  for (const auto& c : newMaximal) {
    ConeIdx nc;
    for (int i : c) {
      if (old2new[i] < 0) throw MmpError("contraction: removed ray still used");
      nc.push_back(old2new[i]);
    }
    std::sort(nc.begin(), nc.end());
    cones.push_back(nc);
  }
  return makeFan(f.latticeRank, rays, cones);
}

// Quotient of the lattice by the saturation of span(lRows); returns the
// projection matrix (rows form a basis of the perp lattice).
QMat latticeQuotient(const QMat& lRows, int n) {
  QMat perp = nullspaceBasis(lRows, n);
  return saturatedRowLattice(perp, n);
}

Fan quotientFan(const Fan& f, const QMat& proj) {
  const int k = static_cast<int>(proj.size());
  std::vector<ConeIdx> cones;
  QMat rays;
  auto rayIdx = [&](const QVec& v) {
    for (std::size_t i = 0; i < rays.size(); ++i)
      if (rays[i] == v) return static_cast<int>(i);
    rays.push_back(v);
    return static_cast<int>(rays.size()) - 1;
  };
  for (const auto& c : f.cones) {
    QMat images;
    for (int i : c) images.push_back(matVec(proj, f.rays[i]));
    PolyCone pc = coneFromGenerators(images, k);
    if (!pc.isPointed()) throw MmpError("quotient fan: image cone is not strongly convex");
    ConeIdx nc;
    for (const auto& g : pc.generators) nc.push_back(rayIdx(g));
    std::sort(nc.begin(), nc.end());
    cones.push_back(nc);
  }
  Fan out = makeFan(k, rays, cones);
  FanReport rep = validateFan(out);
  if (!rep.errors.empty())
    throw MmpError("quotient fan invalid: " + rep.errors.front());
  return out;
}

// Good-contraction property: (L.R) = 0 iff L descends to the target as
// Q-Cartier. `targetFan` shares the lattice with p.fan.
void verifyGoodContraction(const Pair& p, const CurveClass& ray, const Fan& targetFan) {
  const std::size_t n = p.fan.rays.size();
  auto descends = [&](const TDivisor& l) {
    TDivisor down = birationalTransform(p.fan, targetFan, l);
    CartierResult cr = cartierData(down, targetFan);
    if (std::holds_alternative<NotQCartier>(cr)) return false;
    TDivisor back = pullbackDivisor(identityMap(p.fan.latticeRank), p.fan, targetFan, down);
    return back == l;
  };
  // A spanning set of the hyperplane (L.R) = 0 must descend.
  int pivot = -1;
  for (std::size_t i = 0; i < n; ++i)
    if (ray.classVec[i] != 0) pivot = static_cast<int>(i);
  if (pivot < 0) throw MmpError("good contraction: trivial curve class");
  for (std::size_t i = 0; i < n; ++i) {
    if (static_cast<int>(i) == pivot) continue;
    TDivisor l(n, Rat(0));
    l[i] = 1;
    l[pivot] = -ray.classVec[i] / ray.classVec[pivot];
    if (dot(l, ray.classVec) != 0) throw MmpError("good contraction: construction error");
    if (!descends(l)) throw MmpError("good contraction: a trivial-degree divisor fails to descend");
  }
  // And a transversal divisor must not.
  TDivisor t(n, Rat(0));
  t[pivot] = 1;
  if (descends(t))
    throw MmpError("good contraction: a nonzero-degree divisor descends");
}

}  // namespace

Contraction contractRay(const Pair& p, const CurveClass& ray) {
  if (!isQFactorial(p.fan)) throw MmpError("contractRay: fan is not Q-factorial");
  // Supporting nef divisor with (H.C)=0 exactly on the ray (extremality).
  NumSpace ns = buildN1(p);
  QVec target = primitive(curveClassCoords(ns, ray.classVec));
  LpProblem lp;
  for (const auto& c : ns.curves) {
    QVec coords = primitive(curveClassCoords(ns, c.classVec));
    lp.Age.push_back(c.classVec);
    lp.bge.push_back(coords == target ? Rat(0) : Rat(1));
    if (coords == target) {
      lp.Aeq.push_back(c.classVec);
      lp.beq.push_back(Rat(0));
    }
  }
  lp.c = zeroVec(static_cast<int>(p.fan.rays.size()));
  LpResult r = lpSolve(lp);
  if (!lpIsOptimal(r)) throw MmpError("contractRay: class is not an extremal ray");
  Contraction out;
  out.supportingDivisor = lpOpt(r).witness;

  std::vector<CurveClass> walls;
  auto groups = circuitGroups(p, ray, &walls);

  bool fiberType = false;
  for (const auto& g : groups)
    if (g.negative.empty()) fiberType = true;

  if (fiberType) {
    for (const auto& g : groups)
      if (!g.negative.empty()) throw MmpError("contractRay: mixed fiber and birational components");
    // Quotient by the span of the positive rays of all groups.
    QMat lRows;
    for (const auto& g : groups)
      for (int k : g.positive) lRows.push_back(p.fan.rays[g.rays[k]]);
    QMat proj = latticeQuotient(lRows, p.fan.latticeRank);
    out.kind = StepKind::MoriFiber;
    out.quotientMatrix = proj;
    Pair tgt;
    if (proj.empty()) {
      tgt.fan.latticeRank = 0;
      tgt.fan.cones = {ConeIdx{}};
    } else {
      tgt.fan = quotientFan(p.fan, proj);
      tgt.boundary = TDivisor(tgt.fan.rays.size(), Rat(0));
    }
    if (p.base) {
      // The structure map must factor through the quotient.
      const QMat& fz = p.base->map.matrix;
      for (const auto& l : lRows)
        if (!isZeroVec(matVec(fz, l)))
          throw MmpError("contractRay: fiber direction not contracted by the base map");
      // Solve M * proj = fz row by row.
      QMat projT(p.fan.latticeRank, QVec(proj.size(), Rat(0)));
      for (std::size_t i = 0; i < proj.size(); ++i)
        for (int j = 0; j < p.fan.latticeRank; ++j) projT[j][i] = proj[i][j];
      QMat m;
      for (const auto& row : fz) {
        auto sol = solveLinear(projT, row);
        if (!sol) throw MmpError("contractRay: base map does not factor through the quotient");
        m.push_back(*sol);
      }
      tgt.base = BaseData{p.base->fan, LatticeMap{m}};
    }
    if (tgt.fan.latticeRank > 0) {
      validatePair(tgt);
      findAmpleDivisor(tgt);
      // Goodness: a divisor class trivial on the ray descends along the
      // quotient up to linear equivalence. Normalize the coefficients of the
      // kernel-direction rays to zero first, then match literally.
      LatticeMap q{proj};
      std::vector<int> kernelRays, imageRayOf(tgt.fan.rays.size(), -1);
      std::vector<Rat> imageScale(tgt.fan.rays.size(), Rat(0));
      for (std::size_t rr = 0; rr < p.fan.rays.size(); ++rr) {
        QVec img = matVec(proj, p.fan.rays[rr]);
        if (isZeroVec(img)) {
          kernelRays.push_back(static_cast<int>(rr));
          continue;
        }
        QVec pim = primitive(img);
        int w = tgt.fan.rayIndex(pim);
        if (w >= 0 && imageRayOf[w] < 0) {
          imageRayOf[w] = static_cast<int>(rr);
          for (std::size_t j = 0; j < img.size(); ++j)
            if (pim[j] != 0) {
              imageScale[w] = img[j] / pim[j];
              break;
            }
        }
      }
      int pivot = -1;
      for (std::size_t i = 0; i < p.fan.rays.size(); ++i)
        if (ray.classVec[i] != 0) pivot = static_cast<int>(i);
      auto descends = [&](const TDivisor& l) {
        QMat sys;
        QVec rhs;
        for (int kr : kernelRays) {
          sys.push_back(p.fan.rays[kr]);
          rhs.push_back(-l[kr]);
        }
        auto m = solveLinear(sys, rhs);
        if (!m) return false;
        TDivisor norm = addDiv(l, principalDivisor(*m, p.fan));
        TDivisor down(tgt.fan.rays.size(), Rat(0));
        for (std::size_t w = 0; w < tgt.fan.rays.size(); ++w) {
          if (imageRayOf[w] < 0) return false;
          down[w] = norm[imageRayOf[w]] / imageScale[w];
        }
        return pullbackDivisor(q, p.fan, tgt.fan, down) == norm;
      };
      for (std::size_t i = 0; i < p.fan.rays.size(); ++i) {
        if (static_cast<int>(i) == pivot) continue;
        TDivisor l(p.fan.rays.size(), Rat(0));
        l[i] = 1;
        l[pivot] = -ray.classVec[i] / ray.classVec[pivot];
        if (!descends(l))
          throw MmpError("good contraction: fiber-trivial divisor fails to descend");
      }
      TDivisor t(p.fan.rays.size(), Rat(0));
      t[pivot] = 1;
      if (descends(t)) throw MmpError("good contraction: a nonzero-degree divisor descends");
    }
    out.target = tgt;
    return out;
  }

  bool divisorial = true;
  std::set<int> removed;
  for (const auto& g : groups) {
    if (g.negative.size() != 1)
      divisorial = false;
    else
      removed.insert(g.rays[g.negative[0]]);
  }
  if (divisorial && removed.size() != 1)
    throw MmpError("contractRay: divisorial groups disagree on the contracted ray");

  std::vector<ConeIdx> maximal;
  std::set<int> grouped;
  for (const auto& g : groups)
    for (int ci : g.coneIdxs) grouped.insert(ci);
  for (std::size_t ci = 0; ci < p.fan.cones.size(); ++ci)
    if (!grouped.count(static_cast<int>(ci))) maximal.push_back(p.fan.cones[ci]);

  if (divisorial) {
    for (const auto& g : groups) {
      ConeIdx merged;
      for (std::size_t k = 0; k < g.rays.size(); ++k)
        if (!removed.count(g.rays[k])) merged.push_back(g.rays[k]);
      maximal.push_back(merged);
    }
    Fan tf = removeRayFromFan(p.fan, removed, maximal);
    FanReport rep = validateFan(tf);
    if (!rep.errors.empty()) throw MmpError("contractRay: invalid contracted fan");
    if (!isSimplicialFan(tf)) throw MmpError("contractRay: contracted fan not simplicial");
    out.kind = StepKind::Divisorial;
    out.removedRays.assign(removed.begin(), removed.end());
    Pair tgt;
    tgt.fan = tf;
    tgt.boundary = birationalTransform(p.fan, tf, p.boundary);
    tgt.base = p.base;
    validatePair(tgt);
    verifyGoodContraction(p, ray, tf);
    findAmpleDivisor(tgt);
    out.target = tgt;
    return out;
  }

  // Small: assemble the (non-simplicial) target Y for the flip request.
  for (const auto& g : groups) maximal.push_back(g.rays);
  Fan yf = makeFan(p.fan.latticeRank, p.fan.rays, maximal);
  FanReport rep = validateFan(yf);
  if (!rep.errors.empty()) throw MmpError("contractRay: invalid small-contraction fan");
  out.kind = StepKind::Flip;
  Pair tgt;
  tgt.fan = yf;
  tgt.boundary = birationalTransform(p.fan, yf, p.boundary);
  tgt.base = p.base;
  out.target = tgt;
  verifyGoodContraction(p, ray, yf);
  return out;
}

FlipResult flip(const Pair& p, const CurveClass& ray) {
  TDivisor kd = p.logCanonical();
  Rat deg = intersectionNumber(kd, ray);
  if (deg == 0)
    throw MmpError("flip: (K+Delta) is numerically trivial on the ray (a flop, not a flip)");
  if (deg > 0) throw MmpError("flip: (K+Delta) is positive on the ray");
  Contraction c = contractRay(p, ray);
  if (c.kind != StepKind::Flip)
    throw MmpError("flip: the contraction is not small");
  auto groups = circuitGroups(p, ray);
  std::vector<ConeIdx> maximal;
  std::set<int> grouped;
  for (const auto& g : groups)
    for (int ci : g.coneIdxs) grouped.insert(ci);
  for (std::size_t ci = 0; ci < p.fan.cones.size(); ++ci)
    if (!grouped.count(static_cast<int>(ci))) maximal.push_back(p.fan.cones[ci]);
  for (const auto& g : groups) {
    // Opposite coherent triangulation: cones omitting one negative ray each.
    for (int k : g.negative) {
      ConeIdx nc;
      for (std::size_t j = 0; j < g.rays.size(); ++j)
        if (static_cast<int>(j) != k) nc.push_back(g.rays[j]);
      std::sort(nc.begin(), nc.end());
      maximal.push_back(nc);
    }
  }
  Fan plus = makeFan(p.fan.latticeRank, p.fan.rays, maximal);
  FanReport rep = validateFan(plus);
  if (!rep.errors.empty())
    throw MmpError("flip: no valid opposite triangulation: " + rep.errors.front());
  if (fanEquals(plus, p.fan)) throw MmpError("flip: opposite triangulation equals the original");
  FlipResult out;
  out.target.fan = plus;
  out.target.boundary = birationalTransform(p.fan, plus, p.boundary);
  out.target.base = p.base;
  out.smallY = c.target;
  validatePair(out.target);
  if (!isQFactorial(plus)) throw MmpError("flip: X^+ is not Q-factorial");
  findAmpleDivisor(out.target);
  // K+Delta^+ must be positive on the flipped walls (relatively ample over Y).
  TDivisor kdPlus = out.target.logCanonical();
  Pair overY = out.target;
  overY.base = BaseData{c.target.fan, identityMap(p.fan.latticeRank)};
  auto flipped = contractedCurves(overY);
  if (flipped.empty()) throw MmpError("flip: no flipped curve found");
  for (const auto& fc : flipped)
    if (intersectionNumber(kdPlus, fc) <= 0)
      throw MmpError("flip: K+Delta^+ fails positivity on the flipped curve");
  out.flippedCurve = flipped.front();
  FlipAxiomReport rep2 = checkFlipAxioms(out.target, c.target.fan, out.target.boundary);
  if (!rep2.pass()) throw MmpError("flip: axiom check failed");
  return out;
}

FlipAxiomReport checkFlipAxioms(const Pair& xplus, const Fan& yFan,
                                const TDivisor& boundaryPlus) {
  FlipAxiomReport rep;
  FanReport fr = validateFan(xplus.fan);
  rep.normalValid = fr.errors.empty();
  if (!rep.normalValid) rep.notes.push_back("X^+ fan invalid");

  // Small and not an isomorphism: same rays, refines Y, differs from Y.
  Fan cx = canonicalFan(xplus.fan), cy = canonicalFan(yFan);
  bool sameRays = cx.rays == cy.rays && cx.latticeRank == cy.latticeRank;
  bool refines = sameRays && mapsFanInto(identityMap(cx.latticeRank), xplus.fan, yFan);
  bool nonIso = !(sameRays && cx.cones == cy.cones);
  rep.smallNonIso = sameRays && refines && nonIso;
  if (!sameRays) rep.notes.push_back("f+ contracts or extracts a divisor (not small)");
  if (!nonIso) rep.notes.push_back("f+ is an isomorphism");

  // K+Delta^+ Q-Cartier and f^+-ample.
  TDivisor kd = canonicalDivisor(xplus.fan);
  for (std::size_t i = 0; i < kd.size(); ++i) kd[i] += boundaryPlus[i];
  CartierResult cr = cartierData(kd, xplus.fan);
  if (std::holds_alternative<NotQCartier>(cr)) {
    rep.notes.push_back("K+Delta^+ not Q-Cartier");
    rep.qCartierAmple = false;
    return rep;
  }
  if (!rep.smallNonIso) return rep;
  Pair overY = xplus;
  overY.base = BaseData{yFan, identityMap(xplus.fan.latticeRank)};
  bool ample = true;
  for (const auto& c : contractedCurves(overY)) {
    Rat d = intersectionNumber(kd, c);
    rep.ampleDegrees.push_back(d);
    if (d <= 0) ample = false;
  }
  if (rep.ampleDegrees.empty()) {
    ample = false;
    rep.notes.push_back("no curve contracted over Y");
  }
  rep.qCartierAmple = ample;
  if (!ample) rep.notes.push_back("K+Delta^+ not f+-ample");
  return rep;
}

bool negativityCheck(const Fan& upper, const Fan& lower, const TDivisor& bUpper) {
  if (!isProperMap(identityMap(upper.latticeRank), upper, lower))
    throw MmpError("negativityCheck: not a proper refinement");
  Pair h;
  h.fan = upper;
  h.boundary = TDivisor(upper.rays.size(), Rat(0));
  h.base = BaseData{lower, identityMap(upper.latticeRank)};
  TDivisor minusB = scaleDiv(bUpper, Rat(-1));
  if (!isQCartier(minusB, upper)) throw MmpError("negativityCheck: -B is not Q-Cartier");
  for (const auto& c : contractedCurves(h))
    if (intersectionNumber(minusB, c) < 0)
      throw MmpError("negativityCheck: -B is not h-nef");
  for (std::size_t i = 0; i < upper.rays.size(); ++i)
    if (lower.rayIndex(upper.rays[i]) >= 0 && bUpper[i] < 0)
      throw MmpError("negativityCheck: pushforward of B is not effective");
  for (const auto& x : bUpper)
    if (x < 0) return false;
  return true;
}

GoodScalingReport isGoodScalingDivisor(const Pair& p, const TDivisor& a) {
  GoodScalingReport rep;
  if (!classifyPair(p).klt) {
    rep.reason = "pair is not klt";
    return rep;
  }
  if (!isBig(p, a)) {
    rep.reason = "A is not big";
    return rep;
  }
  TDivisor kda = addDiv(p.logCanonical(), a);
  if (!isQCartier(kda, p.fan) || !isNef(p, kda)) {
    rep.reason = "K+Delta+A is not nef";
    return rep;
  }
  // A' = A + div(m) effective with Delta + A' klt: strict feasibility LP.
  const int n = p.fan.latticeRank;
  LpProblem lp;
  for (std::size_t i = 0; i < p.fan.rays.size(); ++i) {
    QVec row = p.fan.rays[i];
    row.push_back(Rat(0));
    lp.Age.push_back(row);
    lp.bge.push_back(-a[i]);  // effectivity
    QVec row2 = scale(p.fan.rays[i], Rat(-1));
    row2.push_back(Rat(-1));
    lp.Age.push_back(row2);
    lp.bge.push_back(p.boundary[i] + a[i] - 1);  // delta + a + <m,u> <= 1 - t
  }
  {
    QVec row = zeroVec(n);
    row.push_back(Rat(-1));
    lp.Age.push_back(row);
    lp.bge.push_back(Rat(-1));  // t <= 1
  }
  QVec c = zeroVec(n + 1);
  c[n] = 1;
  lp.c = c;
  lp.maximize = true;
  LpResult r = lpSolve(lp);
  if (!lpIsOptimal(r) || lpOpt(r).value <= 0) {
    rep.reason = "no effective representative keeps the pair klt";
    return rep;
  }
  rep.good = true;
  rep.shift = QVec(lpOpt(r).witness.begin(), lpOpt(r).witness.begin() + n);
  rep.aPrime = addDiv(a, principalDivisor(rep.shift, p.fan));
  return rep;
}

namespace {

int rankOfPair(const Pair& p) { return buildN1(p).rankN1; }

}  // namespace

MMPTrace runMMPWithScaling(const Pair& p, const TDivisor& a) {
  validatePair(p);
  if (!isQFactorial(p.fan)) throw MmpError("runMMPWithScaling: X is not Q-factorial");
  if (!classifyPair(p).klt) throw MmpError("runMMPWithScaling: pair is not klt");
  MMPTrace trace;
  Pair cur = p;
  TDivisor curA = a;
  const std::size_t cap = 4 * p.fan.rays.size() * p.fan.rays.size();
  Rat prevLambda;
  bool havePrev = false;
  while (true) {
    if (trace.steps.size() > cap)
      throw InternalError("runMMPWithScaling: iteration cap exceeded");
    Rat lambda = nefThreshold(cur, curA);
    if (havePrev && lambda > prevLambda)
      throw InternalError("runMMPWithScaling: threshold sequence increased");
    if (lambda == 0) {
      trace.outcome = MmpOutcome::MinimalModel;
      trace.finalPair = cur;
      trace.finalScaling = curA;
      break;
    }
    prevLambda = lambda;
    havePrev = true;
    CurveClass ray = selectExtremalRay(cur, curA, lambda);
    Contraction c = contractRay(cur, ray);
    MMPStep step;
    step.kind = c.kind;
    step.ray = ray;
    step.lambda = lambda;
    step.source = cur;
    step.sourceScaling = curA;
    step.rankBefore = rankOfPair(cur);
    if (c.kind == StepKind::MoriFiber) {
      step.target = c.target;
      step.targetScaling = {};
      step.rankAfter =
          c.target.fan.latticeRank > 0 ? rankOfPair(c.target) : 0;
      trace.steps.push_back(step);
      trace.outcome = MmpOutcome::MoriFibration;
      trace.finalPair = c.target;
      trace.finalScaling = curA;
      break;
    }
    Pair next;
    TDivisor nextA;
    if (c.kind == StepKind::Divisorial) {
      next = c.target;
      nextA = birationalTransform(cur.fan, next.fan, curA);
    } else {
      FlipResult fr = flip(cur, ray);
      next = fr.target;
      nextA = birationalTransform(cur.fan, next.fan, curA);
    }
    step.target = next;
    step.targetScaling = nextA;
    step.rankAfter = rankOfPair(next);
    if (c.kind == StepKind::Divisorial && step.rankAfter != step.rankBefore - 1)
      throw InternalError("runMMPWithScaling: divisorial step must drop the rank by one");
    if (c.kind == StepKind::Flip && step.rankAfter != step.rankBefore)
      throw InternalError("runMMPWithScaling: flip changed the rank of N^1");
    if (!classifyPair(next).klt)
      throw MmpError("runMMPWithScaling: klt lost along the run");
    trace.steps.push_back(step);
    cur = next;
    curA = nextA;
  }
  discrepancyLedger(trace);
  return trace;
}

Pair outputAtScale(const Pair& p, const TDivisor& a, const Rat& r) {
  if (r < 0) throw MmpError("outputAtScale: negative scale");
  validatePair(p);
  Pair cur = p;
  TDivisor curA = a;
  const std::size_t cap = 4 * p.fan.rays.size() * p.fan.rays.size();
  for (std::size_t it = 0;; ++it) {
    if (it > cap) throw InternalError("outputAtScale: iteration cap exceeded");
    Rat lambda = nefThreshold(cur, curA);
    if (lambda == 0 || lambda < r) return cur;
    CurveClass ray = selectExtremalRay(cur, curA, lambda);
    Contraction c = contractRay(cur, ray);
    if (c.kind == StepKind::MoriFiber)
      throw MmpError(
          "outputAtScale: fiber-type face at scale >= r; the r-th output does not exist");
    if (c.kind == StepKind::Divisorial) {
      TDivisor nextA = birationalTransform(cur.fan, c.target.fan, curA);
      cur = c.target;
      curA = nextA;
    } else {
      FlipResult fr = flip(cur, ray);
      TDivisor nextA = birationalTransform(cur.fan, fr.target.fan, curA);
      cur = fr.target;
      curA = nextA;
    }
  }
}

OutputCharacterization verifyOutputCharacterization(const Pair& p, const TDivisor& a,
                                                    const Pair& candidate, const Rat& r) {
  OutputCharacterization rep;
  // (i) birational contraction to a normal model proper over the base.
  bool valid = validateFan(candidate.fan).errors.empty();
  bool noNewRays = true;
  for (const auto& u : candidate.fan.rays)
    if (p.fan.rayIndex(u) < 0) noNewRays = false;
  bool properOk = true;
  try {
    validatePair(candidate);
  } catch (const std::exception&) {
    properOk = false;
  }
  rep.birationalContraction =
      valid && noNewRays && properOk && candidate.fan.latticeRank == p.fan.latticeRank;
  if (!rep.birationalContraction) {
    rep.notes.push_back("not a birational contraction to a proper normal model");
    return rep;
  }
  // (ii) f^r_*(D + (r-eps)H) ample for small eps > 0.
  TDivisor dr = birationalTransform(p.fan, candidate.fan, p.logCanonical());
  {
    TDivisor deltaR = birationalTransform(p.fan, candidate.fan, p.boundary);
    TDivisor kR = canonicalDivisor(candidate.fan);
    TDivisor expected = addDiv(kR, deltaR);
    if (dr != expected) rep.notes.push_back("pushforward of K+Delta is not K+Delta downstairs");
  }
  TDivisor hr = birationalTransform(p.fan, candidate.fan, a);
  bool ample = true;
  TDivisor dPlusRH = addDiv(dr, scaleDiv(hr, r));
  if (!isQCartier(dPlusRH, candidate.fan)) {
    ample = false;
    rep.notes.push_back("pushforward not Q-Cartier");
  } else {
    for (const auto& c : contractedCurves(candidate)) {
      Rat base = intersectionNumber(dPlusRH, c);
      Rat hDeg = intersectionNumber(hr, c);
      // (D + (r-eps)H).C = base - eps*hDeg > 0 for all small eps.
      if (!(base > 0 || (base == 0 && hDeg < 0))) ample = false;
    }
  }
  rep.pushforwardAmple = ample;
  if (!ample) rep.notes.push_back("f_*(D+(r-eps)H) is not ample for small eps");
  // (iii) contracted divisors have non-big (D+rH) restriction.
  TDivisor dPlusRHUp = addDiv(p.logCanonical(), scaleDiv(a, r));
  bool onlyNonBig = true;
  for (std::size_t i = 0; i < p.fan.rays.size(); ++i) {
    if (candidate.fan.rayIndex(p.fan.rays[i]) >= 0) continue;
    StarRestriction sr = restrictToInvariantDivisor(p.fan, static_cast<int>(i), dPlusRHUp);
    if (sr.star.latticeRank == 0) continue;
    int dim = polyhedronDim(sectionPolyhedron(sr.restricted, sr.star));
    if (dim == sr.star.latticeRank) {
      onlyNonBig = false;
      rep.notes.push_back("a big divisor was contracted");
    }
  }
  rep.onlyNonBigDivisorsContracted = onlyNonBig;
  return rep;
}

void discrepancyLedger(MMPTrace& trace) {
  // Fixed valuation family: all rays of every model in the trace plus
  // primitive pairwise ray sums inside each maximal cone.
  QMat family;
  auto addV = [&](const QVec& v) {
    QVec pv = primitive(v);
    if (isZeroVec(pv)) return;
    if (std::find(family.begin(), family.end(), pv) == family.end()) family.push_back(pv);
  };
  for (const auto& step : trace.steps) {
    if (step.kind == StepKind::MoriFiber) continue;
    for (const Fan* f : {&step.source.fan, &step.target.fan}) {
      for (const auto& u : f->rays) addV(u);
      for (const auto& cone : f->cones)
        for (std::size_t x = 0; x < cone.size(); ++x)
          for (std::size_t y = x + 1; y < cone.size(); ++y)
            addV(add(f->rays[cone[x]], f->rays[cone[y]]));
    }
  }
  for (auto& step : trace.steps) {
    if (step.kind == StepKind::MoriFiber) continue;
    step.ledger.clear();
    bool strict = false;
    for (const auto& v : family) {
      if (!coneContaining(step.source.fan, v)) continue;
      if (!coneContaining(step.target.fan, v)) continue;
      LedgerEntry entry;
      entry.valuation = v;
      entry.before = -discrepancy(step.source, v);
      entry.after = -discrepancy(step.target, v);
      if (entry.after > entry.before)
        throw InternalError("discrepancyLedger: boundary multiplicity increased along a step");
      if (entry.after < entry.before) strict = true;
      step.ledger.push_back(entry);
    }
    bool nontrivial = !fanEquals(step.source.fan, step.target.fan);
    if (nontrivial && !strict)
      throw InternalError("discrepancyLedger: no strict decrease on a nontrivial step");
    if (!nontrivial)
      throw InternalError("discrepancyLedger: isomorphism recorded as a step");
  }
}

BasepointFreeResult basepointFreeCheck(const Pair& p, const TDivisor& h) {
  BasepointFreeResult out;
  if (!isQCartier(h, p.fan)) throw MmpError("basepointFreeCheck: H is not Q-Cartier");
  for (const auto& c : contractedCurves(p)) {
    if (intersectionNumber(h, c) < 0) {
      out.counterexample = c;
      return out;
    }
  }
  if (!classifyPair(p).klt) throw MmpError("basepointFreeCheck: pair is not klt");
  // aH - (K+Delta) ample for some a > 0.
  TDivisor kd = p.logCanonical();
  bool found = false;
  for (int aa = 1; aa <= 64 && !found; ++aa) {
    TDivisor t = scaleDiv(h, Rat(aa));
    for (std::size_t i = 0; i < t.size(); ++i) t[i] -= kd[i];
    if (isAmple(p, t)) found = true;
  }
  if (!found) throw MmpError("basepointFreeCheck: aH-(K+Delta) is never ample");
  Int m0 = cartierIndex(h, p.fan);
  // Global generation certificate: each m_sigma of m0*H is a section.
  TDivisor mh = scaleDiv(h, Rat(m0));
  CartierResult cr = cartierData(mh, p.fan);
  const CartierData& cd = std::get<CartierData>(cr);
  Polyhedron sp = sectionPolyhedron(mh, p.fan);
  for (const auto& m : cd.m) {
    bool inside = true;
    for (std::size_t i = 0; i < sp.A.size(); ++i)
      if (dot(sp.A[i], m) < sp.b[i]) inside = false;
    if (!inside) throw MmpError("basepointFreeCheck: local datum is not a section");
  }
  out.m0 = m0;
  return out;
}

bool isSemiample(const Pair& p, const TDivisor& d) {
  if (!isQCartier(d, p.fan)) throw MmpError("isSemiample: divisor is not Q-Cartier");
  return isNef(p, d);
}

StarRestriction restrictToInvariantDivisor(const Fan& f, int rayIdx, const TDivisor& d) {
  if (!isQCartier(d, f)) throw MmpError("restrictToInvariantDivisor: divisor not Q-Cartier");
  const QVec& u = f.rays[rayIdx];
  // Normalize the coefficient at the ray to zero.
  QMat sys = {u};
  QVec rhs = {-d[rayIdx]};
  auto m = solveLinear(sys, rhs);
  TDivisor g = addDiv(d, principalDivisor(*m, f));
  // Quotient lattice N / Z u.
  QMat proj = latticeQuotient({u}, f.latticeRank);
  const int k = static_cast<int>(proj.size());
  StarRestriction out;
  if (k == 0) {
    out.star.latticeRank = 0;
    return out;
  }
  CartierResult cr = cartierData(g, f);
  const CartierData& cd = std::get<CartierData>(cr);
  QMat rays;
  std::vector<ConeIdx> cones;
  std::vector<Rat> coeffs;
  auto rayIdxOf = [&](const QVec& v, const Rat& coeff) {
    for (std::size_t i = 0; i < rays.size(); ++i)
      if (rays[i] == v) return static_cast<int>(i);
    rays.push_back(v);
    coeffs.push_back(coeff);
    return static_cast<int>(rays.size()) - 1;
  };
  for (std::size_t ci = 0; ci < f.cones.size(); ++ci) {
    const auto& cone = f.cones[ci];
    if (std::find(cone.begin(), cone.end(), rayIdx) == cone.end()) continue;
    QMat images;
    for (int i : cone)
      if (i != rayIdx) images.push_back(matVec(proj, f.rays[i]));
    PolyCone pc = coneFromGenerators(images, k);
    ConeIdx nc;
    for (const auto& w : pc.generators) {
      // Lift w into the cone and read the support function there:
      // w = proj(x) for x = sum lam_a u_a over the cone's rays.
      QMat sysL(k, QVec(cone.size(), Rat(0)));
      for (std::size_t a2 = 0; a2 < cone.size(); ++a2) {
        QVec img = matVec(proj, f.rays[cone[a2]]);
        for (int b2 = 0; b2 < k; ++b2) sysL[b2][a2] = img[b2];
      }
      auto lam = solveLinear(sysL, w);
      if (!lam) throw MmpError("restrictToInvariantDivisor: lift failed");
      QVec x = zeroVec(f.latticeRank);
      for (std::size_t a2 = 0; a2 < cone.size(); ++a2)
        x = add(x, scale(f.rays[cone[a2]], (*lam)[a2]));
      Rat coeff = -dot(cd.m[ci], x);
      int idx = rayIdxOf(w, coeff);
      if (coeffs[idx] != coeff)
        throw MmpError("restrictToInvariantDivisor: inconsistent restriction");
      nc.push_back(idx);
    }
    std::sort(nc.begin(), nc.end());
    cones.push_back(nc);
  }
  out.star = makeFan(k, rays, cones);
  out.restricted = coeffs;
  FanReport rep = validateFan(out.star);
  if (!rep.errors.empty()) throw MmpError("restrictToInvariantDivisor: invalid star fan");
  return out;
}

}  // namespace tmmp
