#include "tmmp/chambers.hpp"

#include <algorithm>
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

TDivisor combine(const std::vector<TDivisor>& ds, const QVec& t) {
  TDivisor d(ds[0].size(), Rat(0));
  for (std::size_t i = 0; i < ds.size(); ++i)
    for (std::size_t r = 0; r < d.size(); ++r) d[r] += t[i] * ds[i][r];
  return d;
}

}  // namespace

Polyhedron polytopeL(const DivisorSpan& v) {
  const int p = static_cast<int>(v.rays.size());
  QMat A;
  QVec b;
  for (int i = 0; i < p; ++i) {
    QVec lo = zeroVec(p), hi = zeroVec(p);
    lo[i] = 1;
    hi[i] = -1;
    A.push_back(lo);
    b.push_back(Rat(0));
    A.push_back(hi);
    b.push_back(Rat(-1));
  }
  return polyhedronFromInequalities(A, b, p);
}

Polyhedron computeEAV(const Pair& p, const TDivisor& a, const DivisorSpan& v) {
  const int ell = static_cast<int>(v.rays.size());
  const int n = p.fan.latticeRank;
  TDivisor base = addDiv(canonicalDivisor(p.fan), a);
  // Joint polyhedron in (b, m): 0 <= b <= 1 and <m,u_rho> >= -(K+A+B)_rho.
  Polyhedron joint;
  joint.ambientDim = ell + n;
  for (int i = 0; i < ell; ++i) {
    QVec lo = zeroVec(ell + n), hi = zeroVec(ell + n);
    lo[i] = 1;
    hi[i] = -1;
    joint.A.push_back(lo);
    joint.b.push_back(Rat(0));
    joint.A.push_back(hi);
    joint.b.push_back(Rat(-1));
  }
  for (std::size_t rho = 0; rho < p.fan.rays.size(); ++rho) {
    QVec row = zeroVec(ell + n);
    for (int i = 0; i < ell; ++i)
      if (v.rays[i] == static_cast<int>(rho)) row[i] = 1;
    for (int j = 0; j < n; ++j) row[ell + j] = p.fan.rays[rho][j];
    joint.A.push_back(row);
    joint.b.push_back(-base[rho]);
  }
  Polyhedron out = projectPolyhedron(joint, ell);
  // Rationality of the vertices is intrinsic to the exact projection; assert.
  for (const auto& vert : vertexEnumeration(out).points)
    for (const auto& x : vert) (void)denomOf(x);
  return out;
}

Polyhedron computeBSAV(const Pair& p, int sRay, const TDivisor& a, const DivisorSpan& v) {
  for (int i : v.rays)
    if (i == sRay) throw ChambersError("computeBSAV: S must be distinct from the span basis");
  const int ell = static_cast<int>(v.rays.size());
  const int n = p.fan.latticeRank;
  TDivisor base = addDiv(canonicalDivisor(p.fan), a);
  base[sRay] += 1;  // K + S + A
  Polyhedron joint;
  joint.ambientDim = ell + n;
  for (int i = 0; i < ell; ++i) {
    QVec lo = zeroVec(ell + n), hi = zeroVec(ell + n);
    lo[i] = 1;
    hi[i] = -1;
    joint.A.push_back(lo);
    joint.b.push_back(Rat(0));
    joint.A.push_back(hi);
    joint.b.push_back(Rat(-1));
  }
  for (std::size_t rho = 0; rho < p.fan.rays.size(); ++rho) {
    QVec row = zeroVec(ell + n);
    for (int i = 0; i < ell; ++i)
      if (v.rays[i] == static_cast<int>(rho)) row[i] = 1;
    for (int j = 0; j < n; ++j) row[ell + j] = p.fan.rays[rho][j];
    joint.A.push_back(row);
    joint.b.push_back(-base[rho]);
  }
  // o_S = 0: the coefficient of S in K+S+A+B plus <m, u_S> is <= 0, and B has
  // no S-component, so the coefficient is base[sRay].
  {
    QVec row = zeroVec(ell + n);
    for (int j = 0; j < n; ++j) row[ell + j] = -p.fan.rays[sRay][j];
    joint.A.push_back(row);
    joint.b.push_back(base[sRay]);
  }
  return projectPolyhedron(joint, ell);
}

std::optional<Rat> asymptoticOrder(const Pair& p, const QVec& vIn, const TDivisor& d) {
  QVec v = primitive(vIn);
  if (!coneContaining(p.fan, v))
    throw ChambersError("asymptoticOrder: valuation outside the fan support");
  Polyhedron sp = sectionPolyhedron(d, p.fan);
  if (isEmptyPolyhedron(sp)) return std::nullopt;
  CartierResult cr = cartierData(d, p.fan);
  if (std::holds_alternative<NotQCartier>(cr))
    throw ChambersError("asymptoticOrder: divisor is not Q-Cartier");
  Rat cv = -supportFunctionValue(std::get<CartierData>(cr), p.fan, v);
  LpResult r = lpOverPolyhedron(v, sp, false);
  if (!lpIsOptimal(r)) throw ChambersError("asymptoticOrder: unbounded order");
  return cv + lpOpt(r).value;
}

PolyCone supportCone(const Pair& p, const std::vector<TDivisor>& ds) {
  if (ds.empty()) throw ChambersError("supportCone: empty divisor list");
  const int ell = static_cast<int>(ds.size());
  const int n = p.fan.latticeRank;
  Polyhedron joint;
  joint.ambientDim = ell + n;
  for (int i = 0; i < ell; ++i) {
    QVec row = zeroVec(ell + n);
    row[i] = 1;
    joint.A.push_back(row);
    joint.b.push_back(Rat(0));
  }
  for (std::size_t rho = 0; rho < p.fan.rays.size(); ++rho) {
    QVec row = zeroVec(ell + n);
    for (int i = 0; i < ell; ++i) row[i] = ds[i][rho];
    for (int j = 0; j < n; ++j) row[ell + j] = p.fan.rays[rho][j];
    joint.A.push_back(row);
    joint.b.push_back(Rat(0));
  }
  Polyhedron proj = projectPolyhedron(joint, ell);
  QMat ineqs = proj.A;  // homogeneous: b entries are all zero
  for (std::size_t i = 0; i < proj.b.size(); ++i)
    if (proj.b[i] != 0) throw ChambersError("supportCone: projection lost homogeneity");
  return coneFromInequalities(ineqs, proj.E, ell);
}

namespace {

// Linear form of o_v on the cell containing the sample point t*, expressed in
// raw t-coordinates. Only its restriction to the support span is meaningful.
QVec orderForm(const Pair& p, const std::vector<TDivisor>& ds, const QVec& v,
               const QVec& tSample) {
  const int ell = static_cast<int>(ds.size());
  // Dual vertices of min <m,v> over P_{D_t}: {y >= 0 : R^T y = v}.
  Polyhedron dual;
  const std::size_t rays = p.fan.rays.size();
  dual.ambientDim = static_cast<int>(rays);
  for (std::size_t i = 0; i < rays; ++i) {
    QVec row = zeroVec(static_cast<int>(rays));
    row[i] = 1;
    dual.A.push_back(row);
    dual.b.push_back(Rat(0));
  }
  for (int j = 0; j < p.fan.latticeRank; ++j) {
    QVec row(rays);
    for (std::size_t i = 0; i < rays; ++i) row[i] = p.fan.rays[i][j];
    dual.E.push_back(row);
    dual.f.push_back(v[j]);
  }
  VRep vr = vertexEnumeration(dual);
  if (vr.points.empty()) throw ChambersError("orderForm: valuation not in the ray cone");
  // Pick the optimal dual vertex at the sample; the form is c_v(t) - d(t).y*.
  QVec best;
  Rat bestVal;
  bool first = true;
  for (const auto& y : vr.points) {
    Rat val = 0;
    TDivisor dt = combine(ds, tSample);
    for (std::size_t i = 0; i < rays; ++i) val -= dt[i] * y[i];
    if (first || val > bestVal) {
      best = y;
      bestVal = val;
      first = false;
    }
  }
  QVec form(ell, Rat(0));
  for (int i = 0; i < ell; ++i) {
    CartierResult cr = cartierData(ds[i], p.fan);
    if (std::holds_alternative<NotQCartier>(cr))
      throw ChambersError("orderForm: generator not Q-Cartier");
    Rat cvi = -supportFunctionValue(std::get<CartierData>(cr), p.fan, v);
    Rat dy = 0;
    for (std::size_t r = 0; r < rays; ++r) dy += ds[i][r] * best[r];
    form[i] = cvi - dy;
  }
  return form;
}

// Canonical basis of the support span, for comparing forms as functionals.
QMat spanBasisOf(const PolyCone& support) {
  QMat rows = support.generators;
  for (const auto& l : support.lineality) rows.push_back(l);
  return saturatedRowLattice(rows, support.ambientDim);
}

QVec formOnBasis(const QVec& rawForm, const QMat& basis) {
  QVec vals;
  for (const auto& b : basis) vals.push_back(dot(rawForm, b));
  return vals;
}

}  // namespace

ChamberDecomposition chamberDecomposition(const Pair& p, const std::vector<TDivisor>& ds,
                                          const QMat& valuations) {
  ChamberDecomposition cd;
  cd.support = supportCone(p, ds);
  cd.valuations = valuations;
  cd.generators = ds;
  const int ell = static_cast<int>(ds.size());
  if (cd.support.dim() == 0) return cd;

  // Subdivision per valuation from the dual vertices of the parametric LP.
  std::vector<std::vector<PolyCone>> subs;
  for (const auto& v : valuations) {
    Polyhedron dual;
    const std::size_t rays = p.fan.rays.size();
    dual.ambientDim = static_cast<int>(rays);
    for (std::size_t i = 0; i < rays; ++i) {
      QVec row = zeroVec(static_cast<int>(rays));
      row[i] = 1;
      dual.A.push_back(row);
      dual.b.push_back(Rat(0));
    }
    for (int j = 0; j < p.fan.latticeRank; ++j) {
      QVec row(rays);
      for (std::size_t i = 0; i < rays; ++i) row[i] = p.fan.rays[i][j];
      dual.E.push_back(row);
      dual.f.push_back(v[j]);
    }
    VRep vr = vertexEnumeration(dual);
    if (vr.points.empty())
      throw ChambersError("chamberDecomposition: valuation not in the ray cone");
    std::vector<PolyCone> cells;
    for (std::size_t j = 0; j < vr.points.size(); ++j) {
      // {t in support : -d(t).y_j >= -d(t).y_l for all l}
      QMat ineqs = cd.support.facetNormals;
      for (std::size_t l = 0; l < vr.points.size(); ++l) {
        if (l == j) continue;
        QVec row(ell, Rat(0));
        for (int i = 0; i < ell; ++i) {
          Rat dyj = 0, dyl = 0;
          for (std::size_t r = 0; r < p.fan.rays.size(); ++r) {
            dyj += ds[i][r] * vr.points[j][r];
            dyl += ds[i][r] * vr.points[l][r];
          }
          row[i] = dyl - dyj;  // -d(t).yj + d(t).yl >= 0
        }
        ineqs.push_back(row);
      }
      PolyCone cell = coneFromInequalities(ineqs, cd.support.spanEq, ell);
      if (cell.dim() == cd.support.dim()) cells.push_back(cell);
    }
    // Dedupe (degenerate duals can repeat regions).
    std::vector<PolyCone> uniq;
    for (const auto& c : cells) {
      bool dup = false;
      for (const auto& u : uniq)
        if (coneEquals(c, u)) dup = true;
      if (!dup) uniq.push_back(c);
    }
    subs.push_back(uniq);
  }
  std::vector<PolyCone> refined = commonRefinement(subs, cd.support);

  // Attach linear forms (as functionals on the support span) and merge cells
  // with identical form tuples; such a union is convex.
  QMat spanBasis = spanBasisOf(cd.support);
  std::map<QMat, QMat> mergedGens;  // form tuple -> generator rows
  for (const auto& cell : refined) {
    QVec sample = coneRelativeInteriorPoint(cell);
    QMat forms;
    for (const auto& v : valuations)
      forms.push_back(formOnBasis(orderForm(p, ds, v, sample), spanBasis));
    auto& gens = mergedGens[forms];
    for (const auto& g : cell.generators) gens.push_back(g);
    for (const auto& l : cell.lineality) {
      gens.push_back(l);
      gens.push_back(scale(l, Rat(-1)));
    }
  }
  for (const auto& [forms, gens] : mergedGens) {
    ChamberCell cell;
    cell.cone = coneFromGenerators(gens, ell);
    cell.forms = forms;
    cd.cells.push_back(cell);
  }
  // Sanity: forms reproduce o_v at the cells' sample points.
  for (const auto& cell : cd.cells) {
    QVec sample = coneRelativeInteriorPoint(cell.cone);
    auto coords = coordinatesIn(spanBasis, sample);
    if (!coords) throw ChambersError("chamberDecomposition: sample outside the span");
    TDivisor dt = combine(ds, sample);
    for (std::size_t k = 0; k < valuations.size(); ++k) {
      auto o = asymptoticOrder(p, valuations[k], dt);
      if (!o) throw ChambersError("chamberDecomposition: sample left the support");
      if (*o != dot(cell.forms[k], *coords))
        throw ChambersError("chamberDecomposition: linear form mismatch");
    }
  }
  // Coarseness: adjacent cells differ in some form.
  for (std::size_t i = 0; i < cd.cells.size(); ++i)
    for (std::size_t j = i + 1; j < cd.cells.size(); ++j) {
      PolyCone inter = coneIntersect(cd.cells[i].cone, cd.cells[j].cone);
      if (inter.dim() != cd.support.dim() - 1) continue;
      if (cd.cells[i].forms == cd.cells[j].forms)
        throw ChambersError("chamberDecomposition: adjacent cells share all forms");
    }
  return cd;
}

std::optional<int> nefChamber(const Pair& p, const ChamberDecomposition& cd) {
  const int ell = static_cast<int>(cd.generators.size());
  auto curves = contractedCurves(p);
  int found = -1;
  for (std::size_t ci = 0; ci < cd.cells.size(); ++ci) {
    QVec sample = coneRelativeInteriorPoint(cd.cells[ci].cone);
    TDivisor dt = combine(cd.generators, sample);
    if (isAmple(p, dt)) {
      if (found >= 0) throw ChambersError("nefChamber: several cells meet the ample cone");
      found = static_cast<int>(ci);
    }
  }
  if (found < 0) return std::nullopt;
  // The cell must be exactly Supp ∩ phi^{-1}(Nef), with all forms zero.
  QMat ineqs = cd.support.facetNormals;
  for (const auto& c : curves) {
    QVec row(ell, Rat(0));
    for (int i = 0; i < ell; ++i) row[i] = intersectionNumber(cd.generators[i], c);
    ineqs.push_back(row);
  }
  PolyCone nefPull = coneFromInequalities(ineqs, cd.support.spanEq, ell);
  if (!coneEquals(nefPull, cd.cells[found].cone))
    throw ChambersError("nefChamber: cell differs from Supp ∩ phi^{-1}(Nef)");
  for (const auto& form : cd.cells[found].forms)
    if (!isZeroVec(form)) throw ChambersError("nefChamber: nonzero order on the nef cell");
  return found;
}

AmpleShiftWitness inAmpleShiftedSet(const Pair& p, const TDivisor& u, bool forceCIsOne) {
  AmpleShiftWitness out;
  auto curves = contractedCurves(p);
  TDivisor k = canonicalDivisor(p.fan);
  const std::size_t rays = p.fan.rays.size();
  // Variables: c, gamma_rho (= c * Delta_a), t; maximize t with
  //   (u - cK - gamma).C >= t, gamma >= 0, gamma <= c - t, c >= t, t <= 1.
  const int nvar = 1 + static_cast<int>(rays) + 1;
  LpProblem lp;
  auto row0 = [&] { return zeroVec(nvar); };
  for (const auto& cc : curves) {
    QVec row = row0();
    row[0] = -intersectionNumber(k, cc);
    for (std::size_t r = 0; r < rays; ++r) row[1 + r] = -cc.classVec[r];
    row[nvar - 1] = -1;
    lp.Age.push_back(row);
    lp.bge.push_back(-intersectionNumber(u, cc));
  }
  for (std::size_t r = 0; r < rays; ++r) {
    QVec pos = row0();
    pos[1 + r] = 1;
    lp.Age.push_back(pos);
    lp.bge.push_back(Rat(0));
    QVec cap = row0();
    cap[0] = 1;
    cap[1 + r] = -1;
    cap[nvar - 1] = -1;
    lp.Age.push_back(cap);
    lp.bge.push_back(Rat(0));
  }
  {
    QVec cpos = row0();
    cpos[0] = 1;
    cpos[nvar - 1] = -1;
    lp.Age.push_back(cpos);
    lp.bge.push_back(Rat(0));
    QVec tcap = row0();
    tcap[nvar - 1] = -1;
    lp.Age.push_back(tcap);
    lp.bge.push_back(Rat(-1));
  }
  if (forceCIsOne) {
    QVec ceq = row0();
    ceq[0] = 1;
    lp.Aeq.push_back(ceq);
    lp.beq.push_back(Rat(1));
  }
  QVec obj = row0();
  obj[nvar - 1] = 1;
  lp.c = obj;
  lp.maximize = true;
  LpResult r = lpSolve(lp);
  if (!lpIsOptimal(r) || lpOpt(r).value <= 0) return out;
  const QVec& w = lpOpt(r).witness;
  out.inSet = true;
  out.c = w[0];
  out.deltaA.assign(rays, Rat(0));
  for (std::size_t rr = 0; rr < rays; ++rr) out.deltaA[rr] = w[1 + rr] / out.c;
  out.ampleW.assign(rays, Rat(0));
  for (std::size_t rr = 0; rr < rays; ++rr)
    out.ampleW[rr] = u[rr] - out.c * k[rr] - w[1 + rr];
  for (const auto& cc : curves) out.ampleDegrees.push_back(intersectionNumber(out.ampleW, cc));
  // Certificates: Delta_a klt, w ample.
  for (const auto& x : out.deltaA)
    if (x < 0 || x >= 1) throw ChambersError("inAmpleShiftedSet: witness boundary not klt");
  for (const auto& dgr : out.ampleDegrees)
    if (dgr <= 0) throw ChambersError("inAmpleShiftedSet: witness residue not ample");
  return out;
}

BoundaryStructure boundaryStructure(const Pair& p, const TDivisor& u, const Rat& radius) {
  if (!isNef(p, u)) throw ChambersError("boundaryStructure: class is not nef");
  NumSpace ns = buildN1(p);
  PolyCone nef = nefCone(p, ns);
  QVec uc = divisorClassCoords(ns, u);
  const int k = ns.rankN1;
  Polyhedron cube;
  cube.ambientDim = k;
  for (int i = 0; i < k; ++i) {
    QVec lo = zeroVec(k), hi = zeroVec(k);
    lo[i] = 1;
    hi[i] = -1;
    cube.A.push_back(lo);
    cube.b.push_back(uc[i] - radius);
    cube.A.push_back(hi);
    cube.b.push_back(-uc[i] - radius);
  }
  BoundaryStructure out;
  // Q = cube ∩ Nef; faces cut by nef facets meeting Int(cube).
  Polyhedron q = cube;
  for (const auto& nrm : nef.facetNormals) {
    q.A.push_back(nrm);
    q.b.push_back(Rat(0));
  }
  for (const auto& e : nef.spanEq) {
    q.E.push_back(e);
    q.f.push_back(Rat(0));
  }
  for (const auto& nrm : nef.facetNormals) {
    Polyhedron face = q;
    face.E.push_back(nrm);
    face.f.push_back(Rat(0));
    if (polyhedronDim(face) != k - 1) continue;
    // Does the face meet the open cube?
    auto rip = relativeInteriorPoint(face);
    if (!rip) continue;
    bool inOpenCube = true;
    for (std::size_t i = 0; i < cube.A.size(); ++i)
      if (dot(cube.A[i], *rip) <= cube.b[i]) inOpenCube = false;
    if (inOpenCube) out.hyperplanes.push_back(nrm);
  }
  // Coverage: every boundary point of Nef inside the open cube lies on one of
  // the listed hyperplanes; equivalently every facet of Q is cut by the cube
  // or by a listed normal.
  out.covered = true;
  VRep vr = vertexEnumeration(q);
  for (const auto& vtx : vr.points) {
    bool onNefBoundary = false;
    for (const auto& nrm : nef.facetNormals)
      if (dot(nrm, vtx) == 0) onNefBoundary = true;
    if (!onNefBoundary) continue;
    bool interiorOfCube = true;
    for (std::size_t i = 0; i < cube.A.size(); ++i)
      if (dot(cube.A[i], vtx) <= cube.b[i]) interiorOfCube = false;
    if (!interiorOfCube) continue;
    bool onListed = false;
    for (const auto& nrm : out.hyperplanes)
      if (dot(nrm, vtx) == 0) onListed = true;
    if (!onListed) out.covered = false;
  }
  return out;
}

PolyCone adjointSupportConeLifted(const Pair& p, const std::vector<TDivisor>& ds) {
  const int ell = static_cast<int>(ds.size());
  const int n = p.fan.latticeRank;
  QMat ineqs;
  for (int i = 0; i < ell; ++i) {
    QVec row = zeroVec(ell + n);
    row[i] = 1;
    ineqs.push_back(row);
  }
  for (std::size_t rho = 0; rho < p.fan.rays.size(); ++rho) {
    QVec row = zeroVec(ell + n);
    for (int i = 0; i < ell; ++i) row[i] = ds[i][rho];
    for (int j = 0; j < n; ++j) row[ell + j] = p.fan.rays[rho][j];
    ineqs.push_back(row);
  }
  return coneFromInequalities(ineqs, {}, ell + n);
}

QMat hilbertBasisWitness(const Pair& p, const std::vector<TDivisor>& ds) {
  if (ds.empty()) throw ChambersError("hilbertBasisWitness: empty divisor list");
  const int ell = static_cast<int>(ds.size());
  const int n = p.fan.latticeRank;
  if (ell + n > 5) throw ChambersError("hilbertBasisWitness: instance too large");
  PolyCone c = adjointSupportConeLifted(p, ds);
  return hilbertBasis(c, 100000);
}

bool transformOrderInvariance(const Pair& x1, const Pair& x2, const QVec& v,
                              const TDivisor& d) {
  Fan a = canonicalFan(x1.fan), b = canonicalFan(x2.fan);
  if (a.rays != b.rays) throw ChambersError("transformOrderInvariance: map is not small");
  TDivisor d2 = birationalTransform(x1.fan, x2.fan, d);
  auto o1 = asymptoticOrder(x1, v, d);
  auto o2 = asymptoticOrder(x2, v, d2);
  if (!o1 || !o2) throw ChambersError("transformOrderInvariance: |D| is empty");
  return *o1 == *o2;
}

bool inverseIsMorphism(const Pair& x1, const Pair& x2, const TDivisor& ampleOnX1) {
  Fan a = canonicalFan(x1.fan), b = canonicalFan(x2.fan);
  if (a.rays != b.rays) throw ChambersError("inverseIsMorphism: map is not small");
  if (!isAmple(x1, ampleOnX1)) throw ChambersError("inverseIsMorphism: divisor not ample");
  TDivisor pushed = birationalTransform(x1.fan, x2.fan, ampleOnX1);
  if (!isQCartier(pushed, x2.fan))
    throw ChambersError("inverseIsMorphism: pushforward is not Q-Cartier");
  bool nef = isNef(x2, pushed);
  if (nef) {
    // Certification: for toric small maps the target must refine the source
    // (with both simplicial this forces equality of fans).
    if (!mapsFanInto(identityMap(x1.fan.latticeRank), x2.fan, x1.fan))
      throw ChambersError("inverseIsMorphism: nef transform but no refining map");
  }
  return nef;
}

}  // namespace tmmp
