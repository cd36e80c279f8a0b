#include "tmmp/polyhedra.hpp"

#include <algorithm>
#include <cassert>
#include <functional>
#include <map>
#include <set>

#include "tmmp/linalg.hpp"

namespace tmmp {

namespace {

QMat sortedRows(QMat m) {
  std::sort(m.begin(), m.end(), lexLess);
  m.erase(std::unique(m.begin(), m.end()), m.end());
  return m;
}

QMat concatRows(const QMat& a, const QMat& b) {
  QMat r(a);
  r.insert(r.end(), b.begin(), b.end());
  return r;
}

// Extreme rays of the pointed cone {w : M w >= 0} (nullspace(M) must be 0).
QMat ddPointed(const QMat& M, int k) {
  const int nrows = static_cast<int>(M.size());
  // Initial simplicial basis from k independent rows.
  std::vector<int> init;
  {
    QMat acc;
    int r = 0;
    for (int i = 0; i < nrows && r < k; ++i) {
      QMat test(acc);
      test.push_back(M[i]);
      if (rankOf(test) > r) {
        acc = test;
        init.push_back(i);
        ++r;
      }
    }
    if (r < k) throw PolyhedraError("ddPointed: constraint matrix not full rank");
  }
  // Rays of the initial cone: columns of the inverse of the chosen rows.
  QMat rays;
  {
    QMat sys;
    for (int i : init) sys.push_back(M[i]);
    for (int j = 0; j < k; ++j) {
      QVec rhs(k, Rat(0));
      rhs[j] = 1;
      auto sol = solveLinear(sys, rhs);
      rays.push_back(primitive(*sol));
    }
  }
  std::vector<int> processed(init);
  auto adjacent = [&](const QVec& r1, const QVec& r2) {
    QMat z;
    for (int i : processed)
      if (dot(M[i], r1) == 0 && dot(M[i], r2) == 0) z.push_back(M[i]);
    return rankOf(z) == k - 2;
  };
  std::set<int> initSet(init.begin(), init.end());
  for (int i = 0; i < nrows; ++i) {
    if (initSet.count(i)) continue;
    const QVec& a = M[i];
    QMat pos, zero, neg;
    for (const auto& r : rays) {
      Rat s = dot(a, r);
      if (s > 0)
        pos.push_back(r);
      else if (s == 0)
        zero.push_back(r);
      else
        neg.push_back(r);
    }
    QMat fresh;
    for (const auto& rp : pos)
      for (const auto& rn : neg) {
        if (k > 1 && !adjacent(rp, rn)) continue;
        QVec w = sub(scale(rn, dot(a, rp)), scale(rp, dot(a, rn)));
        w = primitive(w);
        if (!isZeroVec(w)) fresh.push_back(w);
      }
    processed.push_back(i);
    rays = concatRows(concatRows(pos, zero), sortedRows(fresh));
    rays = sortedRows(rays);
  }
  return sortedRows(rays);
}

struct DDResult {
  QMat rays;
  QMat lineality;
};

// Extreme rays + lineality of {x : A x >= 0, E x = 0}.
DDResult ddCone(const QMat& A, const QMat& E, int n) {
  QMat all = concatRows(A, E);
  QMat lin = saturatedRowLattice(nullspaceBasis(all, n), n);
  QMat eqs = concatRows(E, lin);
  QMat P = nullspaceBasis(eqs, n);  // span of the pointed slice
  if (P.empty()) return {{}, lin};
  const int k = static_cast<int>(P.size());
  QMat M;
  for (const auto& a : A) {
    QVec row(k, Rat(0));
    for (int j = 0; j < k; ++j) row[j] = dot(a, P[j]);
    if (!isZeroVec(row)) M.push_back(row);
  }
  if (rankOf(M) < k) throw PolyhedraError("ddCone: unexpected lineality");
  QMat raysW = ddPointed(M, k);
  QMat rays;
  for (const auto& w : raysW) {
    QVec x = zeroVec(n);
    for (int j = 0; j < k; ++j) x = add(x, scale(P[j], w[j]));
    rays.push_back(primitive(x));
  }
  return {sortedRows(rays), lin};
}

QMat spanEquationsOf(const QMat& gens, const QMat& lin, int n) {
  QMat rows = concatRows(gens, lin);
  QMat eq = nullspaceBasis(rows, n);
  QMat out;
  for (const auto& e : eq) out.push_back(primitive(e));
  return sortedRows(out);
}

}  // namespace

int PolyCone::dim() const {
  QMat rows = concatRows(generators, lineality);
  return rankOf(rows);
}

bool PolyCone::contains(const QVec& x) const {
  for (const auto& n : facetNormals)
    if (dot(n, x) < 0) return false;
  for (const auto& e : spanEq)
    if (dot(e, x) != 0) return false;
  return true;
}

bool PolyCone::containsStrictly(const QVec& x) const {
  for (const auto& n : facetNormals)
    if (dot(n, x) <= 0) return false;
  for (const auto& e : spanEq)
    if (dot(e, x) != 0) return false;
  return true;
}

PolyCone coneFromGeneratorsAndLineality(const QMat& gens, const QMat& lin, int ambientDim) {
  for (const auto& g : gens)
    if (static_cast<int>(g.size()) != ambientDim)
      throw PolyhedraError("coneFromGenerators: dimension mismatch");
  for (const auto& l : lin)
    if (static_cast<int>(l.size()) != ambientDim)
      throw PolyhedraError("coneFromGenerators: dimension mismatch");
  PolyCone c;
  c.ambientDim = ambientDim;
  c.spanEq = spanEquationsOf(gens, lin, ambientDim);
  // Facets: extreme rays of the dual within the span.
  DDResult dual = ddCone(gens, concatRows(lin, c.spanEq), ambientDim);
  c.facetNormals = dual.rays;
  // Extreme rays: run the dual description back.
  DDResult primal = ddCone(c.facetNormals, c.spanEq, ambientDim);
  c.generators = primal.rays;
  c.lineality = primal.lineality;
  return c;
}

PolyCone coneFromGenerators(const QMat& gens, int ambientDim) {
  return coneFromGeneratorsAndLineality(gens, {}, ambientDim);
}

PolyCone coneFromInequalities(const QMat& A, const QMat& E, int ambientDim) {
  DDResult primal = ddCone(A, E, ambientDim);
  return coneFromGeneratorsAndLineality(primal.rays, primal.lineality, ambientDim);
}

PolyCone coneDual(const PolyCone& c) {
  // Dual = cone over the facet normals plus the span's orthogonal complement.
  return coneFromGeneratorsAndLineality(c.facetNormals, c.spanEq, c.ambientDim);
}

PolyCone coneIntersect(const PolyCone& a, const PolyCone& b) {
  if (a.ambientDim != b.ambientDim) throw PolyhedraError("coneIntersect: dimension mismatch");
  QMat A = concatRows(a.facetNormals, b.facetNormals);
  QMat E = concatRows(a.spanEq, b.spanEq);
  return coneFromInequalities(A, E, a.ambientDim);
}

bool coneSubset(const PolyCone& a, const PolyCone& b) {
  for (const auto& g : a.generators)
    if (!b.contains(g)) return false;
  for (const auto& l : a.lineality) {
    if (!b.contains(l)) return false;
    if (!b.contains(scale(l, Rat(-1)))) return false;
  }
  return true;
}

bool coneEquals(const PolyCone& a, const PolyCone& b) {
  return coneSubset(a, b) && coneSubset(b, a);
}

QVec coneRelativeInteriorPoint(const PolyCone& c) {
  QVec x = zeroVec(c.ambientDim);
  for (const auto& g : c.generators) x = add(x, g);
  return x;
}

std::vector<PolyCone> facesOfCodim(const PolyCone& c, int k) {
  if (k < 0 || k > c.dim()) throw PolyhedraError("facesOfCodim: k out of range");
  std::vector<PolyCone> cur = {c};
  for (int level = 0; level < k; ++level) {
    std::vector<PolyCone> next;
    for (const auto& f : cur) {
      for (const auto& n : f.facetNormals) {
        QMat keep;
        for (const auto& g : f.generators)
          if (dot(n, g) == 0) keep.push_back(g);
        PolyCone face = coneFromGeneratorsAndLineality(keep, f.lineality, c.ambientDim);
        bool dup = false;
        for (const auto& o : next)
          if (o.generators == face.generators && o.lineality == face.lineality) {
            dup = true;
            break;
          }
        if (!dup) next.push_back(face);
      }
    }
    cur = std::move(next);
  }
  return cur;
}

namespace {

// Cells must tile the support: pairwise relint-disjoint, and every cell facet
// is either an interior wall shared with exactly one other cell or lies in a
// proper face of the support.
void verifySubdividesSupport(const std::vector<PolyCone>& cells, const PolyCone& support) {
  const int d = support.dim();
  for (const auto& cell : cells) {
    if (!coneSubset(cell, support))
      throw PolyhedraError("commonRefinement: cell outside the common support");
    if (cell.dim() != d) throw PolyhedraError("commonRefinement: cell not full-dimensional");
  }
  for (std::size_t i = 0; i < cells.size(); ++i)
    for (std::size_t j = i + 1; j < cells.size(); ++j)
      if (coneIntersect(cells[i], cells[j]).dim() == d)
        throw PolyhedraError("commonRefinement: cells overlap");
  for (std::size_t i = 0; i < cells.size(); ++i) {
    for (const auto& nrm : cells[i].facetNormals) {
      QMat tight;
      for (const auto& g : cells[i].generators)
        if (dot(nrm, g) == 0) tight.push_back(g);
      PolyCone facet = coneFromGeneratorsAndLineality(tight, cells[i].lineality,
                                                      cells[i].ambientDim);
      int shared = 0;
      for (std::size_t j = 0; j < cells.size(); ++j)
        if (j != i && coneSubset(facet, cells[j])) ++shared;
      if (shared == 1) continue;
      if (shared > 1) throw PolyhedraError("commonRefinement: facet shared by several cells");
      bool onBoundary = false;
      for (const auto& sn : support.facetNormals) {
        bool tightAll = true;
        for (const auto& g : facet.generators)
          if (dot(sn, g) != 0) tightAll = false;
        for (const auto& l : facet.lineality)
          if (dot(sn, l) != 0) tightAll = false;
        if (tightAll) {
          onBoundary = true;
          break;
        }
      }
      if (!onBoundary)
        throw PolyhedraError("commonRefinement: cells do not cover the support");
    }
  }
}

}  // namespace

std::vector<PolyCone> commonRefinement(const std::vector<std::vector<PolyCone>>& subdivisions,
                                       const PolyCone& support) {
  if (subdivisions.empty()) throw PolyhedraError("commonRefinement: no subdivisions");
  const int d = support.dim();
  (void)d;
  for (const auto& sub : subdivisions) verifySubdividesSupport(sub, support);
  std::vector<PolyCone> acc = subdivisions[0];
  for (std::size_t s = 1; s < subdivisions.size(); ++s) {
    std::vector<PolyCone> next;
    for (const auto& a : acc)
      for (const auto& b : subdivisions[s]) {
        PolyCone cell = coneIntersect(a, b);
        if (cell.dim() != d) continue;
        bool dup = false;
        for (const auto& o : next)
          if (o.generators == cell.generators && o.lineality == cell.lineality) {
            dup = true;
            break;
          }
        if (!dup) next.push_back(cell);
      }
    acc = std::move(next);
  }
  // Each output cell must sit inside exactly one cell of each input.
  for (const auto& cell : acc) {
    QVec p = coneRelativeInteriorPoint(cell);
    for (const auto& sub : subdivisions) {
      int hits = 0;
      for (const auto& b : sub)
        if (b.contains(p)) ++hits;
      if (hits != 1) throw PolyhedraError("commonRefinement: inputs do not subdivide the support");
    }
  }
  return acc;
}

Polyhedron polyhedronFromInequalities(const QMat& A, const QVec& b, int ambientDim) {
  Polyhedron p;
  p.ambientDim = ambientDim;
  p.A = A;
  p.b = b;
  return p;
}

LpResult lpOverPolyhedron(const QVec& objective, const Polyhedron& p, bool maximize) {
  LpProblem lp;
  lp.Age = p.A;
  lp.bge = p.b;
  lp.Aeq = p.E;
  lp.beq = p.f;
  lp.c = objective;
  lp.maximize = maximize;
  return lpSolve(lp);
}

bool isEmptyPolyhedron(const Polyhedron& p) { return !anyPoint(p).has_value(); }

std::optional<QVec> anyPoint(const Polyhedron& p) {
  LpProblem lp;
  lp.Age = p.A;
  lp.bge = p.b;
  lp.Aeq = p.E;
  lp.beq = p.f;
  lp.c = zeroVec(p.ambientDim);
  LpResult r = lpSolve(lp);
  if (lpIsInfeasible(r)) return std::nullopt;
  return lpOpt(r).witness;
}

std::optional<QVec> relativeInteriorPoint(const Polyhedron& p) {
  if (isEmptyPolyhedron(p)) return std::nullopt;
  // Classify implicit equalities.
  std::vector<bool> implicit(p.A.size(), false);
  for (std::size_t i = 0; i < p.A.size(); ++i) {
    LpProblem lp;
    lp.Age = p.A;
    lp.bge = p.b;
    lp.Aeq = p.E;
    lp.beq = p.f;
    lp.c = p.A[i];
    lp.maximize = true;
    LpResult r = lpSolve(lp);
    if (lpIsOptimal(r) && lpOpt(r).value == p.b[i]) implicit[i] = true;
  }
  // max t with a_i.x - t >= b_i on non-implicit rows, t <= 1.
  const int n = p.ambientDim;
  LpProblem lp;
  for (std::size_t i = 0; i < p.A.size(); ++i) {
    QVec row(p.A[i]);
    row.push_back(implicit[i] ? Rat(0) : Rat(-1));
    lp.Age.push_back(row);
    lp.bge.push_back(p.b[i]);
  }
  {
    QVec row = zeroVec(n);
    row.push_back(Rat(-1));
    lp.Age.push_back(row);
    lp.bge.push_back(Rat(-1));  // t <= 1
    QVec row2 = zeroVec(n);
    row2.push_back(Rat(1));
    lp.Age.push_back(row2);
    lp.bge.push_back(Rat(0));  // t >= 0
  }
  for (std::size_t i = 0; i < p.E.size(); ++i) {
    QVec row(p.E[i]);
    row.push_back(Rat(0));
    lp.Aeq.push_back(row);
    lp.beq.push_back(p.f[i]);
  }
  QVec c = zeroVec(n + 1);
  c[n] = 1;
  lp.c = c;
  lp.maximize = true;
  LpResult r = lpSolve(lp);
  if (!lpIsOptimal(r)) return std::nullopt;
  QVec x(lpOpt(r).witness.begin(), lpOpt(r).witness.begin() + n);
  return x;
}

VRep vertexEnumeration(const Polyhedron& p) {
  const int n = p.ambientDim;
  QMat A;
  QMat E;
  for (std::size_t i = 0; i < p.A.size(); ++i) {
    QVec row(p.A[i]);
    row.push_back(-p.b[i]);
    A.push_back(row);
  }
  {
    QVec row = zeroVec(n);
    row.push_back(Rat(1));
    A.push_back(row);  // t >= 0
  }
  for (std::size_t i = 0; i < p.E.size(); ++i) {
    QVec row(p.E[i]);
    row.push_back(-p.f[i]);
    E.push_back(row);
  }
  DDResult dd = ddCone(A, E, n + 1);
  VRep v;
  for (const auto& r : dd.rays) {
    Rat t = r[n];
    QVec x(r.begin(), r.begin() + n);
    if (t > 0) {
      for (auto& xi : x) xi /= t;
      v.points.push_back(x);
    } else {
      v.rays.push_back(primitive(x));
    }
  }
  for (const auto& l : dd.lineality) {
    QVec x(l.begin(), l.begin() + n);
    if (!isZeroVec(x)) v.lineality.push_back(primitive(x));
  }
  std::sort(v.points.begin(), v.points.end(), lexLess);
  v.rays = sortedRows(v.rays);
  return v;
}

int polyhedronDim(const Polyhedron& p) {
  VRep v = vertexEnumeration(p);
  if (v.points.empty()) return -1;
  QMat rows;
  for (std::size_t i = 1; i < v.points.size(); ++i) rows.push_back(sub(v.points[i], v.points[0]));
  rows = concatRows(rows, v.rays);
  rows = concatRows(rows, v.lineality);
  return rankOf(rows);
}

bool isBoundedPolyhedron(const Polyhedron& p) {
  VRep v = vertexEnumeration(p);
  return v.rays.empty() && v.lineality.empty();
}

namespace {

// Drops an inequality when it is implied by the others.
void dropRedundant(Polyhedron& p) {
  for (std::size_t i = 0; i < p.A.size();) {
    if (isZeroVec(p.A[i])) {
      if (p.b[i] > 0) {
        // Infeasible; keep the marker row and stop simplifying.
        return;
      }
      p.A.erase(p.A.begin() + i);
      p.b.erase(p.b.begin() + i);
      continue;
    }
    Polyhedron q = p;
    q.A.erase(q.A.begin() + i);
    q.b.erase(q.b.begin() + i);
    LpProblem lp;
    lp.Age = q.A;
    lp.bge = q.b;
    lp.Aeq = q.E;
    lp.beq = q.f;
    lp.c = p.A[i];
    LpResult r = lpSolve(lp);
    bool redundant = lpIsOptimal(r) && lpOpt(r).value >= p.b[i];
    if (redundant) {
      p.A.erase(p.A.begin() + i);
      p.b.erase(p.b.begin() + i);
    } else {
      ++i;
    }
  }
}

}  // namespace

Polyhedron projectPolyhedron(const Polyhedron& p, int keep) {
  Polyhedron cur = p;
  for (int var = p.ambientDim - 1; var >= keep; --var) {
    // Substitute via an equality if possible.
    int eqRow = -1;
    for (std::size_t i = 0; i < cur.E.size(); ++i)
      if (cur.E[i][var] != 0) {
        eqRow = static_cast<int>(i);
        break;
      }
    Polyhedron next;
    next.ambientDim = var;
    auto chop = [&](QVec v) {
      v.resize(var);
      return v;
    };
    if (eqRow >= 0) {
      QVec e = cur.E[eqRow];
      Rat ef = cur.f[eqRow];
      Rat c = e[var];
      // x_var = (ef - e'.x')/c
      auto substitute = [&](const QVec& row, const Rat& rhs) {
        Rat a = row[var];
        QVec nr = chop(row);
        Rat nb = rhs;
        if (a != 0) {
          for (int j = 0; j < var; ++j) nr[j] -= a * e[j] / c;
          nb -= a * ef / c;
        }
        return std::make_pair(nr, nb);
      };
      for (std::size_t i = 0; i < cur.A.size(); ++i) {
        auto [nr, nb] = substitute(cur.A[i], cur.b[i]);
        next.A.push_back(nr);
        next.b.push_back(nb);
      }
      for (std::size_t i = 0; i < cur.E.size(); ++i) {
        if (static_cast<int>(i) == eqRow) continue;
        auto [nr, nb] = substitute(cur.E[i], cur.f[i]);
        next.E.push_back(nr);
        next.f.push_back(nb);
      }
    } else {
      std::vector<int> pos, neg, zero;
      for (std::size_t i = 0; i < cur.A.size(); ++i) {
        if (cur.A[i][var] > 0)
          pos.push_back(static_cast<int>(i));
        else if (cur.A[i][var] < 0)
          neg.push_back(static_cast<int>(i));
        else
          zero.push_back(static_cast<int>(i));
      }
      for (int i : zero) {
        next.A.push_back(chop(cur.A[i]));
        next.b.push_back(cur.b[i]);
      }
      for (int ip : pos)
        for (int in : neg) {
          Rat cp = cur.A[ip][var], cn = -cur.A[in][var];
          QVec row = add(scale(chop(cur.A[ip]), cn), scale(chop(cur.A[in]), cp));
          Rat rhs = cn * cur.b[ip] + cp * cur.b[in];
          next.A.push_back(row);
          next.b.push_back(rhs);
        }
      for (std::size_t i = 0; i < cur.E.size(); ++i) {
        next.E.push_back(chop(cur.E[i]));
        next.f.push_back(cur.f[i]);
      }
    }
    dropRedundant(next);
    cur = next;
  }
  return cur;
}

namespace {

void triangulatePoints(const QMat& points, int d, std::vector<std::vector<int>>& out,
                       const std::vector<int>& labels) {
  const int m = static_cast<int>(points.size());
  if (m == d + 1) {
    out.push_back(labels);
    return;
  }
  if (d == 0) {
    out.push_back({labels[0]});
    return;
  }
  int v0 = 0;
  for (int i = 1; i < m; ++i)
    if (lexLess(points[i], points[v0])) v0 = i;
  QMat homog;
  for (const auto& pt : points) {
    QVec h(pt);
    h.push_back(Rat(1));
    homog.push_back(h);
  }
  PolyCone c = coneFromGenerators(homog, d + 1);
  for (const auto& n : c.facetNormals) {
    if (dot(n, homog[v0]) == 0) continue;
    std::vector<int> tight;
    for (int i = 0; i < m; ++i)
      if (dot(n, homog[i]) == 0) tight.push_back(i);
    // Project the facet along a coordinate the normal does not annihilate.
    int drop = -1;
    for (int j = 0; j < d; ++j)
      if (n[j] != 0) {
        drop = j;
        break;
      }
    if (drop < 0) continue;  // the t-facet; not a geometric facet
    QMat proj;
    std::vector<int> sub;
    for (int i : tight) {
      QVec q;
      for (int j = 0; j < d; ++j)
        if (j != drop) q.push_back(points[i][j]);
      proj.push_back(q);
      sub.push_back(labels[i]);
    }
    std::vector<std::vector<int>> faceTris;
    triangulatePoints(proj, d - 1, faceTris, sub);
    for (auto tri : faceTris) {
      tri.push_back(labels[v0]);
      out.push_back(tri);
    }
  }
}

}  // namespace

Rat polytopeVolume(const Polyhedron& p) {
  VRep v = vertexEnumeration(p);
  if (!v.rays.empty() || !v.lineality.empty())
    throw PolyhedraError("polytopeVolume: polyhedron is unbounded");
  if (v.points.empty()) return Rat(0);
  const int n = p.ambientDim;
  {
    QMat rows;
    for (std::size_t i = 1; i < v.points.size(); ++i) rows.push_back(sub(v.points[i], v.points[0]));
    if (rankOf(rows) < n) return Rat(0);
  }
  std::vector<int> labels(v.points.size());
  for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = static_cast<int>(i);
  std::vector<std::vector<int>> tris;
  triangulatePoints(v.points, n, tris, labels);
  Rat vol = 0;
  Rat nfact = 1;
  for (int i = 2; i <= n; ++i) nfact *= i;
  for (const auto& tri : tris) {
    QMat m;
    for (std::size_t i = 0; i + 1 < tri.size(); ++i)
      m.push_back(sub(v.points[tri[i]], v.points[tri.back()]));
    Rat d = detOf(m);
    if (d < 0) d = -d;
    vol += d / nfact;
  }
  return vol;
}

std::vector<QVec> latticePoints(const Polyhedron& p) {
  VRep v = vertexEnumeration(p);
  if (!v.rays.empty() || !v.lineality.empty())
    throw PolyhedraError("latticePoints: polyhedron is unbounded");
  std::vector<QVec> out;
  if (v.points.empty()) return out;
  const int n = p.ambientDim;
  std::vector<Int> lo(n), hi(n);
  for (int j = 0; j < n; ++j) {
    Rat mn = v.points[0][j], mx = v.points[0][j];
    for (const auto& pt : v.points) {
      mn = std::min(mn, pt[j]);
      mx = std::max(mx, pt[j]);
    }
    lo[j] = ceilRat(mn);
    hi[j] = floorRat(mx);
  }
  Int count = 1;
  for (int j = 0; j < n; ++j) {
    if (hi[j] < lo[j]) return out;
    count *= (hi[j] - lo[j] + 1);
    if (count > 10000000) throw PolyhedraError("latticePoints: box too large");
  }
  std::vector<Int> cur(lo);
  while (true) {
    QVec x(n);
    for (int j = 0; j < n; ++j) x[j] = Rat(cur[j]);
    bool ok = true;
    for (std::size_t i = 0; i < p.A.size() && ok; ++i)
      if (dot(p.A[i], x) < p.b[i]) ok = false;
    for (std::size_t i = 0; i < p.E.size() && ok; ++i)
      if (dot(p.E[i], x) != p.f[i]) ok = false;
    if (ok) out.push_back(x);
    int j = 0;
    while (j < n) {
      cur[j] += 1;
      if (cur[j] <= hi[j]) break;
      cur[j] = lo[j];
      ++j;
    }
    if (j == n) break;
  }
  return out;
}

std::vector<QVec> halfOpenBoxPoints(const QMat& gens) {
  std::vector<QVec> out;
  if (gens.empty()) return out;
  const int n = static_cast<int>(gens[0].size());
  const int k = static_cast<int>(gens.size());
  std::vector<Int> lo(n), hi(n);
  for (int j = 0; j < n; ++j) {
    Rat mn = 0, mx = 0;
    for (int i = 0; i < k; ++i) {
      if (gens[i][j] > 0)
        mx += gens[i][j];
      else
        mn += gens[i][j];
    }
    lo[j] = ceilRat(mn);
    hi[j] = floorRat(mx);
  }
  std::vector<Int> cur(lo);
  while (true) {
    QVec x(n);
    for (int j = 0; j < n; ++j) x[j] = Rat(cur[j]);
    auto coords = coordinatesIn(gens, x);
    if (coords) {
      bool ok = true;
      for (const auto& t : *coords)
        if (t < 0 || t >= 1) {
          ok = false;
          break;
        }
      if (ok && !isZeroVec(x)) out.push_back(x);
    }
    int j = 0;
    while (j < n) {
      cur[j] += 1;
      if (cur[j] <= hi[j]) break;
      cur[j] = lo[j];
      ++j;
    }
    if (j == n || n == 0) break;
  }
  return out;
}

std::vector<std::vector<int>> pullingTriangulation(const PolyCone& c) {
  if (!c.isPointed()) throw PolyhedraError("pullingTriangulation: cone not pointed");
  std::function<std::vector<std::vector<int>>(const std::vector<int>&)> rec =
      [&](const std::vector<int>& idx) -> std::vector<std::vector<int>> {
    QMat gens;
    for (int i : idx) gens.push_back(c.generators[i]);
    int d = rankOf(gens);
    if (static_cast<int>(idx.size()) == d) return {idx};
    PolyCone sub = coneFromGenerators(gens, c.ambientDim);
    const int pick = idx[0];  // generators are lex-sorted, so this is the lex-min ray
    std::vector<std::vector<int>> res;
    for (const auto& n : sub.facetNormals) {
      if (dot(n, c.generators[pick]) == 0) continue;
      std::vector<int> face;
      for (int i : idx)
        if (dot(n, c.generators[i]) == 0) face.push_back(i);
      for (auto tri : rec(face)) {
        tri.push_back(pick);
        std::sort(tri.begin(), tri.end());
        res.push_back(tri);
      }
    }
    return res;
  };
  if (c.generators.empty()) return {};
  std::vector<int> all(c.generators.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
  auto out = rec(all);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

namespace {

bool inSemigroup(const QVec& x, const QMat& basis, const PolyCone& c,
                 std::map<QVec, bool>& memo) {
  if (isZeroVec(x)) return true;
  auto it = memo.find(x);
  if (it != memo.end()) return it->second;
  memo[x] = false;  // cut cycles; cone order is well-founded so none occur
  bool ok = false;
  for (const auto& b : basis) {
    QVec y = sub(x, b);
    if (!c.contains(y)) continue;
    if (inSemigroup(y, basis, c, memo)) {
      ok = true;
      break;
    }
  }
  memo[x] = ok;
  return ok;
}

}  // namespace

QMat hilbertBasis(const PolyCone& c, std::size_t capCandidates) {
  if (!c.isPointed()) throw PolyhedraError("hilbertBasis: cone not pointed");
  for (const auto& g : c.generators)
    if (!isIntegerVec(g)) throw PolyhedraError("hilbertBasis: non-integral generators");
  QMat candidates = c.generators;
  for (const auto& simplex : pullingTriangulation(c)) {
    QMat gens;
    for (int i : simplex) gens.push_back(c.generators[i]);
    for (auto& w : halfOpenBoxPoints(gens)) candidates.push_back(w);
    if (candidates.size() > capCandidates) throw PolyhedraError("hilbertBasis: instance too large");
  }
  candidates = sortedRows(candidates);
  // Positive grading from the facet normals.
  QVec ell = zeroVec(c.ambientDim);
  for (const auto& n : c.facetNormals) ell = add(ell, n);
  std::stable_sort(candidates.begin(), candidates.end(),
                   [&](const QVec& a, const QVec& b) {
                     Rat da = dot(ell, a), db = dot(ell, b);
                     if (da != db) return da < db;
                     return lexLess(a, b);
                   });
  QMat basis;
  std::map<QVec, bool> memo;
  for (const auto& h : candidates) {
    memo.clear();
    if (!inSemigroup(h, basis, c, memo)) basis.push_back(h);
  }
  return sortedRows(basis);
}

std::optional<std::vector<int>> decomposeOverBasis(const QVec& x, const QMat& basis,
                                                   const PolyCone& c) {
  std::vector<int> combo(basis.size(), 0);
  std::map<QVec, bool> dead;  // remainders known to be undecomposable
  std::function<bool(const QVec&)> rec = [&](const QVec& v) -> bool {
    if (isZeroVec(v)) return true;
    auto it = dead.find(v);
    if (it != dead.end()) return false;
    for (std::size_t i = 0; i < basis.size(); ++i) {
      QVec y = sub(v, basis[i]);
      if (!c.contains(y)) continue;
      combo[i] += 1;
      if (rec(y)) return true;
      combo[i] -= 1;
    }
    dead[v] = true;
    return false;
  };
  if (!rec(x)) return std::nullopt;
  return combo;
}

}  // namespace tmmp
