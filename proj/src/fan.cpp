#include "tmmp/fan.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "tmmp/linalg.hpp"

namespace tmmp {

namespace {

ConeIdx sortedIdx(ConeIdx c) {
  std::sort(c.begin(), c.end());
  c.erase(std::unique(c.begin(), c.end()), c.end());
  return c;
}

bool subsetIdx(const ConeIdx& a, const ConeIdx& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

}  // namespace

int Fan::rayIndex(const QVec& v) const {
  for (std::size_t i = 0; i < rays.size(); ++i)
    if (rays[i] == v) return static_cast<int>(i);
  return -1;
}

Fan makeFan(int rank, QMat rays, std::vector<ConeIdx> maximalCones) {
  Fan f;
  f.latticeRank = rank;
  f.rays = std::move(rays);
  for (auto& c : maximalCones) c = sortedIdx(c);
  // Keep only maximal cones.
  std::vector<ConeIdx> keep;
  for (std::size_t i = 0; i < maximalCones.size(); ++i) {
    bool dominated = false;
    for (std::size_t j = 0; j < maximalCones.size(); ++j) {
      if (i == j) continue;
      if (maximalCones[i] == maximalCones[j] && j < i) dominated = true;
      if (maximalCones[i] != maximalCones[j] && subsetIdx(maximalCones[i], maximalCones[j]))
        dominated = true;
    }
    if (!dominated) keep.push_back(maximalCones[i]);
  }
  std::sort(keep.begin(), keep.end());
  keep.erase(std::unique(keep.begin(), keep.end()), keep.end());
  f.cones = std::move(keep);
  return f;
}

PolyCone coneOf(const Fan& f, const ConeIdx& c) {
  QMat gens;
  for (int i : c) gens.push_back(f.rays[i]);
  return coneFromGenerators(gens, f.latticeRank);
}

Int coneMultiplicity(const Fan& f, const ConeIdx& c) {
  QMat gens;
  for (int i : c) gens.push_back(f.rays[i]);
  return latticeIndex(gens);
}

namespace {

// Is cone(rays S) a face of the (validated-shape) cone C with ray set `big`?
bool isFaceOf(const Fan& f, const ConeIdx& small, const ConeIdx& big) {
  if (!subsetIdx(small, big)) return false;
  // Find a supporting normal: n.r = 0 on small, n.r >= 1 on big \ small.
  LpProblem lp;
  const int n = f.latticeRank;
  for (int i : big) {
    QVec row = f.rays[i];
    bool inSmall = std::find(small.begin(), small.end(), i) != small.end();
    if (inSmall) {
      lp.Aeq.push_back(row);
      lp.beq.push_back(Rat(0));
    } else {
      lp.Age.push_back(row);
      lp.bge.push_back(Rat(1));
    }
  }
  lp.c = zeroVec(n);
  return lpIsOptimal(lpSolve(lp));
}

}  // namespace

FanReport validateFan(const Fan& f) {
  FanReport rep;
  rep.simplicial = true;
  const int n = f.latticeRank;

  std::set<QVec> seen;
  for (std::size_t i = 0; i < f.rays.size(); ++i) {
    const QVec& r = f.rays[i];
    if (static_cast<int>(r.size()) != n) {
      rep.errors.push_back("ray of wrong dimension");
      continue;
    }
    if (isZeroVec(r)) rep.errors.push_back("zero ray");
    if (!isIntegerVec(r) || primitive(r) != r)
      rep.errors.push_back("non-primitive ray at index " + std::to_string(i));
    if (!seen.insert(r).second) rep.errors.push_back("duplicate ray");
  }
  if (!rep.errors.empty()) return rep;

  std::set<int> used;
  for (const auto& c : f.cones) {
    for (int i : c) {
      if (i < 0 || i >= static_cast<int>(f.rays.size())) {
        rep.errors.push_back("cone references missing ray");
        return rep;
      }
      used.insert(i);
    }
  }
  for (std::size_t i = 0; i < f.rays.size(); ++i)
    if (!used.count(static_cast<int>(i)))
      rep.errors.push_back("ray " + std::to_string(i) + " not used by any cone");

  // Strong convexity, extremality of listed rays, simpliciality.
  for (const auto& c : f.cones) {
    PolyCone pc = coneOf(f, c);
    if (!pc.isPointed()) rep.errors.push_back("cone not strongly convex");
    if (pc.generators.size() != c.size())
      rep.errors.push_back("cone lists a non-extreme ray");
    QMat gens;
    for (int i : c) gens.push_back(f.rays[i]);
    if (rankOf(gens) != static_cast<int>(c.size())) rep.simplicial = false;
  }
  if (!rep.errors.empty()) return rep;

  // Pairwise intersections are common faces.
  for (std::size_t i = 0; i < f.cones.size(); ++i)
    for (std::size_t j = i + 1; j < f.cones.size(); ++j) {
      PolyCone inter = coneIntersect(coneOf(f, f.cones[i]), coneOf(f, f.cones[j]));
      ConeIdx common;
      for (const auto& g : inter.generators) {
        int idx = f.rayIndex(g);
        if (idx < 0) {
          rep.errors.push_back("cones meet outside a common face");
          return rep;
        }
        common.push_back(idx);
      }
      common = sortedIdx(common);
      PolyCone fromRays = coneOf(f, common);
      if (!coneEquals(inter, fromRays) || !isFaceOf(f, common, f.cones[i]) ||
          !isFaceOf(f, common, f.cones[j])) {
        rep.errors.push_back("cones do not intersect in a common face");
        return rep;
      }
    }

  // Completeness by facet pairing: every facet of every maximal cone is
  // shared with exactly one other maximal cone and all cones are full.
  rep.complete = !f.cones.empty();
  if (n == 0) {
    rep.complete = true;
    return rep;
  }
  for (const auto& c : f.cones)
    if (coneOf(f, c).dim() != n) rep.complete = false;
  if (rep.complete) {
    for (std::size_t i = 0; i < f.cones.size() && rep.complete; ++i) {
      PolyCone pc = coneOf(f, f.cones[i]);
      for (const auto& nrm : pc.facetNormals) {
        ConeIdx facet;
        for (int r : f.cones[i])
          if (dot(nrm, f.rays[r]) == 0) facet.push_back(r);
        facet = sortedIdx(facet);
        int sharers = 0;
        for (std::size_t j = 0; j < f.cones.size(); ++j) {
          if (j == i) continue;
          if (subsetIdx(facet, f.cones[j]) && isFaceOf(f, facet, f.cones[j])) ++sharers;
        }
        if (sharers != 1) {
          rep.complete = false;
          break;
        }
      }
    }
  }
  return rep;
}

bool isSimplicialFan(const Fan& f) {
  for (const auto& c : f.cones) {
    QMat gens;
    for (int i : c) gens.push_back(f.rays[i]);
    if (rankOf(gens) != static_cast<int>(c.size())) return false;
  }
  return true;
}

bool isCompleteFan(const Fan& f) { return validateFan(f).complete; }

std::optional<ConeIdx> coneContaining(const Fan& f, const QVec& v) {
  for (const auto& c : f.cones) {
    PolyCone pc = coneOf(f, c);
    if (!pc.contains(v)) continue;
    // Face generated: rays tight on every facet normal vanishing at v.
    ConeIdx face = c;
    for (const auto& nrm : pc.facetNormals) {
      if (dot(nrm, v) != 0) continue;
      ConeIdx keep;
      for (int i : face)
        if (dot(nrm, f.rays[i]) == 0) keep.push_back(i);
      face = keep;
    }
    return sortedIdx(face);
  }
  return std::nullopt;
}

Fan canonicalFan(const Fan& f) {
  std::vector<int> order(f.rays.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return lexLess(f.rays[a], f.rays[b]); });
  std::vector<int> rankOfRay(f.rays.size());
  QMat rays;
  for (std::size_t k = 0; k < order.size(); ++k) {
    rankOfRay[order[k]] = static_cast<int>(k);
    rays.push_back(f.rays[order[k]]);
  }
  std::vector<ConeIdx> cones;
  for (const auto& c : f.cones) {
    ConeIdx nc;
    for (int i : c) nc.push_back(rankOfRay[i]);
    std::sort(nc.begin(), nc.end());
    cones.push_back(nc);
  }
  std::sort(cones.begin(), cones.end());
  Fan out;
  out.latticeRank = f.latticeRank;
  out.rays = rays;
  out.cones = cones;
  return out;
}

bool fanEquals(const Fan& a, const Fan& b) {
  Fan ca = canonicalFan(a), cb = canonicalFan(b);
  return ca.latticeRank == cb.latticeRank && ca.rays == cb.rays && ca.cones == cb.cones;
}

QVec applyMap(const LatticeMap& m, const QVec& v) { return matVec(m.matrix, v); }

LatticeMap identityMap(int rank) {
  QMat id;
  for (int i = 0; i < rank; ++i) {
    QVec e = zeroVec(rank);
    e[i] = 1;
    id.push_back(e);
  }
  return {id};
}

bool mapsFanInto(const LatticeMap& m, const Fan& source, const Fan& target) {
  for (const auto& c : source.cones) {
    bool found = false;
    for (const auto& t : target.cones) {
      PolyCone tc = coneOf(target, t);
      bool inside = true;
      for (int i : c)
        if (!tc.contains(applyMap(m, source.rays[i]))) {
          inside = false;
          break;
        }
      if (inside) {
        found = true;
        break;
      }
    }
    if (!found) return false;
  }
  return true;
}

bool isProperMap(const LatticeMap& m, const Fan& source, const Fan& target) {
  if (!mapsFanInto(m, source, target)) return false;
  FanReport rs = validateFan(source);
  FanReport rt = validateFan(target);
  if (rt.complete) return rs.complete;
  // Unshared facets of source must map into unshared facets of target.
  auto boundaryFacets = [](const Fan& f) {
    std::vector<QMat> out;  // generator matrices
    for (std::size_t i = 0; i < f.cones.size(); ++i) {
      PolyCone pc = coneOf(f, f.cones[i]);
      for (const auto& nrm : pc.facetNormals) {
        ConeIdx facet;
        for (int r : f.cones[i])
          if (dot(nrm, f.rays[r]) == 0) facet.push_back(r);
        int sharers = 0;
        for (std::size_t j = 0; j < f.cones.size(); ++j) {
          if (j == i) continue;
          ConeIdx sf = sortedIdx(facet);
          if (subsetIdx(sf, f.cones[j])) ++sharers;
        }
        if (sharers == 0) {
          QMat gens;
          for (int r : facet) gens.push_back(f.rays[r]);
          out.push_back(gens);
        }
      }
    }
    return out;
  };
  auto srcBd = boundaryFacets(source);
  auto tgtBd = boundaryFacets(target);
  for (const auto& gens : srcBd) {
    bool ok = false;
    for (const auto& tg : tgtBd) {
      PolyCone tc = coneFromGenerators(tg, target.latticeRank);
      bool inside = true;
      for (const auto& g : gens)
        if (!tc.contains(applyMap(m, g))) {
          inside = false;
          break;
        }
      if (inside) {
        ok = true;
        break;
      }
    }
    if (!ok) return false;
  }
  return true;
}

Fan starSubdivision(const Fan& f, const QVec& vIn) {
  QVec v = primitive(vIn);
  if (!isIntegerVec(v) || isZeroVec(v)) throw FanError("starSubdivision: bad center");
  if (f.rayIndex(v) >= 0) throw FanError("starSubdivision: center is already a ray");
  if (!coneContaining(f, v)) throw FanError("starSubdivision: center outside the support");
  QMat rays = f.rays;
  rays.push_back(v);
  const int vIdx = static_cast<int>(rays.size()) - 1;
  std::vector<ConeIdx> cones;
  for (const auto& c : f.cones) {
    PolyCone pc = coneOf(f, c);
    if (!pc.contains(v)) {
      cones.push_back(c);
      continue;
    }
    for (const auto& nrm : pc.facetNormals) {
      if (dot(nrm, v) == 0) continue;  // v lies on this facet
      ConeIdx nc;
      for (int i : c)
        if (dot(nrm, f.rays[i]) == 0) nc.push_back(i);
      nc.push_back(vIdx);
      cones.push_back(sortedIdx(nc));
    }
  }
  Fan out = makeFan(f.latticeRank, rays, cones);
  FanReport rep = validateFan(out);
  if (!rep.errors.empty()) throw FanError("starSubdivision: produced invalid fan");
  return out;
}

Fan qFactorialize(const Fan& f) {
  std::vector<ConeIdx> cones;
  for (const auto& c : f.cones) {
    QMat gens;
    for (int i : c) gens.push_back(f.rays[i]);
    if (rankOf(gens) == static_cast<int>(c.size())) {
      cones.push_back(c);
      continue;
    }
    PolyCone pc = coneOf(f, c);
    // pc.generators are lex-sorted; map back to fan indices.
    std::vector<int> toFan;
    for (const auto& g : pc.generators) toFan.push_back(f.rayIndex(g));
    for (const auto& simplex : pullingTriangulation(pc)) {
      ConeIdx nc;
      for (int k : simplex) nc.push_back(toFan[k]);
      cones.push_back(sortedIdx(nc));
    }
  }
  Fan out = makeFan(f.latticeRank, f.rays, cones);
  FanReport rep = validateFan(out);
  if (!rep.errors.empty()) throw FanError("qFactorialize: produced invalid fan");
  return out;
}

std::vector<Wall> wallsOf(const Fan& f) {
  std::map<ConeIdx, std::vector<int>> facetOwners;
  for (std::size_t i = 0; i < f.cones.size(); ++i) {
    PolyCone pc = coneOf(f, f.cones[i]);
    for (const auto& nrm : pc.facetNormals) {
      ConeIdx facet;
      for (int r : f.cones[i])
        if (dot(nrm, f.rays[r]) == 0) facet.push_back(r);
      facetOwners[sortedIdx(facet)].push_back(static_cast<int>(i));
    }
  }
  std::vector<Wall> walls;
  for (const auto& [tau, owners] : facetOwners) {
    if (owners.size() == 2) walls.push_back({tau, owners[0], owners[1]});
  }
  return walls;
}

}  // namespace tmmp
