#include "tmmp/divisor.hpp"

#include <algorithm>

#include "tmmp/linalg.hpp"

namespace tmmp {

CartierResult cartierData(const TDivisor& d, const Fan& f) {
  if (d.size() != f.rays.size()) throw DivisorError("divisor not indexed by the fan's rays");
  CartierData cd;
  for (std::size_t ci = 0; ci < f.cones.size(); ++ci) {
    QMat sys;
    QVec rhs;
    for (int i : f.cones[ci]) {
      sys.push_back(f.rays[i]);
      rhs.push_back(-d[i]);
    }
    auto m = solveLinear(sys, rhs);
    if (!m) return NotQCartier{static_cast<int>(ci)};
    cd.m.push_back(*m);
  }
  return cd;
}

bool isQCartier(const TDivisor& d, const Fan& f) {
  return std::holds_alternative<CartierData>(cartierData(d, f));
}

bool isQFactorial(const Fan& f) {
  if (!isSimplicialFan(f)) return false;
  // Cross-check: every prime divisor admits Cartier data.
  for (std::size_t i = 0; i < f.rays.size(); ++i) {
    TDivisor prime(f.rays.size(), Rat(0));
    prime[i] = 1;
    if (!isQCartier(prime, f)) return false;
  }
  return true;
}

Rat supportFunctionValue(const CartierData& cd, const Fan& f, const QVec& x) {
  for (std::size_t ci = 0; ci < f.cones.size(); ++ci)
    if (coneOf(f, f.cones[ci]).contains(x)) return dot(cd.m[ci], x);
  throw DivisorError("support function evaluated outside the fan support");
}

TDivisor canonicalDivisor(const Fan& f) { return TDivisor(f.rays.size(), Rat(-1)); }

RoundedDivisors roundOps(const TDivisor& a) {
  RoundedDivisors r;
  for (const auto& x : a) {
    r.floorD.push_back(Rat(floorRat(x)));
    r.ceilD.push_back(Rat(ceilRat(x)));
    r.fracD.push_back(fracRat(x));
  }
  return r;
}

TDivisor meet(const TDivisor& a, const TDivisor& b) {
  TDivisor r;
  for (std::size_t i = 0; i < a.size(); ++i) r.push_back(std::min(a[i], b[i]));
  return r;
}

std::optional<QVec> linearlyEquivalent(const TDivisor& d1, const TDivisor& d2, const Fan& f) {
  QMat sys = f.rays;
  QVec rhs;
  for (std::size_t i = 0; i < d1.size(); ++i) rhs.push_back(d1[i] - d2[i]);
  return solveLinear(sys, rhs);
}

TDivisor principalDivisor(const QVec& m, const Fan& f) {
  TDivisor d;
  for (const auto& u : f.rays) d.push_back(dot(m, u));
  return d;
}

TDivisor pullbackDivisor(const LatticeMap& map, const Fan& source, const Fan& target,
                         const TDivisor& dOnTarget) {
  CartierResult cr = cartierData(dOnTarget, target);
  if (std::holds_alternative<NotQCartier>(cr))
    throw DivisorError("pullback of a non-Q-Cartier divisor");
  const CartierData& cd = std::get<CartierData>(cr);
  TDivisor out;
  for (const auto& u : source.rays)
    out.push_back(-supportFunctionValue(cd, target, applyMap(map, u)));
  return out;
}

TDivisor birationalTransform(const Fan& source, const Fan& target, const TDivisor& dOnSource) {
  TDivisor out;
  for (const auto& u : target.rays) {
    int idx = source.rayIndex(u);
    out.push_back(idx >= 0 ? dOnSource[idx] : Rat(0));
  }
  return out;
}

Polyhedron sectionPolyhedron(const TDivisor& d, const Fan& f) {
  QMat A = f.rays;
  QVec b;
  for (const auto& x : d) b.push_back(-x);
  return polyhedronFromInequalities(A, b, f.latticeRank);
}

bool effectivityTest(const TDivisor& d, const Fan& f) {
  return !isEmptyPolyhedron(sectionPolyhedron(d, f));
}

TDivisor fixedPart(const TDivisor& d, const Fan& f) {
  Polyhedron p = sectionPolyhedron(d, f);
  std::vector<QVec> pts;
  try {
    pts = latticePoints(p);
  } catch (const PolyhedraError&) {
    throw DivisorError("fixedPart: section polyhedron has no finite lattice-point reduction");
  }
  if (pts.empty()) throw DivisorError("fixedPart: linear system has no integral sections");
  TDivisor fix(d.size(), Rat(0));
  for (std::size_t i = 0; i < f.rays.size(); ++i) {
    Rat best;
    bool first = true;
    for (const auto& m : pts) {
      Rat v = dot(m, f.rays[i]) + d[i];
      if (first || v < best) {
        best = v;
        first = false;
      }
    }
    fix[i] = best;
  }
  return fix;
}

Rat divisorVolume(const TDivisor& d, const Fan& f) {
  if (!isCompleteFan(f)) throw DivisorError("divisorVolume: fan is not complete");
  Polyhedron p = sectionPolyhedron(d, f);
  if (isEmptyPolyhedron(p)) return Rat(0);
  Rat vol = polytopeVolume(p);
  Rat nf = 1;
  for (int i = 2; i <= f.latticeRank; ++i) nf *= i;
  return vol * nf;
}

}  // namespace tmmp
