#include "tmmp/pair.hpp"

#include <algorithm>

#include "tmmp/linalg.hpp"

namespace tmmp {

TDivisor Pair::logCanonical() const {
  TDivisor k = canonicalDivisor(fan);
  for (std::size_t i = 0; i < k.size(); ++i) k[i] += boundary[i];
  return k;
}

void validatePair(const Pair& p) {
  FanReport rep = validateFan(p.fan);
  if (!rep.errors.empty()) throw PairError("invalid fan: " + rep.errors.front());
  if (p.boundary.size() != p.fan.rays.size())
    throw PairError("boundary not indexed by the fan's rays");
  for (const auto& c : p.boundary)
    if (c < 0) throw PairError("boundary coefficient below zero");
  if (!isQCartier(p.logCanonical(), p.fan)) throw PairError("K+Delta is not Q-Cartier");
  if (p.base) {
    FanReport rb = validateFan(p.base->fan);
    if (!rb.errors.empty()) throw PairError("invalid base fan: " + rb.errors.front());
    if (!mapsFanInto(p.base->map, p.fan, p.base->fan))
      throw PairError("structure map does not send cones into base cones");
    if (!isProperMap(p.base->map, p.fan, p.base->fan))
      throw PairError("structure map is not proper");
  }
}

Rat discrepancy(const Pair& p, const QVec& vIn) {
  QVec v = primitive(vIn);
  if (isZeroVec(v) || !isIntegerVec(v)) throw PairError("discrepancy: bad valuation vector");
  CartierResult cr = cartierData(p.logCanonical(), p.fan);
  if (std::holds_alternative<NotQCartier>(cr)) throw PairError("K+Delta is not Q-Cartier");
  if (!coneContaining(p.fan, v)) throw PairError("discrepancy: vector outside the fan support");
  Rat psi = supportFunctionValue(std::get<CartierData>(cr), p.fan, v);
  return psi - 1;
}

namespace {

// Log-discrepancy values s_i = 1 - coeff_Delta(i) at the rays of a cone.
std::vector<Rat> rayLogDiscrepancies(const Pair& p, const ConeIdx& cone) {
  std::vector<Rat> s;
  for (int i : cone) s.push_back(Rat(1) - p.boundary[i]);
  return s;
}

// Exceptional lattice points of the cone with psi <= bound (strict or not),
// ignoring multiples of rays. Detection only; assumes an lc pair.
bool hasLowPoint(const Pair& p, const CartierData& cd, const ConeIdx& cone, bool strict) {
  const Fan& f = p.fan;
  std::vector<Rat> s = rayLogDiscrepancies(p, cone);
  // Sums of two distinct rays minimize psi over multi-ray nonneg combinations.
  for (std::size_t a = 0; a < cone.size(); ++a)
    for (std::size_t b = a + 1; b < cone.size(); ++b) {
      Rat v = s[a] + s[b];
      if (strict ? v < 1 : v <= 1) return true;
    }
  QMat gens;
  for (int i : cone) gens.push_back(f.rays[i]);
  for (const auto& w : halfOpenBoxPoints(gens)) {
    Rat psi = supportFunctionValue(cd, f, w);
    if (strict ? psi < 1 : psi <= 1) return true;
  }
  return false;
}

}  // namespace

SingularityReport classifyPair(const Pair& p) {
  CartierResult cr = cartierData(p.logCanonical(), p.fan);
  if (std::holds_alternative<NotQCartier>(cr)) throw PairError("K+Delta is not Q-Cartier");
  const CartierData& cd = std::get<CartierData>(cr);
  SingularityReport rep;
  rep.lc = true;
  rep.klt = true;
  for (const auto& c : p.boundary) {
    if (c > 1) rep.lc = false;
    if (c >= 1) rep.klt = false;
  }
  rep.terminal = rep.lc;
  rep.canonical = rep.lc;
  if (rep.lc) {
    for (const auto& cone : p.fan.cones) {
      if (hasLowPoint(p, cd, cone, /*strict=*/false)) rep.terminal = false;
      if (hasLowPoint(p, cd, cone, /*strict=*/true)) rep.canonical = false;
    }
  } else {
    rep.terminal = rep.canonical = false;
  }
  if (rep.terminal)
    rep.label = "terminal";
  else if (rep.canonical)
    rep.label = "canonical";
  else if (rep.klt)
    rep.label = "klt";
  else if (rep.lc)
    rep.label = "lc";
  else
    rep.label = "none";
  return rep;
}

Pair starSubdividePair(const Pair& p, const QVec& v) {
  Fan refined = starSubdivision(p.fan, v);
  Pair out;
  out.fan = refined;
  out.boundary = birationalTransform(p.fan, refined, p.boundary);
  out.base = p.base;
  return out;
}

Pair terminalize(const Pair& p) {
  SingularityReport rep = classifyPair(p);
  if (!rep.klt) throw PairError("terminalize: pair is not klt");
  if (!isQFactorial(p.fan)) throw PairError("terminalize: fan is not Q-factorial");
  Pair cur = p;
  const TDivisor crepant = p.logCanonical();  // support function is preserved
  for (int round = 0; round < 1000; ++round) {
    CartierResult cr = cartierData(cur.logCanonical(), cur.fan);
    const CartierData& cd = std::get<CartierData>(cr);
    // Collect exceptional candidates with discrepancy <= 0.
    QMat bad;
    for (const auto& cone : cur.fan.cones) {
      QMat gens;
      for (int i : cone) gens.push_back(cur.fan.rays[i]);
      for (std::size_t a = 0; a < cone.size(); ++a)
        for (std::size_t b = a + 1; b < cone.size(); ++b) {
          QVec w = primitive(add(cur.fan.rays[cone[a]], cur.fan.rays[cone[b]]));
          if (supportFunctionValue(cd, cur.fan, w) <= 1) bad.push_back(w);
        }
      for (const auto& w : halfOpenBoxPoints(gens)) {
        QVec pw = primitive(w);
        if (supportFunctionValue(cd, cur.fan, pw) <= 1) bad.push_back(pw);
      }
    }
    QMat fresh;
    for (const auto& w : bad)
      if (cur.fan.rayIndex(w) < 0) fresh.push_back(w);
    if (fresh.empty()) break;
    // Deterministic choice: smallest psi, then lex.
    QVec pick = fresh[0];
    Rat best = supportFunctionValue(cd, cur.fan, pick);
    for (const auto& w : fresh) {
      Rat psi = supportFunctionValue(cd, cur.fan, w);
      if (psi < best || (psi == best && lexLess(w, pick))) {
        best = psi;
        pick = w;
      }
    }
    Fan refined = starSubdivision(cur.fan, pick);
    Pair next;
    next.fan = refined;
    // Crepant boundary: Delta' = transform(Delta) + (1 - psi(v)) at the new ray.
    next.boundary = birationalTransform(cur.fan, refined, cur.boundary);
    int idx = refined.rayIndex(pick);
    next.boundary[idx] = Rat(1) - best;
    next.base = cur.base;
    cur = next;
  }
  SingularityReport after = classifyPair(cur);
  if (!after.terminal) throw PairError("terminalize: did not reach a terminal pair");
  // Crepancy: pullback of K+Delta equals K'+Delta'.
  TDivisor pulled =
      pullbackDivisor(identityMap(p.fan.latticeRank), cur.fan, p.fan, crepant);
  if (pulled != cur.logCanonical()) throw PairError("terminalize: crepancy violated");
  return cur;
}

}  // namespace tmmp
