#include <doctest.h>

#include <random>

#include "fixtures.hpp"
#include "tmmp/linalg.hpp"
#include "tmmp/numerical.hpp"

using namespace tmmp;
using namespace tmmp::fixtures;

namespace {

TDivisor td(std::initializer_list<int> xs) {
  TDivisor d;
  for (int x : xs) d.push_back(Rat(x));
  return d;
}

bool proportional(const QVec& a, const QVec& b) { return primitive(a) == primitive(b); }

}  // namespace

TEST_CASE("contracted curves of P2 and F1 over a point") {
  Pair p2 = pairOf(p2Fan());
  auto cs = contractedCurves(p2);
  REQUIRE(cs.size() == 3);
  for (const auto& c : cs) CHECK(proportional(c.classVec, cs[0].classVec));

  Pair f1 = pairOf(f1Fan());
  auto cf = contractedCurves(f1);
  REQUIRE(cf.size() == 4);
  // Wall relations r1+r3 = r2 and r2+r4 = 0.
  QVec eClass = {Rat(1), Rat(-1), Rat(1), Rat(0)};
  QVec fClass = {Rat(0), Rat(1), Rat(0), Rat(1)};
  int eSeen = 0, fSeen = 0;
  for (const auto& c : cf) {
    if (c.classVec == eClass) ++eSeen;
    if (c.classVec == fClass) ++fSeen;
  }
  CHECK(eSeen == 1);
  CHECK(fSeen == 2);
}

TEST_CASE("contracted curves of a fibration exclude base-direction walls") {
  Pair rel = f1xp1OverP1(TDivisor(6, Rat(0)));
  auto cs = contractedCurves(rel);
  // 4 F1-walls over each P1 ray are contracted; the 4 section walls are not.
  CHECK(cs.size() == 8);
  NumSpace ns = buildN1(rel);
  CHECK(ns.rankN1 == 2);

  // Oracle: pullback of a base-ample divisor pairs to zero with each of them.
  TDivisor baseAmple = {Rat(1), Rat(0)};  // a point on P1
  TDivisor pulled = pullbackDivisor(rel.base->map, rel.fan, rel.base->fan, baseAmple);
  for (const auto& c : cs) CHECK(intersectionNumber(pulled, c) == 0);

  // The absolute pair sees all 12 walls, and the section walls pair nonzero.
  Pair abs = pairOf(f1xp1Fan());
  auto all = contractedCurves(abs);
  CHECK(all.size() == 12);
  int nonzero = 0;
  for (const auto& c : all)
    if (intersectionNumber(pulled, c) != 0) ++nonzero;
  CHECK(nonzero == 4);
  CHECK(buildN1(abs).rankN1 == 3);
}

TEST_CASE("intersection numbers on F1") {
  Pair f1 = pairOf(f1Fan());
  auto cs = contractedCurves(f1);
  const CurveClass* e = nullptr;
  const CurveClass* fib = nullptr;
  for (const auto& c : cs) {
    if (c.wall == ConeIdx{1}) e = &c;
    if (c.wall == ConeIdx{0}) fib = &c;
  }
  REQUIRE(e);
  REQUIRE(fib);
  TDivisor eDiv = td({0, 1, 0, 0});
  TDivisor k = canonicalDivisor(f1.fan);
  CHECK(intersectionNumber(eDiv, *e) == Rat(-1));
  CHECK(intersectionNumber(k, *fib) == Rat(-2));
  CHECK(intersectionNumber(TDivisor(4, Rat(0)), *e) == Rat(0));
}

TEST_CASE("wall-relation pairing agrees with the Cartier-degree oracle") {
  std::mt19937_64 rng(23);
  std::uniform_int_distribution<int> coef(-4, 4);
  for (const Fan& f : {p2Fan(), f1Fan(), p1xp1Fan(), p3Fan(), f1xp1Fan()}) {
    Pair p = pairOf(f);
    auto cs = contractedCurves(p);
    for (int t = 0; t < 6; ++t) {
      TDivisor d(f.rays.size());
      for (auto& x : d) x = Rat(coef(rng));
      if (!isQCartier(d, f)) continue;
      for (const auto& c : cs)
        CHECK(intersectionNumber(d, c) == intersectionViaCartierDegree(d, f, c));
    }
  }
}

TEST_CASE("pairing normalization on a singular fan") {
  // Weighted plane with rays (1,0),(0,1),(-1,-2); the cone <(1,0),(-1,-2)>
  // has index 2.
  Fan wp = makeFan(2, {qv({1, 0}), qv({0, 1}), qv({-1, -2})}, {{0, 1}, {1, 2}, {0, 2}});
  Pair p = pairOf(wp);
  auto cs = contractedCurves(p);
  bool checked = false;
  for (const auto& c : cs) {
    if (c.wall != ConeIdx{0}) continue;
    CHECK(c.classVec == QVec{Rat(1) / 2, Rat(1), Rat(1) / 2});
    TDivisor d1 = td({1, 0, 0});
    CHECK(intersectionNumber(d1, c) == Rat(1) / 2);
    CHECK(intersectionViaCartierDegree(d1, wp, c) == Rat(1) / 2);
    checked = true;
  }
  CHECK(checked);
}

TEST_CASE("surface self-intersection equals polytope volume") {
  // On a toric surface the walls are the prime divisors, so (D.D) expands as
  // sum d_rho (D . C_rho) and must equal 2 * area(P_D) for nef D. This pins
  // the absolute normalization of the wall relation on singular fans.
  Fan wp = makeFan(2, {qv({1, 0}), qv({0, 1}), qv({-1, -2})}, {{0, 1}, {1, 2}, {0, 2}});
  std::vector<Fan> fans = {p2Fan(), f1Fan(), p1xp1Fan(), wp};
  std::mt19937_64 rng(83);
  std::uniform_int_distribution<int> num(0, 3);
  for (const Fan& f : fans) {
    Pair p = pairOf(f);
    auto curves = contractedCurves(p);
    int seen = 0;
    for (int t = 0; t < 30 && seen < 6; ++t) {
      TDivisor d(f.rays.size());
      for (auto& x : d) x = Rat(num(rng));
      if (!isQCartier(d, f) || !isNef(p, d)) continue;
      ++seen;
      Rat selfInt = 0;
      for (const auto& c : curves) {
        // The wall of a surface curve is a single ray.
        REQUIRE(c.wall.size() == 1);
        selfInt += d[c.wall[0]] * intersectionNumber(d, c);
      }
      CHECK(selfInt == divisorVolume(d, f));
    }
    CHECK(seen >= 2);
  }
}

TEST_CASE("buildN1 ranks") {
  CHECK(buildN1(pairOf(p2Fan())).rankN1 == 1);
  CHECK(buildN1(pairOf(f1Fan())).rankN1 == 2);
  CHECK(buildN1(pairOf(p1xp1Fan())).rankN1 == 2);
  CHECK(buildN1(pairOf(p3Fan())).rankN1 == 1);
  // Perfect pairing: the Gram matrix of basis curves has full rank.
  NumSpace ns = buildN1(pairOf(f1Fan()));
  QMat gram;
  for (const auto& b : ns.basisCurves) {
    QVec row;
    for (const auto& c : ns.basisCurves) row.push_back(dot(b, c));
    gram.push_back(row);
  }
  CHECK(rankOf(gram) == ns.rankN1);
}

TEST_CASE("mori and nef cones") {
  Pair p2 = pairOf(p2Fan());
  NumSpace ns2 = buildN1(p2);
  PolyCone mori2 = moriCone(p2, ns2);
  CHECK(mori2.generators.size() == 1);
  PolyCone nef2 = nefCone(p2, ns2);
  CHECK(nef2.generators.size() == 1);
  CHECK(divisorClassCoords(ns2, td({1, 0, 0}))[0] > 0);

  Pair f1 = pairOf(f1Fan());
  NumSpace nsf = buildN1(f1);
  PolyCone morif = moriCone(f1, nsf);
  CHECK(morif.generators.size() == 2);
  CHECK(coneEquals(coneDual(nefCone(f1, nsf)), morif));
}

TEST_CASE("nef and ample tests") {
  Pair f1 = pairOf(f1Fan());
  TDivisor minusK = td({1, 1, 1, 1});
  CHECK(isAmple(f1, minusK));
  TDivisor e = td({0, 1, 0, 0});
  CHECK(!isNef(f1, e));
  TDivisor zero(4, Rat(0));
  CHECK(isNef(f1, zero));
  CHECK(!isAmple(f1, zero));
}

TEST_CASE("Kleiman equivalence: ample <=> strict positivity <=> interior of nef") {
  std::mt19937_64 rng(29);
  std::uniform_int_distribution<int> num(-6, 6);
  std::uniform_int_distribution<int> den(1, 4);
  for (const Fan& f : {p2Fan(), f1Fan(), p1xp1Fan(), p3Fan()}) {
    Pair p = pairOf(f);
    NumSpace ns = buildN1(p);
    PolyCone nef = nefCone(p, ns);
    auto curves = contractedCurves(p);
    for (int t = 0; t < 50; ++t) {
      TDivisor d(f.rays.size());
      for (auto& x : d) x = Rat(num(rng)) / den(rng);
      if (!isQCartier(d, f)) continue;
      bool ample = isAmple(p, d);
      bool strict = true;
      for (const auto& c : curves)
        if (intersectionNumber(d, c) <= 0) strict = false;
      QVec cls = divisorClassCoords(ns, d);
      bool interior = nef.containsStrictly(cls);
      CHECK(ample == strict);
      CHECK(ample == interior);
      if (isNef(p, d)) CHECK(nef.contains(cls));
    }
  }
}

TEST_CASE("bigness and Kodaira decomposition") {
  Pair p2 = pairOf(p2Fan());
  TDivisor h = td({1, 0, 0});
  CHECK(isBig(p2, h));
  auto kd = kodairaDecompose(p2, h);
  REQUIRE(kd.has_value());
  // Exactness: D - A - E is the principal divisor of the witness shift.
  TDivisor residue = h;
  for (std::size_t i = 0; i < residue.size(); ++i) residue[i] -= kd->ample[i] + kd->effective[i];
  TDivisor principal = principalDivisor(kd->shift, p2.fan);
  for (std::size_t i = 0; i < residue.size(); ++i) CHECK(residue[i] == -principal[i]);
  CHECK(isAmple(p2, kd->ample));
  for (const auto& c : kd->effective) CHECK(c >= 0);

  Pair f1 = pairOf(f1Fan());
  CHECK(!isBig(f1, td({0, 1, 0, 0})));
  CHECK(!kodairaDecompose(f1, td({0, 1, 0, 0})).has_value());

  // Ample D decomposes admissibly as well.
  auto ka = kodairaDecompose(f1, td({1, 1, 1, 1}));
  CHECK(ka.has_value());

  // big + nef => big.
  std::mt19937_64 rng(31);
  std::uniform_int_distribution<int> num(0, 4);
  for (int t = 0; t < 20; ++t) {
    TDivisor big = td({1, 1, 1, 1});
    TDivisor nef(4);
    for (auto& x : nef) x = Rat(num(rng));
    if (!isNef(f1, nef)) continue;
    TDivisor sum = big;
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += nef[i];
    CHECK(isBig(f1, sum));
  }
}

TEST_CASE("pseudoeffectivity") {
  Pair f1 = pairOf(f1Fan());
  CHECK(isPseudoeffective(f1, td({0, 1, 0, 0})));
  Pair p2 = pairOf(p2Fan());
  CHECK(!isPseudoeffective(p2, td({-1, 0, 0})));
  CHECK(isPseudoeffective(p2, TDivisor(3, Rat(0))));
  // Limit characterization against the ample shift.
  TDivisor a = td({1, 1, 1, 1});
  std::mt19937_64 rng(37);
  std::uniform_int_distribution<int> num(-3, 3);
  for (int t = 0; t < 25; ++t) {
    TDivisor d(4);
    for (auto& x : d) x = Rat(num(rng));
    bool psef = isPseudoeffective(f1, d);
    if (psef) {
      for (int k : {1, 4, 16}) {
        TDivisor shifted = d;
        for (std::size_t i = 0; i < 4; ++i) shifted[i] += a[i] / k;
        CHECK(effectivityTest(shifted, f1.fan));
      }
    } else {
      TDivisor shifted = d;
      for (std::size_t i = 0; i < 4; ++i) shifted[i] += a[i] / 1000;
      CHECK(!effectivityTest(shifted, f1.fan));
    }
  }
}

TEST_CASE("supporting hyperplanes and extremal faces") {
  Pair f1 = pairOf(f1Fan());
  // D = K + A with A = D_{r3} + 3 D_{r4}: nef, vanishing exactly on [E].
  TDivisor d = td({-1, -1, 0, 2});
  REQUIRE(isNef(f1, d));
  SupportingData sd = supportingData(f1, d);
  CHECK(sd.isRay);
  REQUIRE(sd.faceCurves.size() == 1);
  CHECK(sd.faceCurves[0].classVec == QVec{Rat(1), Rat(-1), Rat(1), Rat(0)});

  // The pulled-back point class of the P1-fibration supports the fiber ray.
  TDivisor piH = td({1, 0, 0, 0});
  REQUIRE(isNef(f1, piH));
  SupportingData sf = supportingData(f1, piH);
  CHECK(sf.isRay);
  REQUIRE(!sf.faceCurves.empty());
  CHECK(sf.faceCurves[0].classVec == QVec{Rat(0), Rat(1), Rat(0), Rat(1)});

  // Zero divisor: the whole Mori cone is the face.
  Pair p2 = pairOf(p2Fan());
  SupportingData sz = supportingData(p2, TDivisor(3, Rat(0)));
  CHECK(sz.faceCurves.size() == 3);
  NumSpace ns2 = buildN1(p2);
  CHECK(coneEquals(sz.extremalFace, moriCone(p2, ns2)));

  CHECK_THROWS_AS(supportingData(f1, td({1, 1, 1, 1})), NumericalError);
}

TEST_CASE("cone theorem decomposition") {
  Pair p2 = pairOf(p2Fan());
  ConeTheoremData c2 = coneTheoremDecomposition(p2);
  REQUIRE(c2.negativeRays.size() == 1);
  CHECK(c2.cartierIdx == 1);
  CHECK(c2.maxFiberDimension == 2);
  CHECK(c2.rayDenominators[0] <= c2.cartierIdx * (c2.maxFiberDimension + 1));
  CHECK(c2.kNonNegativePart.generators.empty());

  Pair f1 = pairOf(f1Fan());
  ConeTheoremData cf = coneTheoremDecomposition(f1);
  CHECK(cf.negativeRays.size() == 2);
  for (const auto& v : cf.rayDenominators)
    CHECK(v <= cf.cartierIdx * (cf.maxFiberDimension + 1));

  // With boundary pushing K+Delta toward nef the reported rays stay exactly
  // the K+Delta-negative extremal ones.
  TDivisor delta(4, Rat(9) / 10);
  Pair nearly = pairOf(f1Fan(), delta);
  ConeTheoremData cn = coneTheoremDecomposition(nearly);
  TDivisor kd = nearly.logCanonical();
  for (const auto& r : cn.negativeRays) CHECK(intersectionNumber(kd, r) < 0);
}

TEST_CASE("cartier index and fiber dimension") {
  Fan p2 = p2Fan();
  CHECK(cartierIndex(canonicalDivisor(p2), p2) == 1);
  TDivisor half = {Rat(1) / 2, Rat(0), Rat(0)};
  CHECK(cartierIndex(half, p2) == 2);
  Fan a1 = makeFan(2, {qv({1, 0}), qv({-1, -2})}, {{0, 1}});
  CHECK(cartierIndex(TDivisor{Rat(1), Rat(0)}, a1) == 2);

  CHECK(maxFiberDim(pairOf(p2Fan())) == 2);
  CHECK(maxFiberDim(f1xp1OverP1(TDivisor(6, Rat(0)))) == 2);
  CHECK(maxFiberDim(quadricXOverY(TDivisor(4, Rat(0)))) == 1);
}

TEST_CASE("restrictToOpen") {
  Pair rel = f1xp1OverP1(TDivisor(6, Rat(0)));
  // One affine chart of P1.
  RestrictedFamily r = restrictToOpen(rel, {{0}});
  CHECK(r.pair.fan.cones.size() == 4);
  CHECK(r.pair.fan.rays.size() == 5);

  // Contracted curves of the restriction inject into the global ones.
  auto localCurves = contractedCurves(r.pair);
  auto globalCurves = contractedCurves(rel);
  NumSpace globalNs = buildN1(rel);
  CHECK(!localCurves.empty());
  for (const auto& lc : localCurves) {
    QVec ext = extendCurveVec(r, lc.classVec);
    CHECK(coordinatesIn(globalNs.basisCurves, ext).has_value());
    bool found = false;
    for (const auto& gc : globalCurves)
      if (gc.classVec == ext) found = true;
    CHECK(found);
  }

  // Whole base: identity.
  RestrictedFamily whole = restrictToOpen(rel, rel.base->fan.cones);
  CHECK(fanEquals(whole.pair.fan, rel.fan));

  // Nef restricts to nef; ample restricts to ample.
  std::mt19937_64 rng(41);
  std::uniform_int_distribution<int> num(-2, 4);
  int seen = 0;
  for (int t = 0; t < 60 && seen < 20; ++t) {
    TDivisor d(6);
    for (auto& x : d) x = Rat(num(rng));
    if (!isQCartier(d, rel.fan)) continue;
    if (!isNef(rel, d)) continue;
    ++seen;
    CHECK(isNef(r.pair, restrictDivisor(r, d)));
    if (isAmple(rel, d)) CHECK(isAmple(r.pair, restrictDivisor(r, d)));
  }
  CHECK(seen >= 10);
}

TEST_CASE("pullback preserves nef along star subdivisions") {
  std::mt19937_64 rng(43);
  std::uniform_int_distribution<int> num(0, 4);
  Fan f1 = f1Fan();
  Fan bl = starSubdivision(f1, qv({2, 1}));
  Pair up = pairOf(bl);
  Pair down = pairOf(f1);
  int seen = 0;
  for (int t = 0; t < 40; ++t) {
    TDivisor d(4);
    for (auto& x : d) x = Rat(num(rng));
    if (!isNef(down, d)) continue;
    ++seen;
    TDivisor pulled = pullbackDivisor(identityMap(2), bl, f1, d);
    CHECK(isNef(up, pulled));
  }
  CHECK(seen >= 10);
}
