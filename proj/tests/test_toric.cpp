#include <doctest.h>

#include <random>

#include "fixtures.hpp"
#include "tmmp/pair.hpp"

using namespace tmmp;
using namespace tmmp::fixtures;

TEST_CASE("validateFan on the standard fixtures") {
  FanReport p2 = validateFan(p2Fan());
  CHECK(p2.errors.empty());
  CHECK(p2.simplicial);
  CHECK(p2.complete);

  Fan quadrant = makeFan(2, {qv({1, 0}), qv({0, 1})}, {{0, 1}});
  FanReport q = validateFan(quadrant);
  CHECK(q.errors.empty());
  CHECK(!q.complete);

  Fan bad = makeFan(1, {qv({2})}, {{0}});
  FanReport b = validateFan(bad);
  CHECK(!b.errors.empty());

  FanReport quad = validateFan(quadricConeFan());
  CHECK(quad.errors.empty());
  CHECK(!quad.simplicial);
}

TEST_CASE("isQFactorial") {
  CHECK(isQFactorial(p2Fan()));
  CHECK(isQFactorial(f1Fan()));
  CHECK(isQFactorial(p3Fan()));
  CHECK(!isQFactorial(quadricConeFan()));
}

TEST_CASE("cartierData examples") {
  Fan p2 = p2Fan();
  TDivisor h = {Rat(1), Rat(0), Rat(0)};
  CartierResult cr = cartierData(h, p2);
  REQUIRE(std::holds_alternative<CartierData>(cr));
  const auto& cd = std::get<CartierData>(cr);
  // On the cone <e1,e2>: <m,(1,0)> = -1, <m,(0,1)> = 0.
  CHECK(cd.m[0] == QVec{Rat(-1), Rat(0)});

  TDivisor zero(3, Rat(0));
  CartierResult cz = cartierData(zero, p2);
  for (const auto& m : std::get<CartierData>(cz).m) CHECK(isZeroVec(m));

  Fan y = quadricConeFan();
  TDivisor dv1 = {Rat(1), Rat(0), Rat(0), Rat(0)};
  CartierResult cy = cartierData(dv1, y);
  REQUIRE(std::holds_alternative<NotQCartier>(cy));
  CHECK(std::get<NotQCartier>(cy).offendingCone == 0);
}

TEST_CASE("canonical divisor and its class") {
  Fan p2 = p2Fan();
  TDivisor k = canonicalDivisor(p2);
  CHECK(k == TDivisor{Rat(-1), Rat(-1), Rat(-1)});
  // K ~ -3H
  TDivisor minus3h = {Rat(-3), Rat(0), Rat(0)};
  CHECK(linearlyEquivalent(k, minus3h, p2).has_value());
  CHECK(canonicalDivisor(f1Fan()) == TDivisor(4, Rat(-1)));
}

TEST_CASE("rounding and meet") {
  TDivisor a = {Rat(3) / 2, Rat(-1) / 2};
  RoundedDivisors r = roundOps(a);
  CHECK(r.floorD == TDivisor{Rat(1), Rat(-1)});
  CHECK(r.ceilD == TDivisor{Rat(2), Rat(0)});
  CHECK(r.fracD == TDivisor{Rat(1) / 2, Rat(1) / 2});
  // floor + frac = a
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(r.floorD[i] + r.fracD[i] == a[i]);
  CHECK(meet({Rat(1), Rat(0)}, {Rat(0), Rat(1)}) == TDivisor{Rat(0), Rat(0)});
}

TEST_CASE("linear equivalence") {
  Fan p2 = p2Fan();
  TDivisor d1 = {Rat(1), Rat(0), Rat(0)};
  TDivisor d2 = {Rat(0), Rat(1), Rat(0)};
  auto m = linearlyEquivalent(d1, d2, p2);
  REQUIRE(m.has_value());
  for (std::size_t i = 0; i < 3; ++i) CHECK(dot(*m, p2.rays[i]) == d1[i] - d2[i]);
  CHECK(linearlyEquivalent(d1, d1, p2) == QVec{Rat(0), Rat(0)});

  Fan f1 = f1Fan();
  TDivisor e = {Rat(0), Rat(1), Rat(0), Rat(0)};
  TDivisor fib = {Rat(1), Rat(0), Rat(0), Rat(0)};
  CHECK(!linearlyEquivalent(e, fib, f1).has_value());
}

TEST_CASE("pullback along the blow-down F1 -> P2") {
  Fan f1 = f1Fan(), p2 = p2Fan();
  LatticeMap id = identityMap(2);
  TDivisor h = {Rat(1), Rat(0), Rat(0)};
  TDivisor pull = pullbackDivisor(id, f1, p2, h);
  // Total transform picks up the exceptional ray (1,1) with multiplicity 1.
  CHECK(pull == TDivisor{Rat(1), Rat(1), Rat(0), Rat(0)});

  TDivisor zero(3, Rat(0));
  CHECK(pullbackDivisor(id, f1, p2, zero) == TDivisor(4, Rat(0)));
  CHECK(pullbackDivisor(identityMap(2), p2, p2, h) == h);

  // Pullback of principal is principal, and commutes with linear equivalence.
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> coef(-3, 3);
  for (int t = 0; t < 10; ++t) {
    QVec m = {Rat(coef(rng)), Rat(coef(rng))};
    TDivisor prin = principalDivisor(m, p2);
    TDivisor lifted = pullbackDivisor(id, f1, p2, prin);
    CHECK(lifted == principalDivisor(m, f1));
    TDivisor hShift = h;
    for (std::size_t i = 0; i < hShift.size(); ++i) hShift[i] += prin[i];
    CHECK(pullbackDivisor(id, f1, p2, hShift) ==
          [&] {
            TDivisor s = pull;
            for (std::size_t i = 0; i < s.size(); ++i) s[i] += lifted[i];
            return s;
          }());
  }
}

TEST_CASE("birational transform") {
  Fan f1 = f1Fan(), p2 = p2Fan();
  TDivisor e = {Rat(0), Rat(1), Rat(0), Rat(0)};
  CHECK(birationalTransform(f1, p2, e) == TDivisor(3, Rat(0)));
  TDivisor d = {Rat(2), Rat(-1), Rat(5), Rat(0)};
  CHECK(birationalTransform(f1, f1, d) == d);
  // Flop: same rays on both sides, coefficients carried over.
  TDivisor q = {Rat(1), Rat(2), Rat(3), Rat(4)};
  CHECK(birationalTransform(quadricResolutionX(), quadricResolutionXplus(), q) == q);
}

TEST_CASE("discrepancies") {
  Pair p2 = pairOf(p2Fan());
  CHECK(discrepancy(p2, qv({1, 1})) == Rat(1));

  TDivisor half = {Rat(1) / 2, Rat(1) / 2, Rat(0)};
  Pair p2half = pairOf(p2Fan(), half);
  CHECK(discrepancy(p2half, qv({1, 1})) == Rat(0));

  // At a ray the discrepancy is minus the boundary coefficient.
  CHECK(discrepancy(p2half, qv({1, 0})) == Rat(-1) / 2);
  CHECK(discrepancy(p2half, qv({-1, -1})) == Rat(0));
}

TEST_CASE("discrepancy agrees with the star-subdivision oracle") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> num(0, 2);
  std::uniform_int_distribution<int> coord(-2, 3);
  std::vector<Pair> pairs = {pairOf(p2Fan()), pairOf(f1Fan()),
                             pairOf(p2Fan(), {Rat(1) / 2, Rat(1) / 2, Rat(0)}),
                             pairOf(p3Fan(), {Rat(1) / 3, Rat(0), Rat(1) / 2, Rat(0)})};
  int tested = 0;
  for (int t = 0; t < 200 && tested < 40; ++t) {
    const Pair& p = pairs[t % pairs.size()];
    QVec v(p.fan.latticeRank);
    for (auto& x : v) x = Rat(coord(rng));
    if (isZeroVec(v)) continue;
    v = primitive(v);
    if (!coneContaining(p.fan, v)) continue;
    if (p.fan.rayIndex(v) >= 0) continue;
    Rat direct = discrepancy(p, v);
    // Oracle: subdivide at v, pull back K+Delta, compare with K'+transform.
    Fan refined = starSubdivision(p.fan, v);
    TDivisor pulled =
        pullbackDivisor(identityMap(p.fan.latticeRank), refined, p.fan, p.logCanonical());
    TDivisor upstairs = canonicalDivisor(refined);
    TDivisor delta = birationalTransform(p.fan, refined, p.boundary);
    for (std::size_t i = 0; i < upstairs.size(); ++i) upstairs[i] += delta[i];
    int vi = refined.rayIndex(v);
    Rat oracle = upstairs[vi] - pulled[vi];
    CHECK(direct == oracle);
    ++tested;
  }
  CHECK(tested >= 30);
}

TEST_CASE("classification of pairs") {
  SingularityReport a = classifyPair(pairOf(p2Fan()));
  CHECK(a.terminal);
  CHECK(a.label == "terminal");

  SingularityReport b = classifyPair(pairOf(p2Fan(), {Rat(1) / 2, Rat(1) / 2, Rat(0)}));
  CHECK(b.canonical);
  CHECK(!b.terminal);
  CHECK(b.klt);
  CHECK(b.label == "canonical");

  SingularityReport c = classifyPair(pairOf(p2Fan(), {Rat(1), Rat(0), Rat(0)}));
  CHECK(c.lc);
  CHECK(!c.klt);

  // Quadric cone resolution is smooth, terminal.
  SingularityReport d = classifyPair(pairOf(quadricResolutionX()));
  CHECK(d.terminal);

  // A_1 surface cone: canonical, not terminal.
  Fan a1 = makeFan(2, {qv({1, 0}), qv({-1, -2})}, {{0, 1}});
  SingularityReport e = classifyPair(pairOf(a1));
  CHECK(e.canonical);
  CHECK(!e.terminal);

  // klt implies sampled discrepancies > -1; terminal implies exceptional > 0.
  std::mt19937_64 rng(13);
  std::uniform_int_distribution<int> coord(-2, 3);
  for (const Pair& p : {pairOf(p2Fan(), {Rat(1) / 2, Rat(1) / 2, Rat(0)}), pairOf(p3Fan())}) {
    SingularityReport rep = classifyPair(p);
    for (int t = 0; t < 60; ++t) {
      QVec v(p.fan.latticeRank);
      for (auto& x : v) x = Rat(coord(rng));
      if (isZeroVec(v) || !coneContaining(p.fan, v)) continue;
      v = primitive(v);
      Rat disc = discrepancy(p, v);
      if (rep.klt) CHECK(disc > Rat(-1));
      if (rep.terminal && p.fan.rayIndex(v) < 0) CHECK(disc > Rat(0));
    }
  }
}

TEST_CASE("section polyhedra, effectivity, fixed part, volume") {
  Fan p2 = p2Fan();
  TDivisor h = {Rat(1), Rat(0), Rat(0)};
  CHECK(effectivityTest(h, p2));
  CHECK(divisorVolume(h, p2) == Rat(1));

  TDivisor mh = {Rat(-1), Rat(0), Rat(0)};
  CHECK(!effectivityTest(mh, p2));

  Fan f1 = f1Fan();
  TDivisor e = {Rat(0), Rat(1), Rat(0), Rat(0)};
  Polyhedron pe = sectionPolyhedron(e, f1);
  VRep v = vertexEnumeration(pe);
  CHECK(v.points.size() == 1);
  CHECK(fixedPart(e, f1) == e);

  // Volume homogeneity on random effective divisors.
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<int> coef(0, 3);
  for (int t = 0; t < 8; ++t) {
    Fan f = (t % 2) ? p2Fan() : f1Fan();
    TDivisor d(f.rays.size());
    for (auto& x : d) x = Rat(coef(rng));
    Rat v1 = divisorVolume(d, f);
    for (int n : {2, 3}) {
      TDivisor nd = d;
      for (auto& x : nd) x *= n;
      Rat expected = v1;
      for (int k = 0; k < f.latticeRank; ++k) expected *= n;
      CHECK(divisorVolume(nd, f) == expected);
    }
  }
}

TEST_CASE("floor/frac and meet properties on random divisors") {
  std::mt19937_64 rng(19);
  std::uniform_int_distribution<int> num(-9, 9);
  std::uniform_int_distribution<int> den(1, 5);
  for (int t = 0; t < 30; ++t) {
    TDivisor a(4), b(4);
    for (int i = 0; i < 4; ++i) {
      a[i] = Rat(num(rng)) / den(rng);
      b[i] = Rat(num(rng)) / den(rng);
    }
    RoundedDivisors r = roundOps(a);
    for (int i = 0; i < 4; ++i) {
      CHECK(r.floorD[i] + r.fracD[i] == a[i]);
      CHECK(r.fracD[i] >= 0);
      CHECK(r.fracD[i] < 1);
      CHECK(meet(a, b)[i] <= a[i]);
      CHECK(meet(a, b)[i] <= b[i]);
    }
  }
}

TEST_CASE("star subdivision") {
  Fan p2 = p2Fan();
  Fan sub = starSubdivision(p2, qv({1, 1}));
  CHECK(fanEquals(sub, f1Fan()));

  Fan quadrant = makeFan(2, {qv({1, 0}), qv({0, 1})}, {{0, 1}});
  Fan bl = starSubdivision(quadrant, qv({1, 1}));
  CHECK(bl.cones.size() == 2);
  CHECK(validateFan(bl).errors.empty());

  CHECK_THROWS_AS(starSubdivision(p2, qv({1, 0})), FanError);
}

TEST_CASE("qFactorialize") {
  Fan y = quadricConeFan();
  Fan x = qFactorialize(y);
  CHECK(isQFactorial(x));
  CHECK(x.rays == y.rays);
  CHECK(x.cones.size() == 2);
  // Identity on already-simplicial fans.
  CHECK(fanEquals(qFactorialize(p2Fan()), p2Fan()));
  // The refinement is proper over the original cone.
  CHECK(isProperMap(identityMap(3), x, y));
}

TEST_CASE("terminalize") {
  Pair p = pairOf(p2Fan(), {Rat(1) / 2, Rat(1) / 2, Rat(0)});
  Pair t = terminalize(p);
  CHECK(classifyPair(t).terminal);
  CHECK(t.fan.rayIndex(qv({1, 1})) >= 0);
  CHECK(t.boundary[t.fan.rayIndex(qv({1, 1}))] == Rat(0));

  Pair already = pairOf(p2Fan());
  Pair same = terminalize(already);
  CHECK(fanEquals(same.fan, already.fan));

  CHECK_THROWS_AS(terminalize(pairOf(p2Fan(), {Rat(1), Rat(0), Rat(0)})), PairError);
}

TEST_CASE("threefold singularity classification and terminalization") {
  // Quotient threefold singularity 1/2(1,1,1): terminal.
  Fan half111 = makeFan(3, {qv({1, 0, 0}), qv({0, 1, 0}), qv({-1, -1, -2})},
                        {{0, 1, 2}});
  SingularityReport a = classifyPair(pairOf(half111));
  CHECK(a.terminal);

  // Compound A1 point: canonical, not terminal; one crepant blowup fixes it.
  Fan ca1 = makeFan(3, {qv({1, 1, 0}), qv({1, -1, 0}), qv({0, 0, 1})}, {{0, 1, 2}});
  SingularityReport b = classifyPair(pairOf(ca1));
  CHECK(b.canonical);
  CHECK(!b.terminal);
  Pair t = terminalize(pairOf(ca1));
  CHECK(classifyPair(t).terminal);
  CHECK(t.fan.rayIndex(qv({1, 0, 0})) >= 0);
  CHECK(t.boundary[t.fan.rayIndex(qv({1, 0, 0}))] == Rat(0));
}

TEST_CASE("faces of cones with lineality") {
  PolyCone half = coneFromGeneratorsAndLineality({qv({1, 0})}, {qv({0, 1})}, 2);
  CHECK(half.dim() == 2);
  auto f1 = facesOfCodim(half, 1);
  REQUIRE(f1.size() == 1);
  CHECK(f1[0].dim() == 1);
  CHECK(f1[0].generators.empty());
  CHECK(f1[0].lineality.size() == 1);
}

TEST_CASE("relative pairs validate") {
  Pair rel = f1xp1OverP1(TDivisor(6, Rat(0)));
  validatePair(rel);
  Pair q = quadricXOverY(TDivisor(4, Rat(0)));
  validatePair(q);
}
