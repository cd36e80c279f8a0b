// Shared toric fixtures for the test suites.
#pragma once

#include "tmmp/pair.hpp"

namespace tmmp::fixtures {

inline QVec qv(std::initializer_list<int> xs) {
  QVec v;
  for (int x : xs) v.push_back(Rat(x));
  return v;
}

inline Fan p1Fan() { return makeFan(1, {qv({1}), qv({-1})}, {{0}, {1}}); }

inline Fan p2Fan() {
  return makeFan(2, {qv({1, 0}), qv({0, 1}), qv({-1, -1})}, {{0, 1}, {1, 2}, {0, 2}});
}

// Blow-up of P^2 at the torus-fixed point of the first quadrant: rays
// r1=(1,0), r2=(1,1), r3=(0,1), r4=(-1,-1).
inline Fan f1Fan() {
  return makeFan(2, {qv({1, 0}), qv({1, 1}), qv({0, 1}), qv({-1, -1})},
                 {{0, 1}, {1, 2}, {2, 3}, {0, 3}});
}

inline Fan p1xp1Fan() {
  return makeFan(2, {qv({1, 0}), qv({0, 1}), qv({-1, 0}), qv({0, -1})},
                 {{0, 1}, {1, 2}, {2, 3}, {0, 3}});
}

inline Fan p3Fan() {
  return makeFan(3,
                 {qv({1, 0, 0}), qv({0, 1, 0}), qv({0, 0, 1}), qv({-1, -1, -1})},
                 {{0, 1, 2}, {0, 1, 3}, {0, 2, 3}, {1, 2, 3}});
}

// Affine quadric cone: one non-simplicial maximal cone on v1..v4.
inline QMat quadricRays() {
  return {qv({0, 0, 1}), qv({1, 0, 1}), qv({1, 1, 1}), qv({0, 1, 1})};
}
inline Fan quadricConeFan() { return makeFan(3, quadricRays(), {{0, 1, 2, 3}}); }
// Small resolution using the diagonal v1-v3.
inline Fan quadricResolutionX() { return makeFan(3, quadricRays(), {{0, 1, 2}, {0, 2, 3}}); }
// The opposite small resolution, using the diagonal v2-v4.
inline Fan quadricResolutionXplus() { return makeFan(3, quadricRays(), {{0, 1, 3}, {1, 2, 3}}); }

inline Pair pairOf(Fan f, TDivisor delta) {
  Pair p;
  p.fan = std::move(f);
  p.boundary = std::move(delta);
  return p;
}

inline Pair pairOf(Fan f) {
  TDivisor zero(f.rays.size(), Rat(0));
  return pairOf(std::move(f), zero);
}

// Relative pair over a base fan, with the structure map given by `matrix`.
inline Pair relativePair(Fan f, TDivisor delta, Fan base, QMat matrix) {
  Pair p = pairOf(std::move(f), std::move(delta));
  p.base = BaseData{std::move(base), LatticeMap{std::move(matrix)}};
  return p;
}

// X = F1 x P1 over P1 (projection to the last coordinate).
inline Fan f1xp1Fan() {
  QMat rays = {qv({1, 0, 0}),  qv({1, 1, 0}),  qv({0, 1, 0}),
               qv({-1, -1, 0}), qv({0, 0, 1}), qv({0, 0, -1})};
  std::vector<ConeIdx> cones;
  std::vector<ConeIdx> f1cones = {{0, 1}, {1, 2}, {2, 3}, {0, 3}};
  for (const auto& c : f1cones)
    for (int s : {4, 5}) {
      ConeIdx nc = c;
      nc.push_back(s);
      cones.push_back(nc);
    }
  return makeFan(3, rays, cones);
}

inline Pair f1xp1OverP1(TDivisor delta) {
  QMat proj = {qv({0, 0, 1})};
  return relativePair(f1xp1Fan(), std::move(delta), p1Fan(), proj);
}

// X -> Y: the small resolution of the affine quadric cone, relative setting.
inline Pair quadricXOverY(TDivisor delta) {
  QMat id3 = {qv({1, 0, 0}), qv({0, 1, 0}), qv({0, 0, 1})};
  return relativePair(quadricResolutionX(), std::move(delta), quadricConeFan(), id3);
}

inline Pair quadricXplusOverY(TDivisor delta) {
  QMat id3 = {qv({1, 0, 0}), qv({0, 1, 0}), qv({0, 0, 1})};
  return relativePair(quadricResolutionXplus(), std::move(delta), quadricConeFan(), id3);
}

}  // namespace tmmp::fixtures
