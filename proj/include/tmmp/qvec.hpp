// Dense exact-rational vectors and matrices.
#pragma once

#include <cstddef>
#include <vector>

#include "tmmp/rat.hpp"

namespace tmmp {

using QVec = std::vector<Rat>;
using QMat = std::vector<QVec>;  // row major

inline Rat dot(const QVec& a, const QVec& b) {
  Rat s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline QVec add(const QVec& a, const QVec& b) {
  QVec r(a);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] += b[i];
  return r;
}

inline QVec sub(const QVec& a, const QVec& b) {
  QVec r(a);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= b[i];
  return r;
}

inline QVec scale(const QVec& a, const Rat& t) {
  QVec r(a);
  for (auto& x : r) x *= t;
  return r;
}

inline QVec zeroVec(std::size_t n) { return QVec(n, Rat(0)); }

inline bool isZeroVec(const QVec& a) {
  for (const auto& x : a)
    if (x != 0) return false;
  return true;
}

inline QVec matVec(const QMat& m, const QVec& x) {
  QVec r;
  r.reserve(m.size());
  for (const auto& row : m) r.push_back(dot(row, x));
  return r;
}

// Scales to integer entries with content 1. Zero vector stays zero.
inline QVec primitive(const QVec& a) {
  Int l = 1;
  for (const auto& x : a) l = lcmInt(l, denomOf(x));
  Int g = 0;
  QVec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    Int n = numerOf(a[i]) * (l / denomOf(a[i]));
    r[i] = Rat(n);
    g = gcdInt(g, n);
  }
  if (g == 0) return r;
  for (auto& x : r) x /= Rat(g);
  return r;
}

inline bool isIntegerVec(const QVec& a) {
  for (const auto& x : a)
    if (!isInteger(x)) return false;
  return true;
}

// Lexicographic order, used only for canonical sorting.
inline bool lexLess(const QVec& a, const QVec& b) {
  for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) {
    if (a[i] != b[i]) return a[i] < b[i];
  }
  return a.size() < b.size();
}

}  // namespace tmmp
