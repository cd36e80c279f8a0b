#include "tmmp/linalg.hpp"

#include <algorithm>
#include <cassert>

namespace tmmp {

std::vector<int> rref(QMat& m) {
  std::vector<int> pivots;
  if (m.empty()) return pivots;
  const int rows = static_cast<int>(m.size());
  const int cols = static_cast<int>(m[0].size());
  int r = 0;
  for (int c = 0; c < cols && r < rows; ++c) {
    int p = -1;
    for (int i = r; i < rows; ++i)
      if (m[i][c] != 0) {
        p = i;
        break;
      }
    if (p < 0) continue;
    std::swap(m[r], m[p]);
    Rat inv = Rat(1) / m[r][c];
    for (int j = c; j < cols; ++j) m[r][j] *= inv;
    for (int i = 0; i < rows; ++i) {
      if (i == r || m[i][c] == 0) continue;
      Rat f = m[i][c];
      for (int j = c; j < cols; ++j) m[i][j] -= f * m[r][j];
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

int rankOf(QMat m) { return static_cast<int>(rref(m).size()); }

std::optional<QVec> solveLinear(const QMat& m, const QVec& rhs) {
  const int rows = static_cast<int>(m.size());
  const int cols = rows == 0 ? 0 : static_cast<int>(m[0].size());
  QMat aug(m);
  for (int i = 0; i < rows; ++i) aug[i].push_back(rhs[i]);
  std::vector<int> piv = rref(aug);
  for (int k = 0; k < static_cast<int>(piv.size()); ++k)
    if (piv[k] == cols) return std::nullopt;  // 0 = 1 row
  QVec x(cols, Rat(0));
  for (int k = 0; k < static_cast<int>(piv.size()); ++k) x[piv[k]] = aug[k][cols];
  return x;
}

QMat nullspaceBasis(const QMat& m, int n) {
  QMat a(m);
  std::vector<int> piv = rref(a);
  std::vector<bool> isPivot(n, false);
  for (int c : piv) isPivot[c] = true;
  QMat basis;
  for (int c = 0; c < n; ++c) {
    if (isPivot[c]) continue;
    QVec v(n, Rat(0));
    v[c] = 1;
    for (int k = 0; k < static_cast<int>(piv.size()); ++k) v[piv[k]] = -a[k][c];
    basis.push_back(v);
  }
  return basis;
}

Rat detOf(QMat m) {
  const int n = static_cast<int>(m.size());
  Rat det = 1;
  for (int c = 0; c < n; ++c) {
    int p = -1;
    for (int i = c; i < n; ++i)
      if (m[i][c] != 0) {
        p = i;
        break;
      }
    if (p < 0) return Rat(0);
    if (p != c) {
      std::swap(m[p], m[c]);
      det = -det;
    }
    det *= m[c][c];
    Rat inv = Rat(1) / m[c][c];
    for (int i = c + 1; i < n; ++i) {
      if (m[i][c] == 0) continue;
      Rat f = m[i][c] * inv;
      for (int j = c; j < n; ++j) m[i][j] -= f * m[c][j];
    }
  }
  return det;
}

std::vector<Int> smithDiagonal(QMat m) {
  // Integer elimination; entries stay integral throughout.
  const int rows = static_cast<int>(m.size());
  const int cols = rows == 0 ? 0 : static_cast<int>(m[0].size());
  std::vector<Int> divisors;
  int top = 0, left = 0;
  while (top < rows && left < cols) {
    int pi = -1, pj = -1;
    Int best = 0;
    for (int i = top; i < rows; ++i)
      for (int j = left; j < cols; ++j) {
        Int v = boost::multiprecision::abs(numerOf(m[i][j]));
        if (v != 0 && (best == 0 || v < best)) {
          best = v;
          pi = i;
          pj = j;
        }
      }
    if (pi < 0) break;
    std::swap(m[top], m[pi]);
    for (int i = 0; i < rows; ++i) std::swap(m[i][left], m[i][pj]);
    bool clean = true;
    Int p = numerOf(m[top][left]);
    for (int i = top + 1; i < rows; ++i) {
      Int q = numerOf(m[i][left]) / p;
      if (q != 0)
        for (int j = left; j < cols; ++j) m[i][j] -= Rat(q) * m[top][j];
      if (m[i][left] != 0) clean = false;
    }
    for (int j = left + 1; j < cols; ++j) {
      Int q = numerOf(m[top][j]) / p;
      if (q != 0)
        for (int i = top; i < rows; ++i) m[i][j] -= Rat(q) * m[i][left];
      if (m[top][j] != 0) clean = false;
    }
    if (!clean) continue;  // repeat with a smaller pivot
    divisors.push_back(boost::multiprecision::abs(p));
    ++top;
    ++left;
  }
  // Enforce divisibility chain.
  for (std::size_t i = 0; i + 1 < divisors.size(); ++i)
    for (std::size_t j = i + 1; j < divisors.size(); ++j) {
      Int g = gcdInt(divisors[i], divisors[j]);
      Int l = divisors[i] / g * divisors[j];
      divisors[i] = g;
      divisors[j] = l;
    }
  return divisors;
}

Int latticeIndex(const QMat& rows) {
  Int idx = 1;
  for (const Int& d : smithDiagonal(rows)) idx *= d;
  return idx;
}

QMat saturatedRowLattice(const QMat& rows, int n) {
  // Saturation = (rational row space) cap Z^n; a basis comes from clearing
  // denominators of an rref basis and then saturating via the dual:
  // v in saturation iff v ⟂ nullspace(rows). Use integral kernel of the
  // nullspace matrix.
  QMat ns = nullspaceBasis(rows, n);
  if (ns.empty()) {
    QMat id;
    for (int i = 0; i < n; ++i) {
      QVec e(n, Rat(0));
      e[i] = 1;
      id.push_back(e);
    }
    return id;
  }
  // Integral kernel of ns (as a map Z^n -> Q^k): solve over Q and scale.
  QMat kernel = nullspaceBasis(ns, n);
  for (auto& v : kernel) v = primitive(v);
  // kernel spans the right space; make it a lattice basis via HNF-style
  // reduction: repeatedly reduce with gcd steps on columns.
  // For the small sizes used here, run an integer row-style Hermite form.
  QMat b = kernel;
  int m = static_cast<int>(b.size());
  int row = 0;
  for (int c = 0; c < n && row < m; ++c) {
    // gcd-reduce all rows >= row on column c
    while (true) {
      int nz = -1;
      for (int i = row; i < m; ++i)
        if (b[i][c] != 0 && (nz == -1 || boost::multiprecision::abs(numerOf(b[i][c])) <
                                             boost::multiprecision::abs(numerOf(b[nz][c]))))
          nz = i;
      if (nz == -1) break;
      std::swap(b[row], b[nz]);
      bool done = true;
      for (int i = row + 1; i < m; ++i) {
        if (b[i][c] == 0) continue;
        Int q = numerOf(b[i][c]) / numerOf(b[row][c]);
        for (int j = 0; j < n; ++j) b[i][j] -= Rat(q) * b[row][j];
        if (b[i][c] != 0) done = false;
      }
      if (done) break;
    }
    if (b[row][c] != 0) ++row;
  }
  b.resize(row);
  return b;
}

std::optional<QVec> coordinatesIn(const QMat& basisRows, const QVec& x) {
  // Solve basis^T c = x.
  const int k = static_cast<int>(basisRows.size());
  const int n = static_cast<int>(x.size());
  QMat t(n, QVec(k, Rat(0)));
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < n; ++j) t[j][i] = basisRows[i][j];
  return solveLinear(t, x);
}

}  // namespace tmmp
