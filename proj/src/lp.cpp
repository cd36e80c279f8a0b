#include "tmmp/lp.hpp"

#include <cassert>
#include <stdexcept>

namespace tmmp {

namespace {

// Dense simplex tableau on equalities T z = rhs, z >= 0, with an explicit
// reduced-cost row. Bland's rule in both phases.
struct Tableau {
  QMat t;             // rows x cols, basis columns reduced to unit vectors
  QVec rhs;           // >= 0 invariant
  QVec cost;          // current phase cost per column
  QVec red;           // reduced costs
  Rat obj = 0;        // current objective value (of the phase cost)
  std::vector<int> basis;
  std::vector<bool> banned;

  int rows() const { return static_cast<int>(t.size()); }
  int cols() const { return rows() == 0 ? 0 : static_cast<int>(t[0].size()); }

  void computeReduced() {
    red.assign(cols(), Rat(0));
    obj = 0;
    for (int j = 0; j < cols(); ++j) red[j] = cost[j];
    for (int i = 0; i < rows(); ++i) {
      const Rat& cb = cost[basis[i]];
      if (cb == 0) continue;
      obj += cb * rhs[i];
      for (int j = 0; j < cols(); ++j) red[j] -= cb * t[i][j];
    }
  }

  void pivot(int r, int e) {
    Rat inv = Rat(1) / t[r][e];
    for (int j = 0; j < cols(); ++j) t[r][j] *= inv;
    rhs[r] *= inv;
    for (int i = 0; i < rows(); ++i) {
      if (i == r || t[i][e] == 0) continue;
      Rat f = t[i][e];
      for (int j = 0; j < cols(); ++j) t[i][j] -= f * t[r][j];
      rhs[i] -= f * rhs[r];
    }
    if (red[e] != 0) {
      Rat f = red[e];
      for (int j = 0; j < cols(); ++j) red[j] -= f * t[r][j];
      obj += f * rhs[r];
    }
    basis[r] = e;
  }

  // Returns entering column by Bland, or -1 at optimality, or -2 -> unbounded
  // (sets unboundedCol).
  int unboundedCol = -1;
  int step() {
    int e = -1;
    for (int j = 0; j < cols(); ++j) {
      if (banned[j]) continue;
      if (red[j] < 0) {
        e = j;
        break;
      }
    }
    if (e < 0) return -1;
    int leave = -1;
    Rat best;
    for (int i = 0; i < rows(); ++i) {
      if (t[i][e] <= 0) continue;
      Rat ratio = rhs[i] / t[i][e];
      if (leave < 0 || ratio < best || (ratio == best && basis[i] < basis[leave])) {
        best = ratio;
        leave = i;
      }
    }
    if (leave < 0) {
      unboundedCol = e;
      return -2;
    }
    pivot(leave, e);
    return 1;
  }
};

}  // namespace

LpResult lpSolve(const LpProblem& p) {
  const int n = static_cast<int>(p.c.size());
  std::vector<bool> nn = p.nonneg;
  if (nn.empty()) nn.assign(n, false);

  if (p.Age.empty() && p.Aeq.empty()) {
    for (int j = 0; j < n; ++j) {
      Rat cj = p.maximize ? -p.c[j] : p.c[j];
      if ((cj != 0 && !nn[j]) || cj < 0) {
        QVec ray(n, Rat(0));
        ray[j] = cj < 0 ? Rat(1) : Rat(-1);
        return LpUnbounded{ray};
      }
    }
    return LpOptimal{Rat(0), QVec(n, Rat(0)), {}, {}};
  }

  // Column layout: for each variable one column (nonneg) or a +/- pair.
  std::vector<int> colOfVar(n), negColOfVar(n, -1);
  int ncols = 0;
  for (int j = 0; j < n; ++j) {
    colOfVar[j] = ncols++;
    if (!nn[j]) negColOfVar[j] = ncols++;
  }
  const int m = static_cast<int>(p.Age.size()) + static_cast<int>(p.Aeq.size());
  const int surplusBase = ncols;
  ncols += static_cast<int>(p.Age.size());
  const int artBase = ncols;
  ncols += m;

  Tableau tb;
  tb.t.assign(m, QVec(ncols, Rat(0)));
  tb.rhs.assign(m, Rat(0));
  tb.basis.assign(m, -1);
  tb.banned.assign(ncols, false);
  std::vector<Rat> rowSign(m, Rat(1));

  auto fillRow = [&](int r, const QVec& arow, const Rat& b, int surplusCol) {
    for (int j = 0; j < n; ++j) {
      tb.t[r][colOfVar[j]] = arow[j];
      if (negColOfVar[j] >= 0) tb.t[r][negColOfVar[j]] = -arow[j];
    }
    if (surplusCol >= 0) tb.t[r][surplusCol] = -1;
    tb.rhs[r] = b;
    if (b < 0) {
      rowSign[r] = -1;
      for (auto& x : tb.t[r]) x = -x;
      tb.rhs[r] = -b;
    }
    tb.t[r][artBase + r] = 1;
    tb.basis[r] = artBase + r;
  };

  int r = 0;
  for (std::size_t i = 0; i < p.Age.size(); ++i, ++r)
    fillRow(r, p.Age[i], p.bge[i], surplusBase + static_cast<int>(i));
  for (std::size_t i = 0; i < p.Aeq.size(); ++i, ++r) fillRow(r, p.Aeq[i], p.beq[i], -1);

  // Phase 1: minimize sum of artificials.
  tb.cost.assign(ncols, Rat(0));
  for (int j = artBase; j < ncols; ++j) tb.cost[j] = 1;
  tb.computeReduced();
  while (true) {
    int s = tb.step();
    if (s == -1) break;
    if (s == -2) throw std::logic_error("phase-1 LP unbounded");
  }
  if (tb.obj != 0) return LpInfeasible{};
  // Ban artificials; drive basic ones out where possible.
  for (int j = artBase; j < ncols; ++j) tb.banned[j] = true;
  for (int i = 0; i < m; ++i) {
    if (tb.basis[i] < artBase) continue;
    int e = -1;
    for (int j = 0; j < artBase; ++j)
      if (tb.t[i][j] != 0) {
        e = j;
        break;
      }
    if (e >= 0) tb.pivot(i, e);
    // else: redundant row, artificial stays basic at value 0
  }

  // Phase 2.
  tb.cost.assign(ncols, Rat(0));
  for (int j = 0; j < n; ++j) {
    Rat cj = p.maximize ? -p.c[j] : p.c[j];
    tb.cost[colOfVar[j]] = cj;
    if (negColOfVar[j] >= 0) tb.cost[negColOfVar[j]] = -cj;
  }
  tb.computeReduced();
  while (true) {
    int s = tb.step();
    if (s == -1) break;
    if (s == -2) {
      // Improving ray from the entering column.
      QVec dir(ncols, Rat(0));
      dir[tb.unboundedCol] = 1;
      for (int i = 0; i < m; ++i) dir[tb.basis[i]] = -tb.t[i][tb.unboundedCol];
      QVec ray(n, Rat(0));
      for (int j = 0; j < n; ++j) {
        ray[j] = dir[colOfVar[j]];
        if (negColOfVar[j] >= 0) ray[j] -= dir[negColOfVar[j]];
      }
      return LpUnbounded{ray};
    }
  }

  QVec z(ncols, Rat(0));
  for (int i = 0; i < m; ++i) z[tb.basis[i]] = tb.rhs[i];
  QVec x(n, Rat(0));
  for (int j = 0; j < n; ++j) {
    x[j] = z[colOfVar[j]];
    if (negColOfVar[j] >= 0) x[j] -= z[negColOfVar[j]];
  }
  Rat value = tb.obj;
  if (p.maximize) value = -value;

  // Duals read from the artificial columns' reduced costs: for row r the
  // artificial column equals rowSign[r]*e_r, so red = -rowSign[r]*y_r.
  QVec dualGe(p.Age.size(), Rat(0)), dualEq(p.Aeq.size(), Rat(0));
  for (int i = 0; i < m; ++i) {
    Rat y = -tb.red[artBase + i] * rowSign[i];
    if (p.maximize) y = -y;
    if (i < static_cast<int>(p.Age.size()))
      dualGe[i] = y;
    else
      dualEq[i - static_cast<int>(p.Age.size())] = y;
  }
  return LpOptimal{value, x, dualGe, dualEq};
}

LpResult lpOptimize(const QVec& objective, const QMat& A, const QVec& b, bool maximize) {
  LpProblem p;
  p.Age = A;
  p.bge = b;
  p.c = objective;
  p.maximize = maximize;
  return lpSolve(p);
}

}  // namespace tmmp
