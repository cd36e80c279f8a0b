// Exact rational linear programming via primal simplex with Bland's rule.
#pragma once

#include <variant>
#include <vector>

#include "tmmp/qvec.hpp"

namespace tmmp {

struct LpProblem {
  QMat Age;  // Age x >= bge
  QVec bge;
  QMat Aeq;  // Aeq x = beq
  QVec beq;
  QVec c;
  bool maximize = false;
  // Per-variable x_i >= 0 flag; empty means all variables free.
  std::vector<bool> nonneg;
};

struct LpOptimal {
  Rat value;
  QVec witness;
  QVec dualGe;  // multipliers of the inequality rows, >= 0
  QVec dualEq;  // multipliers of the equality rows
};
struct LpInfeasible {};
struct LpUnbounded {
  QVec ray;  // feasible improving direction
};

using LpResult = std::variant<LpOptimal, LpInfeasible, LpUnbounded>;

LpResult lpSolve(const LpProblem& p);

// Convenience: optimize c over {x : A x >= b}, free variables.
LpResult lpOptimize(const QVec& objective, const QMat& A, const QVec& b, bool maximize);

inline bool lpIsOptimal(const LpResult& r) { return std::holds_alternative<LpOptimal>(r); }
inline bool lpIsInfeasible(const LpResult& r) { return std::holds_alternative<LpInfeasible>(r); }
inline bool lpIsUnbounded(const LpResult& r) { return std::holds_alternative<LpUnbounded>(r); }
inline const LpOptimal& lpOpt(const LpResult& r) { return std::get<LpOptimal>(r); }

}  // namespace tmmp
