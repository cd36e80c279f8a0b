// Exact rational linear algebra: elimination, solving, lattice utilities.
#pragma once

#include <optional>
#include <vector>

#include "tmmp/qvec.hpp"

namespace tmmp {

// Reduced row echelon form in place; returns pivot column indices.
std::vector<int> rref(QMat& m);

int rankOf(QMat m);

// One solution of M x = rhs, if any.
std::optional<QVec> solveLinear(const QMat& m, const QVec& rhs);

// Basis of the right null space of M (n = column count).
QMat nullspaceBasis(const QMat& m, int n);

Rat detOf(QMat m);

// Smith normal form diagonal of an integer matrix (entries as Rat integers);
// returns the nonzero elementary divisors d_1 | d_2 | ... .
std::vector<Int> smithDiagonal(QMat m);

// Index of the sublattice spanned by the rows inside its saturation
// (product of elementary divisors). Rows must be integral.
Int latticeIndex(const QMat& rows);

// Basis (rows) of the saturation of the integer row lattice of M:
// {v integral : kv in rowlattice for some k > 0}.
QMat saturatedRowLattice(const QMat& rows, int n);

// Expresses x in the given row basis if possible.
std::optional<QVec> coordinatesIn(const QMat& basisRows, const QVec& x);

}  // namespace tmmp
