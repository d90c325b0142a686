#pragma once

// Dense Gaussian elimination over the coefficient field.

#include <optional>
#include <vector>

#include "ncdiff/coeff.hpp"

namespace ncdiff {

using Row = std::vector<RationalFunction>;
using Matrix = std::vector<Row>;

// One solution of A x = b (free unknowns set to zero), or nullopt when the
// system is inconsistent.
std::optional<std::vector<RationalFunction>> solve_linear(const Matrix& a, const Row& b);

std::optional<Matrix> invert(const Matrix& m);

Matrix identity_matrix(std::size_t n);

// Reduced row echelon form; pivots are chosen at the highest column index
// still available, so each row reads "largest column = combination of
// smaller ones". Zero rows are dropped.
Matrix echelon_from_top(Matrix rows);

}  // namespace ncdiff
