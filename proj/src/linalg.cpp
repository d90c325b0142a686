#include "ncdiff/linalg.hpp"

#include <algorithm>
#include <utility>

namespace ncdiff {

namespace {

// Eliminates in place on the augmented matrix; returns pivot columns per row.
std::vector<std::size_t> row_reduce(Matrix& m, std::size_t columns) {
  std::vector<std::size_t> pivots;
  std::size_t row = 0;
  for (std::size_t col = 0; col < columns && row < m.size(); ++col) {
    std::size_t pick = row;
    while (pick < m.size() && m[pick][col].is_zero()) ++pick;
    if (pick == m.size()) continue;
    std::swap(m[row], m[pick]);
    RationalFunction inv = m[row][col].inverse();
    for (auto& x : m[row]) x *= inv;
    for (std::size_t r = 0; r < m.size(); ++r) {
      if (r == row || m[r][col].is_zero()) continue;
      RationalFunction f = m[r][col];
      for (std::size_t c = 0; c < m[r].size(); ++c) {
        if (!m[row][c].is_zero()) m[r][c] -= f * m[row][c];
      }
    }
    pivots.push_back(col);
    ++row;
  }
  return pivots;
}

}  // namespace

std::optional<std::vector<RationalFunction>> solve_linear(const Matrix& a, const Row& b) {
  std::size_t n = a.empty() ? 0 : a.front().size();
  Matrix m;
  m.reserve(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    Row r = a[i];
    r.push_back(b[i]);
    m.push_back(std::move(r));
  }
  auto pivots = row_reduce(m, n);
  for (std::size_t r = pivots.size(); r < m.size(); ++r) {
    if (!m[r][n].is_zero()) return std::nullopt;
  }
  std::vector<RationalFunction> x(n);
  for (std::size_t r = 0; r < pivots.size(); ++r) x[pivots[r]] = m[r][n];
  return x;
}

Matrix identity_matrix(std::size_t n) {
  Matrix m(n, Row(n));
  for (std::size_t i = 0; i < n; ++i) m[i][i] = RationalFunction(1);
  return m;
}

std::optional<Matrix> invert(const Matrix& m) {
  std::size_t n = m.size();
  Matrix aug;
  for (std::size_t i = 0; i < n; ++i) {
    Row r = m[i];
    for (std::size_t j = 0; j < n; ++j) r.push_back(i == j ? RationalFunction(1) : RationalFunction());
    aug.push_back(std::move(r));
  }
  auto pivots = row_reduce(aug, n);
  if (pivots.size() != n) return std::nullopt;
  Matrix inv(n);
  for (std::size_t i = 0; i < n; ++i) inv[i] = Row(aug[i].begin() + static_cast<long>(n), aug[i].end());
  return inv;
}

Matrix echelon_from_top(Matrix rows) {
  if (rows.empty()) return rows;
  std::size_t n = rows.front().size();
  // Reverse the columns so the generic low-index pivoting picks the largest.
  for (auto& r : rows) std::reverse(r.begin(), r.end());
  auto pivots = row_reduce(rows, n);
  rows.resize(pivots.size());
  for (auto& r : rows) std::reverse(r.begin(), r.end());
  return rows;
}

}  // namespace ncdiff
