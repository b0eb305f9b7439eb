#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

namespace dtrack {

/// Dense row-major cost matrix.
class CostMatrix {
 public:
  CostMatrix() = default;
  CostMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return rows_ == 0 || cols_ == 0; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

struct MatchSet {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;  // (row, col), sorted by row
  std::vector<std::size_t> unmatched_rows;
  std::vector<std::size_t> unmatched_cols;
  double total_cost = 0.0;
};

/// Minimum-cost assignment on a rectangular matrix (shortest augmenting path,
/// O(n^2 m)). Matches min(rows, cols) pairs.
inline MatchSet hungarian(const CostMatrix& cost) {
  MatchSet out;
  const std::size_t n_rows = cost.rows();
  const std::size_t n_cols = cost.cols();
  if (cost.empty()) {
    for (std::size_t r = 0; r < n_rows; ++r) out.unmatched_rows.push_back(r);
    for (std::size_t c = 0; c < n_cols; ++c) out.unmatched_cols.push_back(c);
    return out;
  }
  for (std::size_t r = 0; r < n_rows; ++r) {
    for (std::size_t c = 0; c < n_cols; ++c) {
      if (!std::isfinite(cost(r, c))) throw std::invalid_argument("hungarian: non-finite cost");
    }
  }

  // Work on the orientation with n <= m.
  const bool transposed = n_rows > n_cols;
  const std::size_t n = transposed ? n_cols : n_rows;
  const std::size_t m = transposed ? n_rows : n_cols;
  auto at = [&](std::size_t i, std::size_t j) { return transposed ? cost(j, i) : cost(i, j); };

  constexpr double kInf = std::numeric_limits<double>::infinity();
  // 1-based potentials; column 0 is the virtual source.
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
  std::vector<std::size_t> owner(m + 1, 0), way(m + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    owner[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(m + 1, kInf);
    std::vector<char> used(m + 1, 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = owner[j0];
      double delta = kInf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = at(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= m; ++j) {
        if (used[j]) {
          u[owner[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (owner[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      owner[j0] = owner[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<long> row_match(n_rows, -1), col_match(n_cols, -1);
  for (std::size_t j = 1; j <= m; ++j) {
    if (owner[j] == 0) continue;
    const std::size_t i = owner[j] - 1;
    const std::size_t r = transposed ? j - 1 : i;
    const std::size_t c = transposed ? i : j - 1;
    row_match[r] = static_cast<long>(c);
    col_match[c] = static_cast<long>(r);
  }
  for (std::size_t r = 0; r < n_rows; ++r) {
    if (row_match[r] < 0) {
      out.unmatched_rows.push_back(r);
    } else {
      const auto c = static_cast<std::size_t>(row_match[r]);
      out.pairs.emplace_back(r, c);
      out.total_cost += cost(r, c);
    }
  }
  for (std::size_t c = 0; c < n_cols; ++c) {
    if (col_match[c] < 0) out.unmatched_cols.push_back(c);
  }
  return out;
}

/// Optimal assignment where leaving a row or column unmatched costs
/// limit / 2, so a pair is only matched when its cost is below `limit`.
/// Entries above the limit are never matched.
inline MatchSet assign_with_limit(const CostMatrix& cost, double limit) {
  const std::size_t n = cost.rows();
  const std::size_t m = cost.cols();
  MatchSet out;
  if (n == 0 || m == 0) {
    for (std::size_t r = 0; r < n; ++r) out.unmatched_rows.push_back(r);
    for (std::size_t c = 0; c < m; ++c) out.unmatched_cols.push_back(c);
    return out;
  }
  const double big = 1e6 * (1.0 + std::abs(limit));
  CostMatrix ext(n + m, m + n, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < m; ++c) ext(r, c) = cost(r, c) <= limit ? cost(r, c) : big;
    for (std::size_t k = 0; k < n; ++k) ext(r, m + k) = k == r ? 0.5 * limit : big;
  }
  for (std::size_t k = 0; k < m; ++k) {
    for (std::size_t c = 0; c < m; ++c) ext(n + k, c) = c == k ? 0.5 * limit : big;
  }
  const MatchSet full = hungarian(ext);
  std::vector<char> row_used(n, 0), col_used(m, 0);
  for (const auto& [r, c] : full.pairs) {
    if (r < n && c < m && cost(r, c) <= limit) {
      out.pairs.emplace_back(r, c);
      out.total_cost += cost(r, c);
      row_used[r] = 1;
      col_used[c] = 1;
    }
  }
  for (std::size_t r = 0; r < n; ++r) {
    if (!row_used[r]) out.unmatched_rows.push_back(r);
  }
  for (std::size_t c = 0; c < m; ++c) {
    if (!col_used[c]) out.unmatched_cols.push_back(c);
  }
  return out;
}

}  // namespace dtrack
