#include "lcm/linalg.hpp"

#include "lcm/errors.hpp"

namespace lcm {

Rational det_exact(const QMat& a) {
  std::size_t n = a.size();
  for (const auto& row : a)
    if (row.size() != n) throw InputError("det_exact: matrix must be square");
  if (n == 0) return 1;

  // Scale each row to integers; det scales by the product of the factors.
  std::vector<std::vector<BigInt>> m(n, std::vector<BigInt>(n));
  Rational scale = 1;
  for (std::size_t i = 0; i < n; ++i) {
    BigInt lcm_den = 1;
    for (const auto& q : a[i]) {
      BigInt d = denominator(q);
      lcm_den = lcm_den / gcd(lcm_den, d) * d;
    }
    scale *= lcm_den;
    for (std::size_t j = 0; j < n; ++j) {
      const Rational& q = a[i][j];
      m[i][j] = numerator(q) * (lcm_den / denominator(q));
    }
  }

  int sign = 1;
  BigInt prev = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    std::size_t pivot = k;
    while (pivot < n && m[pivot][k] == 0) ++pivot;
    if (pivot == n) return 0;
    if (pivot != k) {
      std::swap(m[pivot], m[k]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) {
        // Bareiss step: division by the previous pivot is exact.
        m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
      }
      m[i][k] = 0;
    }
    prev = m[k][k];
  }
  return Rational(sign * m[n - 1][n - 1]) / scale;
}

int rank_exact(QMat a) {
  std::size_t rows = a.size();
  if (rows == 0) return 0;
  std::size_t cols = a[0].size();
  for (const auto& row : a)
    if (row.size() != cols) throw InputError("rank_exact: ragged matrix");

  int rank = 0;
  std::size_t row = 0;
  for (std::size_t col = 0; col < cols && row < rows; ++col) {
    std::size_t pivot = row;
    while (pivot < rows && a[pivot][col] == 0) ++pivot;
    if (pivot == rows) continue;
    std::swap(a[pivot], a[row]);
    for (std::size_t i = row + 1; i < rows; ++i) {
      if (a[i][col] == 0) continue;
      Rational factor = a[i][col] / a[row][col];
      for (std::size_t j = col; j < cols; ++j) a[i][j] -= factor * a[row][j];
    }
    ++row;
    ++rank;
  }
  return rank;
}

}  // namespace lcm
