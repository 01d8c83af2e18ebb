#ifndef LCM_LINALG_HPP
#define LCM_LINALG_HPP

#include <vector>

#include "lcm/rational.hpp"

namespace lcm {

using QMat = std::vector<std::vector<Rational>>;

/* Exact determinant of a square rational matrix. Rows are scaled to a common
 * integer denominator and the integer matrix is reduced by Bareiss
 * fraction-free elimination, whose interior divisions are exact; this keeps
 * intermediate entries polynomially bounded instead of letting naive rational
 * elimination blow up. Pivoting picks the first nonzero entry (determinism
 * over conditioning: arithmetic is exact). */
Rational det_exact(const QMat& a);

// Exact rank via rational Gauss elimination (row echelon, first-nonzero
// pivoting).
int rank_exact(QMat a);

}  // namespace lcm

#endif
