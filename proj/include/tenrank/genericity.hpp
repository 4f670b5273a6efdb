#pragma once

#include <utility>

#include "tenrank/core.hpp"

namespace tenrank {

/// What a randomized change of basis P must make generic, verified post hoc:
///  - P nonsingular (always),
///  - every entry of P*v nonzero for v in nonzero_vectors,
///  - every entry of u^T * P^{-1} nonzero for u in nonzero_covectors,
///  - every 2x2 minor of P*[x y] nonzero for (x, y) in independent_pairs.
/// "Nonzero" is thresholded with support_tol relative to each object's scale.
struct GenericityRequest {
  std::vector<Vec> nonzero_vectors;
  std::vector<Vec> nonzero_covectors;
  std::vector<std::pair<Vec, Vec>> independent_pairs;
};

/// Seeded sampling with entries uniform on [-1,1] (complex parts independent
/// under Field::Complex) until the request verifies; GenericityExhausted after
/// max_attempts.
Mat randomize_nonvanishing(int n, const GenericityRequest& req, Field field,
                           const Tolerances& tol, std::uint64_t seed, int max_attempts = 64);

/// Smallest t from 1, -1, 2, -2, ... with supp(a + t*b) containing
/// supp(a) and supp(b) as thresholded patterns. Returns (t, a + t*b).
std::pair<double, Mat> generic_support_merge(const Mat& a, const Mat& b,
                                             const Tolerances& tol = {});

/// First column j of m expressible as a combination of the later columns,
/// with the unipotent V (lower triangular, det exactly 1) zeroing it:
/// column j of m*V is numerically zero and every other column is untouched.
std::pair<Mat, int> unipotent_column_eliminator(const Mat& m, const Tolerances& tol = {});

}  // namespace tenrank
