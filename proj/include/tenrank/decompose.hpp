#pragma once

#include <optional>
#include <string>

#include "tenrank/core.hpp"

namespace tenrank {

/// One term a (x) b (x) c: contributes c_k * a * b^T to slice k.
struct RankOneTerm {
  Vec a, b, c;
};

/// Rank-one expansion of a tensor plus the certified length claim. The claim
/// comes from the construction, never from counting: |terms| <= claimed_bound
/// and a relative residual <= residual_tol are both checked before release.
struct Decomposition {
  int m = 0, n = 0, p = 0;
  Field field = Field::Real;
  std::vector<RankOneTerm> terms;
  int claimed_bound = 0;
  std::vector<std::string> method;  // construction chain, outermost first
  std::uint64_t seed = 0;
  Tolerances tol;
};

/// Fiber-basis expansion along the cheapest mode pair: min(mn, mp, np) terms,
/// exact for any tensor.
Decomposition decompose_trivial(const Tensor3& t, const Tolerances& tol = {});

/// All slices diagonal (possibly rectangular): one term per nonzero fiber.
Decomposition decompose_diagonal_tensor(const Tensor3& t, const Tolerances& tol = {});

/// Two-slice tensor ([X U]; [Y V]) with X (n x n) nonsingular and X^{-1}Y
/// distinct in the field: n head terms from the diagonalization plus one term
/// per tail column, at most n + s = m terms total.
Decomposition decompose_pencil_tail(const Mat& x, const Mat& u, const Mat& y, const Mat& v,
                                    Field field, const Tolerances& tol = {});

/// Two-slice tensor (A1; A2) m x n, m < n, with anchored columns j_t >= m:
/// (A_i)_{<m} p_t equals column j_t of A_i. A unipotent column operation
/// removes the anchored columns, the rest goes through the pencil-tail split:
/// at most n - s terms. Anchors are pairs (column index, p_t).
Decomposition eliminate_anchored_columns(const Mat& a1, const Mat& a2,
                                         const std::vector<std::pair<int, Vec>>& anchors,
                                         Field field, const Tolerances& tol = {});

/// m x n x 3 (m <= n) with third slice diagonal with exactly zero (m,m) cell
/// and head pair admitting a corner-preserving perturbation (corner support
/// or the cross-ratio condition): at most m + n - 1 terms.
Decomposition decompose_zero_corner(const Tensor3& t, const Tolerances& tol = {},
                                    std::uint64_t seed = 0);

/// Conjugation P (acting on the leading block) after which the head pair
/// satisfies the cross-ratio condition. Pre: heads n x n, n >= 3, cell (n,n)
/// outside both supports, last row and column of A nonzero somewhere, and no
/// t with t*A + B having both last row and last column zero.
Mat conjugate_to_cross_ratio(const Mat& a, const Mat& b, Field field, const Tolerances& tol = {},
                             std::uint64_t seed = 0);

/// Square n x n x 3 whose slice span contains a nonzero singular matrix:
/// at most 2n - 1 terms. Throws NoSingularMember when the search comes up
/// empty (caller falls back). singular_hint short-circuits the search.
Decomposition decompose_square_3(const Tensor3& t, const Tolerances& tol = {},
                                 std::uint64_t seed = 0,
                                 const std::optional<Vec>& singular_hint = std::nullopt);

/// m x n x 3 with m != n (oriented m < n internally): at most m + n - 1 terms.
Decomposition decompose_nonsquare_3(const Tensor3& t, const Tolerances& tol = {},
                                    std::uint64_t seed = 0);

/// Any n x m x p (oriented n <= m): slices are paired, each pair perturbed to
/// a qualifying pencil and split, the diagonal residue handled at the end.
/// Bounds: p odd n + m(p-1)/2; p even 2n + m(p-2)/2; p even and m = n
/// n(p+2)/2 - 1 via a singular leftover slice.
Decomposition decompose_general_p(const Tensor3& t, const Tolerances& tol = {},
                                  std::uint64_t seed = 0);

/// Dispatcher: drops exactly-zero slices, orients the tensor, runs every
/// applicable route (trivial, square / non-square three-slice, general
/// pairing) and returns the shortest certified decomposition, with terms
/// mapped back to the original orientation.
Decomposition decompose(const Tensor3& t, const Tolerances& tol = {}, std::uint64_t seed = 0,
                        const std::string& method = "auto");

}  // namespace tenrank
