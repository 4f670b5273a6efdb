#pragma once

#include <optional>

#include "tenrank/core.hpp"
#include "tenrank/spectrum.hpp"

namespace tenrank {

/// Halving search over the perturbation scale: tries eps = 1, 1/2, 1/4, ...
/// down to eps_floor and returns the first (largest) accepted candidate.
/// The candidate generator returns nullopt to reject an eps.
template <typename TryFn>
auto epsilon_search(TryFn&& candidate, const Tolerances& tol)
    -> typename std::invoke_result_t<TryFn, double>::value_type {
  for (double eps = 1.0; eps >= tol.eps_floor; eps *= 0.5)
    if (auto r = candidate(eps)) return *r;
  throw EpsilonExhausted("epsilon_search: no scale above eps_floor accepted");
}

/// Diagonal perturbation (X, Y) making the pencil (A+X, B+Y) nonsingular in
/// its first member with spectrum distinct in the field. Entries at preserved
/// indices are exactly zero; the restricted pencil on the preserved block
/// supplies those eigenvalues and must itself be nonsingular and distinct.
struct DiagonalPerturbation {
  Vec x, y;  // diagonal entries of X and Y
  double epsilon = 0.0;
  PencilSpectrum spectrum;  // of (A+X)^{-1}(B+Y)
};

/// attempt > 0 shifts the fresh target eigenvalues so callers can retry after
/// a downstream failure without changing anything else.
DiagonalPerturbation perturb_to_distinct(const Mat& a, const Mat& b,
                                         const std::vector<int>& preserved, Field field,
                                         const Tolerances& tol = {}, int attempt = 0);

/// The cross-ratio condition on a head pair: cells (n-1,n) and (n,n-1) in the
/// support of A, cell (n,n) outside supp(A) and supp(B), and
/// b_{n-1,n}/a_{n-1,n} != b_{n,n-1}/a_{n,n-1} (1-based corners). This is what
/// perturb_to_distinct with preserved = {n-2, n-1} (0-based) needs.
bool cross_ratio_applicable(const Mat& a, const Mat& b, const Tolerances& tol = {});

/// Diagonal perturbation with an exact anchor: (A+X) p = a and (B+Y) p = b
/// hold by construction (p = eps * ones), with the pencil (A+X, B+Y)
/// nonsingular and distinct in the field. Pre: all entries of a nonzero;
/// distinct ratios b_i/a_i drive the limiting spectrum.
struct AnchoredPerturbation {
  Vec x, y;  // diagonal entries
  Vec p;
  double epsilon = 0.0;
  PencilSpectrum spectrum;
};

AnchoredPerturbation perturb_with_anchor(const Mat& a, const Mat& b, const Vec& anchor_a,
                                         const Vec& anchor_b, Field field,
                                         const Tolerances& tol = {}, int attempt = 0);

}  // namespace tenrank
