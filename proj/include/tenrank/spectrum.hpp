#pragma once

#include <functional>
#include <optional>
#include <utility>

#include "tenrank/core.hpp"

namespace tenrank {

/// Univariate polynomial, coefficients ascending by degree.
struct PolynomialF {
  std::vector<Cx> coeffs;
  Field field = Field::Complex;

  int degree(double trim_rel = 1e-12) const;  // numerically trimmed
  Cx eval(Cx t) const;
  PolynomialF derivative() const;
};

/// Spectrum of a pencil X^{-1}Y with the two quantities the constructions
/// branch on: the smallest pairwise eigenvalue distance and the largest
/// imaginary part.
struct PencilSpectrum {
  Vec eigenvalues;
  double margin = 0.0;    // +inf for fewer than two eigenvalues
  double max_imag = 0.0;

  bool distinct_in(Field f, const Tolerances& tol) const {
    if (!(margin > tol.margin_tol)) return false;
    return f == Field::Complex || max_imag < tol.margin_tol;
  }
};

/// Eigenvalues and eigenvectors of s. Under Field::Real the spectrum must be
/// real (within margin_tol); eigenvalues and eigenvectors are returned exactly
/// real. Throws PreconditionError when realification is impossible.
std::pair<Vec, Mat> eigen_decomposition(const Mat& s, Field field, const Tolerances& tol = {});

/// Spectrum of X^{-1}Y. Pre: X square nonsingular.
PencilSpectrum pencil_spectrum(const Mat& x, const Mat& y, const Tolerances& tol = {});

/// t -> det(m0 + t*m1), recovered exactly (degree <= n) by interpolation at
/// Chebyshev nodes and a Vandermonde solve. Pre: n <= 32.
PolynomialF det_polynomial_on_line(const Mat& m0, const Mat& m1, Field field);

/// Black-box evaluator c -> det(sum_i c_i * slice_i).
std::function<Cx(const Vec&)> det_span_evaluator(const Tensor3& t);

/// All roots via the companion matrix of the trimmed polynomial.
std::vector<Cx> polynomial_roots(const PolynomialF& p);

/// Up to max_results unit-norm coefficient vectors c, deterministic order,
/// each with sum c_i A_i nonzero and numerically singular
/// (sigma_min < rank_tol * sigma_max). Search: slices, pairwise lines with
/// root candidates from the determinant polynomial and its derivative
/// (Newton-polished), then seeded random 2-dim sections up to budget.
/// Under Field::Real only real combinations are admitted.
std::vector<Vec> singular_combinations(const Tensor3& t, const Tolerances& tol, int budget,
                                       std::uint64_t seed, int max_results);

/// First hit of singular_combinations; absent is a value, not an error.
std::optional<Vec> find_singular_combination(const Tensor3& t, const Tolerances& tol = {},
                                             int budget = 64, std::uint64_t seed = 0);

}  // namespace tenrank
