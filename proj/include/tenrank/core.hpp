#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace tenrank {

using Cx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

/// Scalar field a tensor lives over. Storage is always complex; Real-tagged
/// data keeps every imaginary part exactly zero and all constructions stay
/// inside the reals.
enum class Field { Real, Complex };

inline const char* field_name(Field f) { return f == Field::Real ? "real" : "complex"; }

struct Tolerances {
  double rank_tol = 1e-9;      // singular value cutoff, relative to the largest
  double support_tol = 1e-10;  // entry threshold, relative to the max abs entry
  double residual_tol = 1e-8;  // relative reconstruction residual for certification
  double margin_tol = 1e-6;    // eigenvalue separation / realness margin
  double eps_floor = 1e-8;     // smallest perturbation scale tried
};

struct EpsilonExhausted : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct GenericityExhausted : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NoSingularMember : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct PreconditionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Order-3 tensor held as p frontal m x n slices.
struct Tensor3 {
  Field field = Field::Real;
  std::vector<Mat> slices;

  Tensor3() = default;
  Tensor3(Field f, std::vector<Mat> s) : field(f), slices(std::move(s)) { check(); }

  int rows() const { return slices.empty() ? 0 : int(slices[0].rows()); }
  int cols() const { return slices.empty() ? 0 : int(slices[0].cols()); }
  int depth() const { return int(slices.size()); }

  const Mat& slice(int k) const { return slices[size_t(k)]; }
  Mat& slice(int k) { return slices[size_t(k)]; }
  Cx at(int i, int j, int k) const { return slices[size_t(k)](i, j); }

  double max_abs() const;
  double frobenius_norm() const;
  bool is_zero() const;  // exact, not thresholded

  /// Dims consistent and >= 1, entries finite, Real tag => imag parts exactly 0.
  void check() const;
};

/// Invertible slicewise change of basis: slice k of the result is
/// left * slice_k * right. Inverses are carried along so pullbacks stay exact.
struct EquivalenceTransform {
  Mat left, right, left_inv, right_inv;
  static EquivalenceTransform identity(int m, int n);
};

/// Thresholded nonzero pattern of a matrix: cells with
/// |a_ij| > support_tol * max_abs. The absolute threshold used is recorded.
struct SupportPattern {
  int rows = 0, cols = 0;
  double threshold = 0.0;
  std::vector<std::pair<int, int>> cells;  // lexicographically sorted

  bool contains(int i, int j) const;
  bool subset_of(const SupportPattern& other) const;
};

double max_abs(const Mat& a);
bool is_real_exact(const Mat& a);

/// Zero out imaginary dust on data that is mathematically real. Throws if any
/// imaginary part exceeds tol_abs (the data was not actually real).
Mat snap_real(Mat a, double tol_abs);

/// Rank by singular values: count of sigma_i > rank_tol * sigma_max.
int numerical_rank(const Mat& a, const Tolerances& tol = {});

SupportPattern support(const Mat& a, const Tolerances& tol = {});

Tensor3 apply_equivalence(const Tensor3& t, const EquivalenceTransform& eq);

/// Swap the first two modes; complex entries are NOT conjugated.
Tensor3 transpose_tensor(const Tensor3& t);

/// Result mode i draws from input mode perm[i]; perm is a permutation of {0,1,2}.
Tensor3 permute_modes(const Tensor3& t, const std::array<int, 3>& perm);

/// Mode-k unfolding (k in {0,1,2}); only the rank matters to callers, so the
/// column order is simply slice-major.
Mat unfolding(const Tensor3& t, int mode);

/// Max over the three unfolding ranks. Never exceeds the tensor rank.
int flattening_rank_lower_bound(const Tensor3& t, const Tolerances& tol = {});

/// Full SVD with U and V phase-aligned (joint column phases cancel in
/// U S V^H) and snapped exactly real under Field::Real.
struct SvdResult {
  Mat u;
  Eigen::VectorXd sigma;
  Mat v;
};
SvdResult svd_full(const Mat& a, Field field);

struct NormalFormResult {
  Tensor3 tensor;                 // transformed; slice k snapped to Diag(E_r, O)
  EquivalenceTransform transform; // tensor = left * T * right
  int rank = 0;
};

/// Equivalence bringing slice k to the exact pseudo-identity Diag(E_r, O).
NormalFormResult normal_form_slice(const Tensor3& t, int k, const Tolerances& tol = {});

/// Entries i.i.d. uniform on [-1,1] (real and imaginary parts independently
/// for Field::Complex). Deterministic in (dims, field, seed).
Tensor3 random_tensor(int m, int n, int p, Field field, std::uint64_t seed);

/// Deterministic stream split so sub-steps draw independent seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt);

}  // namespace tenrank
