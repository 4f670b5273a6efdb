#include "tenrank/core.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/SVD>

namespace tenrank {

double max_abs(const Mat& a) {
  if (a.size() == 0) return 0.0;
  return a.cwiseAbs().maxCoeff();
}

bool is_real_exact(const Mat& a) {
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      if (a(i, j).imag() != 0.0) return false;
  return true;
}

Mat snap_real(Mat a, double tol_abs) {
  double worst = 0.0;
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      worst = std::max(worst, std::abs(a(i, j).imag()));
  if (worst > tol_abs)
    throw PreconditionError("snap_real: imaginary part " + std::to_string(worst) +
                            " exceeds tolerance");
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      a(i, j) = Cx(a(i, j).real(), 0.0);
  return a;
}

double Tensor3::max_abs() const {
  double m = 0.0;
  for (const Mat& s : slices) m = std::max(m, tenrank::max_abs(s));
  return m;
}

double Tensor3::frobenius_norm() const {
  double s = 0.0;
  for (const Mat& sl : slices) s += sl.squaredNorm();
  return std::sqrt(s);
}

bool Tensor3::is_zero() const {
  for (const Mat& s : slices)
    if (s.cwiseAbs().maxCoeff() != 0.0) return false;
  return true;
}

void Tensor3::check() const {
  if (slices.empty()) throw PreconditionError("Tensor3: no slices");
  const Eigen::Index m = slices[0].rows(), n = slices[0].cols();
  if (m < 1 || n < 1) throw PreconditionError("Tensor3: empty slice");
  for (const Mat& s : slices) {
    if (s.rows() != m || s.cols() != n)
      throw PreconditionError("Tensor3: inconsistent slice dimensions");
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index i = 0; i < m; ++i) {
        const Cx v = s(i, j);
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
          throw PreconditionError("Tensor3: non-finite entry");
        if (field == Field::Real && v.imag() != 0.0)
          throw PreconditionError("Tensor3: Real-tagged tensor with nonzero imaginary part");
      }
  }
}

EquivalenceTransform EquivalenceTransform::identity(int m, int n) {
  EquivalenceTransform eq;
  eq.left = Mat::Identity(m, m);
  eq.left_inv = eq.left;
  eq.right = Mat::Identity(n, n);
  eq.right_inv = eq.right;
  return eq;
}

bool SupportPattern::contains(int i, int j) const {
  return std::binary_search(cells.begin(), cells.end(), std::make_pair(i, j));
}

bool SupportPattern::subset_of(const SupportPattern& other) const {
  return std::includes(other.cells.begin(), other.cells.end(), cells.begin(), cells.end());
}

int numerical_rank(const Mat& a, const Tolerances& tol) {
  if (a.size() == 0) return 0;
  Eigen::JacobiSVD<Mat> svd(a);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) <= 0.0) return 0;
  const double cut = tol.rank_tol * sv(0);
  int r = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > cut) ++r;
  return r;
}

SupportPattern support(const Mat& a, const Tolerances& tol) {
  SupportPattern p;
  p.rows = int(a.rows());
  p.cols = int(a.cols());
  const double scale = max_abs(a);
  p.threshold = tol.support_tol * scale;
  if (scale == 0.0) return p;
  for (int i = 0; i < p.rows; ++i)
    for (int j = 0; j < p.cols; ++j)
      if (std::abs(a(i, j)) > p.threshold) p.cells.emplace_back(i, j);
  return p;
}

Tensor3 apply_equivalence(const Tensor3& t, const EquivalenceTransform& eq) {
  if (eq.left.cols() != t.rows() || eq.right.rows() != t.cols())
    throw PreconditionError("apply_equivalence: dimension mismatch");
  Tensor3 out;
  out.field = t.field;
  out.slices.reserve(t.slices.size());
  for (const Mat& s : t.slices) out.slices.push_back(eq.left * s * eq.right);
  return out;
}

Tensor3 transpose_tensor(const Tensor3& t) {
  Tensor3 out;
  out.field = t.field;
  out.slices.reserve(t.slices.size());
  for (const Mat& s : t.slices) out.slices.push_back(s.transpose());
  return out;
}

Tensor3 permute_modes(const Tensor3& t, const std::array<int, 3>& perm) {
  const int dims[3] = {t.rows(), t.cols(), t.depth()};
  int idx[3];
  Tensor3 out;
  out.field = t.field;
  out.slices.assign(size_t(dims[perm[2]]), Mat::Zero(dims[perm[0]], dims[perm[1]]));
  for (idx[0] = 0; idx[0] < dims[0]; ++idx[0])
    for (idx[1] = 0; idx[1] < dims[1]; ++idx[1])
      for (idx[2] = 0; idx[2] < dims[2]; ++idx[2])
        out.slices[size_t(idx[perm[2]])](idx[perm[0]], idx[perm[1]]) =
            t.slices[size_t(idx[2])](idx[0], idx[1]);
  return out;
}

Mat unfolding(const Tensor3& t, int mode) {
  const int m = t.rows(), n = t.cols(), p = t.depth();
  if (mode == 0) {
    Mat u(m, n * p);
    for (int k = 0; k < p; ++k) u.middleCols(Eigen::Index(k) * n, n) = t.slice(k);
    return u;
  }
  if (mode == 1) {
    Mat u(n, m * p);
    for (int k = 0; k < p; ++k) u.middleCols(Eigen::Index(k) * m, m) = t.slice(k).transpose();
    return u;
  }
  if (mode == 2) {
    Mat u(p, m * n);
    for (int k = 0; k < p; ++k)
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < m; ++i) u(k, Eigen::Index(j) * m + i) = t.slice(k)(i, j);
    return u;
  }
  throw PreconditionError("unfolding: mode must be 0, 1 or 2");
}

int flattening_rank_lower_bound(const Tensor3& t, const Tolerances& tol) {
  int r = 0;
  for (int mode = 0; mode < 3; ++mode) r = std::max(r, numerical_rank(unfolding(t, mode), tol));
  return r;
}

SvdResult svd_full(const Mat& a, Field field) {
  Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  SvdResult res;
  res.u = svd.matrixU();
  res.v = svd.matrixV();
  res.sigma = svd.singularValues();
  if (field == Field::Real) {
    // U sigma V^H is invariant under joint column phases; align each pair to
    // the phase of its anchor entry, after which U, V of a real matrix are
    // real up to rounding dust.
    const auto col_phase = [](const Mat& w, Eigen::Index c) {
      Eigen::Index imax = 0;
      w.col(c).cwiseAbs().maxCoeff(&imax);
      const Cx z = w(imax, c);
      return std::abs(z) == 0.0 ? Cx(1.0, 0.0) : z / std::abs(z);
    };
    const Eigen::Index shared = std::min(res.u.cols(), res.v.cols());
    for (Eigen::Index c = 0; c < res.u.cols(); ++c) {
      const Cx ph = std::conj(col_phase(res.u, c));
      res.u.col(c) *= ph;
      if (c < shared) res.v.col(c) *= ph;
    }
    for (Eigen::Index c = shared; c < res.v.cols(); ++c)
      res.v.col(c) *= std::conj(col_phase(res.v, c));
    res.u = snap_real(std::move(res.u), 1e-7);
    res.v = snap_real(std::move(res.v), 1e-7);
  }
  return res;
}

NormalFormResult normal_form_slice(const Tensor3& t, int k, const Tolerances& tol) {
  if (k < 0 || k >= t.depth()) throw PreconditionError("normal_form_slice: slice index");
  const Mat& a = t.slice(k);
  const int m = t.rows(), n = t.cols();

  SvdResult sf = svd_full(a, t.field);
  Mat& u = sf.u;
  Mat& v = sf.v;
  const Eigen::VectorXd& sv = sf.sigma;
  int r = 0;
  if (sv.size() > 0 && sv(0) > 0.0) {
    const double cut = tol.rank_tol * sv(0);
    for (Eigen::Index i = 0; i < sv.size(); ++i)
      if (sv(i) > cut) ++r;
  }

  // left = D_l U^H, right = V D_r with D_l, D_r = diag(sigma_i^{-1/2}) on the
  // first r cells: left * a * right = Diag(E_r, O) and both factors have exact
  // closed-form inverses.
  Vec dl = Vec::Ones(m), dr = Vec::Ones(n);
  for (int i = 0; i < r; ++i) {
    const double s = 1.0 / std::sqrt(sv(i));
    dl(i) = s;
    dr(i) = s;
  }
  EquivalenceTransform eq;
  eq.left = dl.asDiagonal() * u.adjoint();
  eq.left_inv = u * dl.cwiseInverse().asDiagonal();
  eq.right = v * dr.asDiagonal();
  eq.right_inv = dr.cwiseInverse().asDiagonal() * v.adjoint();

  NormalFormResult res;
  res.tensor = apply_equivalence(t, eq);
  res.transform = std::move(eq);
  res.rank = r;

  Mat& nk = res.tensor.slice(k);
  nk.setZero();
  for (int i = 0; i < r; ++i) nk(i, i) = Cx(1.0, 0.0);
  if (t.field == Field::Real)
    for (Mat& s : res.tensor.slices) s = snap_real(std::move(s), 1e-6 * std::max(1.0, t.max_abs()));
  return res;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  // splitmix64 step over seed xor salt
  std::uint64_t z = seed ^ (salt + 0x9E3779B97F4A7C15ull);
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

Tensor3 random_tensor(int m, int n, int p, Field field, std::uint64_t seed) {
  if (m < 1 || n < 1 || p < 1) throw PreconditionError("random_tensor: dims must be >= 1");
  std::mt19937_64 rng(mix_seed(seed, 0x7e4507));
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Tensor3 t;
  t.field = field;
  t.slices.assign(size_t(p), Mat::Zero(m, n));
  for (int k = 0; k < p; ++k)
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j) {
        const double re = dist(rng);
        const double im = field == Field::Complex ? dist(rng) : 0.0;
        t.slices[size_t(k)](i, j) = Cx(re, im);
      }
  return t;
}

}  // namespace tenrank
