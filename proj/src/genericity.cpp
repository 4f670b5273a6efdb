#include "tenrank/genericity.hpp"

#include <random>

#include <Eigen/LU>
#include <Eigen/QR>

namespace tenrank {

namespace {

bool entries_all_nonzero(const Vec& v, double support_tol) {
  const double scale = v.cwiseAbs().maxCoeff();
  if (scale == 0.0) return false;
  return v.cwiseAbs().minCoeff() > support_tol * scale;
}

bool minors_all_nonzero(const Mat& w, double support_tol) {
  // w is n x 2; thresholds are relative to entry_scale^2 so a nearly rank-one
  // pair fails even when its minors are uniform.
  const double scale = max_abs(w);
  if (scale == 0.0) return false;
  const double cut = support_tol * scale * scale;
  for (Eigen::Index i = 0; i < w.rows(); ++i)
    for (Eigen::Index k = i + 1; k < w.rows(); ++k) {
      const Cx minor = w(i, 0) * w(k, 1) - w(k, 0) * w(i, 1);
      if (!(std::abs(minor) > cut)) return false;
    }
  return true;
}

}  // namespace

Mat randomize_nonvanishing(int n, const GenericityRequest& req, Field field,
                           const Tolerances& tol, std::uint64_t seed, int max_attempts) {
  for (const Vec& v : req.nonzero_vectors)
    if (int(v.size()) != n) throw PreconditionError("randomize_nonvanishing: vector size");
  for (const Vec& v : req.nonzero_covectors)
    if (int(v.size()) != n) throw PreconditionError("randomize_nonvanishing: covector size");
  for (const auto& [x, y] : req.independent_pairs)
    if (int(x.size()) != n || int(y.size()) != n)
      throw PreconditionError("randomize_nonvanishing: pair size");

  std::mt19937_64 rng(mix_seed(seed, 0x9e4e71c));
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    Mat p(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const double re = dist(rng);
        const double im = field == Field::Complex ? dist(rng) : 0.0;
        p(i, j) = Cx(re, im);
      }
    if (numerical_rank(p, tol) < n) continue;

    bool ok = true;
    for (const Vec& v : req.nonzero_vectors)
      if (!entries_all_nonzero(p * v, tol.support_tol)) {
        ok = false;
        break;
      }
    if (ok && !req.nonzero_covectors.empty()) {
      const Eigen::PartialPivLU<Mat> lu(p.transpose());
      for (const Vec& u : req.nonzero_covectors)
        if (!entries_all_nonzero(lu.solve(u), tol.support_tol)) {
          ok = false;
          break;
        }
    }
    if (ok)
      for (const auto& [x, y] : req.independent_pairs) {
        Mat w(n, 2);
        w.col(0) = p * x;
        w.col(1) = p * y;
        if (!minors_all_nonzero(w, tol.support_tol)) {
          ok = false;
          break;
        }
      }
    if (ok) return p;
  }
  throw GenericityExhausted("randomize_nonvanishing: no sample satisfied the request");
}

std::pair<double, Mat> generic_support_merge(const Mat& a, const Mat& b, const Tolerances& tol) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw PreconditionError("generic_support_merge: dimension mismatch");
  const SupportPattern sa = support(a, tol), sb = support(b, tol);
  for (int step = 1; step <= 16; ++step)
    for (const double t : {double(step), -double(step)}) {
      const Mat merged = a + t * b;
      const SupportPattern sm = support(merged, tol);
      if (sa.subset_of(sm) && sb.subset_of(sm)) return {t, merged};
    }
  throw GenericityExhausted("generic_support_merge: no t in 1,-1,...,16,-16 preserved support");
}

std::pair<Mat, int> unipotent_column_eliminator(const Mat& m, const Tolerances& tol) {
  const int rows = int(m.rows()), s = int(m.cols());
  if (s < 2) throw PreconditionError("unipotent_column_eliminator: need at least two columns");
  const double scale = max_abs(m);
  const double cut = tol.support_tol * scale * double(rows);

  for (int j = 0; j + 1 < s; ++j) {
    const Mat later = m.rightCols(s - 1 - j);
    const Vec target = m.col(j);
    Vec gamma = later.completeOrthogonalDecomposition().solve(target);
    if ((later * gamma - target).norm() <= cut) {
      if (is_real_exact(m))
        gamma = snap_real(gamma, 1e-7 * (1.0 + gamma.cwiseAbs().maxCoeff()));
      Mat v = Mat::Identity(s, s);
      for (int k = 0; k < int(gamma.size()); ++k) v(j + 1 + k, j) = -gamma(k);
      return {std::move(v), j};
    }
  }
  throw PreconditionError("unipotent_column_eliminator: columns are independent");
}

}  // namespace tenrank
