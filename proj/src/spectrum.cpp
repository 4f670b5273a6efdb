#include "tenrank/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/QR>
#include <Eigen/SVD>

namespace tenrank {

int PolynomialF::degree(double trim_rel) const {
  double top = 0.0;
  for (const Cx& c : coeffs) top = std::max(top, std::abs(c));
  if (top == 0.0) return -1;
  for (int i = int(coeffs.size()) - 1; i >= 0; --i)
    if (std::abs(coeffs[size_t(i)]) > trim_rel * top) return i;
  return -1;
}

Cx PolynomialF::eval(Cx t) const {
  Cx acc(0.0, 0.0);
  for (int i = int(coeffs.size()) - 1; i >= 0; --i) acc = acc * t + coeffs[size_t(i)];
  return acc;
}

PolynomialF PolynomialF::derivative() const {
  PolynomialF d;
  d.field = field;
  if (coeffs.size() <= 1) {
    d.coeffs = {Cx(0.0, 0.0)};
    return d;
  }
  d.coeffs.resize(coeffs.size() - 1);
  for (size_t i = 1; i < coeffs.size(); ++i) d.coeffs[i - 1] = coeffs[i] * double(i);
  return d;
}

std::pair<Vec, Mat> eigen_decomposition(const Mat& s, Field field, const Tolerances& tol) {
  if (s.rows() != s.cols()) throw PreconditionError("eigen_decomposition: square matrix required");
  const int n = int(s.rows());
  Eigen::ComplexEigenSolver<Mat> es(s, /*computeEigenvectors=*/true);
  if (es.info() != Eigen::Success)
    throw PreconditionError("eigen_decomposition: eigensolver failed to converge");
  Vec vals = es.eigenvalues();
  Mat vecs = es.eigenvectors();
  if (field == Field::Real) {
    // A real matrix with a real simple eigenvalue has Re(v) and Im(v) parallel
    // real eigenvectors; keep the larger and renormalize.
    const double scale = std::max(1.0, max_abs(s));
    for (int i = 0; i < n; ++i) {
      if (std::abs(vals(i).imag()) > tol.margin_tol)
        throw PreconditionError("eigen_decomposition: spectrum not real under the real field");
      vals(i) = Cx(vals(i).real(), 0.0);
      const Eigen::VectorXd re = vecs.col(i).real(), im = vecs.col(i).imag();
      Eigen::VectorXd w = re.norm() >= im.norm() ? re : im;
      const double wn = w.norm();
      if (wn == 0.0) throw PreconditionError("eigen_decomposition: zero eigenvector");
      w /= wn;
      vecs.col(i) = w.cast<Cx>();
    }
    // Realified vectors must still be eigenvectors; guards clustered spectra.
    for (int i = 0; i < n; ++i) {
      const double res = (s * vecs.col(i) - vals(i) * vecs.col(i)).norm();
      if (res > 1e-6 * std::max(1.0, scale))
        throw PreconditionError("eigen_decomposition: realification failed (clustered spectrum?)");
    }
  }
  return {std::move(vals), std::move(vecs)};
}

PencilSpectrum pencil_spectrum(const Mat& x, const Mat& y, const Tolerances& tol) {
  if (x.rows() != x.cols() || y.rows() != y.cols() || x.rows() != y.rows())
    throw PreconditionError("pencil_spectrum: matching square matrices required");
  if (numerical_rank(x, tol) < x.rows())
    throw PreconditionError("pencil_spectrum: leading matrix singular");
  const Mat s = Eigen::PartialPivLU<Mat>(x).solve(y);
  Eigen::ComplexEigenSolver<Mat> es(s, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success)
    throw PreconditionError("pencil_spectrum: eigensolver failed to converge");

  PencilSpectrum ps;
  ps.eigenvalues = es.eigenvalues();
  const int n = int(ps.eigenvalues.size());
  ps.margin = std::numeric_limits<double>::infinity();
  ps.max_imag = 0.0;
  for (int i = 0; i < n; ++i) {
    ps.max_imag = std::max(ps.max_imag, std::abs(ps.eigenvalues(i).imag()));
    for (int j = i + 1; j < n; ++j)
      ps.margin = std::min(ps.margin, std::abs(ps.eigenvalues(i) - ps.eigenvalues(j)));
  }
  return ps;
}

PolynomialF det_polynomial_on_line(const Mat& m0, const Mat& m1, Field field) {
  if (m0.rows() != m0.cols() || m1.rows() != m1.cols() || m0.rows() != m1.rows())
    throw PreconditionError("det_polynomial_on_line: matching square matrices required");
  const int n = int(m0.rows());
  if (n > 32) throw PreconditionError("det_polynomial_on_line: degree cap is 32");

  // det(m0 + t m1) has degree <= n; n+1 Chebyshev nodes recover it exactly.
  const int npts = n + 1;
  Vec rhs(npts);
  Mat vand(npts, npts);
  for (int k = 0; k < npts; ++k) {
    const double t = npts == 1 ? 0.0 : std::cos(M_PI * (2.0 * k + 1.0) / (2.0 * npts));
    rhs(k) = Eigen::PartialPivLU<Mat>(m0 + t * m1).determinant();
    Cx pw(1.0, 0.0);
    for (int j = 0; j < npts; ++j) {
      vand(k, j) = pw;
      pw *= t;
    }
  }
  Vec coef = vand.colPivHouseholderQr().solve(rhs);

  PolynomialF p;
  p.field = field;
  p.coeffs.assign(coef.data(), coef.data() + npts);
  if (field == Field::Real) {
    // Real input makes the determinant polynomial real; drop solver dust.
    double top = 0.0;
    for (Cx& c : p.coeffs) top = std::max(top, std::abs(c));
    for (Cx& c : p.coeffs) {
      if (std::abs(c.imag()) > 1e-7 * std::max(1.0, top))
        throw PreconditionError("det_polynomial_on_line: complex coefficients under real field");
      c = Cx(c.real(), 0.0);
    }
  }
  return p;
}

std::function<Cx(const Vec&)> det_span_evaluator(const Tensor3& t) {
  if (t.rows() != t.cols()) throw PreconditionError("det_span_evaluator: square slices required");
  return [slices = t.slices](const Vec& c) {
    if (int(c.size()) != int(slices.size()))
      throw PreconditionError("det_span_evaluator: coefficient count mismatch");
    Mat m = Mat::Zero(slices[0].rows(), slices[0].cols());
    for (size_t i = 0; i < slices.size(); ++i) m += c(Eigen::Index(i)) * slices[i];
    return Eigen::PartialPivLU<Mat>(m).determinant();
  };
}

std::vector<Cx> polynomial_roots(const PolynomialF& p) {
  const int deg = p.degree();
  if (deg <= 0) return {};
  Mat companion = Mat::Zero(deg, deg);
  const Cx lead = p.coeffs[size_t(deg)];
  for (int i = 0; i < deg; ++i) {
    companion(i, deg - 1) = -p.coeffs[size_t(i)] / lead;
    if (i + 1 < deg) companion(i + 1, i) = Cx(1.0, 0.0);
  }
  Eigen::ComplexEigenSolver<Mat> es(companion, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success) return {};
  std::vector<Cx> roots(es.eigenvalues().data(), es.eigenvalues().data() + deg);
  std::sort(roots.begin(), roots.end(), [](Cx a, Cx b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  return roots;
}

namespace {

Cx newton_polish(const PolynomialF& p, const PolynomialF& dp, Cx t) {
  Cx best = t;
  double best_val = std::abs(p.eval(t));
  for (int it = 0; it < 8; ++it) {
    const Cx d = dp.eval(t);
    if (std::abs(d) == 0.0) break;
    t -= p.eval(t) / d;
    const double v = std::abs(p.eval(t));
    if (v < best_val) {
      best_val = v;
      best = t;
    } else {
      break;
    }
  }
  return best;
}

struct ComboChecker {
  const Tensor3& t;
  const Tolerances& tol;
  double scale;

  // Combination accepted when nonzero at the tensor's scale and numerically
  // rank-deficient; c is normalized in place.
  bool accept(Vec& c) const {
    const double cn = c.norm();
    if (cn == 0.0) return false;
    c /= cn;
    Mat m = Mat::Zero(t.rows(), t.cols());
    for (int k = 0; k < t.depth(); ++k) m += c(k) * t.slice(k);
    Eigen::JacobiSVD<Mat> svd(m);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0) return false;
    const double smax = sv(0), smin = sv(sv.size() - 1);
    if (!(smax > tol.support_tol * scale)) return false;
    return smin < tol.rank_tol * smax;
  }
};

}  // namespace

std::vector<Vec> singular_combinations(const Tensor3& t, const Tolerances& tol, int budget,
                                       std::uint64_t seed, int max_results) {
  if (t.rows() != t.cols())
    throw PreconditionError("singular_combinations: square slices required");
  const int n = t.rows(), p = t.depth();
  std::vector<Vec> found;
  ComboChecker checker{t, tol, t.max_abs()};
  if (checker.scale == 0.0) return found;

  auto push_if_new = [&](Vec c) {
    for (const Vec& f : found)
      if ((f - c).norm() < 1e-6 || (f + c).norm() < 1e-6) return;
    found.push_back(std::move(c));
  };

  // Single slices first.
  for (int k = 0; k < p && int(found.size()) < max_results; ++k) {
    Vec c = Vec::Zero(p);
    c(k) = Cx(1.0, 0.0);
    if (checker.accept(c)) push_if_new(std::move(c));
  }

  // Root candidates of det along a line: the polynomial's own roots plus the
  // derivative's (even-multiplicity roots come out of the derivative at full
  // precision), each Newton-polished.
  auto line_candidates = [&](const Mat& m0, const Mat& m1) {
    const PolynomialF poly = det_polynomial_on_line(m0, m1, t.field);
    const PolynomialF dpoly = poly.derivative();
    std::vector<Cx> cands = polynomial_roots(poly);
    const std::vector<Cx> droots = polynomial_roots(dpoly);
    cands.insert(cands.end(), droots.begin(), droots.end());
    for (Cx& r : cands) r = newton_polish(poly, dpoly, r);
    if (t.field == Field::Real) {
      std::vector<Cx> real;
      for (Cx r : cands)
        if (std::abs(r.imag()) < tol.margin_tol) real.emplace_back(r.real(), 0.0);
      cands = std::move(real);
    }
    std::sort(cands.begin(), cands.end(), [](Cx a, Cx b) {
      if (std::abs(a) != std::abs(b)) return std::abs(a) < std::abs(b);
      if (a.real() != b.real()) return a.real() < b.real();
      return a.imag() < b.imag();
    });
    return cands;
  };

  // Pairwise slice lines.
  for (int i = 0; i < p && int(found.size()) < max_results; ++i)
    for (int j = i + 1; j < p && int(found.size()) < max_results; ++j) {
      for (Cx r : line_candidates(t.slice(i), t.slice(j))) {
        Vec c = Vec::Zero(p);
        c(i) = Cx(1.0, 0.0);
        c(j) = r;
        if (checker.accept(c)) push_if_new(std::move(c));
        if (int(found.size()) >= max_results) break;
      }
    }

  // Seeded random 2-dim sections of the span.
  std::mt19937_64 rng(mix_seed(seed, 0x5ec7105));
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  auto random_coeffs = [&] {
    Vec c(p);
    for (int k = 0; k < p; ++k) {
      const double re = dist(rng);
      const double im = t.field == Field::Complex ? dist(rng) : 0.0;
      c(k) = Cx(re, im);
    }
    return c;
  };
  for (int trial = 0; trial < budget && int(found.size()) < max_results; ++trial) {
    const Vec c0 = random_coeffs(), c1 = random_coeffs();
    Mat m0 = Mat::Zero(n, n), m1 = Mat::Zero(n, n);
    for (int k = 0; k < p; ++k) {
      m0 += c0(k) * t.slice(k);
      m1 += c1(k) * t.slice(k);
    }
    for (Cx r : line_candidates(m0, m1)) {
      Vec c = c0 + r * c1;
      if (checker.accept(c)) push_if_new(std::move(c));
      if (int(found.size()) >= max_results) break;
    }
  }
  return found;
}

std::optional<Vec> find_singular_combination(const Tensor3& t, const Tolerances& tol, int budget,
                                             std::uint64_t seed) {
  auto all = singular_combinations(t, tol, budget, seed, 1);
  if (all.empty()) return std::nullopt;
  return all.front();
}

}  // namespace tenrank
