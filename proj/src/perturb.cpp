#include "tenrank/perturb.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/LU>

namespace tenrank {

namespace {

// Fresh target eigenvalues: walk 1, 1.5, 2, 2.5, ... (shifted per attempt) and
// keep values at distance >= 1/4 from everything already taken.
std::vector<double> fresh_targets(int count, const std::vector<Cx>& taken, int attempt) {
  std::vector<double> out;
  std::vector<Cx> used = taken;
  double v = 1.0 + 0.37 * attempt;
  while (int(out.size()) < count) {
    bool clear = true;
    for (const Cx& u : used)
      if (std::abs(Cx(v, 0.0) - u) < 0.25) {
        clear = false;
        break;
      }
    if (clear) {
      out.push_back(v);
      used.emplace_back(v, 0.0);
    }
    v += 0.5;
  }
  return out;
}

std::vector<int> complement(int n, const std::vector<int>& s) {
  std::vector<bool> in(size_t(n), false);
  for (int i : s) in[size_t(i)] = true;
  std::vector<int> c;
  for (int i = 0; i < n; ++i)
    if (!in[size_t(i)]) c.push_back(i);
  return c;
}

}  // namespace

DiagonalPerturbation perturb_to_distinct(const Mat& a, const Mat& b,
                                         const std::vector<int>& preserved, Field field,
                                         const Tolerances& tol, int attempt) {
  if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows())
    throw PreconditionError("perturb_to_distinct: matching square matrices required");
  const int n = int(a.rows());
  std::vector<int> s = preserved;
  std::sort(s.begin(), s.end());
  if (std::adjacent_find(s.begin(), s.end()) != s.end())
    throw PreconditionError("perturb_to_distinct: repeated preserved index");
  if (!s.empty() && (s.front() < 0 || s.back() >= n))
    throw PreconditionError("perturb_to_distinct: preserved index out of range");

  double scale = std::max(max_abs(a), max_abs(b));
  if (scale == 0.0) scale = 1.0;
  const Mat an = a / scale, bn = b / scale;

  // Preserved cells keep their pencil: the restricted block must already be
  // nonsingular with spectrum distinct in the field.
  std::vector<Cx> fixed_evs;
  if (!s.empty()) {
    const int k = int(s.size());
    Mat as(k, k), bs(k, k);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) {
        as(i, j) = an(s[size_t(i)], s[size_t(j)]);
        bs(i, j) = bn(s[size_t(i)], s[size_t(j)]);
      }
    if (numerical_rank(as, tol) < k)
      throw PreconditionError("perturb_to_distinct: preserved block singular");
    const PencilSpectrum ps = pencil_spectrum(as, bs, tol);
    if (!ps.distinct_in(field, tol))
      throw PreconditionError("perturb_to_distinct: preserved block spectrum not distinct");
    fixed_evs.assign(ps.eigenvalues.data(), ps.eigenvalues.data() + k);
  }

  const std::vector<int> free = complement(n, s);
  const std::vector<double> targets = fresh_targets(int(free.size()), fixed_evs, attempt);
  const double power = s.empty() ? 1.0 : 2.0;

  auto result = epsilon_search(
      [&](double eps) -> std::optional<DiagonalPerturbation> {
        const double inv = std::pow(eps, -power);
        Vec x = Vec::Zero(n), y = Vec::Zero(n);
        for (size_t i = 0; i < free.size(); ++i) {
          x(free[i]) = Cx(inv, 0.0);
          y(free[i]) = Cx(inv * targets[i], 0.0);
        }
        const Mat ma = an + Mat(x.asDiagonal());
        const Mat mb = bn + Mat(y.asDiagonal());
        if (numerical_rank(ma, tol) < n) return std::nullopt;
        const PencilSpectrum ps = pencil_spectrum(ma, mb, tol);
        if (!ps.distinct_in(field, tol)) return std::nullopt;
        DiagonalPerturbation d;
        d.x = x * scale;
        d.y = y * scale;
        d.epsilon = eps;
        d.spectrum = ps;
        return d;
      },
      tol);
  return result;
}

bool cross_ratio_applicable(const Mat& a, const Mat& b, const Tolerances& tol) {
  if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows()) return false;
  const int n = int(a.rows());
  if (n < 2) return false;
  const SupportPattern sa = support(a, tol), sb = support(b, tol);
  if (!sa.contains(n - 2, n - 1) || !sa.contains(n - 1, n - 2)) return false;
  if (sa.contains(n - 1, n - 1) || sb.contains(n - 1, n - 1)) return false;
  const Cx r1 = b(n - 2, n - 1) / a(n - 2, n - 1);
  const Cx r2 = b(n - 1, n - 2) / a(n - 1, n - 2);
  return std::abs(r1 - r2) > tol.margin_tol;
}

AnchoredPerturbation perturb_with_anchor(const Mat& a, const Mat& b, const Vec& anchor_a,
                                         const Vec& anchor_b, Field field, const Tolerances& tol,
                                         int attempt) {
  if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows())
    throw PreconditionError("perturb_with_anchor: matching square matrices required");
  const int n = int(a.rows());
  if (int(anchor_a.size()) != n || int(anchor_b.size()) != n)
    throw PreconditionError("perturb_with_anchor: anchor size mismatch");
  {
    const double amax = anchor_a.cwiseAbs().maxCoeff();
    if (amax == 0.0 || anchor_a.cwiseAbs().minCoeff() <= tol.support_tol * amax)
      throw PreconditionError("perturb_with_anchor: anchor_a needs all entries nonzero");
  }

  double scale = std::max({max_abs(a), max_abs(b), anchor_a.cwiseAbs().maxCoeff(),
                           anchor_b.cwiseAbs().maxCoeff()});
  if (scale == 0.0) scale = 1.0;
  const Mat an = a / scale, bn = b / scale;
  const Vec aan = anchor_a / scale, abn = anchor_b / scale;
  const Vec rowsum_a = an.rowwise().sum(), rowsum_b = bn.rowwise().sum();

  // attempt > 0 nudges eps off the pure halving sequence; the construction is
  // exact for every eps, so this only moves which spectra get inspected.
  const double eps_scale = 1.0 / (1.0 + 0.37 * attempt);

  auto result = epsilon_search(
      [&](double eps0) -> std::optional<AnchoredPerturbation> {
        const double eps = eps0 * eps_scale;
        Vec x(n), y(n);
        for (int i = 0; i < n; ++i) {
          x(i) = (aan(i) - eps * rowsum_a(i)) / eps;
          y(i) = (abn(i) - eps * rowsum_b(i)) / eps;
        }
        const Mat ma = an + Mat(x.asDiagonal());
        const Mat mb = bn + Mat(y.asDiagonal());
        if (numerical_rank(ma, tol) < n) return std::nullopt;
        const PencilSpectrum ps = pencil_spectrum(ma, mb, tol);
        if (!ps.distinct_in(field, tol)) return std::nullopt;
        AnchoredPerturbation r;
        r.x = x * scale;
        r.y = y * scale;
        r.p = Vec::Constant(n, Cx(eps, 0.0));
        r.epsilon = eps;
        r.spectrum = ps;
        return r;
      },
      tol);
  return result;
}

}  // namespace tenrank
