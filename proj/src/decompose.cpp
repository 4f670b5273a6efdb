#include "tenrank/decompose.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <utility>

#include <Eigen/LU>
#include <Eigen/QR>
#include <Eigen/SVD>

#include "tenrank/certify.hpp"
#include "tenrank/genericity.hpp"
#include "tenrank/perturb.hpp"
#include "tenrank/spectrum.hpp"

namespace tenrank {

namespace {

Vec unit_vec(int n, int i) {
  Vec v = Vec::Zero(n);
  v(i) = Cx(1.0, 0.0);
  return v;
}

Vec pad_vec(const Vec& v, int n) {
  Vec out = Vec::Zero(n);
  out.head(v.size()) = v;
  return out;
}

Vec insert_zero(const Vec& v, int pos) {
  Vec out = Vec::Zero(v.size() + 1);
  out.head(pos) = v.head(pos);
  out.tail(v.size() - pos) = v.tail(v.size() - pos);
  return out;
}

Vec pair_c(Cx c0, Cx c1, int i, int j, int p) {
  Vec c = Vec::Zero(p);
  c(i) = c0;
  c(j) = c1;
  return c;
}

Mat pad_diag(const Vec& d, int rows, int cols) {
  Mat out = Mat::Zero(rows, cols);
  const int k = std::min({rows, cols, int(d.size())});
  for (int i = 0; i < k; ++i) out(i, i) = d(i);
  return out;
}

Mat block_identity_embed(const Mat& p, int n) {
  Mat out = Mat::Identity(n, n);
  out.topLeftCorner(p.rows(), p.cols()) = p;
  return out;
}

Vec snap_vec(Vec v, double tol_abs) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) worst = std::max(worst, std::abs(v(i).imag()));
  if (worst > tol_abs)
    throw PreconditionError("snap_vec: imaginary part " + std::to_string(worst) +
                            " exceeds tolerance");
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = Cx(v(i).real(), 0.0);
  return v;
}

Tensor3 mix_slices(const Tensor3& t, const Mat& m) {
  Tensor3 out;
  out.field = t.field;
  out.slices.assign(size_t(m.rows()), Mat::Zero(t.rows(), t.cols()));
  for (int a = 0; a < int(m.rows()); ++a)
    for (int l = 0; l < int(m.cols()); ++l)
      if (m(a, l) != Cx(0.0, 0.0)) out.slices[size_t(a)] += m(a, l) * t.slice(l);
  return out;
}

Tensor3 drop_column(const Tensor3& t, int j) {
  Tensor3 out;
  out.field = t.field;
  const int n = t.cols();
  for (const Mat& s : t.slices) {
    Mat r(t.rows(), n - 1);
    r.leftCols(j) = s.leftCols(j);
    r.rightCols(n - 1 - j) = s.rightCols(n - 1 - j);
    out.slices.push_back(std::move(r));
  }
  return out;
}

Tensor3 drop_row(const Tensor3& t, int i) {
  Tensor3 out;
  out.field = t.field;
  const int m = t.rows();
  for (const Mat& s : t.slices) {
    Mat r(m - 1, t.cols());
    r.topRows(i) = s.topRows(i);
    r.bottomRows(m - 1 - i) = s.bottomRows(m - 1 - i);
    out.slices.push_back(std::move(r));
  }
  return out;
}

// Row/column transposition pair as an exact equivalence (inverses are the
// transposes of 0/1 matrices, no arithmetic involved).
EquivalenceTransform swap_equivalence(int m, int n,
                                      const std::vector<std::pair<int, int>>& row_swaps,
                                      const std::vector<std::pair<int, int>>& col_swaps) {
  std::vector<int> rp(static_cast<size_t>(m)), cp(static_cast<size_t>(n));
  for (int i = 0; i < m; ++i) rp[size_t(i)] = i;
  for (int j = 0; j < n; ++j) cp[size_t(j)] = j;
  for (const auto& [a, b] : row_swaps) std::swap(rp[size_t(a)], rp[size_t(b)]);
  for (const auto& [a, b] : col_swaps) std::swap(cp[size_t(a)], cp[size_t(b)]);
  EquivalenceTransform eq;
  eq.left = Mat::Zero(m, m);
  for (int i = 0; i < m; ++i) eq.left(i, rp[size_t(i)]) = Cx(1.0, 0.0);
  eq.left_inv = eq.left.transpose();
  eq.right = Mat::Zero(n, n);
  for (int j = 0; j < n; ++j) eq.right(cp[size_t(j)], j) = Cx(1.0, 0.0);
  eq.right_inv = eq.right.transpose();
  return eq;
}

// Pullback record for a chain of slice mixes and equivalences applied while
// decomposing; terms of the transformed tensor are mapped back in reverse.
struct TransformLog {
  struct Step {
    bool is_mix = false;
    Mat left_inv, right_inv_t;
    Mat mix_inv;
  };
  std::vector<Step> steps;

  void push_equiv(const Mat& left_inv, const Mat& right_inv) {
    Step s;
    s.left_inv = left_inv;
    s.right_inv_t = right_inv.transpose();
    steps.push_back(std::move(s));
  }
  void push_mix(const Mat& mix_inv) {
    Step s;
    s.is_mix = true;
    s.mix_inv = mix_inv;
    steps.push_back(std::move(s));
  }
  void pull_back(std::vector<RankOneTerm>& terms) const {
    for (auto it = steps.rbegin(); it != steps.rend(); ++it)
      for (RankOneTerm& t : terms) {
        if (it->is_mix) {
          t.c = it->mix_inv * t.c;
        } else {
          t.a = it->left_inv * t.a;
          t.b = it->right_inv_t * t.b;
        }
      }
  }
};

// Release gate for every construction: the term count must meet the claim and
// the reconstruction must meet residual_tol; Real results are snapped exactly
// real first. Violations are construction failures, not certificate verdicts.
Decomposition finalize(Decomposition d, const Tensor3& t, const Tolerances& tol) {
  if (int(d.terms.size()) > d.claimed_bound)
    throw std::runtime_error("construction produced " + std::to_string(d.terms.size()) +
                             " terms against a claim of " + std::to_string(d.claimed_bound));
  if (d.field == Field::Real)
    for (RankOneTerm& term : d.terms) {
      const auto cap = [](const Vec& v) {
        return 1e-7 * (1.0 + (v.size() ? v.cwiseAbs().maxCoeff() : 0.0));
      };
      term.a = snap_vec(std::move(term.a), cap(term.a));
      term.b = snap_vec(std::move(term.b), cap(term.b));
      term.c = snap_vec(std::move(term.c), cap(term.c));
    }
  d.tol = tol;
  const double res = relative_residual(t, d);
  if (!(res <= tol.residual_tol))
    throw std::runtime_error("construction residual " + std::to_string(res) +
                             " exceeds tolerance");
  return d;
}

// SVD expansion of one slice: terms (sigma_i u_i) (x) conj(v_i) (x) c.
void append_matrix_slice_terms(std::vector<RankOneTerm>& out, const Mat& m, const Vec& c,
                               Field field, const Tolerances& tol) {
  if (max_abs(m) == 0.0) return;
  const SvdResult s = svd_full(m, field);
  const double cut = tol.rank_tol * s.sigma(0);
  for (Eigen::Index i = 0; i < s.sigma.size(); ++i)
    if (s.sigma(i) > cut)
      out.push_back({s.u.col(i) * s.sigma(i), s.v.col(i).conjugate(), c});
}

// Common direction of a (numerically) dependent pair of vectors plus the
// coefficients projecting each member onto it.
struct PairDirection {
  bool ok = false;
  Vec w;
  Cx c0, c1;
};

PairDirection dependent_direction(const Vec& u0, const Vec& u1) {
  PairDirection r;
  const double n0 = u0.norm(), n1 = u1.norm();
  if (n0 == 0.0 && n1 == 0.0) return r;
  r.w = n0 >= n1 ? u0 : u1;
  const double denom = r.w.squaredNorm();
  r.c0 = r.w.dot(u0) / denom;
  r.c1 = r.w.dot(u1) / denom;
  r.ok = true;
  return r;
}

bool line_in_support(const SupportPattern& s, int idx, bool column) {
  for (const auto& [i, j] : s.cells)
    if ((column ? j : i) == idx) return true;
  return false;
}

// 2x2x3 base case. The slice span sits inside a hyperplane of 2x2 matrices
// cut out by tr(G^T M) = 0; such a hyperplane is always spanned by three
// rank-one matrices (a conic family when G is nonsingular, two pencils when
// G has rank one), which caps the rank at 3 over both fields.
Decomposition base_2x2(const Tensor3& t, const Tolerances& tol) {
  const Field field = t.field;
  Decomposition out;
  out.m = out.n = 2;
  out.p = 3;
  out.field = field;
  out.claimed_bound = 3;
  out.method = {"base-2x2"};
  if (t.is_zero()) return finalize(std::move(out), t, tol);

  Mat bm(3, 4);  // row k = vec(slice k), column-major
  for (int k = 0; k < 3; ++k) {
    const Mat& s = t.slice(k);
    bm(k, 0) = s(0, 0);
    bm(k, 1) = s(1, 0);
    bm(k, 2) = s(0, 1);
    bm(k, 3) = s(1, 1);
  }
  const SvdResult sf = svd_full(bm, field);
  int d = 0;
  const double cut = tol.rank_tol * sf.sigma(0);
  for (Eigen::Index i = 0; i < sf.sigma.size(); ++i)
    if (sf.sigma(i) > cut) ++d;

  const auto unvec = [](const Vec& g) {
    Mat m(2, 2);
    m(0, 0) = g(0);
    m(1, 0) = g(1);
    m(0, 1) = g(2);
    m(1, 1) = g(3);
    return m;
  };

  if (d <= 1) {
    // One basis matrix serves every slice.
    const Vec g = sf.v.col(0).conjugate();
    Vec gamma(3);
    for (int k = 0; k < 3; ++k) gamma(k) = sf.sigma(0) * sf.u(k, 0);
    append_matrix_slice_terms(out.terms, unvec(g), gamma, field, tol);
    out.method.push_back("matrix-slice");
    return finalize(std::move(out), t, tol);
  }

  std::vector<Vec> gcands;
  for (int j = d; j < 4; ++j) gcands.push_back(sf.v.col(j));
  if (d == 2) {
    const Vec v2 = sf.v.col(2), v3 = sf.v.col(3);
    gcands.push_back(v2 + v3);
    gcands.push_back(v2 - v3);
    gcands.push_back(v2 + 2.0 * v3);
    gcands.push_back(2.0 * v2 + v3);
  }

  Mat jrot(2, 2);
  jrot << Cx(0, 0), Cx(1, 0), Cx(-1, 0), Cx(0, 0);

  struct Basis {
    std::array<Vec, 3> x, y;
  };
  double best_res = std::numeric_limits<double>::infinity();
  std::vector<RankOneTerm> best_terms;
  const double bnorm = bm.norm();

  const auto evaluate = [&](const Basis& basis) {
    Mat key(4, 3);
    for (int j = 0; j < 3; ++j) {
      const Mat c = basis.x[size_t(j)] * basis.y[size_t(j)].transpose();
      key(0, j) = c(0, 0);
      key(1, j) = c(1, 0);
      key(2, j) = c(0, 1);
      key(3, j) = c(1, 1);
    }
    const Mat coeff = key.completeOrthogonalDecomposition().solve(Mat(bm.transpose()));
    const double res = (key * coeff - bm.transpose()).norm();
    if (res < best_res) {
      best_res = res;
      best_terms.clear();
      for (int j = 0; j < 3; ++j) {
        const Vec c = coeff.row(j).transpose();
        if (c.norm() == 0.0) continue;
        best_terms.push_back({basis.x[size_t(j)], basis.y[size_t(j)], c});
      }
    }
  };

  const Vec e0 = unit_vec(2, 0), e1 = unit_vec(2, 1);
  for (Vec g : gcands) {
    const double gn = g.norm();
    if (gn == 0.0) continue;
    g /= gn;
    const Mat gm = unvec(g);
    {  // conic family x -> x (J G^T x)^T, sampled at e0, e1, e0+e1
      Basis b;
      const Mat jgt = jrot * gm.transpose();
      b.x = {e0, e1, Vec(e0 + e1)};
      for (int j = 0; j < 3; ++j) b.y[size_t(j)] = jgt * b.x[size_t(j)];
      evaluate(b);
    }
    {  // rank-one G = sigma u v^T: two pencils through the annihilators
      const SvdResult gs = svd_full(gm, field);
      const Vec u = gs.u.col(0), vb = gs.v.col(0).conjugate();
      Vec x0(2), y0(2);
      x0 << u(1), -u(0);
      y0 << vb(1), -vb(0);
      const int k = std::abs(x0(1)) >= std::abs(x0(0)) ? 0 : 1;
      Basis b;
      b.x = {x0, x0, unit_vec(2, k)};
      b.y = {e0, e1, y0};
      evaluate(b);
    }
  }

  if (!(best_res <= tol.residual_tol * std::max(1.0, bnorm)))
    throw std::runtime_error("base-2x2: no hyperplane basis matched the slice span");
  out.terms = std::move(best_terms);
  out.method.push_back("hyperplane");
  return finalize(std::move(out), t, tol);
}

bool has_independent_column_pair(const Tensor3& t, int r, const Tolerances& tol, int from,
                                 int* found = nullptr) {
  for (int j = from; j < t.cols(); ++j) {
    Mat w(r, 2);
    w.col(0) = t.slice(0).col(j).head(r);
    w.col(1) = t.slice(1).col(j).head(r);
    Eigen::JacobiSVD<Mat> svd(w);
    const auto& sv = svd.singularValues();
    if (sv.size() >= 2 && sv(0) > 0.0 && sv(1) > tol.support_tol * sv(0)) {
      if (found) *found = j;
      return true;
    }
  }
  return false;
}

struct RouteResult {
  std::vector<RankOneTerm> terms;
  std::vector<std::string> chain;
};

// Square case: some column beyond r carries an independent head pair. The
// (r+1)-head is conjugated to the cross-ratio condition, moved into the
// bottom-right corner by joint row/column exchanges and finished through the
// zero-corner split. Returns nullopt when no such column exists.
std::optional<RouteResult> square_cross_column_route(const Tensor3& t, int r,
                                                     const Tolerances& tol, std::uint64_t seed) {
  const int n = t.rows();
  std::vector<int> candidates;
  for (int j = r; j < n; ++j) {
    int hit = -1;
    if (has_independent_column_pair(t, r, tol, j, &hit) && hit == j) candidates.push_back(j);
  }
  if (candidates.empty()) return std::nullopt;

  std::string last = "no candidate column admitted the construction";
  for (size_t idx = 0; idx < candidates.size(); ++idx) {
    const int j = candidates[idx];
    try {
      TransformLog log;
      Tensor3 cur = t;
      if (j != r) {
        const EquivalenceTransform eq = swap_equivalence(n, n, {}, {{r, j}});
        cur = apply_equivalence(cur, eq);
        log.push_equiv(eq.left_inv, eq.right_inv);
      }
      const Mat h0 = cur.slice(0).topLeftCorner(r + 1, r + 1);
      const Mat h1 = cur.slice(1).topLeftCorner(r + 1, r + 1);
      const Mat p = conjugate_to_cross_ratio(h0, h1, t.field, tol, mix_seed(seed, 0x31 + idx));
      const Mat pinv = p.inverse();
      const Mat c = block_identity_embed(p, n);
      const Mat cinv = block_identity_embed(pinv, n);
      // The diagonal third slice commutes with Diag(P, E) exactly; keep it
      // rather than reintroduce rounding into its zero pattern.
      Tensor3 conj;
      conj.field = cur.field;
      conj.slices = {c * cur.slice(0) * cinv, c * cur.slice(1) * cinv, cur.slice(2)};
      log.push_equiv(cinv, c);

      std::vector<std::pair<int, int>> swaps;
      if (r != n - 1) swaps.emplace_back(r, n - 1);
      if (r - 1 != n - 2) swaps.emplace_back(r - 1, n - 2);
      if (!swaps.empty()) {
        const EquivalenceTransform eq = swap_equivalence(n, n, swaps, swaps);
        conj = apply_equivalence(conj, eq);
        log.push_equiv(eq.left_inv, eq.right_inv);
      }

      Decomposition zc = decompose_zero_corner(conj, tol, mix_seed(seed, 0x32 + idx));
      log.pull_back(zc.terms);
      RouteResult rr;
      rr.terms = std::move(zc.terms);
      rr.chain = {"cross-ratio-corner"};
      rr.chain.insert(rr.chain.end(), zc.method.begin(), zc.method.end());
      return rr;
    } catch (const std::exception& e) {
      last = e.what();
    }
  }
  throw std::runtime_error(std::string("cross-ratio corner route failed: ") + last);
}

Decomposition try_square_combo(const Tensor3& t, const Vec& combo, const Tolerances& tol,
                               std::uint64_t seed, int attempt);

// One full pass of the square construction for a fixed singular combination.
Decomposition try_square_combo(const Tensor3& t, const Vec& combo, const Tolerances& tol,
                               std::uint64_t seed, int attempt) {
  const int n = t.rows();
  const Field field = t.field;
  TransformLog log;

  const auto wrap = [&](std::vector<RankOneTerm> terms, std::vector<std::string> chain) {
    log.pull_back(terms);
    Decomposition out;
    out.m = out.n = n;
    out.p = 3;
    out.field = field;
    out.terms = std::move(terms);
    out.claimed_bound = 2 * n - 1;
    out.method = std::move(chain);
    out.seed = seed;
    return finalize(std::move(out), t, tol);
  };
  const auto chain_with = [](std::vector<std::string> head, const std::vector<std::string>& tail) {
    head.insert(head.end(), tail.begin(), tail.end());
    return head;
  };

  // Rotate the singular member into the last slice slot.
  int kmax = 0;
  for (int k = 1; k < 3; ++k)
    if (std::abs(combo(k)) > std::abs(combo(kmax))) kmax = k;
  Mat mixm = Mat::Zero(3, 3);
  int row = 0;
  for (int k = 0; k < 3; ++k)
    if (k != kmax) mixm(row++, k) = Cx(1.0, 0.0);
  mixm.row(2) = combo.transpose();
  Tensor3 cur = mix_slices(t, mixm);
  log.push_mix(mixm.inverse());

  const NormalFormResult nf = normal_form_slice(cur, 2, tol);
  const int r = nf.rank;
  if (r >= n) throw std::runtime_error("square3: selected combination is not singular");
  cur = nf.tensor;
  log.push_equiv(nf.transform.left_inv, nf.transform.right_inv);

  if (r == 0) {
    // The singular member vanished: the span is two-dimensional.
    Tensor3 p2;
    p2.field = field;
    p2.slices = {cur.slice(0), cur.slice(1)};
    Decomposition sub = decompose_general_p(p2, tol, mix_seed(seed, 0x41));
    for (RankOneTerm& term : sub.terms) term.c = pair_c(term.c(0), term.c(1), 0, 1, 3);
    return wrap(std::move(sub.terms), chain_with({"square3", "two-slice"}, sub.method));
  }

  const double scale = cur.max_abs();
  if (max_abs(cur.slice(0)) <= tol.support_tol * scale) {
    Mat sw = Mat::Zero(3, 3);
    sw(0, 1) = sw(1, 0) = sw(2, 2) = Cx(1.0, 0.0);
    cur = mix_slices(cur, sw);
    log.push_mix(sw);
  }
  if (max_abs(cur.slice(0)) <= tol.support_tol * scale) {
    // Only the diagonal slice survives.
    std::vector<RankOneTerm> terms;
    for (int i = 0; i < r; ++i) terms.push_back({unit_vec(n, i), unit_vec(n, i), unit_vec(3, 2)});
    return wrap(std::move(terms), {"square3", "matrix-slice"});
  }

  {  // merge supports so supp(slice 1) is dominated by slice 0
    const auto [tv, merged] = generic_support_merge(cur.slice(0), cur.slice(1), tol);
    cur.slice(0) = merged;
    Mat m2inv = Mat::Identity(3, 3);
    m2inv(0, 1) = Cx(-tv, 0.0);
    log.push_mix(m2inv);
  }

  // Case: support in the bottom-right block beyond r -> move it to the corner.
  {
    const SupportPattern s1 = support(cur.slice(0), tol);
    int bi = -1, bj = -1;
    double bv = 0.0;
    for (const auto& [i, j] : s1.cells)
      if (i >= r && j >= r && std::abs(cur.slice(0)(i, j)) > bv) {
        bv = std::abs(cur.slice(0)(i, j));
        bi = i;
        bj = j;
      }
    if (bi >= 0) {
      const EquivalenceTransform eq = swap_equivalence(n, n, {{bi, n - 1}}, {{bj, n - 1}});
      cur = apply_equivalence(cur, eq);
      log.push_equiv(eq.left_inv, eq.right_inv);
      Decomposition zc = decompose_zero_corner(cur, tol, mix_seed(seed, 0x42));
      return wrap(std::move(zc.terms), chain_with({"square3"}, zc.method));
    }
  }

  // No support beyond r: clean the sub-threshold dust there exactly.
  for (int s = 0; s < 2; ++s) cur.slice(s).block(r, r, n - r, n - r).setZero();

  // Case: a zero column (or row) beyond r -> delete it and recurse non-square.
  {
    const SupportPattern s0 = support(cur.slice(0), tol), s1 = support(cur.slice(1), tol);
    for (int j = r; j < n; ++j)
      if (!line_in_support(s0, j, true) && !line_in_support(s1, j, true)) {
        for (int s = 0; s < 2; ++s) cur.slice(s).col(j).setZero();
        Decomposition sub = decompose_nonsquare_3(drop_column(cur, j), tol, mix_seed(seed, 0x43));
        for (RankOneTerm& term : sub.terms) term.b = insert_zero(term.b, j);
        return wrap(std::move(sub.terms), chain_with({"square3", "column-split"}, sub.method));
      }
    for (int i = r; i < n; ++i)
      if (!line_in_support(s0, i, false) && !line_in_support(s1, i, false)) {
        for (int s = 0; s < 2; ++s) cur.slice(s).row(i).setZero();
        Decomposition sub = decompose_nonsquare_3(drop_row(cur, i), tol, mix_seed(seed, 0x44));
        for (RankOneTerm& term : sub.terms) term.a = insert_zero(term.a, i);
        return wrap(std::move(sub.terms), chain_with({"square3", "row-split"}, sub.method));
      }
  }

  // Case: an independent head pair beyond r, on the column or the row side.
  {
    const bool col_side = has_independent_column_pair(cur, r, tol, r);
    const Tensor3 tt = transpose_tensor(cur);
    const bool row_side = has_independent_column_pair(tt, r, tol, r);
    if (col_side || row_side) {
      std::string last;
      if (col_side) {
        try {
          if (auto rr = square_cross_column_route(cur, r, tol, mix_seed(seed, 0x45)))
            return wrap(std::move(rr->terms), chain_with({"square3"}, rr->chain));
        } catch (const std::exception& e) {
          last = e.what();
        }
      }
      if (row_side) {
        try {
          if (auto rr = square_cross_column_route(tt, r, tol, mix_seed(seed, 0x46))) {
            for (RankOneTerm& term : rr->terms) std::swap(term.a, term.b);
            return wrap(std::move(rr->terms), chain_with({"square3", "row-side"}, rr->chain));
          }
        } catch (const std::exception& e) {
          last = e.what();
        }
      }
      throw std::runtime_error("square3: independent-pair corner route failed: " + last);
    }
  }

  // Case: every head pair beyond r is dependent. A unipotent column operation
  // zeroes one core column; the outside splits into single column/row terms
  // and an r x r x 3 core recursion on a strictly smaller square tensor.
  {
    const Mat melim = cur.slice(0).topLeftCorner(r, r + 1);
    const auto [v, j0] = unipotent_column_eliminator(melim, tol);
    if (j0 >= r)
      throw std::runtime_error("square3: eliminator fell on the last head column");
    Mat vinv = Mat::Identity(r + 1, r + 1);
    vinv.col(j0) = 2.0 * unit_vec(r + 1, j0) - v.col(j0);
    const Mat w = block_identity_embed(v, n);
    const Mat winv = block_identity_embed(vinv, n);
    Tensor3 cur2;
    cur2.field = field;
    cur2.slices = {cur.slice(0) * w, cur.slice(1) * w, cur.slice(2) * w};
    log.push_equiv(Mat::Identity(n, n), winv);

    std::vector<RankOneTerm> terms;
    for (int j = r; j < n; ++j) {
      const PairDirection pd =
          dependent_direction(cur2.slice(0).col(j).head(r), cur2.slice(1).col(j).head(r));
      if (!pd.ok) continue;
      terms.push_back({pad_vec(pd.w, n), unit_vec(n, j), pair_c(pd.c0, pd.c1, 0, 1, 3)});
    }
    for (int i = r; i < n; ++i) {
      const PairDirection pd =
          dependent_direction(cur2.slice(0).row(i).head(r).transpose(),
                              cur2.slice(1).row(i).head(r).transpose());
      if (!pd.ok) continue;
      terms.push_back({unit_vec(n, i), pad_vec(pd.w, n), pair_c(pd.c0, pd.c1, 0, 1, 3)});
    }

    Tensor3 core;
    core.field = field;
    core.slices = {cur2.slice(0).topLeftCorner(r, r), cur2.slice(1).topLeftCorner(r, r),
                   cur2.slice(2).topLeftCorner(r, r)};
    core.slices[0].col(j0).setZero();  // eliminator residual dust

    std::vector<std::string> chain = {"square3", "unipotent-core"};
    if (!core.is_zero()) {
      Decomposition sub;
      if (max_abs(core.slice(0)) <= tol.support_tol * core.max_abs()) {
        core.slices[0].setZero();
        Tensor3 p2;
        p2.field = field;
        p2.slices = {core.slice(1), core.slice(2)};
        sub = decompose_general_p(p2, tol, mix_seed(seed, 0x47));
        for (RankOneTerm& term : sub.terms) term.c = pair_c(term.c(0), term.c(1), 1, 2, 3);
      } else {
        sub = decompose_square_3(core, tol, mix_seed(seed, 0x48 + attempt),
                                 std::optional<Vec>(unit_vec(3, 0)));
      }
      if (int(sub.terms.size()) > 2 * r - 1)
        throw std::runtime_error("square3: core recursion exceeded its budget");
      for (RankOneTerm& term : sub.terms) {
        term.a = pad_vec(term.a, n);
        term.b = pad_vec(term.b, n);
        terms.push_back(std::move(term));
      }
      chain = chain_with(std::move(chain), sub.method);
    }
    return wrap(std::move(terms), std::move(chain));
  }
}

std::optional<Vec> singular_diagonal_offset(const Mat& bq, const Tolerances& tol) {
  const int n = int(bq.rows());
  const double scale = std::max(1.0, max_abs(bq));
  for (int k = 0; k <= 4 * n; ++k) {
    Vec d = Vec::Zero(n);
    for (int i = 0; i + 1 < n; ++i) d(i) = Cx(k * scale * double(i + 1) / double(n), 0.0);
    const Mat m0 = bq - Mat(d.asDiagonal());
    Cx det_lead(1.0, 0.0);
    if (n > 1) {
      const Mat lead = m0.topLeftCorner(n - 1, n - 1);
      if (numerical_rank(lead, tol) < n - 1) continue;
      det_lead = Eigen::PartialPivLU<Mat>(lead).determinant();
    }
    const Cx det_full = Eigen::PartialPivLU<Mat>(m0).determinant();
    // det is affine in the corner entry; this offset zeroes it exactly.
    d(n - 1) = det_full / det_lead;
    if (numerical_rank(bq - Mat(d.asDiagonal()), tol) <= n - 1) return d;
  }
  return std::nullopt;
}

int gp_bound_value(int n, int m, int p) {
  if (p == 1) return n;
  if (p % 2 == 1) return n + m * (p - 1) / 2;
  if (m == n) return n * (p + 2) / 2 - 1;
  return 2 * n + m * (p - 2) / 2;
}

Decomposition nonsquare_attempt(const Tensor3& t, const Tolerances& tol, std::uint64_t seed,
                                int attempt);

}  // namespace

Decomposition decompose_trivial(const Tensor3& t, const Tolerances& tol) {
  t.check();
  const int m = t.rows(), n = t.cols(), p = t.depth();
  Decomposition out;
  out.m = m;
  out.n = n;
  out.p = p;
  out.field = t.field;
  out.method = {"trivial"};
  const int mn = m * n, mp = m * p, np = n * p;
  out.claimed_bound = std::min({mn, mp, np});
  if (mn <= mp && mn <= np) {
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j) {
        Vec c(p);
        for (int k = 0; k < p; ++k) c(k) = t.slice(k)(i, j);
        if (c.norm() == 0.0) continue;
        out.terms.push_back({unit_vec(m, i), unit_vec(n, j), std::move(c)});
      }
  } else if (mp <= np) {
    for (int i = 0; i < m; ++i)
      for (int k = 0; k < p; ++k) {
        const Vec b = t.slice(k).row(i).transpose();
        if (b.norm() == 0.0) continue;
        out.terms.push_back({unit_vec(m, i), b, unit_vec(p, k)});
      }
  } else {
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < p; ++k) {
        const Vec a = t.slice(k).col(j);
        if (a.norm() == 0.0) continue;
        out.terms.push_back({a, unit_vec(n, j), unit_vec(p, k)});
      }
  }
  return finalize(std::move(out), t, tol);
}

Decomposition decompose_diagonal_tensor(const Tensor3& t, const Tolerances& tol) {
  const int m = t.rows(), n = t.cols(), p = t.depth();
  for (const Mat& s : t.slices)
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j)
        if (i != j && s(i, j) != Cx(0.0, 0.0))
          throw PreconditionError("decompose_diagonal_tensor: slices must be exactly diagonal");
  Decomposition out;
  out.m = m;
  out.n = n;
  out.p = p;
  out.field = t.field;
  out.claimed_bound = std::min(m, n);
  out.method = {"diagonal"};
  for (int i = 0; i < std::min(m, n); ++i) {
    Vec c(p);
    for (int k = 0; k < p; ++k) c(k) = t.slice(k)(i, i);
    if (c.norm() == 0.0) continue;
    out.terms.push_back({unit_vec(m, i), unit_vec(n, i), std::move(c)});
  }
  return finalize(std::move(out), t, tol);
}

Decomposition decompose_pencil_tail(const Mat& x, const Mat& u, const Mat& y, const Mat& v,
                                    Field field, const Tolerances& tol) {
  const int n = int(x.rows());
  if (x.cols() != n || y.rows() != n || y.cols() != n)
    throw PreconditionError("decompose_pencil_tail: head matrices must be square and equal size");
  const int s = int(u.cols());
  if (u.rows() != n || v.rows() != n || v.cols() != s)
    throw PreconditionError("decompose_pencil_tail: tail blocks must be n x s");
  if (numerical_rank(x, tol) < n)
    throw PreconditionError("decompose_pencil_tail: head of the first slice is singular");

  const Eigen::PartialPivLU<Mat> xlu(x);
  const Mat smat = xlu.solve(y);
  const auto [evs, q] = eigen_decomposition(smat, field, tol);
  double margin = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) margin = std::min(margin, std::abs(evs(i) - evs(j)));
  if (!(margin > tol.margin_tol))
    throw PreconditionError("decompose_pencil_tail: pencil spectrum not distinct");
  if (numerical_rank(q, tol) < n)
    throw PreconditionError("decompose_pencil_tail: eigenbasis is numerically singular");

  const Eigen::PartialPivLU<Mat> qlu(q);
  const Mat qinv = qlu.solve(Mat::Identity(n, n));
  const Mat uprime = qlu.solve(xlu.solve(u));
  const Mat vprime = qlu.solve(xlu.solve(v));

  // An integer at distance > margin_tol from every eigenvalue always exists
  // within the first n+2 candidates (each eigenvalue blocks at most one).
  Cx beta(0.0, 0.0);
  for (int k = 0;; ++k) {
    if (k > n + 2)
      throw PreconditionError("decompose_pencil_tail: no admissible beta found");
    bool clear = true;
    for (int i = 0; i < n; ++i)
      if (std::abs(Cx(double(k), 0.0) - evs(i)) <= tol.margin_tol) {
        clear = false;
        break;
      }
    if (clear) {
      beta = Cx(double(k), 0.0);
      break;
    }
  }

  Mat z(n, s);
  for (int i = 0; i < n; ++i)
    for (int tcol = 0; tcol < s; ++tcol)
      z(i, tcol) = (vprime(i, tcol) - evs(i) * uprime(i, tcol)) / (beta - evs(i));
  const Mat wmat = uprime - z;
  const Mat xq = x * q;

  Decomposition out;
  out.m = n;
  out.n = n + s;
  out.p = 2;
  out.field = field;
  out.claimed_bound = n + s;
  out.method = {"pencil-tail"};
  for (int i = 0; i < n; ++i) {
    Vec b(n + s);
    for (int k = 0; k < n; ++k) b(k) = qinv(i, k);
    for (int tcol = 0; tcol < s; ++tcol) b(n + tcol) = wmat(i, tcol);
    Vec c(2);
    c << Cx(1.0, 0.0), evs(i);
    out.terms.push_back({xq.col(i), std::move(b), std::move(c)});
  }
  for (int tcol = 0; tcol < s; ++tcol) {
    const Vec a = xq * z.col(tcol);
    if (a.norm() == 0.0) continue;
    Vec c(2);
    c << Cx(1.0, 0.0), beta;
    out.terms.push_back({a, unit_vec(n + s, n + tcol), std::move(c)});
  }

  Tensor3 ref;
  ref.field = field;
  ref.slices.assign(2, Mat::Zero(n, n + s));
  ref.slices[0].leftCols(n) = x;
  ref.slices[0].rightCols(s) = u;
  ref.slices[1].leftCols(n) = y;
  ref.slices[1].rightCols(s) = v;
  return finalize(std::move(out), ref, tol);
}

Decomposition eliminate_anchored_columns(const Mat& a1, const Mat& a2,
                                         const std::vector<std::pair<int, Vec>>& anchors,
                                         Field field, const Tolerances& tol) {
  const int m = int(a1.rows()), n = int(a1.cols());
  if (a2.rows() != m || a2.cols() != n)
    throw PreconditionError("eliminate_anchored_columns: slice dimensions differ");
  if (m >= n) throw PreconditionError("eliminate_anchored_columns: needs m < n");
  if (anchors.empty()) throw PreconditionError("eliminate_anchored_columns: no anchors");

  std::vector<std::pair<int, Vec>> sorted = anchors;
  std::sort(sorted.begin(), sorted.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  const double scale = std::max(max_abs(a1), max_abs(a2));
  std::vector<bool> anchored(size_t(n), false);
  for (const auto& [j, pvec] : sorted) {
    if (j < m || j >= n) throw PreconditionError("eliminate_anchored_columns: anchor column");
    if (anchored[size_t(j)])
      throw PreconditionError("eliminate_anchored_columns: repeated anchor column");
    anchored[size_t(j)] = true;
    if (int(pvec.size()) != m)
      throw PreconditionError("eliminate_anchored_columns: anchor vector size");
    if ((a1.leftCols(m) * pvec - a1.col(j)).norm() > 1e-6 * std::max(1.0, scale) ||
        (a2.leftCols(m) * pvec - a2.col(j)).norm() > 1e-6 * std::max(1.0, scale))
      throw PreconditionError("eliminate_anchored_columns: anchor identity does not hold");
  }
  const int s = int(sorted.size());

  // B_i = A_i V with V adding -p_t into column j_t: the anchored columns
  // vanish, every other column is untouched, and V^{-1} is exact.
  Mat b1 = a1, b2 = a2;
  for (const auto& [j, pvec] : sorted) {
    b1.col(j) -= a1.leftCols(m) * pvec;
    b2.col(j) -= a2.leftCols(m) * pvec;
    b1.col(j).setZero();  // residual dust from the verified identity
    b2.col(j).setZero();
  }

  std::vector<int> tail_cols;
  for (int j = m; j < n; ++j)
    if (!anchored[size_t(j)]) tail_cols.push_back(j);
  Mat u(m, int(tail_cols.size())), v(m, int(tail_cols.size()));
  for (size_t k = 0; k < tail_cols.size(); ++k) {
    u.col(Eigen::Index(k)) = b1.col(tail_cols[k]);
    v.col(Eigen::Index(k)) = b2.col(tail_cols[k]);
  }

  Decomposition pt = decompose_pencil_tail(b1.leftCols(m), u, b2.leftCols(m), v, field, tol);

  Decomposition out;
  out.m = m;
  out.n = n;
  out.p = 2;
  out.field = field;
  out.claimed_bound = n - s;
  out.method = {"anchored-elim"};
  out.method.insert(out.method.end(), pt.method.begin(), pt.method.end());
  for (RankOneTerm& term : pt.terms) {
    Vec b = Vec::Zero(n);
    b.head(m) = term.b.head(m);
    for (size_t k = 0; k < tail_cols.size(); ++k) b(tail_cols[k]) = term.b(m + Eigen::Index(k));
    // pull the unipotent back: column j regains p^T applied to the head block
    for (const auto& [j, pvec] : sorted) b(j) += (pvec.transpose() * b.head(m))(0);
    term.b = std::move(b);
    out.terms.push_back(std::move(term));
  }

  Tensor3 ref;
  ref.field = field;
  ref.slices = {a1, a2};
  return finalize(std::move(out), ref, tol);
}

Mat conjugate_to_cross_ratio(const Mat& a, const Mat& b, Field field, const Tolerances& tol,
                             std::uint64_t seed) {
  const int n = int(a.rows());
  if (a.cols() != n || b.rows() != n || b.cols() != n)
    throw PreconditionError("conjugate_to_cross_ratio: matching square matrices required");
  if (n < 3) throw PreconditionError("conjugate_to_cross_ratio: needs n >= 3");
  {
    const SupportPattern sa = support(a, tol), sb = support(b, tol);
    if (sa.contains(n - 1, n - 1) || sb.contains(n - 1, n - 1))
      throw PreconditionError("conjugate_to_cross_ratio: corner cell must be outside support");
  }
  const double cut_a = tol.support_tol * max_abs(a);
  if (a.col(n - 1).head(n - 1).cwiseAbs().maxCoeff() <= cut_a ||
      a.row(n - 1).head(n - 1).cwiseAbs().maxCoeff() <= cut_a)
    throw PreconditionError("conjugate_to_cross_ratio: last row/column of the first head is zero");

  // Column-side worker; the row side is this worker on the transposes.
  const auto column_case = [&](const Mat& ca, const Mat& cb,
                               std::uint64_t s2) -> std::optional<Mat> {
    const Vec a1 = ca.col(n - 1).head(n - 1), a2 = cb.col(n - 1).head(n - 1);
    const Vec b1 = ca.row(n - 1).head(n - 1).transpose();
    const Vec b2 = cb.row(n - 1).head(n - 1).transpose();
    {
      Mat w(n - 1, 2);
      w.col(0) = a1;
      w.col(1) = a2;
      Eigen::JacobiSVD<Mat> svd(w);
      const auto& sv = svd.singularValues();
      if (!(sv.size() >= 2 && sv(0) > 0.0 && sv(1) > tol.support_tol * sv(0)))
        return std::nullopt;
    }
    GenericityRequest req;
    req.nonzero_vectors = {a1};
    req.nonzero_covectors = {b1};
    req.independent_pairs = {{a1, a2}};
    const Mat p1 = randomize_nonvanishing(n - 1, req, field, tol, s2);

    const Vec pa1 = p1 * a1, pa2 = p1 * a2;
    Mat p1t = p1.transpose();
    const Eigen::PartialPivLU<Mat> p1tlu(p1t);
    const Vec rb1 = p1tlu.solve(b1), rb2 = p1tlu.solve(b2);
    const Cx r2 = rb2(n - 2) / rb1(n - 2);
    if (std::abs(pa2(n - 2) / pa1(n - 2) - r2) > tol.margin_tol) return p1;

    // Shear in the bottom rows until the column-side ratio moves; the
    // nonvanishing 2x2 minor of (P a1, P a2) makes it move with t.
    const Cx y0 = pa1(n - 3), y1 = pa1(n - 2), z0 = pa2(n - 3), z1 = pa2(n - 2);
    const double shear_cut = tol.support_tol * std::max(std::abs(y0), std::abs(y1));
    for (int step = 1; step <= 16; ++step)
      for (const double tval : {double(step), -double(step)}) {
        const Cx denom = y1 + tval * y0;
        if (!(std::abs(denom) > shear_cut)) continue;
        if (!(std::abs((z1 + tval * z0) / denom - r2) > tol.margin_tol)) continue;
        Mat shear = Mat::Identity(n - 1, n - 1);
        shear(n - 2, n - 3) = Cx(tval, 0.0);
        return Mat(shear * p1);
      }
    throw GenericityExhausted("conjugate_to_cross_ratio: shear scan found no ratio split");
  };

  for (int att = 0; att < 4; ++att) {
    const std::uint64_t s2 = mix_seed(seed, 0xCC00 + att);
    try {
      std::optional<Mat> p = column_case(a, b, s2);
      if (!p) {
        const Mat at = a.transpose(), bt = b.transpose();
        if (const auto pt = column_case(at, bt, mix_seed(s2, 1)))
          p = Mat(pt->inverse().transpose());
      }
      if (!p) {
        // Both head pairs are scalar multiples; the two scalars must differ,
        // after which any nonvanishing change of basis exposes the condition.
        const Vec a1 = a.col(n - 1).head(n - 1), a2 = b.col(n - 1).head(n - 1);
        const Vec b1 = a.row(n - 1).head(n - 1).transpose();
        const Vec b2 = b.row(n - 1).head(n - 1).transpose();
        const Cx ca = a1.dot(a2) / a1.squaredNorm();
        const Cx cb = b1.dot(b2) / b1.squaredNorm();
        if (!(std::abs(ca - cb) > tol.margin_tol))
          throw PreconditionError(
              "conjugate_to_cross_ratio: degenerate pair with equal ratios");
        GenericityRequest req;
        req.nonzero_vectors = {a1};
        req.nonzero_covectors = {b1};
        p = randomize_nonvanishing(n - 1, req, field, tol, s2);
      }
      const Mat full = block_identity_embed(*p, n);
      const Mat fullinv = block_identity_embed(p->inverse(), n);
      if (cross_ratio_applicable(full * a * fullinv, full * b * fullinv, tol)) return *p;
    } catch (const PreconditionError&) {
      throw;
    } catch (const std::exception&) {
      // resample
    }
  }
  throw GenericityExhausted("conjugate_to_cross_ratio: no admissible conjugation found");
}

Decomposition decompose_zero_corner(const Tensor3& t, const Tolerances& tol, std::uint64_t seed) {
  const int m = t.rows(), n = t.cols();
  if (t.depth() != 3) throw PreconditionError("decompose_zero_corner: three slices required");
  if (m > n) throw PreconditionError("decompose_zero_corner: needs m <= n");
  const Field field = t.field;
  const double scale = t.max_abs();

  Tensor3 cur = t;
  Mat& a3 = cur.slice(2);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j && a3(i, j) != Cx(0.0, 0.0))
        throw PreconditionError("decompose_zero_corner: third slice must be exactly diagonal");
  if (std::abs(a3(m - 1, m - 1)) > tol.support_tol * scale)
    throw PreconditionError("decompose_zero_corner: corner of the third slice must vanish");
  a3(m - 1, m - 1) = Cx(0.0, 0.0);

  std::vector<int> preserved;
  std::string variant;
  if (support(cur.slice(0).leftCols(m), tol).contains(m - 1, m - 1)) {
    preserved = {m - 1};
    variant = "zero-corner(corner)";
  } else {
    // Exact zeros in the head corners make the preserved 2x2 pencil's roots
    // exactly the two cross ratios.
    for (int s = 0; s < 2; ++s)
      if (std::abs(cur.slice(s)(m - 1, m - 1)) <= tol.support_tol * max_abs(cur.slice(s)))
        cur.slice(s)(m - 1, m - 1) = Cx(0.0, 0.0);
    if (!cross_ratio_applicable(cur.slice(0).leftCols(m), cur.slice(1).leftCols(m), tol))
      throw PreconditionError(
          "decompose_zero_corner: head pair admits neither corner variant");
    preserved = {m - 2, m - 1};
    variant = "zero-corner(cross-ratio)";
  }

  const Mat h1 = cur.slice(0).leftCols(m), h2 = cur.slice(1).leftCols(m);
  std::string last;
  for (int attempt = 0; attempt < 3; ++attempt) {
    try {
      const DiagonalPerturbation dp = perturb_to_distinct(h1, h2, preserved, field, tol, attempt);
      Decomposition pt =
          decompose_pencil_tail(h1 + Mat(dp.x.asDiagonal()), cur.slice(0).rightCols(n - m),
                                h2 + Mat(dp.y.asDiagonal()), cur.slice(1).rightCols(n - m),
                                field, tol);

      Decomposition out;
      out.m = m;
      out.n = n;
      out.p = 3;
      out.field = field;
      out.claimed_bound = m + n - 1;
      out.method = {variant};
      out.method.insert(out.method.end(), pt.method.begin(), pt.method.end());
      out.method.push_back("diagonal");
      out.seed = seed;
      for (RankOneTerm& term : pt.terms) {
        term.c = pair_c(term.c(0), term.c(1), 0, 1, 3);
        out.terms.push_back(std::move(term));
      }

      Tensor3 residue;
      residue.field = field;
      residue.slices = {pad_diag(-dp.x, m, n), pad_diag(-dp.y, m, n), a3};
      Decomposition diag = decompose_diagonal_tensor(residue, tol);
      if (int(diag.terms.size()) > m - 1)
        throw std::runtime_error("zero-corner: diagonal residue kept its corner fiber");
      for (RankOneTerm& term : diag.terms) out.terms.push_back(std::move(term));

      return finalize(std::move(out), t, tol);
    } catch (const std::exception& e) {
      last = e.what();
    }
  }
  throw std::runtime_error("zero-corner split failed: " + last);
}

Decomposition decompose_square_3(const Tensor3& t, const Tolerances& tol, std::uint64_t seed,
                                 const std::optional<Vec>& singular_hint) {
  if (t.depth() != 3) throw PreconditionError("decompose_square_3: three slices required");
  const int n = t.rows();
  if (t.cols() != n) throw PreconditionError("decompose_square_3: square slices required");
  const Field field = t.field;

  Decomposition out;
  out.m = out.n = n;
  out.p = 3;
  out.field = field;
  out.seed = seed;
  if (t.is_zero()) {
    out.claimed_bound = 0;
    out.method = {"square3", "zero"};
    return finalize(std::move(out), t, tol);
  }
  if (n == 1) {
    Vec c(3);
    for (int k = 0; k < 3; ++k) c(k) = t.slice(k)(0, 0);
    out.terms.push_back({unit_vec(1, 0), unit_vec(1, 0), std::move(c)});
    out.claimed_bound = 1;
    out.method = {"square3", "fiber"};
    return finalize(std::move(out), t, tol);
  }
  if (n == 2) {
    Decomposition sub = base_2x2(t, tol);
    sub.method.insert(sub.method.begin(), "square3");
    sub.seed = seed;
    return sub;
  }

  std::vector<Vec> combos;
  if (singular_hint) {
    if (int(singular_hint->size()) != 3)
      throw PreconditionError("decompose_square_3: hint must have three coefficients");
    combos.push_back(*singular_hint / singular_hint->norm());
  } else {
    combos = singular_combinations(t, tol, 64, mix_seed(seed, 0x539), 4);
  }
  if (combos.empty())
    throw NoSingularMember("square3: no singular member found in the slice span");

  std::string last;
  for (size_t ci = 0; ci < combos.size(); ++ci)
    for (int att = 0; att < 3; ++att) {
      try {
        return try_square_combo(t, combos[ci], tol, mix_seed(seed, 0x1000 + ci * 8 + att), att);
      } catch (const std::exception& e) {
        last = e.what();
      }
    }
  throw std::runtime_error("square3: constructions failed: " + last);
}

namespace {

Decomposition nonsquare_attempt(const Tensor3& t, const Tolerances& tol, std::uint64_t seed,
                                int attempt) {
  const int m = t.rows(), n = t.cols();
  const Field field = t.field;
  TransformLog log;

  const auto wrap = [&](std::vector<RankOneTerm> terms, std::vector<std::string> chain) {
    log.pull_back(terms);
    Decomposition out;
    out.m = m;
    out.n = n;
    out.p = 3;
    out.field = field;
    out.terms = std::move(terms);
    out.claimed_bound = m + n - 1;
    out.method = std::move(chain);
    out.seed = seed;
    return finalize(std::move(out), t, tol);
  };
  const auto chain_with = [](std::vector<std::string> head, const std::vector<std::string>& tail) {
    head.insert(head.end(), tail.begin(), tail.end());
    return head;
  };

  Tensor3 cur = t;
  int r = 0;
  // The slice-span rank r is estimated, the best member rotated into the last
  // slot and normal-formed; support beyond r in the head slices flags an
  // underestimate, in which case the last slice is steered along slice 0 and
  // the round repeats with a strictly larger r.
  for (int round = 0;; ++round) {
    if (round > m + 2)
      throw std::runtime_error("nonsquare3: slice-span rank estimation did not stabilize");
    int best_r = -1;
    Vec best_c;
    const auto consider = [&](const Vec& c) {
      Mat s = Mat::Zero(m, n);
      for (int k = 0; k < 3; ++k) s += c(k) * cur.slice(k);
      const int rr = numerical_rank(s, tol);
      if (rr > best_r) {
        best_r = rr;
        best_c = c;
      }
    };
    for (int k = 0; k < 3; ++k) consider(unit_vec(3, k));
    for (int i = 0; i < 3; ++i)
      for (int j = i + 1; j < 3; ++j) consider(unit_vec(3, i) + unit_vec(3, j));
    std::mt19937_64 rng(mix_seed(seed, 0xC0B0 + round));
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (int it = 0; it < 64; ++it) {
      Vec c(3);
      for (int k = 0; k < 3; ++k)
        c(k) = Cx(dist(rng), field == Field::Complex ? dist(rng) : 0.0);
      consider(c);
    }

    int kmax = 0;
    for (int k = 1; k < 3; ++k)
      if (std::abs(best_c(k)) > std::abs(best_c(kmax))) kmax = k;
    Mat mixm = Mat::Zero(3, 3);
    int rowi = 0;
    for (int k = 0; k < 3; ++k)
      if (k != kmax) mixm(rowi++, k) = Cx(1.0, 0.0);
    mixm.row(2) = best_c.transpose();
    cur = mix_slices(cur, mixm);
    log.push_mix(mixm.inverse());

    const NormalFormResult nf = normal_form_slice(cur, 2, tol);
    r = nf.rank;
    cur = nf.tensor;
    log.push_equiv(nf.transform.left_inv, nf.transform.right_inv);
    if (r == m) break;

    double beyond = 0.0;
    for (int s = 0; s < 2; ++s)
      for (int i = r; i < m; ++i)
        for (int j = r; j < n; ++j) beyond = std::max(beyond, std::abs(cur.slice(s)(i, j)));
    if (beyond <= tol.support_tol * cur.max_abs()) break;

    bool bumped = false;
    for (int step = 1; step <= 16 && !bumped; ++step)
      for (const double tv : {double(step), -double(step)}) {
        if (numerical_rank(cur.slice(2) + tv * cur.slice(0), tol) > r) {
          Mat m3 = Mat::Identity(3, 3), m3i = Mat::Identity(3, 3);
          m3(2, 0) = Cx(tv, 0.0);
          m3i(2, 0) = Cx(-tv, 0.0);
          cur = mix_slices(cur, m3);
          log.push_mix(m3i);
          bumped = true;
          break;
        }
      }
    if (!bumped) {
      if (beyond <= 1e3 * tol.support_tol * cur.max_abs()) break;  // borderline dust
      throw std::runtime_error("nonsquare3: support beyond r resisted re-estimation");
    }
  }

  const double scale = cur.max_abs();
  if (max_abs(cur.slice(0)) <= tol.support_tol * scale) {
    Mat sw = Mat::Zero(3, 3);
    sw(0, 1) = sw(1, 0) = sw(2, 2) = Cx(1.0, 0.0);
    cur = mix_slices(cur, sw);
    log.push_mix(sw);
  }
  if (max_abs(cur.slice(0)) <= tol.support_tol * scale) {
    std::vector<RankOneTerm> terms;
    for (int i = 0; i < r; ++i) terms.push_back({unit_vec(m, i), unit_vec(n, i), unit_vec(3, 2)});
    return wrap(std::move(terms), {"nonsquare3", "matrix-slice"});
  }

  {
    const auto [tv, merged] = generic_support_merge(cur.slice(0), cur.slice(1), tol);
    cur.slice(0) = merged;
    Mat m2inv = Mat::Identity(3, 3);
    m2inv(0, 1) = Cx(-tv, 0.0);
    log.push_mix(m2inv);
  }
  for (int s = 0; s < 2; ++s) cur.slice(s).block(r, r, m - r, n - r).setZero();

  // Branch: a tail column with no support -> delete it and recurse.
  {
    const SupportPattern s0 = support(cur.slice(0), tol), s1 = support(cur.slice(1), tol);
    for (int j = m; j < n; ++j)
      if (!line_in_support(s0, j, true) && !line_in_support(s1, j, true)) {
        for (int s = 0; s < 2; ++s) cur.slice(s).col(j).setZero();
        const Tensor3 red = drop_column(cur, j);
        Decomposition sub;
        if (m < n - 1) {
          sub = decompose_nonsquare_3(red, tol, mix_seed(seed, 0x51));
        } else {
          try {
            std::optional<Vec> hint;
            if (r < m) hint = unit_vec(3, 2);
            sub = decompose_square_3(red, tol, mix_seed(seed, 0x52), hint);
          } catch (const NoSingularMember&) {
            sub = decompose_general_p(red, tol, mix_seed(seed, 0x53));
          }
        }
        for (RankOneTerm& term : sub.terms) term.b = insert_zero(term.b, j);
        return wrap(std::move(sub.terms), chain_with({"nonsquare3", "column-split"}, sub.method));
      }
  }

  // Tail pair survey over the full columns beyond m.
  int jstar = -1;
  for (int j = m; j < n && jstar < 0; ++j) {
    Mat w(m, 2);
    w.col(0) = cur.slice(0).col(j);
    w.col(1) = cur.slice(1).col(j);
    Eigen::JacobiSVD<Mat> svd(w);
    const auto& sv = svd.singularValues();
    if (sv.size() >= 2 && sv(0) > 0.0 && sv(1) > tol.support_tol * sv(0)) jstar = j;
  }

  if (jstar < 0) {
    // Every tail pair is dependent: zero one head column with a unipotent
    // operation, split the tail into single-column terms, recurse on the
    // m x m x 3 core (its first slice now has a zero column).
    const Mat melim = cur.slice(0).leftCols(m + 1);
    const auto [v, j0] = unipotent_column_eliminator(melim, tol);
    if (j0 >= m) throw std::runtime_error("nonsquare3: eliminator fell on the tail column");
    Mat vinv = Mat::Identity(m + 1, m + 1);
    vinv.col(j0) = 2.0 * unit_vec(m + 1, j0) - v.col(j0);
    const Mat w = block_identity_embed(v, n);
    const Mat winv = block_identity_embed(vinv, n);
    Tensor3 cur2;
    cur2.field = field;
    cur2.slices = {cur.slice(0) * w, cur.slice(1) * w, cur.slice(2) * w};
    log.push_equiv(Mat::Identity(m, m), winv);

    std::vector<RankOneTerm> terms;
    for (int j = m; j < n; ++j) {
      const PairDirection pd = dependent_direction(cur2.slice(0).col(j), cur2.slice(1).col(j));
      if (!pd.ok) continue;
      terms.push_back({pd.w, unit_vec(n, j), pair_c(pd.c0, pd.c1, 0, 1, 3)});
    }

    Tensor3 core;
    core.field = field;
    core.slices = {cur2.slice(0).leftCols(m), cur2.slice(1).leftCols(m),
                   cur2.slice(2).leftCols(m)};
    core.slices[0].col(j0).setZero();

    std::vector<std::string> chain = {"nonsquare3", "unipotent-core"};
    if (!core.is_zero()) {
      Decomposition sub;
      if (max_abs(core.slice(0)) <= tol.support_tol * core.max_abs()) {
        core.slices[0].setZero();
        Tensor3 p2;
        p2.field = field;
        p2.slices = {core.slice(1), core.slice(2)};
        sub = decompose_general_p(p2, tol, mix_seed(seed, 0x54));
        for (RankOneTerm& term : sub.terms) term.c = pair_c(term.c(0), term.c(1), 1, 2, 3);
      } else {
        sub = decompose_square_3(core, tol, mix_seed(seed, 0x55 + attempt),
                                 std::optional<Vec>(unit_vec(3, 0)));
      }
      if (int(sub.terms.size()) > 2 * m - 1)
        throw std::runtime_error("nonsquare3: core recursion exceeded its budget");
      for (RankOneTerm& term : sub.terms) {
        term.b = pad_vec(term.b, n);
        terms.push_back(std::move(term));
      }
      chain = chain_with(std::move(chain), sub.method);
    }
    return wrap(std::move(terms), std::move(chain));
  }

  if (r == m) {
    // Full-rank diagonal slice: randomize so the independent tail pair has
    // all entries and 2x2 minors nonzero, then anchor that column exactly and
    // eliminate it; a diagonal residue finishes the count at m + n - 1.
    const Vec u1 = cur.slice(0).col(jstar), u2 = cur.slice(1).col(jstar);
    GenericityRequest req;
    req.nonzero_vectors = {u1};
    req.independent_pairs = {{u1, u2}};
    const Mat p = randomize_nonvanishing(m, req, field, tol, mix_seed(seed, 0x61 + attempt));
    const Mat pinv = p.inverse();
    const Mat right = block_identity_embed(pinv, n);
    const Mat rightinv = block_identity_embed(p, n);
    Tensor3 cur2;
    cur2.field = field;
    // The last slice (E_m | O) commutes with this pair exactly; keep it.
    cur2.slices = {p * cur.slice(0) * right, p * cur.slice(1) * right, cur.slice(2)};
    log.push_equiv(pinv, rightinv);

    const AnchoredPerturbation ap =
        perturb_with_anchor(cur2.slice(0).leftCols(m), cur2.slice(1).leftCols(m),
                            cur2.slice(0).col(jstar), cur2.slice(1).col(jstar), field, tol,
                            attempt);
    const Mat c1 = cur2.slice(0) + pad_diag(ap.x, m, n);
    const Mat c2 = cur2.slice(1) + pad_diag(ap.y, m, n);
    Decomposition el = eliminate_anchored_columns(c1, c2, {{jstar, ap.p}}, field, tol);

    std::vector<RankOneTerm> terms;
    for (RankOneTerm& term : el.terms) {
      term.c = pair_c(term.c(0), term.c(1), 0, 1, 3);
      terms.push_back(std::move(term));
    }
    Tensor3 residue;
    residue.field = field;
    residue.slices = {pad_diag(-ap.x, m, n), pad_diag(-ap.y, m, n), cur2.slice(2)};
    Decomposition diag = decompose_diagonal_tensor(residue, tol);
    for (RankOneTerm& term : diag.terms) terms.push_back(std::move(term));
    return wrap(std::move(terms), chain_with(chain_with({"nonsquare3"}, el.method), {"diagonal"}));
  }

  // r < m with an independent tail pair.
  {
    const SupportPattern s0 = support(cur.slice(0), tol), s1 = support(cur.slice(1), tol);
    for (int i = r; i < m; ++i)
      if (!line_in_support(s0, i, false) && !line_in_support(s1, i, false)) {
        for (int s = 0; s < 2; ++s) cur.slice(s).row(i).setZero();
        Decomposition sub = decompose_nonsquare_3(drop_row(cur, i), tol, mix_seed(seed, 0x71));
        for (RankOneTerm& term : sub.terms) term.a = insert_zero(term.a, i);
        return wrap(std::move(sub.terms), chain_with({"nonsquare3", "row-split"}, sub.method));
      }
  }
  {
    const EquivalenceTransform eq = swap_equivalence(m, n, {}, {{r, jstar}});
    cur = apply_equivalence(cur, eq);
    log.push_equiv(eq.left_inv, eq.right_inv);

    const Mat h0 = cur.slice(0).topLeftCorner(r + 1, r + 1);
    const Mat h1 = cur.slice(1).topLeftCorner(r + 1, r + 1);
    const Mat p = conjugate_to_cross_ratio(h0, h1, field, tol, mix_seed(seed, 0x72 + attempt));
    const Mat pinv = p.inverse();
    const Mat left = block_identity_embed(p, m);
    const Mat leftinv = block_identity_embed(pinv, m);
    const Mat right = block_identity_embed(pinv, n);
    const Mat rightinv = block_identity_embed(p, n);
    Tensor3 conj;
    conj.field = field;
    conj.slices = {left * cur.slice(0) * right, left * cur.slice(1) * right, cur.slice(2)};
    log.push_equiv(leftinv, rightinv);

    std::vector<std::pair<int, int>> swaps;
    if (r != m - 1) swaps.emplace_back(r, m - 1);
    if (r - 1 != m - 2) swaps.emplace_back(r - 1, m - 2);
    if (!swaps.empty()) {
      const EquivalenceTransform eq2 = swap_equivalence(m, n, swaps, swaps);
      conj = apply_equivalence(conj, eq2);
      log.push_equiv(eq2.left_inv, eq2.right_inv);
    }
    Decomposition zc = decompose_zero_corner(conj, tol, mix_seed(seed, 0x73));
    return wrap(std::move(zc.terms),
                chain_with({"nonsquare3", "cross-ratio-corner"}, zc.method));
  }
}

}  // namespace

Decomposition decompose_nonsquare_3(const Tensor3& t, const Tolerances& tol, std::uint64_t seed) {
  if (t.depth() != 3) throw PreconditionError("decompose_nonsquare_3: three slices required");
  if (t.rows() == t.cols())
    throw PreconditionError("decompose_nonsquare_3: slices must be rectangular");
  if (t.rows() > t.cols()) {
    Decomposition sub = decompose_nonsquare_3(transpose_tensor(t), tol, seed);
    for (RankOneTerm& term : sub.terms) std::swap(term.a, term.b);
    sub.m = t.rows();
    sub.n = t.cols();
    return finalize(std::move(sub), t, tol);
  }

  Decomposition out;
  out.m = t.rows();
  out.n = t.cols();
  out.p = 3;
  out.field = t.field;
  out.seed = seed;
  if (t.is_zero()) {
    out.claimed_bound = 0;
    out.method = {"nonsquare3", "zero"};
    return finalize(std::move(out), t, tol);
  }

  std::string last;
  for (int attempt = 0; attempt < 3; ++attempt) {
    try {
      return nonsquare_attempt(t, tol, mix_seed(seed, 0xA11CE + attempt), attempt);
    } catch (const std::exception& e) {
      last = e.what();
    }
  }
  throw std::runtime_error("nonsquare3: attempts exhausted: " + last);
}

Decomposition decompose_general_p(const Tensor3& t, const Tolerances& tol, std::uint64_t seed) {
  if (t.rows() > t.cols()) {
    Decomposition sub = decompose_general_p(transpose_tensor(t), tol, seed);
    for (RankOneTerm& term : sub.terms) std::swap(term.a, term.b);
    sub.m = t.rows();
    sub.n = t.cols();
    return finalize(std::move(sub), t, tol);
  }
  const int n = t.rows(), m = t.cols(), p = t.depth();
  const Field field = t.field;

  Decomposition out;
  out.m = n;
  out.n = m;
  out.p = p;
  out.field = field;
  out.seed = seed;
  if (t.is_zero()) {
    out.claimed_bound = 0;
    out.method = {"general-p", "zero"};
    return finalize(std::move(out), t, tol);
  }
  if (p == 1) {
    out.claimed_bound = n;
    out.method = {"general-p", "matrix-slice"};
    append_matrix_slice_terms(out.terms, t.slice(0), unit_vec(1, 0), field, tol);
    return finalize(std::move(out), t, tol);
  }

  TransformLog log;
  const NormalFormResult nf = normal_form_slice(t, p - 1, tol);
  const int r = nf.rank;
  Tensor3 cur = nf.tensor;
  log.push_equiv(nf.transform.left_inv, nf.transform.right_inv);

  std::vector<Vec> residue_diag(size_t(p), Vec::Zero(n));
  for (int i = 0; i < r; ++i) residue_diag[size_t(p - 1)](i) = Cx(1.0, 0.0);

  std::vector<RankOneTerm> terms;
  std::vector<std::string> chain = {"general-p"};
  const int paired_end = p % 2 == 0 ? p - 2 : p - 1;
  if (paired_end > 0) chain.push_back("pencil-tail");

  for (int i = 0; i < paired_end; i += 2) {
    bool done = false;
    std::string last;
    for (int att = 0; att < 3 && !done; ++att) {
      try {
        const DiagonalPerturbation dp = perturb_to_distinct(
            cur.slice(i).leftCols(n), cur.slice(i + 1).leftCols(n), {}, field, tol, att);
        Decomposition pt = decompose_pencil_tail(
            cur.slice(i).leftCols(n) + Mat(dp.x.asDiagonal()), cur.slice(i).rightCols(m - n),
            cur.slice(i + 1).leftCols(n) + Mat(dp.y.asDiagonal()),
            cur.slice(i + 1).rightCols(m - n), field, tol);
        for (RankOneTerm& term : pt.terms) {
          term.c = pair_c(term.c(0), term.c(1), i, i + 1, p);
          terms.push_back(std::move(term));
        }
        residue_diag[size_t(i)] = -dp.x;
        residue_diag[size_t(i + 1)] = -dp.y;
        done = true;
      } catch (const std::exception& e) {
        last = e.what();
      }
    }
    if (!done)
      throw std::runtime_error("general-p: slice pair " + std::to_string(i) + " failed: " + last);
  }

  bool refined = true;
  if (p % 2 == 0) {
    const int q = p - 2;
    chain.push_back("matrix-slice");
    if (m == n) {
      if (const std::optional<Vec> d = singular_diagonal_offset(cur.slice(q), tol)) {
        append_matrix_slice_terms(terms, cur.slice(q) - Mat(d->asDiagonal()), unit_vec(p, q),
                                  field, tol);
        residue_diag[size_t(q)] = *d;
      } else {
        refined = false;
        append_matrix_slice_terms(terms, cur.slice(q), unit_vec(p, q), field, tol);
      }
    } else {
      append_matrix_slice_terms(terms, cur.slice(q), unit_vec(p, q), field, tol);
    }
  }

  Tensor3 residue;
  residue.field = field;
  for (int k = 0; k < p; ++k) residue.slices.push_back(pad_diag(residue_diag[size_t(k)], n, m));
  Decomposition diag = decompose_diagonal_tensor(residue, tol);
  for (RankOneTerm& term : diag.terms) terms.push_back(std::move(term));
  chain.push_back("diagonal");

  log.pull_back(terms);
  out.terms = std::move(terms);
  out.method = std::move(chain);
  out.claimed_bound = p % 2 == 1 ? gp_bound_value(n, m, p)
                                 : (m == n && !refined ? n * (p + 2) / 2 : gp_bound_value(n, m, p));
  return finalize(std::move(out), t, tol);
}

namespace {

Decomposition unpermute_modes(Decomposition sub, const std::array<int, 3>& perm,
                              const Tensor3& orig) {
  for (RankOneTerm& term : sub.terms) {
    std::array<Vec, 3> comp;
    comp[size_t(perm[0])] = std::move(term.a);
    comp[size_t(perm[1])] = std::move(term.b);
    comp[size_t(perm[2])] = std::move(term.c);
    term.a = std::move(comp[0]);
    term.b = std::move(comp[1]);
    term.c = std::move(comp[2]);
  }
  sub.m = orig.rows();
  sub.n = orig.cols();
  sub.p = orig.depth();
  return sub;
}

}  // namespace

Decomposition decompose(const Tensor3& t, const Tolerances& tol, std::uint64_t seed,
                        const std::string& method) {
  t.check();
  if (method == "trivial") {
    Decomposition d = decompose_trivial(t, tol);
    d.seed = seed;
    return d;
  }
  if (method == "square3") {
    if (t.depth() != 3 || t.rows() != t.cols())
      throw PreconditionError("decompose: square3 needs an n x n x 3 tensor");
    return decompose_square_3(t, tol, seed);
  }
  if (method == "nonsquare3") {
    if (t.depth() != 3 || t.rows() == t.cols())
      throw PreconditionError("decompose: nonsquare3 needs an m x n x 3 tensor with m != n");
    return decompose_nonsquare_3(t, tol, seed);
  }
  if (method == "generalp") return decompose_general_p(t, tol, seed);
  if (method != "auto") throw PreconditionError("decompose: unknown method '" + method + "'");

  const int m = t.rows(), n = t.cols(), p = t.depth();
  if (t.is_zero()) {
    Decomposition d;
    d.m = m;
    d.n = n;
    d.p = p;
    d.field = t.field;
    d.claimed_bound = 0;
    d.method = {"zero"};
    d.seed = seed;
    d.tol = tol;
    return d;
  }

  // Exactly-zero slices carry nothing; decompose without them and re-embed.
  {
    std::vector<int> live;
    for (int k = 0; k < p; ++k)
      if (max_abs(t.slice(k)) != 0.0) live.push_back(k);
    if (int(live.size()) < p) {
      Tensor3 red;
      red.field = t.field;
      for (int k : live) red.slices.push_back(t.slice(k));
      Decomposition sub = decompose(red, tol, seed, "auto");
      for (RankOneTerm& term : sub.terms) {
        Vec c = Vec::Zero(p);
        for (size_t idx = 0; idx < live.size(); ++idx) c(live[idx]) = term.c(Eigen::Index(idx));
        term.c = std::move(c);
      }
      sub.p = p;
      sub.method.insert(sub.method.begin(), "drop-zero-slices");
      sub.seed = seed;
      return sub;
    }
  }

  std::vector<Decomposition> candidates;
  std::vector<std::string> errors;
  const auto consider = [&](const std::function<Decomposition()>& fn) {
    try {
      Decomposition d = fn();
      const CertificateReport rep = verify(t, d, tol);
      if (rep.verdict == Verdict::Certified)
        candidates.push_back(std::move(d));
      else
        errors.push_back(std::string("route rejected: ") + verdict_name(rep.verdict));
    } catch (const std::exception& e) {
      errors.push_back(e.what());
    }
  };

  consider([&] { return decompose_trivial(t, tol); });

  const int dims[3] = {m, n, p};
  for (int mode = 0; mode < 3; ++mode) {
    if (dims[mode] != 3) continue;
    std::array<int, 3> perm{};
    int w = 0;
    for (int x = 0; x < 3; ++x)
      if (x != mode) perm[size_t(w++)] = x;
    perm[2] = mode;
    consider([&, perm, mode] {
      const Tensor3 tp = permute_modes(t, perm);
      Decomposition sub =
          tp.rows() == tp.cols()
              ? decompose_square_3(tp, tol, mix_seed(seed, 0x3000 + mode))
              : decompose_nonsquare_3(tp, tol, mix_seed(seed, 0x3100 + mode));
      return unpermute_modes(std::move(sub), perm, t);
    });
  }

  {
    const std::array<std::array<int, 3>, 3> orients = {{{0, 1, 2}, {0, 2, 1}, {1, 2, 0}}};
    std::array<int, 3> best = orients[0];
    int bestv = std::numeric_limits<int>::max();
    for (const auto& perm : orients) {
      const int a = dims[perm[0]], b = dims[perm[1]], pp = dims[perm[2]];
      const int v = gp_bound_value(std::min(a, b), std::max(a, b), pp);
      if (v < bestv) {
        bestv = v;
        best = perm;
      }
    }
    consider([&, best] {
      const Tensor3 tp = permute_modes(t, best);
      Decomposition sub = decompose_general_p(tp, tol, mix_seed(seed, 0x3200));
      return unpermute_modes(std::move(sub), best, t);
    });
  }

  if (candidates.empty()) {
    std::string msg = "decompose: no route produced a certified result";
    for (const std::string& e : errors) msg += "; " + e;
    throw std::runtime_error(msg);
  }
  size_t besti = 0;
  for (size_t i = 1; i < candidates.size(); ++i)
    if (candidates[i].terms.size() < candidates[besti].terms.size()) besti = i;
  Decomposition out = std::move(candidates[besti]);
  out.seed = seed;
  return out;
}

}  // namespace tenrank
