#include "tenrank/selftest.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include <Eigen/LU>

#include "tenrank/bounds.hpp"
#include "tenrank/certify.hpp"
#include "tenrank/decompose.hpp"
#include "tenrank/perturb.hpp"
#include "tenrank/serialize.hpp"
#include "tenrank/spectrum.hpp"

namespace tenrank {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Check {
  bool ok = true;
  std::string why;
  void fail(const std::string& w) {
    if (ok) {
      ok = false;
      why = w;
    }
  }
};

std::string shape_str(int m, int n, int p, Field f) {
  std::ostringstream os;
  os << m << "x" << n << "x" << p << "/" << field_name(f);
  return os.str();
}

bool same_vec_exact(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) return false;
  for (Eigen::Index i = 0; i < a.size(); ++i)
    if (a(i).real() != b(i).real() || a(i).imag() != b(i).imag()) return false;
  return true;
}

bool same_certificate(const Decomposition& d, const Decomposition& e) {
  if (d.m != e.m || d.n != e.n || d.p != e.p || d.field != e.field) return false;
  if (d.claimed_bound != e.claimed_bound || d.seed != e.seed) return false;
  if (d.method != e.method || d.terms.size() != e.terms.size()) return false;
  if (d.tol.rank_tol != e.tol.rank_tol || d.tol.support_tol != e.tol.support_tol ||
      d.tol.residual_tol != e.tol.residual_tol || d.tol.margin_tol != e.tol.margin_tol ||
      d.tol.eps_floor != e.tol.eps_floor)
    return false;
  for (size_t i = 0; i < d.terms.size(); ++i)
    if (!same_vec_exact(d.terms[i].a, e.terms[i].a) || !same_vec_exact(d.terms[i].b, e.terms[i].b) ||
        !same_vec_exact(d.terms[i].c, e.terms[i].c))
      return false;
  return true;
}

/// Every certificate produced by the ensembles passes through here: full
/// verification, flattening lower bound against the term count, and an exact
/// JSON round trip.
struct Audit {
  Tolerances tol;
  long checked = 0;
  long failed = 0;
  std::string first;

  void take(const Tensor3& t, const Decomposition& d) {
    ++checked;
    std::string why;
    const CertificateReport rep = verify(t, d, tol);
    if (rep.verdict != Verdict::Certified) {
      why = std::string("verdict ") + verdict_name(rep.verdict);
    } else if (rep.lower_bound > rep.term_count) {
      why = "flattening lower bound exceeds the term count";
    } else {
      try {
        const Decomposition back = decomposition_from_json(decomposition_to_json(d));
        if (!same_certificate(d, back)) why = "serialization round trip altered the certificate";
      } catch (const std::exception& e) {
        why = std::string("serialization round trip: ") + e.what();
      }
    }
    if (!why.empty()) {
      ++failed;
      if (failed == 1) first = why + " at " + shape_str(t.rows(), t.cols(), t.depth(), t.field);
    }
  }
};

std::string trial_tag(int m, int n, int p, Field f, int trial) {
  std::ostringstream os;
  os << shape_str(m, n, p, f) << " trial " << trial;
  return os.str();
}

/// Shared body for the decomposition ensembles: random tensors of the given
/// shape, term count against `limit`, residual against `res_limit`.
void run_shape(Check& ck, Audit& audit, std::uint64_t seed, std::uint64_t salt, int m, int n, int p,
               Field f, int trials, int limit, double res_limit, const std::string& method,
               double& worst_res) {
  const Tolerances tol;
  for (int i = 0; i < trials && ck.ok; ++i) {
    const std::uint64_t s = mix_seed(seed, salt + std::uint64_t(i));
    const Tensor3 t = random_tensor(m, n, p, f, s);
    try {
      const Decomposition d = decompose(t, tol, s, method);
      const double res = relative_residual(t, d);
      worst_res = std::max(worst_res, res);
      if (int(d.terms.size()) > limit) {
        std::ostringstream os;
        os << d.terms.size() << " terms > " << limit << " at " << trial_tag(m, n, p, f, i);
        ck.fail(os.str());
      } else if (!(res <= res_limit)) {
        std::ostringstream os;
        os << "residual " << res << " at " << trial_tag(m, n, p, f, i);
        ck.fail(os.str());
      } else {
        audit.take(t, d);
      }
    } catch (const std::exception& e) {
      ck.fail(trial_tag(m, n, p, f, i) + ": " + e.what());
    }
  }
}

SelfTestResult square_real_odd(std::uint64_t seed, int trials, Audit& audit) {
  Check ck;
  double worst = 0.0;
  const auto t0 = Clock::now();
  for (int n : {3, 5, 7})
    run_shape(ck, audit, seed, 0x0100000u + (std::uint64_t(n) << 12), n, n, 3, Field::Real, trials,
              2 * n - 1, 1e-6, "auto", worst);
  const double dt = seconds_since(t0);
  if (ck.ok && dt >= 60.0) {
    std::ostringstream os;
    os << "took " << dt << " s, budget 60 s";
    ck.fail(os.str());
  }
  std::ostringstream os;
  if (ck.ok)
    os << 3 * trials << " tensors within 2n-1 terms, worst residual " << worst << ", " << dt << " s";
  else
    os << ck.why;
  return {"square real odd (n,n,3)", ck.ok, os.str()};
}

SelfTestResult square_complex(std::uint64_t seed, int trials, Audit& audit) {
  Check ck;
  double worst = 0.0;
  const auto t0 = Clock::now();
  for (int n : {3, 4, 5, 6})
    run_shape(ck, audit, seed, 0x0200000u + (std::uint64_t(n) << 12), n, n, 3, Field::Complex,
              trials, 2 * n - 1, 1e-6, "auto", worst);
  const double dt = seconds_since(t0);
  if (ck.ok && dt >= 120.0) {
    std::ostringstream os;
    os << "took " << dt << " s, budget 120 s";
    ck.fail(os.str());
  }
  std::ostringstream os;
  if (ck.ok)
    os << 4 * trials << " tensors within 2n-1 terms, worst residual " << worst << ", " << dt << " s";
  else
    os << ck.why;
  return {"square complex (n,n,3)", ck.ok, os.str()};
}

SelfTestResult nonsquare_three(std::uint64_t seed, int trials, Audit& audit) {
  Check ck;
  double worst = 0.0;
  const std::pair<int, int> shapes[] = {{2, 3}, {3, 4}, {3, 5}, {4, 6}};
  std::uint64_t salt = 0x0300000u;
  for (const auto& [m, n] : shapes)
    for (Field f : {Field::Real, Field::Complex}) {
      run_shape(ck, audit, seed, salt, m, n, 3, f, trials, m + n - 1, 1e-6, "auto", worst);
      salt += 0x1000;
    }
  std::ostringstream os;
  if (ck.ok)
    os << 8 * trials << " tensors within m+n-1 terms, worst residual " << worst;
  else
    os << ck.why;
  return {"non-square three-slice (m,n,3)", ck.ok, os.str()};
}

SelfTestResult pairing_route(std::uint64_t seed, int trials, Audit& audit) {
  Check ck;
  double worst = 0.0;
  struct Shape {
    int m, n, p, limit;
  };
  // Slice-pairing bounds: p odd n + m(p-1)/2; p even and square n(p+2)/2 - 1.
  const Shape shapes[] = {{2, 2, 3, 4}, {3, 3, 5, 9}, {3, 4, 3, 7}, {3, 3, 4, 8}};
  std::uint64_t salt = 0x0400000u;
  for (const Shape& sh : shapes)
    for (Field f : {Field::Real, Field::Complex}) {
      run_shape(ck, audit, seed, salt, sh.m, sh.n, sh.p, f, trials, sh.limit, 1e-6, "generalp",
                worst);
      salt += 0x1000;
    }
  std::ostringstream os;
  if (ck.ok)
    os << 8 * trials << " tensors within the pairing bounds, worst residual " << worst;
  else
    os << ck.why;
  return {"slice pairing route (n,m,p)", ck.ok, os.str()};
}

SelfTestResult saturated_exact(std::uint64_t seed, int trials, Audit& audit) {
  Check ck;
  const Tolerances tol;
  long count = 0;
  std::uint64_t salt = 0x0500000u;
  for (int a = 1; a <= 3; ++a)
    for (int b = a; b <= 3; ++b)
      for (Field f : {Field::Real, Field::Complex}) {
        for (int i = 0; i < trials && ck.ok; ++i) {
          const std::uint64_t s = mix_seed(seed, salt + std::uint64_t(i));
          const Tensor3 t = random_tensor(a, b, a * b, f, s);
          try {
            const Decomposition d = decompose(t, tol, s);
            const int lower = flattening_rank_lower_bound(t, tol);
            if (lower != a * b) {
              ck.fail("flattening lower bound " + std::to_string(lower) + " != " +
                      std::to_string(a * b) + " at " + trial_tag(a, b, a * b, f, i));
            } else if (int(d.terms.size()) != a * b) {
              ck.fail(std::to_string(d.terms.size()) + " terms != " + std::to_string(a * b) +
                      " at " + trial_tag(a, b, a * b, f, i));
            } else {
              audit.take(t, d);
              ++count;
            }
          } catch (const std::exception& e) {
            ck.fail(trial_tag(a, b, a * b, f, i) + ": " + e.what());
          }
        }
        salt += 0x1000;
      }
  std::ostringstream os;
  if (ck.ok)
    os << count << " saturated tensors with matching length and lower bound";
  else
    os << ck.why;
  return {"saturated shapes exact rank", ck.ok, os.str()};
}

SelfTestResult worked_example(std::uint64_t seed, Audit& audit) {
  Check ck;
  const Tolerances tol;
  const Tensor3 treal = definite_determinant_example(Field::Real);
  const Tensor3 tcplx = definite_determinant_example(Field::Complex);

  // det(x A1 + y A2 + z A3) = (x^2 + y^2 + z^2)^2 at random points.
  std::mt19937_64 rng(mix_seed(seed, 0x0600001u));
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 50 && ck.ok; ++i) {
    const double x = u(rng), y = u(rng), z = u(rng);
    const Mat m = x * treal.slice(0) + y * treal.slice(1) + z * treal.slice(2);
    const double det = m.determinant().real();
    const double rhs = std::pow(x * x + y * y + z * z, 2);
    if (!(std::abs(det - rhs) <= 1e-9 * std::max(1.0, rhs))) {
      std::ostringstream os;
      os << "det identity off by " << std::abs(det - rhs) << " at point " << i;
      ck.fail(os.str());
    }
  }

  if (ck.ok && find_singular_combination(treal, tol, 256, mix_seed(seed, 0x0600002u)))
    ck.fail("found a real singular combination; none should exist");

  double cplx_det = 0.0;
  if (ck.ok) {
    const auto combo = find_singular_combination(tcplx, tol, 256, mix_seed(seed, 0x0600003u));
    if (!combo) {
      ck.fail("no complex singular combination found within budget 256");
    } else {
      Vec c = *combo;
      c /= c.norm();
      Mat m = Mat::Zero(4, 4);
      for (int k = 0; k < 3; ++k) m += c(k) * tcplx.slice(k);
      cplx_det = std::abs(m.determinant());
      if (!(cplx_det < 1e-8)) {
        std::ostringstream os;
        os << "|det| = " << cplx_det << " at the reported singular combination";
        ck.fail(os.str());
      }
    }
  }

  int real_terms = 0, cplx_terms = 0;
  if (ck.ok) {
    try {
      const Decomposition d = decompose(tcplx, tol, mix_seed(seed, 0x0600004u));
      cplx_terms = int(d.terms.size());
      if (cplx_terms > 7)
        ck.fail("complex decomposition has " + std::to_string(cplx_terms) + " terms > 7");
      else if (!(relative_residual(tcplx, d) <= 1e-6))
        ck.fail("complex decomposition residual too large");
      else
        audit.take(tcplx, d);
    } catch (const std::exception& e) {
      ck.fail(std::string("complex decomposition: ") + e.what());
    }
  }
  if (ck.ok) {
    try {
      const Decomposition d = decompose(treal, tol, mix_seed(seed, 0x0600005u));
      real_terms = int(d.terms.size());
      if (real_terms > 8)
        ck.fail("real decomposition has " + std::to_string(real_terms) + " terms > 8");
      else if (!(relative_residual(treal, d) <= 1e-6))
        ck.fail("real decomposition residual too large");
      else
        audit.take(treal, d);
    } catch (const std::exception& e) {
      ck.fail(std::string("real decomposition: ") + e.what());
    }
  }

  std::ostringstream os;
  if (ck.ok)
    os << "det identity holds; real span has no singular member (budget 256); complex one with "
       << "|det| = " << cplx_det << "; " << cplx_terms << " complex / " << real_terms
       << " real terms";
  else
    os << ck.why;
  return {"definite determinant example", ck.ok, os.str()};
}

SelfTestResult perturbation_ensemble(std::uint64_t seed, int trials) {
  Check ck;
  const Tolerances tol;
  int exhausted = 0;
  double worst_margin = std::numeric_limits<double>::infinity();
  for (int trial = 0; trial < trials && ck.ok; ++trial) {
    const int variant = trial % 3;
    const Field f = ((trial / 3) % 2) ? Field::Complex : Field::Real;
    const int n = 2 + int((trial / 6) % 7);
    std::vector<int> preserved;
    if (variant == 1) preserved = {n - 1};
    if (variant == 2) preserved = {n - 2, n - 1};

    // Redraw until the restricted pencil on the preserved block qualifies.
    Mat a, b;
    bool drawn = false;
    for (int draw = 0; draw < 200 && !drawn; ++draw) {
      const std::uint64_t s = mix_seed(seed, 0x0700000u + std::uint64_t(trial) * 256 + draw);
      const Tensor3 t = random_tensor(n, n, 2, f, s);
      a = t.slice(0);
      b = t.slice(1);
      if (preserved.empty()) {
        drawn = true;
      } else {
        const int k = int(preserved.size());
        Mat ap(k, k), bp(k, k);
        for (int i = 0; i < k; ++i)
          for (int j = 0; j < k; ++j) {
            ap(i, j) = a(preserved[size_t(i)], preserved[size_t(j)]);
            bp(i, j) = b(preserved[size_t(i)], preserved[size_t(j)]);
          }
        if (numerical_rank(ap, tol) == k && pencil_spectrum(ap, bp, tol).distinct_in(f, tol))
          drawn = true;
      }
    }
    if (!drawn) {
      ck.fail("no qualifying pair after 200 draws at trial " + std::to_string(trial));
      break;
    }

    try {
      const DiagonalPerturbation dp = perturb_to_distinct(a, b, preserved, f, tol);
      if (!(dp.spectrum.margin > 1e-6)) {
        std::ostringstream os;
        os << "margin " << dp.spectrum.margin << " at trial " << trial;
        ck.fail(os.str());
      }
      if (!dp.spectrum.distinct_in(f, tol)) ck.fail("spectrum not distinct in the field");
      for (int i : preserved)
        if (dp.x(i) != Cx(0.0, 0.0) || dp.y(i) != Cx(0.0, 0.0))
          ck.fail("preserved cell perturbed at trial " + std::to_string(trial));
      Mat ax = a;
      for (int i = 0; i < n; ++i) ax(i, i) += dp.x(i);
      if (numerical_rank(ax, tol) < n) ck.fail("A + X singular at trial " + std::to_string(trial));
      worst_margin = std::min(worst_margin, dp.spectrum.margin);
    } catch (const EpsilonExhausted&) {
      ++exhausted;
    } catch (const std::exception& e) {
      ck.fail(std::string(e.what()) + " at trial " + std::to_string(trial));
    }
  }
  if (ck.ok && exhausted * 100 >= trials) {
    std::ostringstream os;
    os << exhausted << " of " << trials << " trials exhausted the scale search (>= 1%)";
    ck.fail(os.str());
  }
  std::ostringstream os;
  if (ck.ok)
    os << trials << " pairs, " << exhausted << " exhausted, worst margin " << worst_margin;
  else
    os << ck.why;
  return {"diagonal perturbation ensemble", ck.ok, os.str()};
}

SelfTestResult pencil_tail_ensemble(std::uint64_t seed, int trials, Audit& audit) {
  Check ck;
  const Tolerances tol;
  double worst = 0.0;
  for (int trial = 0; trial < trials && ck.ok; ++trial) {
    const Field f = (trial % 2) ? Field::Complex : Field::Real;
    const int n = 1 + (trial / 2) % 6;
    const int s_tail = (trial / 12) % (10 - n + 1);
    const int m = n + s_tail;
    std::mt19937_64 rng(mix_seed(seed, 0x0800000u + std::uint64_t(trial)));
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const auto rnd = [&](int r, int c) {
      Mat mm(r, c);
      for (int i = 0; i < r; ++i)
        for (int j = 0; j < c; ++j)
          mm(i, j) = f == Field::Complex ? Cx(u(rng), u(rng)) : Cx(u(rng), 0.0);
      return mm;
    };

    // Draw a qualifying pencil: X nonsingular, X^{-1}Y distinct in the field.
    Mat x, y;
    bool drawn = false;
    for (int draw = 0; draw < 200 && !drawn; ++draw) {
      x = rnd(n, n);
      if (numerical_rank(x, tol) < n) continue;
      if (f == Field::Complex) {
        y = rnd(n, n);
      } else {
        // Real spectra are rare for raw draws; build one with spaced real
        // eigenvalues instead: Y = X Q Diag(l) Q^{-1}.
        Mat q = rnd(n, n);
        if (numerical_rank(q, tol) < n) continue;
        Vec l(n);
        for (int i = 0; i < n; ++i) l(i) = Cx(double(i + 1) + 0.2 * u(rng), 0.0);
        y = x * q * l.asDiagonal() * q.partialPivLu().solve(Mat::Identity(n, n));
      }
      if (pencil_spectrum(x, y, tol).distinct_in(f, tol)) drawn = true;
    }
    if (!drawn) {
      ck.fail("no qualifying pencil after 200 draws at trial " + std::to_string(trial));
      break;
    }

    const Mat uu = rnd(n, s_tail), vv = rnd(n, s_tail);
    Mat s0(n, m), s1(n, m);
    s0.leftCols(n) = x;
    s0.rightCols(s_tail) = uu;
    s1.leftCols(n) = y;
    s1.rightCols(s_tail) = vv;
    const Tensor3 t(f, {s0, s1});
    try {
      const Decomposition d = decompose_pencil_tail(x, uu, y, vv, f, tol);
      const double res = relative_residual(t, d);
      worst = std::max(worst, res);
      if (int(d.terms.size()) > m) {
        std::ostringstream os;
        os << d.terms.size() << " terms > " << m << " at trial " << trial;
        ck.fail(os.str());
      } else if (!(res <= 1e-8)) {
        std::ostringstream os;
        os << "residual " << res << " at trial " << trial;
        ck.fail(os.str());
      } else {
        audit.take(t, d);
      }
    } catch (const std::exception& e) {
      ck.fail(std::string(e.what()) + " at trial " + std::to_string(trial));
    }
  }
  std::ostringstream os;
  if (ck.ok)
    os << trials << " pencils within m terms, worst residual " << worst;
  else
    os << ck.why;
  return {"pencil-with-tail ensemble", ck.ok, os.str()};
}

SelfTestResult audit_summary(const Audit& audit) {
  Check ck;
  if (audit.checked == 0) ck.fail("no certificates were audited");
  if (audit.failed > 0) ck.fail(std::to_string(audit.failed) + " of " +
                                std::to_string(audit.checked) + " failed; first: " + audit.first);
  std::ostringstream os;
  if (ck.ok)
    os << audit.checked << " certificates verified, bounded below and round-tripped";
  else
    os << ck.why;
  return {"certificate consistency audit", ck.ok, os.str()};
}

SelfTestResult bound_table() {
  Check ck;
  struct Row {
    int m, n, p;
    Field f;
    int want;
  };
  const Row rows[] = {{3, 3, 3, Field::Real, 5},    {4, 4, 3, Field::Complex, 7},
                      {5, 5, 3, Field::Real, 9},    {6, 6, 3, Field::Complex, 11},
                      {2, 2, 3, Field::Real, 3},    {2, 2, 3, Field::Complex, 3},
                      {4, 4, 3, Field::Real, 8}};
  for (const Row& r : rows) {
    const BoundReport b = upper_bound(r.m, r.n, r.p, r.f);
    if (b.value != r.want) {
      std::ostringstream os;
      os << "bound(" << shape_str(r.m, r.n, r.p, r.f) << ") = " << b.value << ", expected "
         << r.want;
      ck.fail(os.str());
    }
  }
  if (ck.ok && upper_bound(4, 4, 3, Field::Real).conditional_notes.empty())
    ck.fail("bound(4x4x3/real) carries no conditional note");

  // Saturated shapes are exact for any slice surplus.
  for (int a = 1; a <= 4 && ck.ok; ++a)
    for (int b = a; b <= 4 && ck.ok; ++b)
      for (int extra : {0, 1, 3})
        for (Field f : {Field::Real, Field::Complex}) {
          const int v = upper_bound(a, b, a * b + extra, f).value;
          if (v != a * b) {
            std::ostringstream os;
            os << "bound(" << shape_str(a, b, a * b + extra, f) << ") = " << v << ", expected "
               << a * b;
            ck.fail(os.str());
          }
        }

  long cells = 0;
  for (int a = 1; a <= 8 && ck.ok; ++a)
    for (int b = 1; b <= 8 && ck.ok; ++b)
      for (int c = 1; c <= 8 && ck.ok; ++c) {
        const int vr = upper_bound(a, b, c, Field::Real).value;
        const int vc = upper_bound(a, b, c, Field::Complex).value;
        ++cells;
        if (vc > vr) {
          std::ostringstream os;
          os << "complex bound " << vc << " above real " << vr << " at " << a << "x" << b << "x"
             << c;
          ck.fail(os.str());
          break;
        }
        if (a <= b && b <= c) {
          const int perms[6][3] = {{a, b, c}, {a, c, b}, {b, a, c},
                                   {b, c, a}, {c, a, b}, {c, b, a}};
          for (const auto& q : perms)
            for (Field f : {Field::Real, Field::Complex}) {
              const int v = upper_bound(q[0], q[1], q[2], f).value;
              const int base = f == Field::Real ? vr : vc;
              if (v != base) {
                std::ostringstream os;
                os << "bound not permutation symmetric at " << q[0] << "x" << q[1] << "x" << q[2]
                   << "/" << field_name(f) << ": " << v << " vs " << base;
                ck.fail(os.str());
              }
            }
        }
        for (Field f : {Field::Real, Field::Complex}) {
          const int base = f == Field::Real ? vr : vc;
          const int up[3][3] = {{a + 1, b, c}, {a, b + 1, c}, {a, b, c + 1}};
          for (const auto& q : up) {
            const int v = upper_bound(q[0], q[1], q[2], f).value;
            if (v < base) {
              std::ostringstream os;
              os << "bound not monotone: " << q[0] << "x" << q[1] << "x" << q[2] << "/"
                 << field_name(f) << " = " << v << " below " << base;
              ck.fail(os.str());
            }
          }
        }
      }

  std::ostringstream os;
  if (ck.ok)
    os << "pinned rows exact; symmetry, monotonicity and complex <= real on " << cells
       << " grid cells";
  else
    os << ck.why;
  return {"upper bound table", ck.ok, os.str()};
}

}  // namespace

Tensor3 definite_determinant_example(Field field) {
  Mat a1 = Mat::Zero(4, 4), a2 = Mat::Zero(4, 4);
  a1(0, 1) = 1;
  a1(1, 0) = -1;
  a1(2, 3) = 1;
  a1(3, 2) = -1;
  a2(0, 3) = 1;
  a2(1, 2) = 1;
  a2(2, 1) = -1;
  a2(3, 0) = -1;
  return Tensor3(field, {a1, a2, Mat::Identity(4, 4)});
}

std::vector<SelfTestResult> run_selftest(std::uint64_t seed, bool quick, const SelfTestLog& log) {
  const int dense = quick ? 10 : 200;
  const int medium = quick ? 5 : 50;
  const int wide = quick ? 25 : 500;
  Audit audit;
  std::vector<SelfTestResult> out;
  const auto push = [&](SelfTestResult r) {
    if (log) log(r);
    out.push_back(std::move(r));
  };
  push(square_real_odd(seed, dense, audit));
  push(square_complex(seed, dense, audit));
  push(nonsquare_three(seed, dense, audit));
  push(pairing_route(seed, dense, audit));
  push(saturated_exact(seed, medium, audit));
  push(worked_example(seed, audit));
  push(perturbation_ensemble(seed, wide));
  push(pencil_tail_ensemble(seed, wide, audit));
  push(audit_summary(audit));
  push(bound_table());
  return out;
}

}  // namespace tenrank
