#include "tenrank/certify.hpp"

#include <cmath>
#include <limits>

namespace tenrank {

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Certified: return "Certified";
    case Verdict::Malformed: return "Malformed";
    case Verdict::ResidualTooLarge: return "ResidualTooLarge";
    case Verdict::BoundExceeded: return "BoundExceeded";
    case Verdict::RankConflict: return "RankConflict";
  }
  return "Unknown";
}

Tensor3 reconstruct(const Decomposition& d) {
  Tensor3 t;
  t.field = d.field;
  t.slices.assign(size_t(d.p), Mat::Zero(d.m, d.n));
  for (const RankOneTerm& term : d.terms) {
    const Mat outer = term.a * term.b.transpose();
    for (int k = 0; k < d.p; ++k) t.slices[size_t(k)] += term.c(k) * outer;
  }
  return t;
}

double relative_residual(const Tensor3& t, const Decomposition& d) {
  const Tensor3 r = reconstruct(d);
  double num = 0.0;
  for (int k = 0; k < t.depth(); ++k) num += (t.slice(k) - r.slice(k)).squaredNorm();
  const double den = t.frobenius_norm();
  if (den == 0.0) return std::sqrt(num) == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return std::sqrt(num) / den;
}

namespace {

bool terms_well_formed(const Tensor3& t, const Decomposition& d) {
  if (d.m != t.rows() || d.n != t.cols() || d.p != t.depth()) return false;
  if (d.field != t.field) return false;
  if (d.claimed_bound < 0) return false;
  for (const RankOneTerm& term : d.terms) {
    if (term.a.size() != d.m || term.b.size() != d.n || term.c.size() != d.p) return false;
    for (const Vec* v : {&term.a, &term.b, &term.c})
      for (Eigen::Index i = 0; i < v->size(); ++i) {
        const Cx z = (*v)(i);
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
        if (d.field == Field::Real && z.imag() != 0.0) return false;
      }
  }
  return true;
}

}  // namespace

CertificateReport verify(const Tensor3& t, const Decomposition& d, const Tolerances& tol) {
  CertificateReport rep;
  rep.term_count = int(d.terms.size());
  rep.claimed_bound = d.claimed_bound;
  rep.method = d.method;

  if (!terms_well_formed(t, d)) {
    rep.verdict = Verdict::Malformed;
    rep.relative_residual = std::numeric_limits<double>::infinity();
    return rep;
  }
  rep.relative_residual = relative_residual(t, d);
  rep.lower_bound = flattening_rank_lower_bound(t, tol);

  if (!(rep.relative_residual <= tol.residual_tol))
    rep.verdict = Verdict::ResidualTooLarge;
  else if (rep.term_count > d.claimed_bound)
    rep.verdict = Verdict::BoundExceeded;
  else if (rep.lower_bound > rep.term_count)
    rep.verdict = Verdict::RankConflict;
  else
    rep.verdict = Verdict::Certified;
  return rep;
}

}  // namespace tenrank
