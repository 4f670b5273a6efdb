#include "tenrank/serialize.hpp"

#include <fstream>

namespace tenrank {

namespace {

njson scalar_to_json(Cx v, Field field) {
  if (field == Field::Real) return njson(v.real());
  return njson::array({v.real(), v.imag()});
}

Cx scalar_from_json(const njson& j, Field field) {
  Cx v;
  if (j.is_number()) {
    v = Cx(j.get<double>(), 0.0);
  } else if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
    v = Cx(j[0].get<double>(), j[1].get<double>());
  } else {
    throw ParseError("scalar must be a number or an [re, im] pair");
  }
  if (field == Field::Real && v.imag() != 0.0)
    throw ParseError("nonzero imaginary part under the real field tag");
  if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
    throw ParseError("non-finite scalar");
  return v;
}

Field field_from_json(const njson& j) {
  const std::string f = j.get<std::string>();
  if (f == "real") return Field::Real;
  if (f == "complex") return Field::Complex;
  throw ParseError("field must be \"real\" or \"complex\"");
}

njson vec_to_json(const Vec& v, Field field) {
  njson a = njson::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(scalar_to_json(v(i), field));
  return a;
}

Vec vec_from_json(const njson& j, Field field, int expected) {
  if (!j.is_array() || int(j.size()) != expected) throw ParseError("vector length mismatch");
  Vec v(expected);
  for (int i = 0; i < expected; ++i) v(i) = scalar_from_json(j[size_t(i)], field);
  return v;
}

}  // namespace

njson tensor_to_json(const Tensor3& t) {
  njson j;
  j["dims"] = {t.rows(), t.cols(), t.depth()};
  j["field"] = field_name(t.field);
  njson slices = njson::array();
  for (int k = 0; k < t.depth(); ++k) {
    njson rows = njson::array();
    for (int i = 0; i < t.rows(); ++i) {
      njson row = njson::array();
      for (int jj = 0; jj < t.cols(); ++jj) row.push_back(scalar_to_json(t.at(i, jj, k), t.field));
      rows.push_back(std::move(row));
    }
    slices.push_back(std::move(rows));
  }
  j["slices"] = std::move(slices);
  return j;
}

Tensor3 tensor_from_json(const njson& j) {
  if (!j.is_object() || !j.contains("dims") || !j.contains("field") || !j.contains("slices"))
    throw ParseError("tensor needs dims, field and slices");
  const auto& dims = j["dims"];
  if (!dims.is_array() || dims.size() != 3) throw ParseError("dims must be [m, n, p]");
  const int m = dims[0].get<int>(), n = dims[1].get<int>(), p = dims[2].get<int>();
  if (m < 1 || n < 1 || p < 1) throw ParseError("dims must be positive");
  const Field field = field_from_json(j["field"]);
  const auto& slices = j["slices"];
  if (!slices.is_array() || int(slices.size()) != p) throw ParseError("slice count mismatch");

  Tensor3 t;
  t.field = field;
  t.slices.assign(size_t(p), Mat::Zero(m, n));
  for (int k = 0; k < p; ++k) {
    const auto& rows = slices[size_t(k)];
    if (!rows.is_array() || int(rows.size()) != m) throw ParseError("row count mismatch");
    for (int i = 0; i < m; ++i) {
      const auto& row = rows[size_t(i)];
      if (!row.is_array() || int(row.size()) != n) throw ParseError("column count mismatch");
      for (int jj = 0; jj < n; ++jj)
        t.slices[size_t(k)](i, jj) = scalar_from_json(row[size_t(jj)], field);
    }
  }
  t.check();
  return t;
}

njson decomposition_to_json(const Decomposition& d) {
  njson j;
  j["dims"] = {d.m, d.n, d.p};
  j["field"] = field_name(d.field);
  j["method"] = d.method;
  j["claimed_bound"] = d.claimed_bound;
  j["seed"] = d.seed;
  j["tolerances"] = {{"rank_tol", d.tol.rank_tol},
                     {"support_tol", d.tol.support_tol},
                     {"residual_tol", d.tol.residual_tol},
                     {"margin_tol", d.tol.margin_tol},
                     {"eps_floor", d.tol.eps_floor}};
  njson terms = njson::array();
  for (const RankOneTerm& t : d.terms) {
    njson jt;
    jt["a"] = vec_to_json(t.a, d.field);
    jt["b"] = vec_to_json(t.b, d.field);
    jt["c"] = vec_to_json(t.c, d.field);
    terms.push_back(std::move(jt));
  }
  j["terms"] = std::move(terms);
  return j;
}

Decomposition decomposition_from_json(const njson& j) {
  if (!j.is_object() || !j.contains("dims") || !j.contains("field") || !j.contains("terms"))
    throw ParseError("certificate needs dims, field and terms");
  const auto& dims = j["dims"];
  if (!dims.is_array() || dims.size() != 3) throw ParseError("dims must be [m, n, p]");
  Decomposition d;
  d.m = dims[0].get<int>();
  d.n = dims[1].get<int>();
  d.p = dims[2].get<int>();
  if (d.m < 1 || d.n < 1 || d.p < 1) throw ParseError("dims must be positive");
  d.field = field_from_json(j["field"]);
  if (j.contains("method")) d.method = j["method"].get<std::vector<std::string>>();
  if (j.contains("claimed_bound")) d.claimed_bound = j["claimed_bound"].get<int>();
  if (j.contains("seed")) d.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("tolerances")) {
    const auto& t = j["tolerances"];
    if (t.contains("rank_tol")) d.tol.rank_tol = t["rank_tol"].get<double>();
    if (t.contains("support_tol")) d.tol.support_tol = t["support_tol"].get<double>();
    if (t.contains("residual_tol")) d.tol.residual_tol = t["residual_tol"].get<double>();
    if (t.contains("margin_tol")) d.tol.margin_tol = t["margin_tol"].get<double>();
    if (t.contains("eps_floor")) d.tol.eps_floor = t["eps_floor"].get<double>();
  }
  for (const auto& jt : j["terms"]) {
    if (!jt.is_object() || !jt.contains("a") || !jt.contains("b") || !jt.contains("c"))
      throw ParseError("term needs a, b and c");
    RankOneTerm term;
    term.a = vec_from_json(jt["a"], d.field, d.m);
    term.b = vec_from_json(jt["b"], d.field, d.n);
    term.c = vec_from_json(jt["c"], d.field, d.p);
    d.terms.push_back(std::move(term));
  }
  return d;
}

njson report_to_json(const CertificateReport& r) {
  njson j;
  j["verdict"] = verdict_name(r.verdict);
  j["term_count"] = r.term_count;
  j["claimed_bound"] = r.claimed_bound;
  j["relative_residual"] = r.relative_residual;
  j["lower_bound"] = r.lower_bound;
  j["method"] = r.method;
  return j;
}

Tensor3 load_tensor(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  njson j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw ParseError("invalid JSON in " + path + ": " + e.what());
  }
  return tensor_from_json(j);
}

void save_json(const njson& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot open " + path + " for writing");
  out << j.dump(2) << '\n';
}

Decomposition load_decomposition(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  njson j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw ParseError("invalid JSON in " + path + ": " + e.what());
  }
  return decomposition_from_json(j);
}

}  // namespace tenrank
