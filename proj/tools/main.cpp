#include <array>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tenrank/bounds.hpp"
#include "tenrank/certify.hpp"
#include "tenrank/decompose.hpp"
#include "tenrank/selftest.hpp"
#include "tenrank/serialize.hpp"
#include "tenrank/spectrum.hpp"

using namespace tenrank;

namespace {

struct Opts {
  std::string input, output, certificate, field, method = "auto", dims, grid;
  std::uint64_t seed = kDefaultSeed;
  double tol_residual = 0.0, tol_rank = 0.0, tol_margin = 0.0;
  bool json = false;
};

Tolerances resolve_tol(const Opts& o) {
  Tolerances tol;
  if (o.tol_residual > 0.0) tol.residual_tol = o.tol_residual;
  if (o.tol_rank > 0.0) tol.rank_tol = o.tol_rank;
  if (o.tol_margin > 0.0) tol.margin_tol = o.tol_margin;
  return tol;
}

Field parse_field(const std::string& s) {
  if (s == "real") return Field::Real;
  if (s == "complex") return Field::Complex;
  throw ParseError("field must be real or complex, got \"" + s + "\"");
}

std::array<int, 3> parse_dims(const std::string& s) {
  std::array<int, 3> d{};
  char c1 = 0, c2 = 0;
  std::istringstream in(s);
  if (!(in >> d[0] >> c1 >> d[1] >> c2 >> d[2]) || c1 != ',' || c2 != ',' || !in.eof())
    throw ParseError("dims must be m,n,p, got \"" + s + "\"");
  for (int v : d)
    if (v < 1) throw ParseError("dims must be positive, got \"" + s + "\"");
  return d;
}

std::pair<int, int> parse_grid(const std::string& s) {
  const auto pos = s.find("..");
  if (pos == std::string::npos) throw ParseError("grid must be a..b, got \"" + s + "\"");
  int a = 0, b = 0;
  try {
    a = std::stoi(s.substr(0, pos));
    b = std::stoi(s.substr(pos + 2));
  } catch (const std::exception&) {
    throw ParseError("grid must be a..b, got \"" + s + "\"");
  }
  if (a < 1 || b < a) throw ParseError("grid needs 1 <= a <= b, got \"" + s + "\"");
  return {a, b};
}

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string out;
  for (size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

void print_report(const CertificateReport& rep) {
  std::printf("terms:          %d\n", rep.term_count);
  std::printf("claimed bound:  %d\n", rep.claimed_bound);
  std::printf("lower bound:    %d\n", rep.lower_bound);
  std::printf("residual:       %.3e\n", rep.relative_residual);
  std::printf("method:         %s\n", join(rep.method, " > ").c_str());
  std::printf("verdict:        %s\n", verdict_name(rep.verdict));
}

int cmd_decompose(const Opts& o) {
  const Tolerances tol = resolve_tol(o);
  const Tensor3 t = load_tensor(o.input);
  const Decomposition d = decompose(t, tol, o.seed, o.method);
  const CertificateReport rep = verify(t, d, tol);
  const njson cert = decomposition_to_json(d);
  if (!o.output.empty()) save_json(cert, o.output);
  if (o.json) {
    njson j;
    j["certificate"] = cert;
    j["report"] = report_to_json(rep);
    std::cout << j.dump(2) << "\n";
  } else {
    print_report(rep);
    if (!o.output.empty()) std::printf("certificate:    %s\n", o.output.c_str());
  }
  return rep.verdict == Verdict::Certified ? 0 : 1;
}

int cmd_verify(const Opts& o) {
  const Tolerances tol = resolve_tol(o);
  const Tensor3 t = load_tensor(o.input);
  const Decomposition d = load_decomposition(o.certificate);
  const CertificateReport rep = verify(t, d, tol);
  if (o.json)
    std::cout << report_to_json(rep).dump(2) << "\n";
  else
    print_report(rep);
  return rep.verdict == Verdict::Certified ? 0 : 1;
}

njson bound_to_json(int m, int n, int p, const BoundReport& b) {
  njson j;
  j["dims"] = {m, n, p};
  j["field"] = field_name(b.field);
  j["value"] = b.value;
  j["provenance"] = b.provenance;
  j["conditional_notes"] = b.conditional_notes;
  return j;
}

int cmd_bound(const Opts& o) {
  if (o.dims.empty() == o.grid.empty())
    throw ParseError("bound needs exactly one of --dims or --grid");
  std::vector<Field> fields;
  if (o.field.empty())
    fields = {Field::Real, Field::Complex};
  else
    fields = {parse_field(o.field)};

  if (!o.dims.empty()) {
    const auto d = parse_dims(o.dims);
    njson out = njson::array();
    for (Field f : fields) {
      const BoundReport b = upper_bound(d[0], d[1], d[2], f);
      if (o.json) {
        out.push_back(bound_to_json(d[0], d[1], d[2], b));
      } else {
        std::printf("rank(%d x %d x %d / %s) <= %d\n", d[0], d[1], d[2], field_name(f), b.value);
        for (const std::string& line : b.provenance) std::printf("  via %s\n", line.c_str());
        for (const std::string& line : b.conditional_notes) std::printf("  note: %s\n", line.c_str());
      }
    }
    if (o.json) std::cout << out.dump(2) << "\n";
    return 0;
  }

  const auto [a, b] = parse_grid(o.grid);
  if (o.json) {
    njson out = njson::array();
    for (int m = a; m <= b; ++m)
      for (int n = a; n <= b; ++n)
        for (int p = a; p <= b; ++p)
          for (Field f : fields) out.push_back(bound_to_json(m, n, p, upper_bound(m, n, p, f)));
    std::cout << out.dump(2) << "\n";
  } else {
    const bool both = fields.size() == 2;
    std::printf("%4s %4s %4s %s\n", "m", "n", "p", both ? "real complex" : field_name(fields[0]));
    for (int m = a; m <= b; ++m)
      for (int n = a; n <= b; ++n)
        for (int p = a; p <= b; ++p) {
          std::printf("%4d %4d %4d", m, n, p);
          for (Field f : fields) std::printf(" %6d", upper_bound(m, n, p, f).value);
          std::printf("\n");
        }
  }
  return 0;
}

int cmd_gen(const Opts& o) {
  const auto d = parse_dims(o.dims);
  const Field f = o.field.empty() ? Field::Real : parse_field(o.field);
  const Tensor3 t = random_tensor(d[0], d[1], d[2], f, o.seed);
  const njson j = tensor_to_json(t);
  if (o.output.empty())
    std::cout << j.dump(2) << "\n";
  else
    save_json(j, o.output);
  return 0;
}

int cmd_example(const Opts& o) {
  const Tolerances tol = resolve_tol(o);
  const bool do_real = o.field.empty() || o.field == "real";
  const bool do_cplx = o.field.empty() || o.field == "complex";
  if (!do_real && !do_cplx) throw ParseError("field must be real or complex");
  bool ok = true;

  // The slice span has det(x A1 + y A2 + z A3) = (x^2 + y^2 + z^2)^2.
  const Tensor3 treal = definite_determinant_example(Field::Real);
  std::mt19937_64 rng(mix_seed(o.seed, 0xE1));
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double worst_det = 0.0;
  for (int i = 0; i < 50; ++i) {
    const double x = u(rng), y = u(rng), z = u(rng);
    const Mat m = x * treal.slice(0) + y * treal.slice(1) + z * treal.slice(2);
    const double rhs = std::pow(x * x + y * y + z * z, 2);
    worst_det = std::max(worst_det, std::abs(m.determinant().real() - rhs) / std::max(1.0, rhs));
  }
  const bool det_ok = worst_det <= 1e-9;
  ok = ok && det_ok;
  std::printf("det identity: max relative deviation %.3e over 50 points [%s]\n", worst_det,
              det_ok ? "ok" : "FAIL");

  struct Row {
    std::string singular, terms, residual;
    bool ok = true;
  };
  const auto run_field = [&](Field f, int limit) {
    Row row;
    const Tensor3 t = definite_determinant_example(f);
    const auto combo = find_singular_combination(t, tol, 256, mix_seed(o.seed, 0xE2));
    if (f == Field::Real) {
      row.singular = combo ? "found (unexpected)" : "none within budget 256";
      row.ok = !combo;
    } else {
      if (!combo) {
        row.singular = "none (unexpected)";
        row.ok = false;
      } else {
        Vec c = *combo;
        c /= c.norm();
        Mat m = Mat::Zero(4, 4);
        for (int k = 0; k < 3; ++k) m += c(k) * t.slice(k);
        const double det = std::abs(m.determinant());
        std::ostringstream os;
        os << "|det| = " << std::scientific << det;
        row.singular = os.str();
        row.ok = det < 1e-8;
      }
    }
    try {
      const Decomposition d = decompose(t, tol, mix_seed(o.seed, 0xE3));
      const double res = relative_residual(t, d);
      row.terms = std::to_string(d.terms.size()) + " (claimed " +
                  std::to_string(d.claimed_bound) + ", limit " + std::to_string(limit) + ")";
      std::ostringstream os;
      os << std::scientific << res;
      row.residual = os.str();
      row.ok = row.ok && int(d.terms.size()) <= limit && res <= 1e-6;
    } catch (const std::exception& e) {
      row.terms = std::string("failed: ") + e.what();
      row.ok = false;
    }
    return row;
  };

  if (do_real) {
    const Row r = run_field(Field::Real, 8);
    std::printf("real:    singular member %s; terms %s; residual %s [%s]\n", r.singular.c_str(),
                r.terms.c_str(), r.residual.c_str(), r.ok ? "ok" : "FAIL");
    ok = ok && r.ok;
  }
  if (do_cplx) {
    const Row r = run_field(Field::Complex, 7);
    std::printf("complex: singular member %s; terms %s; residual %s [%s]\n", r.singular.c_str(),
                r.terms.c_str(), r.residual.c_str(), r.ok ? "ok" : "FAIL");
    ok = ok && r.ok;
  }
  std::printf("%s\n", ok ? "example checks passed" : "example checks FAILED");
  return ok ? 0 : 1;
}

int cmd_selftest(const Opts& o) {
  const auto log = [](const SelfTestResult& r) {
    std::printf("[%s] %s — %s\n", r.pass ? "PASS" : "FAIL", r.name.c_str(), r.details.c_str());
    std::fflush(stdout);
  };
  const auto results = run_selftest(o.seed, false, log);
  int passed = 0;
  for (const auto& r : results) passed += r.pass ? 1 : 0;
  std::printf("%d of %zu ensembles passed\n", passed, results.size());
  if (o.json) {
    njson j = njson::array();
    for (const auto& r : results)
      j.push_back({{"name", r.name}, {"pass", r.pass}, {"details", r.details}});
    std::cout << j.dump(2) << "\n";
  }
  return passed == int(results.size()) ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rank-one expansions of third-order tensors with certified length bounds"};
  app.require_subcommand(1);
  Opts o;

  CLI::App* dec = app.add_subcommand("decompose", "expand a tensor into certified rank-one terms");
  dec->add_option("--input", o.input, "tensor JSON file")->required();
  dec->add_option("--output", o.output, "write the certificate JSON here");
  dec->add_option("--seed", o.seed, "construction seed");
  dec->add_option("--method", o.method, "construction route")
      ->check(CLI::IsMember({"auto", "trivial", "square3", "nonsquare3", "generalp"}));
  dec->add_option("--tol-residual", o.tol_residual, "relative residual tolerance");
  dec->add_option("--tol-rank", o.tol_rank, "singular value rank tolerance");
  dec->add_option("--tol-margin", o.tol_margin, "eigenvalue separation tolerance");
  dec->add_flag("--json", o.json, "emit certificate and report as JSON");

  CLI::App* ver = app.add_subcommand("verify", "check a certificate against a tensor");
  ver->add_option("--input", o.input, "tensor JSON file")->required();
  ver->add_option("--certificate", o.certificate, "certificate JSON file")->required();
  ver->add_option("--tol-residual", o.tol_residual, "relative residual tolerance");
  ver->add_option("--tol-rank", o.tol_rank, "singular value rank tolerance");
  ver->add_flag("--json", o.json, "emit the report as JSON");

  CLI::App* bnd = app.add_subcommand("bound", "rank upper bounds from the shape alone");
  bnd->add_option("--dims", o.dims, "single shape m,n,p");
  bnd->add_option("--grid", o.grid, "table over a..b in every mode");
  bnd->add_option("--field", o.field, "real or complex (default: both)");
  bnd->add_flag("--json", o.json, "emit bounds as JSON");

  CLI::App* gen = app.add_subcommand("gen", "generate a seeded random tensor");
  gen->add_option("--dims", o.dims, "shape m,n,p")->required();
  gen->add_option("--field", o.field, "real or complex (default: real)");
  gen->add_option("--seed", o.seed, "generator seed");
  gen->add_option("--output", o.output, "write the tensor here (default: stdout)");

  CLI::App* exa = app.add_subcommand("example", "worked 4x4x3 pencil with a definite determinant");
  exa->add_option("--field", o.field, "restrict to real or complex");
  exa->add_option("--seed", o.seed, "seed for the spot checks");

  CLI::App* st = app.add_subcommand("selftest", "run the acceptance ensembles");
  st->add_option("--seed", o.seed, "base seed");
  st->add_flag("--json", o.json, "also emit results as JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (dec->parsed()) return cmd_decompose(o);
    if (ver->parsed()) return cmd_verify(o);
    if (bnd->parsed()) return cmd_bound(o);
    if (gen->parsed()) return cmd_gen(o);
    if (exa->parsed()) return cmd_example(o);
    if (st->parsed()) return cmd_selftest(o);
  } catch (const ParseError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const PreconditionError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 2;
}
