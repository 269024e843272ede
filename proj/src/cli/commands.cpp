#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "abscompat/cli.hpp"
#include "abscompat/fuzzgen.hpp"

namespace abscompat::cli {

int exit_code_for(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::NotAbsolutelyCompatible:
      return kNotCompatible;
    case ErrorKind::NotStrict:
    case ErrorKind::NotStrictUnitary:
    case ErrorKind::NotStrictProjection:
      return kNotStrict;
    case ErrorKind::PairingFailure:
    case ErrorKind::PostconditionFailure:
    case ErrorKind::SpectralAmbiguity:
      return kStructural;
    default:
      return kUsage;
  }
}

namespace {

struct RunConfig {
  Tolerances tol = kDefaultTolerances;
  std::string format = "json";
  std::string out;
};

void emit(const RunConfig& cfg, const Json& j, std::ostream& out) {
  if (cfg.out.empty()) {
    out << j.dump(2) << '\n';
  } else {
    write_json_file(cfg.out, j);
  }
}

void check_tolerances(const Tolerances& t) {
  for (double v : {t.herm, t.spec, t.eig, t.cluster, t.compat, t.block, t.canon, t.geo, t.unit, t.proj}) {
    if (!(v > 0.0)) throw Error(ErrorKind::ParseError, "tolerances must be positive");
  }
}

BlochPoint parse_point(const std::string& s) {
  std::istringstream is(s);
  BlochPoint p;
  char c1 = 0, c2 = 0;
  if (!(is >> p.x >> c1 >> p.y >> c2 >> p.z) || c1 != ',' || c2 != ',') {
    throw Error(ErrorKind::ParseError, "expected x,y,z but got '" + s + "'");
  }
  is >> std::ws;
  if (!is.eof()) throw Error(ErrorKind::ParseError, "trailing characters in '" + s + "'");
  return p;
}

std::pair<Effect, Effect> read_effect_pair(const std::string& pa, const std::string& pb, const Tolerances& tol) {
  const Matrix a = read_matrix_file(pa);
  const Matrix b = read_matrix_file(pb);
  require_same_dim(a, b, "input pair");
  return {Effect::from(a, tol), Effect::from(b, tol)};
}

int cmd_check(const RunConfig& cfg, const std::string& pa, const std::string& pb, std::ostream& out) {
  const auto [a, b] = read_effect_pair(pa, pb, cfg.tol);
  const CompatReport r = is_abs_compatible(a, b, cfg.tol);
  Json j = compat_report_to_json(r);
  j["n"] = a.dim();
  emit(cfg, j, out);
  return r.compatible ? kOk : kNotCompatible;
}

int cmd_decompose(const RunConfig& cfg, const std::string& pa, const std::string& pb, const std::string& blocks,
                  std::ostream& out) {
  const auto [a, b] = read_effect_pair(pa, pb, cfg.tol);
  if (!blocks.empty()) write_json_file(blocks, five_block_to_json(five_block_decompose(a, b, cfg.tol)));
  const CanonicalForm cf = canonicalize(a, b, cfg.tol);
  const ReconstructionResidual res = reconstruction_residual(cf, a, b);
  Json j = canonical_to_json(cf);
  j["residual"] = {{"a", res.a}, {"b", res.b}, {"max", res.max()}};
  emit(cfg, j, out);
  return kOk;
}

struct GenOptions {
  std::string kind;
  Index n = 2;
  Index sites = 1;
  Index rank = -1;
  std::uint64_t seed = 0;
  double delta = 0.05;
  bool strict = false;
  std::string prefix = "gen";
};

int cmd_gen(const GenOptions& o, std::ostream& out) {
  std::vector<std::pair<std::string, Matrix>> files;
  if (o.kind == "pair") {
    const GeneratedPair g = random_abscompat_pair(o.n, o.seed, o.delta);
    files = {{o.prefix + "_a.json", g.a.matrix()}, {o.prefix + "_b.json", g.b.matrix()}};
  } else if (o.kind == "commuting") {
    const CommutingPair g = random_commuting_strict_pair(o.n, o.seed, o.delta);
    files = {{o.prefix + "_a.json", g.a.matrix()}, {o.prefix + "_b.json", g.b.matrix()}};
  } else if (o.kind == "unitary") {
    const Matrix u = o.strict ? embed(strict_unitary_from_params(random_strict_unitary_params(o.sites, o.seed, o.delta)))
                              : haar_unitary(o.n, o.seed).matrix();
    files = {{o.prefix + ".json", u}};
  } else if (o.kind == "projection") {
    Matrix p;
    if (o.strict) {
      p = embed(strict_projection_from_params(random_strict_projection_params(o.sites, o.seed, o.delta)));
    } else {
      const Index rank = o.rank < 0 ? o.n / 2 : o.rank;
      if (rank > o.n) throw Error(ErrorKind::DimensionMismatch, "rank exceeds dimension");
      p = random_projection(o.n, rank, o.seed).matrix();
    }
    files = {{o.prefix + ".json", p}};
  } else {
    throw Error(ErrorKind::ParseError, "unknown kind '" + o.kind + "'");
  }
  Json names = Json::array();
  for (const auto& [path, m] : files) {
    write_json_file(path, matrix_to_json(m));
    names.push_back(path);
  }
  out << Json{{"kind", o.kind}, {"seed", o.seed}, {"files", names}}.dump(2) << '\n';
  return kOk;
}

struct GeometryOptions {
  std::string a, b;
  std::string p, q;
  double lambda = -1.0;
  std::size_t sample = 0;
};

void write_csv_row(std::ostream& os, const std::string& kind, const std::string& label, const BlochPoint& pt) {
  os << kind << ',' << label << ',' << pt.x << ',' << pt.y << ',' << pt.z << '\n';
}

int cmd_geometry(const RunConfig& cfg, const GeometryOptions& o, std::ostream& out) {
  PairSpecM2 spec;
  if (!o.a.empty()) {
    if (o.b.empty()) throw Error(ErrorKind::ParseError, "geometry needs two matrix files");
    const auto [a, b] = read_effect_pair(o.a, o.b, cfg.tol);
    spec = decompose_pair_m2(a, b, cfg.tol);
  } else {
    if (o.p.empty() || o.q.empty() || o.lambda < 0.0) {
      throw Error(ErrorKind::ParseError, "geometry needs matrix files or --P, --Q and --lambda");
    }
    spec.p = Projection::from(bloch_inverse(parse_point(o.p), cfg.tol).matrix(), cfg.tol);
    spec.q = Projection::from(bloch_inverse(parse_point(o.q), cfg.tol).matrix(), cfg.tol);
    spec.lambda = o.lambda;
  }
  const GeometryReport r = geometry_report(spec, cfg.tol);
  const std::vector<BlochPoint> samples = sample_sphere(r.sphere, o.sample);

  if (cfg.format == "csv") {
    std::ostringstream os;
    os << std::setprecision(17);
    os << "kind,label,x,y,z\n";
    write_csv_row(os, "point", "P", r.p);
    write_csv_row(os, "point", "Pp", r.p_prime);
    write_csv_row(os, "point", "Q", r.q);
    write_csv_row(os, "point", "Qp", r.q_prime);
    write_csv_row(os, "point", "A", r.a);
    write_csv_row(os, "point", "B", r.b);
    write_csv_row(os, "center", "ball", kBallCenter);
    write_csv_row(os, "center", "pivotal", r.sphere.center);
    for (std::size_t i = 0; i < samples.size(); ++i) write_csv_row(os, "sample", std::to_string(i), samples[i]);
    const GeometryResiduals& g = r.residuals;
    const std::pair<const char*, double> rows[] = {{"tangency", g.tangency},
                                                   {"coplanarity", g.coplanarity},
                                                   {"parallelism", g.parallelism},
                                                   {"right_angle", g.right_angle},
                                                   {"antipodality", g.antipodality}};
    for (const auto& [name, v] : rows) os << "residual," << name << ',' << v << ",,\n";
    if (cfg.out.empty()) {
      out << os.str();
    } else {
      std::ofstream f(cfg.out);
      if (!f) throw Error(ErrorKind::ParseError, "cannot write " + cfg.out);
      f << os.str();
    }
    return kOk;
  }
  if (cfg.format != "json") throw Error(ErrorKind::ParseError, "unknown format '" + cfg.format + "'");
  Json j = geometry_to_json(r);
  if (o.sample > 0) {
    Json pts = Json::array();
    for (const BlochPoint& s : samples) pts.push_back(point_to_json(s));
    j["samples"] = pts;
  }
  emit(cfg, j, out);
  return kOk;
}

int cmd_fuzz(const RunConfig& cfg, const std::string& suite, std::size_t trials, std::uint64_t seed,
             const std::string& fail_path, std::ostream& out) {
  const FuzzReport report = run_fuzz_suite(suite, trials, seed, cfg.tol);
  emit(cfg, fuzz_report_to_json(report), out);
  if (report.all_passed()) return kOk;
  Json bundle = Json::array();
  for (const FuzzFailure& f : report.failures) {
    bundle.push_back({{"suite", report.suite},
                      {"property", f.property},
                      {"trial", f.trial},
                      {"seed", f.seed},
                      {"message", f.message},
                      {"instance", f.instance}});
  }
  write_json_file(fail_path.empty() ? suite + ".fail.json" : fail_path, bundle);
  return kStructural;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Absolutely compatible pairs of effects: check, decompose, generate, visualize, fuzz"};
  app.name("abscompat");
  app.require_subcommand(1);
  app.fallthrough();

  RunConfig cfg;
  app.add_option("--tol-herm", cfg.tol.herm, "Hermiticity tolerance");
  app.add_option("--tol-spec", cfg.tol.spec, "Spectral tolerance");
  app.add_option("--tol-compat", cfg.tol.compat, "Compatibility residual bound");
  app.add_option("--tol-canon", cfg.tol.canon, "Canonical reconstruction bound");
  app.add_option("--tol-geo", cfg.tol.geo, "Geometry tolerance");
  app.add_option("--format", cfg.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--out", cfg.out, "Output file (stdout when omitted)");

  std::string path_a, path_b, blocks_path;
  auto* check = app.add_subcommand("check", "Test two effects for absolute compatibility");
  check->add_option("a", path_a, "Matrix JSON file")->required();
  check->add_option("b", path_b, "Matrix JSON file")->required();

  auto* decompose = app.add_subcommand("decompose", "Canonical form of a strict compatible pair");
  decompose->add_option("a", path_a, "Matrix JSON file")->required();
  decompose->add_option("b", path_b, "Matrix JSON file")->required();
  decompose->add_option("--blocks", blocks_path, "Also write the five-block decomposition here");

  GenOptions gen_opts;
  auto* gen = app.add_subcommand("gen", "Generate random instances");
  gen->add_option("kind", gen_opts.kind, "pair | unitary | projection | commuting")
      ->required()
      ->check(CLI::IsMember({"pair", "unitary", "projection", "commuting"}));
  gen->add_option("--n", gen_opts.n, "Dimension");
  gen->add_option("--sites", gen_opts.sites, "Number of M2 sites for --strict");
  gen->add_option("--rank", gen_opts.rank, "Projection rank (default n/2)");
  gen->add_option("--seed", gen_opts.seed, "Seed");
  gen->add_option("--delta", gen_opts.delta, "Distance of generated spectra from 0 and 1");
  gen->add_flag("--strict", gen_opts.strict, "Strict unitary / projection over the diagonal algebra");
  gen->add_option("--prefix", gen_opts.prefix, "Output file prefix");

  GeometryOptions geo_opts;
  auto* geometry = app.add_subcommand("geometry", "Pivotal-sphere geometry of a 2x2 pair");
  geometry->add_option("a", geo_opts.a, "Matrix JSON file");
  geometry->add_option("b", geo_opts.b, "Matrix JSON file");
  geometry->add_option("--P", geo_opts.p, "Pivot as x,y,z");
  geometry->add_option("--Q", geo_opts.q, "Second projection as x,y,z");
  geometry->add_option("--lambda", geo_opts.lambda, "Index in (0, 1)");
  geometry->add_option("--sample", geo_opts.sample, "Number of pivotal-sphere sample points");

  std::string suite, fail_path;
  std::size_t trials = 100;
  std::uint64_t seed = 0;
  auto* fuzz = app.add_subcommand("fuzz", "Run a seeded property suite");
  fuzz->add_option("suite", suite, "compat | canonical | m2 | geometry | equivalences")->required();
  fuzz->add_option("--trials", trials, "Trial count")->check(CLI::PositiveNumber);
  fuzz->add_option("--seed", seed, "Base seed");
  fuzz->add_option("--fail-out", fail_path, "Failure bundle path (default <suite>.fail.json)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    check_tolerances(cfg.tol);
    if (check->parsed()) return cmd_check(cfg, path_a, path_b, out);
    if (decompose->parsed()) return cmd_decompose(cfg, path_a, path_b, blocks_path, out);
    if (gen->parsed()) {
      if (!cfg.out.empty() && gen->count("--prefix") == 0) gen_opts.prefix = cfg.out;
      return cmd_gen(gen_opts, out);
    }
    if (geometry->parsed()) return cmd_geometry(cfg, geo_opts, out);
    if (fuzz->parsed()) return cmd_fuzz(cfg, suite, trials, seed, fail_path, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}

}  // namespace abscompat::cli
