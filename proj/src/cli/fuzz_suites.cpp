#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "abscompat/cli.hpp"
#include "abscompat/fuzzgen.hpp"

namespace abscompat::cli {

namespace {

constexpr double kDelta = 0.05;
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kMaxRecordedFailures = 10;

// eval returns the residual compared against bound; when `instance` is
// non-null it also records the inputs for replay.
struct Property {
  std::string name;
  double bound;
  std::function<double(std::uint64_t seed, std::size_t trial, Json* instance)> eval;
};

double flag(bool failed) { return failed ? 1.0 : 0.0; }

bool sum_below_identity(const Effect& a, const Effect& b, const Tolerances& tol) {
  return eig_hermitian(Matrix(a.matrix() + b.matrix()), tol).eigenvalues.maxCoeff() <= 1.0 + tol.spec;
}

void record_pair(Json* instance, const char* generator, Index n, std::uint64_t seed, const Matrix& a,
                 const Matrix& b) {
  if (instance == nullptr) return;
  *instance = {{"generator", generator}, {"n", n}, {"seed", seed}, {"a", matrix_to_json(a)}, {"b", matrix_to_json(b)}};
}

void record_spec(Json* instance, std::uint64_t seed, const PairSpecM2& spec) {
  if (instance == nullptr) return;
  *instance = {{"generator", "random_pair_spec_m2"},
               {"seed", seed},
               {"lambda", spec.lambda},
               {"P", matrix_to_json(spec.p.matrix())},
               {"Q", matrix_to_json(spec.q.matrix())}};
}

Index cycle(std::size_t trial, std::initializer_list<Index> values) {
  return *(values.begin() + static_cast<std::ptrdiff_t>(trial % values.size()));
}

std::vector<Property> compat_suite(const Tolerances& tol) {
  std::vector<Property> s;
  s.push_back({"definition_identity", tol.compat, [tol](std::uint64_t seed, std::size_t i, Json* inst) {
                 const Index n = cycle(i, {2, 4, 8, 16});
                 const GeneratedPair g = random_abscompat_pair(n, seed, kDelta);
                 record_pair(inst, "random_abscompat_pair", n, seed, g.a.matrix(), g.b.matrix());
                 return is_abs_compatible(g.a, g.b, tol).residual;
               }});
  s.push_back({"symmetry", 0.0, [tol](std::uint64_t seed, std::size_t i, Json* inst) {
                 const Index n = cycle(i, {2, 4, 8, 16});
                 const GeneratedPair g = random_abscompat_pair(n, seed, kDelta);
                 record_pair(inst, "random_abscompat_pair", n, seed, g.a.matrix(), g.b.matrix());
                 return std::abs(is_abs_compatible(g.a, g.b, tol).residual - is_abs_compatible(g.b, g.a, tol).residual);
               }});
  s.push_back({"five_block", tol.block, [tol](std::uint64_t seed, std::size_t, Json* inst) {
                 const FiveBlockFixture f = random_five_block_pair(seed, kDelta);
                 record_pair(inst, "random_five_block_pair", f.a.dim(), seed, f.a.matrix(), f.b.matrix());
                 const FiveBlockDecomposition d = five_block_decompose(f.a, f.b, tol);
                 for (std::size_t k = 0; k < 5; ++k) {
                   if (d.blocks[k].basis.cols() != f.ranks[k]) return kInf;
                 }
                 return std::max(d.off_block_mass(f.a.matrix()), d.off_block_mass(f.b.matrix()));
               }});
  return s;
}

std::vector<Property> canonical_suite(const Tolerances& tol) {
  std::vector<Property> s;
  s.push_back({"round_trip", tol.canon, [tol](std::uint64_t seed, std::size_t i, Json* inst) {
                 const Index n = cycle(i, {2, 4, 8});
                 const GeneratedPair g = random_abscompat_pair(n, seed, kDelta);
                 record_pair(inst, "random_abscompat_pair", n, seed, g.a.matrix(), g.b.matrix());
                 return reconstruction_residual(canonicalize(g.a, g.b, tol), g.a, g.b).max();
               }});
  s.push_back({"x0_multiset", 1e-9, [tol](std::uint64_t seed, std::size_t i, Json* inst) {
                 const Index n = cycle(i, {2, 4, 8});
                 const GeneratedPair g = random_abscompat_pair(n, seed, kDelta);
                 record_pair(inst, "random_abscompat_pair", n, seed, g.a.matrix(), g.b.matrix());
                 RealVector got = canonicalize(g.a, g.b, tol).x0;
                 RealVector want = g.x0;
                 std::sort(got.begin(), got.end());
                 std::sort(want.begin(), want.end());
                 return (got - want).cwiseAbs().maxCoeff();
               }});
  s.push_back({"exchanged_round_trip", tol.canon, [tol](std::uint64_t seed, std::size_t i, Json* inst) {
                 const Index n = cycle(i, {2, 4, 8});
                 const GeneratedPair g = random_abscompat_pair(n, seed, kDelta);
                 record_pair(inst, "random_abscompat_pair", n, seed, g.a.matrix(), g.b.matrix());
                 return reconstruction_residual(exchanged_form(canonicalize(g.a, g.b, tol), tol), g.a, g.b).max();
               }});
  s.push_back({"unitary_parametrization", 1e-9, [tol](std::uint64_t seed, std::size_t i, Json* inst) {
                 const Index sites = cycle(i, {1, 2, 3, 4});
                 const StrictUnitaryParams q = random_strict_unitary_params(sites, seed, kDelta);
                 const M2OverDiag u = strict_unitary_from_params(q, tol);
                 if (inst != nullptr) *inst = {{"generator", "random_strict_unitary_params"}, {"sites", sites}, {"seed", seed}, {"U", matrix_to_json(embed(u))}};
                 if (!is_strict_unitary(u, tol)) return kInf;
                 const StrictUnitaryParams back = strict_unitary_params(u, tol);
                 const Matrix rebuilt = embed(strict_unitary_from_params(back, tol));
                 return std::max({max_abs(rebuilt - embed(u)), (back.a0 - q.a0).cwiseAbs().maxCoeff(),
                                  (back.w1 - q.w1).cwiseAbs().maxCoeff(), (back.w2 - q.w2).cwiseAbs().maxCoeff(),
                                  (back.w3 - q.w3).cwiseAbs().maxCoeff()});
               }});
  s.push_back({"projection_to_pivot", 1e-9, [tol](std::uint64_t seed, std::size_t i, Json* inst) {
                 const Index sites = cycle(i, {1, 2, 3, 4});
                 const StrictProjectionParams q = random_strict_projection_params(sites, seed, kDelta);
                 const M2OverDiag p = strict_projection_from_params(q, tol);
                 if (inst != nullptr) *inst = {{"generator", "random_strict_projection_params"}, {"sites", sites}, {"seed", seed}, {"P", matrix_to_json(embed(p))}};
                 if (!is_strict_projection(p, tol)) return kInf;
                 const StrictProjectionParams back = strict_projection_params(p, tol);
                 const Matrix v = embed(conjugate_to_pivot(p, tol));
                 const Matrix conj = v.adjoint() * embed(pivot_p0(sites)) * v;
                 return std::max({op_norm(conj - embed(p)), (back.a0 - q.a0).cwiseAbs().maxCoeff(),
                                  (back.w - q.w).cwiseAbs().maxCoeff()});
               }});
  s.push_back({"jordan_identity", 1e-10, [tol](std::uint64_t seed, std::size_t i, Json* inst) {
                 const Index n = cycle(i, {1, 2, 3, 4});
                 const CommutingPair c = random_commuting_strict_pair(n, seed, kDelta);
                 record_pair(inst, "random_commuting_strict_pair", n, seed, c.a.matrix(), c.b.matrix());
                 const EffectPair t = construct_from_commuting(c.a, c.b, tol);
                 Matrix expected = Matrix::Zero(2 * n, 2 * n);
                 expected.bottomRightCorner(n, n) =
                     identity(n) - c.a.matrix() * c.a.matrix() - c.b.matrix() * c.b.matrix();
                 return op_norm(jordan_product(t.a, t.b).matrix() - expected);
               }});
  return s;
}

double expect_error(ErrorKind want, const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return flag(e.kind() != want);
  }
  return 1.0;
}

std::vector<Property> m2_suite(const Tolerances& tol) {
  std::vector<Property> s;
  s.push_back({"construct_compatible", tol.compat, [tol](std::uint64_t seed, std::size_t, Json* inst) {
                 const PairSpecM2 spec = random_pair_spec_m2(seed, kDelta);
                 record_spec(inst, seed, spec);
                 const M2Pair pair = pair_from_projections(spec, tol);
                 return is_abs_compatible(pair.a, pair.b, tol).residual;
               }});
  s.push_back({"decompose_round_trip", 1e-9, [tol](std::uint64_t seed, std::size_t, Json* inst) {
                 const PairSpecM2 spec = random_pair_spec_m2(seed, kDelta);
                 record_spec(inst, seed, spec);
                 const M2Pair pair = pair_from_projections(spec, tol);
                 const PairSpecM2 back = decompose_pair_m2(pair.a, pair.b, tol);
                 return std::max({std::abs(back.lambda - spec.lambda), max_abs(back.p.matrix() - spec.p.matrix()),
                                  max_abs(back.q.matrix() - spec.q.matrix())});
               }});
  s.push_back({"rejects_equal_pair", 0.0, [tol](std::uint64_t seed, std::size_t, Json* inst) {
                 const PairSpecM2 spec = random_pair_spec_m2(seed, kDelta);
                 record_spec(inst, seed, spec);
                 const M2Pair pair = pair_from_projections(spec, tol);
                 return expect_error(ErrorKind::NotAbsolutelyCompatible,
                                     [&] { decompose_pair_m2(pair.a, pair.a, tol); });
               }});
  s.push_back({"rejects_projections", 0.0, [tol](std::uint64_t seed, std::size_t, Json* inst) {
                 const PairSpecM2 spec = random_pair_spec_m2(seed, kDelta);
                 record_spec(inst, seed, spec);
                 return expect_error(ErrorKind::NotStrict, [&] { decompose_pair_m2(spec.p, spec.q, tol); });
               }});
  return s;
}

std::vector<Property> geometry_suite(const Tolerances& tol) {
  std::vector<Property> s;
  using Field = double GeometryResiduals::*;
  const std::pair<const char*, Field> fields[] = {{"tangency", &GeometryResiduals::tangency},
                                                  {"coplanarity", &GeometryResiduals::coplanarity},
                                                  {"parallelism", &GeometryResiduals::parallelism},
                                                  {"right_angle", &GeometryResiduals::right_angle},
                                                  {"antipodality", &GeometryResiduals::antipodality}};
  for (const auto& [name, field] : fields) {
    s.push_back({name, tol.geo, [tol, field = field](std::uint64_t seed, std::size_t, Json* inst) {
                   const PairSpecM2 spec = random_pair_spec_m2(seed, kDelta);
                   record_spec(inst, seed, spec);
                   return geometry_report(spec, tol).residuals.*field;
                 }});
  }
  s.push_back({"point_bijection", tol.geo, [tol](std::uint64_t seed, std::size_t, Json* inst) {
                 const PairSpecM2 spec = random_pair_spec_m2(seed, kDelta);
                 record_spec(inst, seed, spec);
                 const GeometryReport r = geometry_report(spec, tol);
                 SplitMix64 rng(seed ^ 0x5bd1e995ULL);
                 const BlochPoint boundary = random_boundary_point(rng);
                 const BoundaryPair fwd = points_from_boundary(r.sphere, boundary, tol);
                 const BoundaryPair back = point_bijection(r.sphere, fwd.c, tol);
                 const BoundaryPair at_a = point_bijection(r.sphere, r.a, tol);
                 return std::max({distance(back.r, boundary), distance(back.d, fwd.d), distance(at_a.r, r.q),
                                  distance(at_a.d, r.b)});
               }});
  s.push_back({"spheroid_focal_sum", 1e-8, [tol](std::uint64_t seed, std::size_t, Json* inst) {
                 const PairSpecM2 spec = random_pair_spec_m2(seed, kDelta);
                 record_spec(inst, seed, spec);
                 const Effect a = pair_from_projections(spec, tol).a;
                 return spheroid_residual(a, random_compatible_partners(a, 100, seed), tol).relative_spread();
               }});
  return s;
}

std::vector<Property> equivalences_suite(const Tolerances& tol) {
  std::vector<Property> s;
  s.push_back({"orthogonal_pairs", 0.0, [tol](std::uint64_t seed, std::size_t i, Json* inst) {
                 const Index n = cycle(i, {2, 3, 4, 6});
                 const CommutingPair c = random_orthogonal_pair(n, seed, kDelta);
                 record_pair(inst, "random_orthogonal_pair", n, seed, c.a.matrix(), c.b.matrix());
                 const bool lhs = is_orthogonal(c.a, c.b, tol);
                 const bool rhs = sum_below_identity(c.a, c.b, tol) && is_abs_compatible(c.a, c.b, tol).compatible;
                 return flag(!lhs) + flag(!rhs);
               }});
  s.push_back({"compatible_not_orthogonal", 0.0, [tol](std::uint64_t seed, std::size_t i, Json* inst) {
                 const Index n = cycle(i, {2, 4, 6, 8});
                 const GeneratedPair g = random_abscompat_pair(n, seed, kDelta);
                 record_pair(inst, "random_abscompat_pair", n, seed, g.a.matrix(), g.b.matrix());
                 const bool lhs = is_orthogonal(g.a, g.b, tol);
                 const bool rhs = sum_below_identity(g.a, g.b, tol) && is_abs_compatible(g.a, g.b, tol).compatible;
                 return flag(lhs) + flag(lhs != rhs);
               }});
  s.push_back({"subunital_not_orthogonal", 0.0, [tol](std::uint64_t seed, std::size_t i, Json* inst) {
                 const Index n = cycle(i, {1, 2, 3, 4});
                 const CommutingPair c = random_subunital_strict_pair(n, seed, kDelta);
                 record_pair(inst, "random_subunital_strict_pair", n, seed, c.a.matrix(), c.b.matrix());
                 const bool lhs = is_orthogonal(c.a, c.b, tol);
                 const bool rhs = sum_below_identity(c.a, c.b, tol) && is_abs_compatible(c.a, c.b, tol).compatible;
                 return flag(lhs) + flag(lhs != rhs);
               }});
  s.push_back({"projection_criterion", 0.0, [tol](std::uint64_t seed, std::size_t i, Json* inst) {
                 const Index n = cycle(i, {1, 2, 3, 4, 5, 6});
                 const ProjectionEffectPair pe = random_projection_effect_pair(n, seed, kDelta, i % 2 == 0);
                 record_pair(inst, "random_projection_effect_pair", n, seed, pe.p.matrix(), pe.a.matrix());
                 const EquivalencePair eq = projection_compat_equiv(pe.p, pe.a, tol);
                 return flag(eq.lhs != eq.rhs);
               }});
  return s;
}

std::vector<Property> make_suite(std::string_view name, const Tolerances& tol) {
  if (name == "compat") return compat_suite(tol);
  if (name == "canonical") return canonical_suite(tol);
  if (name == "m2") return m2_suite(tol);
  if (name == "geometry") return geometry_suite(tol);
  if (name == "equivalences") return equivalences_suite(tol);
  throw Error(ErrorKind::UnknownSuite, "'" + std::string(name) + "'");
}

}  // namespace

bool FuzzReport::all_passed() const {
  return std::all_of(properties.begin(), properties.end(), [](const PropertyResult& p) { return p.failed == 0; });
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"compat", "canonical", "m2", "geometry", "equivalences"};
  return names;
}

FuzzReport run_fuzz_suite(std::string_view suite, std::size_t trials, std::uint64_t seed, const Tolerances& tol) {
  const std::vector<Property> props = make_suite(suite, tol);
  FuzzReport report;
  report.suite = std::string(suite);
  report.trials = trials;
  report.seed = seed;
  for (const Property& prop : props) {
    PropertyResult res;
    res.name = prop.name;
    res.bound = prop.bound;
    std::size_t recorded = 0;
    for (std::size_t i = 0; i < trials; ++i) {
      const std::uint64_t s = trial_seed(seed, i);
      double r = kInf;
      std::string message;
      try {
        r = prop.eval(s, i, nullptr);
      } catch (const Error& e) {
        message = e.what();
      }
      const bool ok = r <= prop.bound;
      if (std::isfinite(r)) res.worst_residual = std::max(res.worst_residual, r);
      if (ok) {
        ++res.passed;
        continue;
      }
      ++res.failed;
      if (!res.first_failure_seed) res.first_failure_seed = s;
      if (recorded < kMaxRecordedFailures) {
        ++recorded;
        FuzzFailure f;
        f.property = prop.name;
        f.trial = i;
        f.seed = s;
        f.message = message.empty() ? "residual " + std::to_string(r) + " exceeds bound" : message;
        try {
          prop.eval(s, i, &f.instance);
        } catch (const Error&) {
        }
        report.failures.push_back(std::move(f));
      }
    }
    if (res.failed > 0 && res.worst_residual == 0.0) res.worst_residual = kInf;
    report.properties.push_back(std::move(res));
  }
  return report;
}

Json fuzz_report_to_json(const FuzzReport& report) {
  Json props = Json::array();
  for (const PropertyResult& p : report.properties) {
    Json worst = std::isfinite(p.worst_residual) ? Json(p.worst_residual) : Json("inf");
    props.push_back({{"name", p.name},
                     {"bound", p.bound},
                     {"passed", p.passed},
                     {"failed", p.failed},
                     {"worst_residual", worst},
                     {"first_failure_seed", p.first_failure_seed ? Json(*p.first_failure_seed) : Json(nullptr)}});
  }
  Json failures = Json::array();
  for (const FuzzFailure& f : report.failures) {
    failures.push_back({{"property", f.property}, {"trial", f.trial}, {"seed", f.seed}, {"message", f.message}});
  }
  return {{"suite", report.suite},
          {"trials", report.trials},
          {"seed", report.seed},
          {"all_passed", report.all_passed()},
          {"properties", props},
          {"failures", failures}};
}

}  // namespace abscompat::cli
