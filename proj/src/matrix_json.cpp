#include <fstream>
#include <sstream>

#include "abscompat/matrix_json.hpp"

namespace abscompat {
namespace {

[[noreturn]] void parse_error(const std::string& msg) { throw Error(ErrorKind::ParseError, msg); }

Json real_vector_to_json(const RealVector& v) {
  Json out = Json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

RealVector real_vector_from_json(const Json& j, const char* what) {
  if (!j.is_array()) parse_error(std::string(what) + " must be an array");
  RealVector v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) parse_error(std::string(what) + " entries must be numbers");
    v(static_cast<Index>(i)) = j[i].get<double>();
  }
  return v;
}

}  // namespace

Json complex_to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

Complex complex_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    parse_error("complex entries must be [re, im]");
  return {j[0].get<double>(), j[1].get<double>()};
}

Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(complex_to_json(m(i, j)));
    rows.push_back(std::move(row));
  }
  return Json{{"n", m.rows()}, {"entries", std::move(rows)}};
}

Matrix matrix_from_json(const Json& j) {
  if (!j.is_object()) parse_error("matrix must be a JSON object");
  if (!j.contains("n") || !j["n"].is_number_integer()) parse_error("matrix needs integer field \"n\"");
  if (!j.contains("entries") || !j["entries"].is_array()) parse_error("matrix needs array field \"entries\"");
  const auto n = j["n"].get<long long>();
  if (n < 1) parse_error("\"n\" must be positive");
  const Json& rows = j["entries"];
  if (rows.size() != static_cast<std::size_t>(n)) parse_error("\"entries\" must have n rows");
  Matrix m(n, n);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!rows[i].is_array() || rows[i].size() != static_cast<std::size_t>(n))
      parse_error("every row of \"entries\" must have n entries");
    for (std::size_t k = 0; k < rows[i].size(); ++k)
      m(static_cast<Index>(i), static_cast<Index>(k)) = complex_from_json(rows[i][k]);
  }
  if (!m.allFinite()) parse_error("matrix entries must be finite");
  return m;
}

Json point_to_json(const BlochPoint& p) { return Json::array({p.x, p.y, p.z}); }

BlochPoint point_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 3) parse_error("point must be [x, y, z]");
  for (const Json& c : j)
    if (!c.is_number()) parse_error("point coordinates must be numbers");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

Json compat_report_to_json(const CompatReport& r) {
  return Json{{"compatible", r.compatible}, {"residual", r.residual}};
}

Json five_block_to_json(const FiveBlockDecomposition& d) {
  Json projections = Json::object();
  Json blocks = Json::object();
  for (BlockId id : kBlockOrder) {
    const Block& blk = d[id];
    const std::string key(block_name(id));
    projections[key] = matrix_to_json(blk.projection.matrix());
    Json entry{{"rank", blk.basis.cols()}};
    if (blk.basis.cols() > 0) {
      entry["a"] = matrix_to_json(blk.a);
      entry["b"] = matrix_to_json(blk.b);
    } else {
      entry["a"] = nullptr;
      entry["b"] = nullptr;
    }
    blocks[key] = std::move(entry);
  }
  return Json{{"projections", std::move(projections)}, {"blocks", std::move(blocks)}};
}

Json canonical_to_json(const CanonicalForm& cf) {
  Json w = Json::array();
  for (Index k = 0; k < cf.p.w.size(); ++k) w.push_back(complex_to_json(cf.p.w(k)));
  return Json{{"m", cf.sites()},
              {"x0", real_vector_to_json(cf.x0)},
              {"a0", real_vector_to_json(cf.p.a0)},
              {"w", std::move(w)},
              {"U0", matrix_to_json(cf.u0.matrix())}};
}

CanonicalForm canonical_from_json(const Json& j) {
  if (!j.is_object()) parse_error("canonical form must be a JSON object");
  for (const char* key : {"m", "x0", "a0", "w", "U0"})
    if (!j.contains(key)) parse_error(std::string("canonical form is missing \"") + key + "\"");
  if (!j["m"].is_number_integer()) parse_error("\"m\" must be an integer");
  CanonicalForm cf;
  const auto m = j["m"].get<long long>();
  cf.x0 = real_vector_from_json(j["x0"], "x0");
  cf.p.a0 = real_vector_from_json(j["a0"], "a0");
  if (!j["w"].is_array()) parse_error("\"w\" must be an array");
  cf.p.w.resize(static_cast<Index>(j["w"].size()));
  for (std::size_t k = 0; k < j["w"].size(); ++k) cf.p.w(static_cast<Index>(k)) = complex_from_json(j["w"][k]);
  const Matrix u0 = matrix_from_json(j["U0"]);
  if (cf.x0.size() != m || cf.p.a0.size() != m || cf.p.w.size() != m || u0.rows() != 2 * m)
    parse_error("canonical form field sizes disagree with \"m\"");
  cf.u0 = Unitary::unchecked(u0);
  return cf;
}

Json exchanged_to_json(const ExchangedForm& cf) {
  return Json{{"m", cf.x0.size()},
              {"x0", real_vector_to_json(cf.x0)},
              {"a0", real_vector_to_json(cf.a0)},
              {"U", matrix_to_json(cf.u.matrix())}};
}

Json geometry_to_json(const GeometryReport& r) {
  return Json{
      {"ball", {{"center", point_to_json(kBallCenter)}, {"radius", kBallRadius}}},
      {"pivotal",
       {{"pivot", point_to_json(r.sphere.pivot)},
        {"index", r.sphere.index},
        {"center", point_to_json(r.sphere.center)},
        {"radius", r.sphere.radius}}},
      {"points",
       {{"P", point_to_json(r.p)},
        {"Pp", point_to_json(r.p_prime)},
        {"Q", point_to_json(r.q)},
        {"Qp", point_to_json(r.q_prime)},
        {"A", point_to_json(r.a)},
        {"B", point_to_json(r.b)}}},
      {"residuals",
       {{"tangency", r.residuals.tangency},
        {"coplanarity", r.residuals.coplanarity},
        {"parallelism", r.residuals.parallelism},
        {"right_angle", r.residuals.right_angle},
        {"antipodality", r.residuals.antipodality}}},
  };
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) parse_error("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    parse_error(path.string() + ": " + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::ParseError, "cannot write " + path.string());
  out << j.dump(2) << '\n';
}

Matrix read_matrix_file(const std::filesystem::path& path) {
  const Json j = read_json_file(path);
  try {
    return matrix_from_json(j);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::ParseError) throw Error(ErrorKind::ParseError, path.string() + ": " + e.detail());
    throw;
  }
}

}  // namespace abscompat
