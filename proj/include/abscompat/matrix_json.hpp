#pragma once

#include <filesystem>

#include <json.hpp>

#include "abscompat/canonical.hpp"
#include "abscompat/compat.hpp"
#include "abscompat/m2_geometry.hpp"

namespace abscompat {

using Json = nlohmann::json;

/// {"n": <int>, "entries": [[[re, im], ...], ...]} row-major.
Json matrix_to_json(const Matrix& m);
/// Throws ParseError on any schema violation.
Matrix matrix_from_json(const Json& j);

Json complex_to_json(Complex z);
Complex complex_from_json(const Json& j);

Json point_to_json(const BlochPoint& p);
BlochPoint point_from_json(const Json& j);

Json compat_report_to_json(const CompatReport& r);

/// {"projections": {"p1": M, ...}, "blocks": {"p1": {"a": M, "b": M}, ...}}.
Json five_block_to_json(const FiveBlockDecomposition& d);

/// {"m": k, "x0": [...], "a0": [...], "w": [[re, im], ...], "U0": M}.
Json canonical_to_json(const CanonicalForm& cf);
CanonicalForm canonical_from_json(const Json& j);

Json exchanged_to_json(const ExchangedForm& cf);

/// {"ball": {...}, "pivotal": {...}, "points": {...}, "residuals": {...}}.
Json geometry_to_json(const GeometryReport& r);

/// Throws ParseError for unreadable files or malformed JSON.
Json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const Json& j);
Matrix read_matrix_file(const std::filesystem::path& path);

}  // namespace abscompat
