#pragma once

#include <string>

#include <json.hpp>

#include "bikelab/curve.hpp"

namespace bikelab {

using Json = nlohmann::ordered_json;

// {"dim": 2|3, "closed": true, "points": [[x, y(, z)], ...]}
Json curve_to_json(const SampledCurve& c);
Json polygon_to_json(const Polygon& p);
SampledCurve curve_from_json(const Json& j);
Polygon polygon_from_json(const Json& j);

SampledCurve read_curve_file(const std::string& path);
Polygon read_polygon_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

/// Deterministic serialization: key order as inserted, doubles with 17
/// significant digits.
std::string dump_json(const Json& j, int indent = 2);

Json vec_to_json(const Vec& v, int dim);

}  // namespace bikelab
