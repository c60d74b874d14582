#include "bikelab/curve_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace bikelab {

namespace {

Json points_to_json(const std::vector<Vec>& pts, int dim) {
  Json arr = Json::array();
  for (const auto& p : pts) arr.push_back(vec_to_json(p, dim));
  return arr;
}

std::pair<int, std::vector<Vec>> points_from_json(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains("dim") || !j.contains(key))
    throw Error(ErrorCode::InvalidInput, std::string("expected object with \"dim\" and \"") + key + "\"");
  const int dim = j.at("dim").get<int>();
  if (dim != 2 && dim != 3) throw Error(ErrorCode::InvalidInput, "dim must be 2 or 3");
  std::vector<Vec> pts;
  for (const auto& row : j.at(key)) {
    if (!row.is_array() || static_cast<int>(row.size()) != dim)
      throw Error(ErrorCode::InvalidInput, "point with wrong number of coordinates");
    Vec p = Vec::Zero();
    for (int k = 0; k < dim; ++k) p[k] = row[k].get<double>();
    pts.push_back(p);
  }
  return {dim, std::move(pts)};
}

std::string read_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidInput, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void dump_rec(const Json& j, int indent, int depth, std::string& out) {
  const std::string pad(indent > 0 ? static_cast<std::size_t>(indent * (depth + 1)) : 0, ' ');
  const std::string close_pad(indent > 0 ? static_cast<std::size_t>(indent * depth) : 0, ' ');
  const char* nl = indent > 0 ? "\n" : "";
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{";
      out += nl;
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) {
          out += ",";
          out += nl;
        }
        first = false;
        out += pad;
        out += Json(it.key()).dump();
        out += indent > 0 ? ": " : ":";
        dump_rec(it.value(), indent, depth + 1, out);
      }
      out += nl;
      out += close_pad + "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // numeric rows stay on one line
      bool flat = true;
      for (const auto& e : j) flat = flat && e.is_primitive();
      out += "[";
      bool first = true;
      for (const auto& e : j) {
        if (!first) out += flat ? ", " : ",";
        if (!flat) {
          out += nl;
          out += pad;
        }
        first = false;
        dump_rec(e, indent, depth + 1, out);
      }
      if (!flat) {
        out += nl;
        out += close_pad;
      }
      out += "]";
      return;
    }
    case Json::value_t::number_float: {
      const double v = j.get<double>();
      if (!std::isfinite(v)) {
        out += "null";
        return;
      }
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", v);
      out += buf;
      return;
    }
    default:
      out += j.dump();
  }
}

}  // namespace

Json vec_to_json(const Vec& v, int dim) {
  Json row = Json::array();
  for (int k = 0; k < dim; ++k) row.push_back(v[k]);
  return row;
}

Json curve_to_json(const SampledCurve& c) {
  Json j;
  j["dim"] = c.dim();
  j["closed"] = c.closed();
  j["points"] = points_to_json(c.points(), c.dim());
  return j;
}

Json polygon_to_json(const Polygon& p) {
  Json j;
  j["dim"] = p.dim();
  j["closed"] = p.closed();
  j["points"] = points_to_json(p.vertices(), p.dim());
  return j;
}

SampledCurve curve_from_json(const Json& j) {
  auto [dim, pts] = points_from_json(j, "points");
  const bool closed = j.value("closed", true);
  if (!closed) throw Error(ErrorCode::InvalidInput, "open curves are not supported");
  return SampledCurve(dim, std::move(pts), true);
}

Polygon polygon_from_json(const Json& j) {
  auto [dim, pts] = points_from_json(j, j.contains("points") ? "points" : "vertices");
  return Polygon(dim, std::move(pts), j.value("closed", true));
}

SampledCurve read_curve_file(const std::string& path) {
  try {
    return curve_from_json(Json::parse(read_text(path)));
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::InvalidInput, path + ": " + e.what());
  }
}

Polygon read_polygon_file(const std::string& path) {
  try {
    return polygon_from_json(Json::parse(read_text(path)));
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::InvalidInput, path + ": " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::InvalidInput, "cannot write " + path);
  out << text;
}

std::string dump_json(const Json& j, int indent) {
  std::string out;
  dump_rec(j, indent, 0, out);
  return out;
}

}  // namespace bikelab
