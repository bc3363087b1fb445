#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "avgop/compactness.hpp"
#include "avgop/operator.hpp"
#include "avgop/space.hpp"

namespace avgop {

using ordered_json = nlohmann::ordered_json;

/// 17-significant-digit decimal rendering; round-trips every double.
inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace io_detail {

inline void dump_value(const ordered_json& j, std::string& out, int indent, int depth) {
  const std::string pad(static_cast<std::size_t>(indent) * depth, ' ');
  const std::string pad_in(static_cast<std::size_t>(indent) * (depth + 1), ' ');
  switch (j.type()) {
    case nlohmann::detail::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      std::size_t i = 0;
      for (auto it = j.begin(); it != j.end(); ++it, ++i) {
        out += pad_in;
        out += ordered_json(it.key()).dump();
        out += ": ";
        dump_value(it.value(), out, indent, depth + 1);
        if (i + 1 < j.size()) out += ",";
        out += "\n";
      }
      out += pad + "}";
      return;
    }
    case nlohmann::detail::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      bool scalars_only = true;
      for (const auto& e : j)
        if (e.is_structured()) scalars_only = false;
      if (scalars_only) {
        out += "[";
        for (std::size_t i = 0; i < j.size(); ++i) {
          dump_value(j[i], out, indent, depth);
          if (i + 1 < j.size()) out += ", ";
        }
        out += "]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        out += pad_in;
        dump_value(j[i], out, indent, depth + 1);
        if (i + 1 < j.size()) out += ",";
        out += "\n";
      }
      out += pad + "]";
      return;
    }
    case nlohmann::detail::value_t::number_float: {
      const double v = j.get<double>();
      out += std::isfinite(v) ? fmt17(v) : "null";
      return;
    }
    default:
      out += j.dump();
      return;
  }
}

}  // namespace io_detail

/// Serializes a report document with keys in insertion order and every
/// floating-point number printed to 17 significant digits, so identical
/// inputs produce byte-identical documents.
inline std::string dump_json17(const ordered_json& j, int indent = 2) {
  std::string out;
  io_detail::dump_value(j, out, indent, 0);
  out += "\n";
  return out;
}

// ---------------------------------------------------------------------------
// Space documents.
//
// Schema:
//   { "metric": "euclidean" | "matrix",
//     "points": [[x, ...], ...],          -- euclidean form only
//     "distance_matrix": [[..], ..],      -- matrix form only
//     "weights": [w, ...] }               -- optional, defaults to all 1.0
// ---------------------------------------------------------------------------

inline MetricMeasureSpace space_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ValidationError("document", "space document must be a JSON object");
  if (!doc.contains("metric") || !doc["metric"].is_string())
    throw ValidationError("metric", "required string: \"euclidean\" or \"matrix\"");
  const std::string metric = doc["metric"].get<std::string>();
  if (metric != "euclidean" && metric != "matrix")
    throw ValidationError("metric", "must be \"euclidean\" or \"matrix\", got \"" + metric + "\"");

  std::vector<double> weights;
  if (doc.contains("weights")) {
    if (!doc["weights"].is_array()) throw ValidationError("weights", "must be an array of numbers");
    for (std::size_t i = 0; i < doc["weights"].size(); ++i) {
      if (!doc["weights"][i].is_number())
        throw ValidationError("weights[" + std::to_string(i) + "]", "must be a number");
      weights.push_back(doc["weights"][i].get<double>());
    }
  }

  if (metric == "euclidean") {
    if (doc.contains("distance_matrix"))
      throw ValidationError("distance_matrix", "present but metric is \"euclidean\"");
    if (!doc.contains("points") || !doc["points"].is_array() || doc["points"].empty())
      throw ValidationError("points", "required nonempty array of coordinate rows");
    std::vector<std::vector<double>> pts;
    for (std::size_t i = 0; i < doc["points"].size(); ++i) {
      const auto& row = doc["points"][i];
      if (!row.is_array() || row.empty())
        throw ValidationError("points[" + std::to_string(i) + "]",
                              "must be a nonempty array of numbers");
      std::vector<double> p;
      for (const auto& c : row) {
        if (!c.is_number())
          throw ValidationError("points[" + std::to_string(i) + "]", "must contain numbers only");
        p.push_back(c.get<double>());
      }
      pts.push_back(std::move(p));
    }
    return MetricMeasureSpace::from_points(pts, std::move(weights));
  }

  if (doc.contains("points")) throw ValidationError("points", "present but metric is \"matrix\"");
  if (!doc.contains("distance_matrix") || !doc["distance_matrix"].is_array() ||
      doc["distance_matrix"].empty())
    throw ValidationError("distance_matrix", "required nonempty square array");
  std::vector<std::vector<double>> m;
  for (std::size_t i = 0; i < doc["distance_matrix"].size(); ++i) {
    const auto& row = doc["distance_matrix"][i];
    if (!row.is_array())
      throw ValidationError("distance_matrix[" + std::to_string(i) + "]", "must be an array");
    std::vector<double> r;
    for (const auto& c : row) {
      if (!c.is_number())
        throw ValidationError("distance_matrix[" + std::to_string(i) + "]",
                              "must contain numbers only");
      r.push_back(c.get<double>());
    }
    m.push_back(std::move(r));
  }
  return MetricMeasureSpace::from_matrix(m, std::move(weights));
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open file for writing: " + path);
  out << content;
}

inline MetricMeasureSpace load_space(const std::string& path) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(read_text_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError("document", std::string("invalid JSON: ") + e.what());
  }
  return space_from_json(doc);
}

inline ordered_json space_to_json(const MetricMeasureSpace& space) {
  ordered_json doc;
  if (space.uses_matrix()) {
    doc["metric"] = "matrix";
    ordered_json m = ordered_json::array();
    for (int i = 0; i < space.size(); ++i) {
      ordered_json row = ordered_json::array();
      for (int j = 0; j < space.size(); ++j) row.push_back(space.distance(i, j));
      m.push_back(std::move(row));
    }
    doc["distance_matrix"] = std::move(m);
  } else {
    doc["metric"] = "euclidean";
    ordered_json pts = ordered_json::array();
    for (int i = 0; i < space.size(); ++i) {
      ordered_json row = ordered_json::array();
      for (int k = 0; k < space.dim(); ++k) row.push_back(space.coordinate(i, k));
      pts.push_back(std::move(row));
    }
    doc["points"] = std::move(pts);
  }
  ordered_json ws = ordered_json::array();
  for (int i = 0; i < space.size(); ++i) ws.push_back(space.weight(i));
  doc["weights"] = std::move(ws);
  return doc;
}

// ---------------------------------------------------------------------------
// Family documents: { "p": number | "inf", "functions": [[...], ...] }.
// ---------------------------------------------------------------------------

inline double parse_p(const nlohmann::json& value, const std::string& field = "p") {
  if (value.is_string()) {
    if (value.get<std::string>() == "inf") return kInfinity;
    throw ValidationError(field, "must be a number in [1, inf) or the string \"inf\"");
  }
  if (!value.is_number()) throw ValidationError(field, "must be a number or \"inf\"");
  const double p = value.get<double>();
  if (!(p >= 1.0)) throw ValidationError(field, "must be >= 1");
  return p;
}

inline FamilySpec family_from_json(const MetricMeasureSpace& space, const nlohmann::json& doc) {
  if (!doc.is_object()) throw ValidationError("document", "family document must be a JSON object");
  if (!doc.contains("p")) throw ValidationError("p", "required");
  const double p = parse_p(doc["p"]);
  if (!doc.contains("functions") || !doc["functions"].is_array() || doc["functions"].empty())
    throw ValidationError("functions", "required nonempty array of value rows");
  std::vector<FunctionVec> fns;
  for (std::size_t m = 0; m < doc["functions"].size(); ++m) {
    const auto& row = doc["functions"][m];
    if (!row.is_array())
      throw ValidationError("functions[" + std::to_string(m) + "]", "must be an array of numbers");
    FunctionVec f;
    for (const auto& v : row) {
      if (!v.is_number())
        throw ValidationError("functions[" + std::to_string(m) + "]",
                              "must contain numbers only");
      f.push_back(v.get<double>());
    }
    fns.push_back(std::move(f));
  }
  return make_family(space, std::move(fns), p);
}

inline FamilySpec load_family(const MetricMeasureSpace& space, const std::string& path) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(read_text_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError("document", std::string("invalid JSON: ") + e.what());
  }
  return family_from_json(space, doc);
}

// ---------------------------------------------------------------------------
// Operator export: one line per nonzero, "i j value", row-major, with
// value = weight(j) / mu(B(i, r)) at 17 significant digits.
// ---------------------------------------------------------------------------

inline void export_operator_triplets(const AveragingOperator& op, std::ostream& out) {
  for (int i = 0; i < op.n; ++i) {
    const auto& row = op.rows[static_cast<std::size_t>(i)];
    const auto& coeff = op.coeffs[static_cast<std::size_t>(i)];
    for (std::size_t k = 0; k < row.size(); ++k)
      out << i << ' ' << row[k] << ' ' << fmt17(coeff[k]) << '\n';
  }
}

}  // namespace avgop
