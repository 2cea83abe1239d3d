#pragma once

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <istream>
#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "ghkit/admissible.hpp"
#include "ghkit/convergence.hpp"
#include "ghkit/space.hpp"

namespace ghkit {

using Json = nlohmann::ordered_json;

struct SpaceFile {
  FiniteMetricSpace space;
  std::optional<int> base;

  PointedSpace pointed() const { return PointedSpace{space, base.value_or(0)}; }
};

inline SpaceFile space_from_json(const Json& j, const std::string& origin,
                                 Dist tau_metric = default_tols().metric) {
  if (!j.is_object() || !j.contains("n") || !j.contains("d"))
    throw Error(ErrorCode::FileFormat, origin + ": expected {\"n\", \"d\", ...}");
  const int n = j.at("n").get<int>();
  std::vector<std::vector<Dist>> matrix;
  try {
    matrix = j.at("d").get<std::vector<std::vector<Dist>>>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::FileFormat, origin + ": bad distance matrix: " + e.what());
  }
  if (static_cast<int>(matrix.size()) != n)
    throw Error(ErrorCode::FileFormat, origin + ": n does not match matrix rows");
  std::vector<std::string> labels;
  if (j.contains("labels")) labels = j.at("labels").get<std::vector<std::string>>();

  SpaceFile out;
  out.space = validate_space(matrix, tau_metric, std::move(labels));
  if (j.contains("base")) {
    const int base = j.at("base").get<int>();
    if (base < 0 || base >= n)
      throw Error(ErrorCode::IndexOutOfRange, origin + ": base out of range", {base});
    out.base = base;
  }
  return out;
}

inline SpaceFile read_space_file(const std::string& path,
                                 Dist tau_metric = default_tols().metric) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::FileFormat, path + ": cannot open");
  Json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::FileFormat, path + ": " + e.what());
  }
  return space_from_json(j, path, tau_metric);
}

inline Json space_to_json(const FiniteMetricSpace& space,
                          std::optional<int> base = std::nullopt) {
  Json j;
  j["n"] = space.n;
  Json rows = Json::array();
  for (int i = 0; i < space.n; ++i) {
    Json row = Json::array();
    for (int k = 0; k < space.n; ++k) row.push_back(space.at(i, k));
    rows.push_back(std::move(row));
  }
  j["d"] = std::move(rows);
  if (!space.labels.empty()) j["labels"] = space.labels;
  if (base) j["base"] = *base;
  return j;
}

inline Json admissible_to_json(const AdmissibleMetric& adm) {
  Json j;
  Json rows = Json::array();
  for (int i = 0; i < adm.left.n; ++i) {
    Json row = Json::array();
    for (int k = 0; k < adm.right.n; ++k) row.push_back(adm.cross_at(i, k));
    rows.push_back(std::move(row));
  }
  j["cross"] = std::move(rows);
  return j;
}

namespace detail {

inline std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

inline void dump_json_to(const Json& j, std::ostream& os, int indent) {
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  const std::string pad_in(static_cast<std::size_t>(indent + 1) * 2, ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        os << "{}";
        return;
      }
      os << "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) os << ",\n";
        first = false;
        os << pad_in << Json(it.key()).dump() << ": ";
        dump_json_to(it.value(), os, indent + 1);
      }
      os << "\n" << pad << "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        os << "[]";
        return;
      }
      bool scalars = true;
      for (const auto& v : j)
        if (v.is_object() || v.is_array()) scalars = false;
      if (scalars) {
        os << "[";
        bool first = true;
        for (const auto& v : j) {
          if (!first) os << ", ";
          first = false;
          dump_json_to(v, os, indent);
        }
        os << "]";
        return;
      }
      os << "[\n";
      bool first = true;
      for (const auto& v : j) {
        if (!first) os << ",\n";
        first = false;
        os << pad_in;
        dump_json_to(v, os, indent + 1);
      }
      os << "\n" << pad << "]";
      return;
    }
    case Json::value_t::number_float:
      os << format_number(j.get<double>());
      return;
    default:
      os << j.dump();
      return;
  }
}

}  // namespace detail

// Deterministic emitter: insertion-ordered keys, floats with 12 significant
// digits, so identical inputs and flags give byte-identical output.
inline void dump_json(const Json& j, std::ostream& os) {
  detail::dump_json_to(j, os, 0);
  os << "\n";
}

inline std::string dump_json(const Json& j) {
  std::ostringstream os;
  dump_json(j, os);
  return os.str();
}

// Curve CSV: one row per (index, radius) cell.
inline void write_curve_csv(const ConvergenceReport& rep, std::ostream& os) {
  os << "index,radius,lo,hi,mode\n";
  for (std::size_t k = 0; k < rep.indices.size(); ++k)
    for (std::size_t r = 0; r < rep.radii.size(); ++r) {
      const CurveCell& c = rep.cells[r][k];
      os << rep.indices[k] << "," << detail::format_number(rep.radii[r]) << ","
         << detail::format_number(c.lo) << "," << detail::format_number(c.hi) << ","
         << cell_mode_name(c.mode) << "\n";
    }
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace detail

// Reads an eps table from CSV. Accepts the harness curve format
// (index,radius,lo,hi,mode — the hi column is the measured eps) or the bare
// format (index,radius,eps).
inline EpsTable read_eps_table_csv(std::istream& in, const std::string& origin) {
  std::string line;
  if (!std::getline(in, line))
    throw Error(ErrorCode::FileFormat, origin + ": empty table");
  const auto header = detail::split_csv_line(line);
  int eps_col = -1;
  if (header.size() >= 4 && header[2] == "lo" && header[3] == "hi")
    eps_col = 3;
  else if (header.size() >= 3 && header[0] == "index" && header[1] == "radius")
    eps_col = 2;
  else
    throw Error(ErrorCode::FileFormat, origin + ": unrecognized table header");

  std::vector<int> indices;
  std::vector<Dist> radii;
  std::vector<std::tuple<int, Dist, Dist>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = detail::split_csv_line(line);
    if (static_cast<int>(cells.size()) <= eps_col)
      throw Error(ErrorCode::FileFormat, origin + ": short row");
    const int idx = std::stoi(cells[0]);
    const Dist r = std::stod(cells[1]);
    const Dist eps = std::stod(cells[eps_col]);
    rows.emplace_back(idx, r, eps);
    if (std::find(indices.begin(), indices.end(), idx) == indices.end())
      indices.push_back(idx);
    if (std::find(radii.begin(), radii.end(), r) == radii.end()) radii.push_back(r);
  }
  std::sort(indices.begin(), indices.end());
  std::sort(radii.begin(), radii.end());

  EpsTable table;
  table.indices = indices;
  table.radii = radii;
  table.eps.assign(radii.size(), std::vector<Dist>(indices.size(), 0.0));
  for (const auto& [idx, r, eps] : rows) {
    const auto ri = std::find(radii.begin(), radii.end(), r) - radii.begin();
    const auto ki = std::find(indices.begin(), indices.end(), idx) - indices.begin();
    table.eps[ri][ki] = eps;
  }
  return table;
}

// Reads a numeric series from CSV: either one value per line or
// index,value rows with a header.
inline std::vector<Dist> read_series_csv(std::istream& in, const std::string& origin) {
  std::vector<Dist> out;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = detail::split_csv_line(line);
    if (first) {
      first = false;
      bool header = false;
      for (const auto& c : cells)
        if (!c.empty() && !std::isdigit(static_cast<unsigned char>(c[0])) &&
            c[0] != '-' && c[0] != '+' && c[0] != '.')
          header = true;
      if (header) continue;
    }
    try {
      out.push_back(std::stod(cells.back()));
    } catch (const std::exception&) {
      throw Error(ErrorCode::FileFormat, origin + ": bad number: " + line);
    }
  }
  if (out.empty()) throw Error(ErrorCode::FileFormat, origin + ": empty series");
  return out;
}

}  // namespace ghkit
