#pragma once

#include <fstream>
#include <string>

#include <json.hpp>

#include "gskin/error.h"
#include "gskin/types.h"

namespace gskin {

inline nlohmann::json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }
}

inline void save_json(const nlohmann::json& doc, const std::string& path, int indent = -1) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << doc.dump(indent) << "\n";
  if (!out) throw IoError("write failed: " + path);
}

inline nlohmann::json matrix_to_json(const Eigen::Ref<const MatX>& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline MatX matrix_from_json(const nlohmann::json& rows, Index expect_cols = -1,
                             const std::string& what = "matrix") {
  if (!rows.is_array()) throw ParseError(what + " must be an array of rows");
  const Index r = Index(rows.size());
  Index c = expect_cols;
  if (r > 0) {
    if (!rows[0].is_array()) throw ParseError(what + " rows must be arrays");
    c = Index(rows[0].size());
    if (expect_cols >= 0 && c != expect_cols) {
      throw ParseError(what + " must have " + std::to_string(expect_cols) + " columns");
    }
  }
  if (c < 0) c = 0;
  MatX m(r, c);
  for (Index i = 0; i < r; ++i) {
    const auto& row = rows[size_t(i)];
    if (!row.is_array() || Index(row.size()) != c) {
      throw ParseError(what + " row " + std::to_string(i) + " has wrong length");
    }
    for (Index j = 0; j < c; ++j) {
      if (!row[size_t(j)].is_number()) throw ParseError(what + " entries must be numbers");
      m(i, j) = row[size_t(j)].get<double>();
    }
  }
  return m;
}

inline nlohmann::json vector_to_json(const Eigen::Ref<const VecX>& v) {
  nlohmann::json arr = nlohmann::json::array();
  for (Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

inline VecX vector_from_json(const nlohmann::json& arr, Index expect_size = -1,
                             const std::string& what = "vector") {
  if (!arr.is_array()) throw ParseError(what + " must be an array");
  if (expect_size >= 0 && Index(arr.size()) != expect_size) {
    throw ParseError(what + " must have " + std::to_string(expect_size) + " entries");
  }
  VecX v(Index(arr.size()));
  for (size_t i = 0; i < arr.size(); ++i) {
    if (!arr[i].is_number()) throw ParseError(what + " entries must be numbers");
    v[Index(i)] = arr[i].get<double>();
  }
  return v;
}

}  // namespace gskin
