#pragma once

// Channel specs in JSON:
//   {"dim_in":2, "dim_out":2, "repr":"kraus"|"choi", "data":..., "name":"..."}
// Complex entries are [re, im] pairs. For "choi", data is one
// (dim_in*dim_out)-square matrix; for "kraus", a list of dim_out x dim_in
// matrices.

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "chanres/objects.hpp"

namespace chanres {

namespace detail {

inline const nlohmann::json& require_field(const nlohmann::json& j, const char* key) {
  if (!j.is_object()) fail(ErrorCode::ParseError, "channel spec must be a JSON object", "object");
  const auto it = j.find(key);
  if (it == j.end()) fail(ErrorCode::ParseError, std::string("missing field '") + key + "'", key);
  return *it;
}

inline ComplexMatrix parse_matrix(const nlohmann::json& m, int rows, int cols, const std::string& where) {
  if (!m.is_array() || static_cast<int>(m.size()) != rows) {
    fail(ErrorCode::ParseError, where + ": expected " + std::to_string(rows) + " rows", "data");
  }
  ComplexMatrix out(rows, cols);
  for (int r = 0; r < rows; ++r) {
    const auto& row = m[r];
    if (!row.is_array() || static_cast<int>(row.size()) != cols) {
      fail(ErrorCode::ParseError, where + ": row " + std::to_string(r) + " needs " +
                                      std::to_string(cols) + " entries", "data");
    }
    for (int c = 0; c < cols; ++c) {
      const auto& e = row[c];
      if (e.is_number()) {
        out(r, c) = Complex(e.get<double>(), 0.0);
      } else if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
        out(r, c) = Complex(e[0].get<double>(), e[1].get<double>());
      } else {
        fail(ErrorCode::ParseError, where + ": entry must be [re, im]", "data");
      }
    }
  }
  return out;
}

inline nlohmann::json matrix_to_json(const ComplexMatrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back({m(r, c).real(), m(r, c).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace detail

inline QuantumChannel channel_from_json(const nlohmann::json& j) {
  const auto& din_j = detail::require_field(j, "dim_in");
  const auto& dout_j = detail::require_field(j, "dim_out");
  const auto& repr_j = detail::require_field(j, "repr");
  const auto& data = detail::require_field(j, "data");
  if (!din_j.is_number_integer() || !dout_j.is_number_integer() || din_j.get<int>() < 1 ||
      dout_j.get<int>() < 1) {
    fail(ErrorCode::ParseError, "dim_in/dim_out must be positive integers", "dim_in");
  }
  if (!repr_j.is_string()) fail(ErrorCode::ParseError, "repr must be a string", "repr");
  const int din = din_j.get<int>(), dout = dout_j.get<int>();
  const std::string repr = repr_j.get<std::string>();
  const std::string name = j.contains("name") && j["name"].is_string() ? j["name"].get<std::string>() : "";
  if (repr == "choi") {
    return QuantumChannel::from_choi(detail::parse_matrix(data, din * dout, din * dout, "choi"), din,
                                     dout, kChannelTol, name);
  }
  if (repr == "kraus") {
    if (!data.is_array() || data.empty()) fail(ErrorCode::ParseError, "kraus data must be a non-empty list", "data");
    std::vector<ComplexMatrix> ks;
    for (std::size_t k = 0; k < data.size(); ++k) {
      ks.push_back(detail::parse_matrix(data[k], dout, din, "kraus[" + std::to_string(k) + "]"));
    }
    return QuantumChannel::from_kraus(ks, kChannelTol, name);
  }
  fail(ErrorCode::ParseError, "repr must be \"kraus\" or \"choi\"", "repr");
}

inline QuantumChannel channel_from_json_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorCode::ParseError, std::string("malformed JSON: ") + e.what(), "json");
  }
  return channel_from_json(j);
}

inline QuantumChannel load_channel(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::ParseError, "cannot open " + path, "input");
  std::stringstream ss;
  ss << in.rdbuf();
  return channel_from_json_text(ss.str());
}

inline nlohmann::json channel_to_json(const QuantumChannel& n) {
  nlohmann::json j;
  j["dim_in"] = n.dim_in();
  j["dim_out"] = n.dim_out();
  j["name"] = n.name();
  if (n.kraus()) {
    j["repr"] = "kraus";
    j["data"] = nlohmann::json::array();
    for (const auto& k : *n.kraus()) j["data"].push_back(detail::matrix_to_json(k));
  } else {
    j["repr"] = "choi";
    j["data"] = detail::matrix_to_json(n.choi());
  }
  return j;
}

}  // namespace chanres
