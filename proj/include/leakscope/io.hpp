//
// Copyright 2026 The Leakscope Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
#pragma once

#include <cmath>
#include <fstream>
#include <istream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "leakscope/error.hpp"
#include "leakscope/prob.hpp"

namespace leakscope {

// Distributions read from one input file. Whichever of joint or (px, channel)
// is supplied, the other is derived. p and q are standalone pmfs used by the
// divergence commands.
struct Instance {
  std::optional<JointDist> joint;
  std::optional<Pmf> px;
  std::optional<Channel> channel;
  std::optional<Pmf> p;
  std::optional<Pmf> q;
};

// Non-finite values are not representable as JSON numbers.
inline nlohmann::json json_number(double x) {
  if (x == kInf) return "+inf";
  if (x == -kInf) return "-inf";
  if (std::isnan(x)) return "nan";
  return x;
}

inline double number_from_json(const nlohmann::json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "+inf" || s == "inf") return kInf;
    if (s == "-inf") return -kInf;
  }
  throw Error(ErrorKind::kParse, "expected a number, got " + j.dump());
}

namespace internal {

inline std::vector<double> vector_from_json(const nlohmann::json& j, const char* key) {
  if (!j.is_array()) throw Error(ErrorKind::kParse, std::string(key) + " must be an array");
  std::vector<double> out;
  out.reserve(j.size());
  for (const auto& v : j) out.push_back(number_from_json(v));
  return out;
}

inline std::vector<std::vector<double>> matrix_from_json(const nlohmann::json& j,
                                                        const char* key) {
  if (!j.is_array()) throw Error(ErrorKind::kParse, std::string(key) + " must be an array");
  std::vector<std::vector<double>> out;
  for (const auto& row : j) out.push_back(vector_from_json(row, key));
  return out;
}

inline std::optional<Alphabet> alphabet_from_json(const nlohmann::json& j, const char* key) {
  if (!j.contains(key)) return std::nullopt;
  if (!j[key].is_array()) throw Error(ErrorKind::kParse, std::string(key) + " must be an array");
  std::vector<std::string> symbols;
  for (const auto& s : j[key]) {
    if (!s.is_string()) throw Error(ErrorKind::kParse, std::string(key) + " entries must be strings");
    symbols.push_back(s.get<std::string>());
  }
  return Alphabet(std::move(symbols));
}

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

inline double parse_cell(const std::string& cell) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(cell, &used);
  } catch (const std::exception&) {
    throw Error(ErrorKind::kParse, "bad numeric cell '" + cell + "'");
  }
  if (used != cell.size()) throw Error(ErrorKind::kParse, "bad numeric cell '" + cell + "'");
  return v;
}

inline void fill_derived(Instance& inst) {
  if (inst.joint) {
    inst.px = inst.joint->px();
    inst.channel = inst.joint->channel();
  } else if (inst.px && inst.channel) {
    inst.joint = joint_from(*inst.px, *inst.channel);
  }
}

}  // namespace internal

inline Instance instance_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorKind::kParse, "input must be a JSON object");
  Instance inst;
  const auto xa = internal::alphabet_from_json(j, "x_alphabet");
  const auto ya = internal::alphabet_from_json(j, "y_alphabet");
  if (j.contains("joint")) {
    if (j.contains("px") || j.contains("channel")) {
      throw Error(ErrorKind::kValidation, "give either joint or px with channel, not both");
    }
    const auto mass = internal::matrix_from_json(j["joint"], "joint");
    if (mass.empty()) throw Error(ErrorKind::kValidation, "joint must be non-empty");
    inst.joint = JointDist(xa ? *xa : Alphabet::indexed(mass.size(), "x"),
                           ya ? *ya : Alphabet::indexed(mass[0].size(), "y"), mass);
  } else {
    if (j.contains("px")) {
      const auto v = internal::vector_from_json(j["px"], "px");
      inst.px = Pmf(xa ? *xa : Alphabet::indexed(v.size(), "x"), v);
    }
    if (j.contains("channel")) {
      const auto rows = internal::matrix_from_json(j["channel"], "channel");
      if (rows.empty()) throw Error(ErrorKind::kValidation, "channel must be non-empty");
      inst.channel = Channel(xa ? *xa : Alphabet::indexed(rows.size(), "x"),
                             ya ? *ya : Alphabet::indexed(rows[0].size(), "y"), rows);
      if (!inst.px) throw Error(ErrorKind::kValidation, "channel given without px");
    }
  }
  const auto alphabet = internal::alphabet_from_json(j, "alphabet");
  for (const char* key : {"p", "q"}) {
    if (!j.contains(key)) continue;
    const auto v = internal::vector_from_json(j[key], key);
    Pmf pmf(alphabet ? *alphabet : Alphabet::indexed(v.size(), "x"), v);
    (std::string(key) == "p" ? inst.p : inst.q) = std::move(pmf);
  }
  internal::fill_derived(inst);
  if (!inst.joint && !inst.px && !inst.p) {
    throw Error(ErrorKind::kValidation, "input holds no distribution");
  }
  return inst;
}

// Header row holds the y symbols after one leading cell; each later row is an
// x symbol followed by its joint masses.
inline Instance instance_from_csv(std::istream& in) {
  std::string line;
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (internal::trim(line).empty()) continue;
    rows.push_back(internal::split_csv_line(line));
  }
  if (rows.size() < 2) throw Error(ErrorKind::kParse, "csv needs a header and at least one row");
  std::vector<std::string> y(rows[0].begin() + 1, rows[0].end());
  if (y.empty()) throw Error(ErrorKind::kParse, "csv header has no y symbols");
  std::vector<std::string> x;
  std::vector<std::vector<double>> mass;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() != y.size() + 1) {
      throw Error(ErrorKind::kParse, "csv row " + std::to_string(r + 1) + " has wrong width");
    }
    x.push_back(rows[r][0]);
    std::vector<double> row;
    for (std::size_t c = 1; c < rows[r].size(); ++c) row.push_back(internal::parse_cell(rows[r][c]));
    mass.push_back(std::move(row));
  }
  Instance inst;
  inst.joint = JointDist(Alphabet(std::move(x)), Alphabet(std::move(y)), std::move(mass));
  internal::fill_derived(inst);
  return inst;
}

inline Instance parse_instance(const std::string& text, const std::string& format) {
  if (format == "json") {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(ErrorKind::kParse, e.what());
    }
    return instance_from_json(j);
  }
  if (format == "csv") {
    std::istringstream in(text);
    return instance_from_csv(in);
  }
  throw Error(ErrorKind::kValidation, "unknown input format '" + format + "'");
}

inline Instance load_instance(const std::string& path, const std::string& format) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kParse, "cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_instance(buf.str(), format);
}

}  // namespace leakscope
