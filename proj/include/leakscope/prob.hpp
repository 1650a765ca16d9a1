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

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <limits>
#include <numeric>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "leakscope/error.hpp"

namespace leakscope {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kMassTolerance = 1e-9;

class Alphabet {
 public:
  Alphabet() = default;
  explicit Alphabet(std::vector<std::string> symbols)
      : symbols_(std::move(symbols)) {
    if (symbols_.empty()) {
      throw Error(ErrorKind::kValidation, "alphabet must be non-empty");
    }
    std::unordered_set<std::string> seen;
    for (const auto& s : symbols_) {
      if (!seen.insert(s).second) {
        throw Error(ErrorKind::kValidation, "duplicate alphabet symbol '" + s + "'");
      }
    }
  }

  // Symbols prefix0, prefix1, ...
  static Alphabet indexed(std::size_t n, const std::string& prefix) {
    std::vector<std::string> symbols;
    symbols.reserve(n);
    for (std::size_t i = 0; i < n; ++i) symbols.push_back(prefix + std::to_string(i));
    return Alphabet(std::move(symbols));
  }

  std::size_t size() const { return symbols_.size(); }
  const std::string& operator[](std::size_t i) const { return symbols_[i]; }
  const std::vector<std::string>& symbols() const { return symbols_; }

  std::size_t index_of(const std::string& symbol) const {
    auto it = std::find(symbols_.begin(), symbols_.end(), symbol);
    if (it == symbols_.end()) {
      throw Error(ErrorKind::kValidation, "unknown symbol '" + symbol + "'");
    }
    return static_cast<std::size_t>(it - symbols_.begin());
  }

  friend bool operator==(const Alphabet& a, const Alphabet& b) {
    return a.symbols_ == b.symbols_;
  }

 private:
  std::vector<std::string> symbols_;
};

// Order of a Renyi-type quantity: a finite value in (0,1) u (1,inf), or one of
// the two continuous extensions.
class Order {
 public:
  enum class Kind { kFinite, kOne, kInfinity };

  static Order finite(double alpha) {
    if (!(alpha > 0.0) || alpha == 1.0 || !std::isfinite(alpha)) {
      throw Error(ErrorKind::kValidation,
                  "finite order must be positive and different from 1");
    }
    return Order(Kind::kFinite, alpha);
  }
  static Order one() { return Order(Kind::kOne, 1.0); }
  static Order infinity() { return Order(Kind::kInfinity, kInf); }

  // Routes 1 and +inf to their extensions.
  static Order of(double alpha) {
    if (alpha == 1.0) return one();
    if (alpha == kInf) return infinity();
    return finite(alpha);
  }

  Kind kind() const { return kind_; }
  bool is_finite() const { return kind_ == Kind::kFinite; }
  bool is_one() const { return kind_ == Kind::kOne; }
  bool is_infinity() const { return kind_ == Kind::kInfinity; }
  double value() const { return value_; }

  std::string to_string() const {
    if (is_one()) return "1";
    if (is_infinity()) return "inf";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.12g", value_);
    return buf;
  }

 private:
  Order(Kind kind, double value) : kind_(kind), value_(value) {}
  Kind kind_;
  double value_;
};

namespace internal {

inline std::vector<double> validated_mass(std::vector<double> v, const char* what) {
  double total = 0.0;
  for (double x : v) {
    if (!std::isfinite(x) || x < 0.0) {
      throw Error(ErrorKind::kValidation,
                  std::string(what) + " entries must be finite and non-negative");
    }
    total += x;
  }
  if (std::abs(total - 1.0) > kMassTolerance) {
    throw Error(ErrorKind::kValidation,
                std::string(what) + " must sum to 1 (got " + std::to_string(total) + ")");
  }
  for (double& x : v) x /= total;
  return v;
}

}  // namespace internal

class Pmf {
 public:
  Pmf(Alphabet alphabet, std::vector<double> probs)
      : alphabet_(std::move(alphabet)),
        probs_(internal::validated_mass(std::move(probs), "pmf")) {
    if (alphabet_.size() != probs_.size()) {
      throw Error(ErrorKind::kAlphabetMismatch, "pmf length differs from alphabet size");
    }
  }
  explicit Pmf(const std::vector<double>& probs)
      : Pmf(Alphabet::indexed(probs.size(), "x"), probs) {}

  std::size_t size() const { return probs_.size(); }
  double operator[](std::size_t i) const { return probs_[i]; }
  const std::vector<double>& probs() const { return probs_; }
  const Alphabet& alphabet() const { return alphabet_; }

  std::vector<bool> support() const {
    std::vector<bool> mask(probs_.size());
    for (std::size_t i = 0; i < probs_.size(); ++i) mask[i] = probs_[i] > 0.0;
    return mask;
  }
  std::size_t support_size() const {
    return static_cast<std::size_t>(
        std::count_if(probs_.begin(), probs_.end(), [](double p) { return p > 0.0; }));
  }
  double max() const { return *std::max_element(probs_.begin(), probs_.end()); }

 private:
  Alphabet alphabet_;
  std::vector<double> probs_;
};

class Channel {
 public:
  Channel(Alphabet input, Alphabet output, std::vector<std::vector<double>> rows)
      : input_(std::move(input)), output_(std::move(output)) {
    if (rows.size() != input_.size()) {
      throw Error(ErrorKind::kAlphabetMismatch, "channel row count differs from input alphabet");
    }
    rows_.reserve(rows.size());
    for (auto& row : rows) {
      if (row.size() != output_.size()) {
        throw Error(ErrorKind::kAlphabetMismatch,
                    "channel row length differs from output alphabet");
      }
      rows_.push_back(internal::validated_mass(std::move(row), "channel row"));
    }
  }
  explicit Channel(const std::vector<std::vector<double>>& rows)
      : Channel(Alphabet::indexed(rows.size(), "x"),
                Alphabet::indexed(rows.empty() ? 0 : rows[0].size(), "y"), rows) {}

  const Alphabet& input() const { return input_; }
  const Alphabet& output() const { return output_; }
  std::size_t inputs() const { return input_.size(); }
  std::size_t outputs() const { return output_.size(); }
  double operator()(std::size_t x, std::size_t y) const { return rows_[x][y]; }
  const std::vector<double>& row(std::size_t x) const { return rows_[x]; }

 private:
  Alphabet input_;
  Alphabet output_;
  std::vector<std::vector<double>> rows_;
};

class JointDist {
 public:
  JointDist(Alphabet x_alphabet, Alphabet y_alphabet, std::vector<std::vector<double>> mass)
      : x_(std::move(x_alphabet)), y_(std::move(y_alphabet)) {
    if (mass.size() != x_.size()) {
      throw Error(ErrorKind::kAlphabetMismatch, "joint row count differs from x alphabet");
    }
    std::vector<double> flat;
    for (const auto& row : mass) {
      if (row.size() != y_.size()) {
        throw Error(ErrorKind::kAlphabetMismatch, "joint row length differs from y alphabet");
      }
      flat.insert(flat.end(), row.begin(), row.end());
    }
    flat = internal::validated_mass(std::move(flat), "joint");
    mass_.assign(x_.size(), std::vector<double>(y_.size()));
    for (std::size_t x = 0; x < x_.size(); ++x) {
      for (std::size_t y = 0; y < y_.size(); ++y) mass_[x][y] = flat[x * y_.size() + y];
    }
  }
  explicit JointDist(const std::vector<std::vector<double>>& mass)
      : JointDist(Alphabet::indexed(mass.size(), "x"),
                  Alphabet::indexed(mass.empty() ? 0 : mass[0].size(), "y"), mass) {}

  const Alphabet& x_alphabet() const { return x_; }
  const Alphabet& y_alphabet() const { return y_; }
  std::size_t rows() const { return x_.size(); }
  std::size_t cols() const { return y_.size(); }
  double operator()(std::size_t x, std::size_t y) const { return mass_[x][y]; }
  const std::vector<std::vector<double>>& mass() const { return mass_; }

  std::vector<double> px_raw() const {
    std::vector<double> out(rows(), 0.0);
    for (std::size_t x = 0; x < rows(); ++x) {
      for (std::size_t y = 0; y < cols(); ++y) out[x] += mass_[x][y];
    }
    return out;
  }
  std::vector<double> py_raw() const {
    std::vector<double> out(cols(), 0.0);
    for (std::size_t x = 0; x < rows(); ++x) {
      for (std::size_t y = 0; y < cols(); ++y) out[y] += mass_[x][y];
    }
    return out;
  }
  Pmf px() const { return Pmf(x_, px_raw()); }
  Pmf py() const { return Pmf(y_, py_raw()); }

  // P_{Y|X}; rows for zero-mass inputs are set uniform since they never
  // contribute to any support-restricted quantity.
  Channel channel() const {
    auto marg = px_raw();
    std::vector<std::vector<double>> rows_out(rows(), std::vector<double>(cols()));
    for (std::size_t x = 0; x < rows(); ++x) {
      for (std::size_t y = 0; y < cols(); ++y) {
        rows_out[x][y] = marg[x] > 0.0 ? mass_[x][y] / marg[x] : 1.0 / cols();
      }
    }
    return Channel(x_, y_, std::move(rows_out));
  }

 private:
  Alphabet x_;
  Alphabet y_;
  std::vector<std::vector<double>> mass_;
};

inline Pmf tilt(const Pmf& p, Order alpha) {
  const auto& v = p.probs();
  std::vector<double> out(v.size(), 0.0);
  const double top = p.max();
  if (alpha.is_one()) return p;
  if (alpha.is_infinity()) {
    const auto ties = std::count(v.begin(), v.end(), top);
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (v[i] == top) out[i] = 1.0 / static_cast<double>(ties);
    }
    return Pmf(p.alphabet(), std::move(out));
  }
  // Scale by the maximum first so large orders do not underflow.
  double total = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out[i] = v[i] > 0.0 ? std::pow(v[i] / top, alpha.value()) : 0.0;
    total += out[i];
  }
  for (double& x : out) x /= total;
  return Pmf(p.alphabet(), std::move(out));
}

inline JointDist joint_from(const Pmf& px, const Channel& ch) {
  if (!(px.alphabet() == ch.input())) {
    throw Error(ErrorKind::kAlphabetMismatch, "pmf alphabet differs from channel input alphabet");
  }
  std::vector<std::vector<double>> mass(ch.inputs(), std::vector<double>(ch.outputs()));
  for (std::size_t x = 0; x < ch.inputs(); ++x) {
    for (std::size_t y = 0; y < ch.outputs(); ++y) mass[x][y] = px[x] * ch(x, y);
  }
  return JointDist(ch.input(), ch.output(), std::move(mass));
}

inline Pmf posterior(const JointDist& joint, std::size_t y) {
  if (y >= joint.cols()) throw Error(ErrorKind::kValidation, "output index out of range");
  double py = 0.0;
  for (std::size_t x = 0; x < joint.rows(); ++x) py += joint(x, y);
  if (!(py > 0.0)) {
    throw Error(ErrorKind::kZeroMarginal, "P_Y(" + joint.y_alphabet()[y] + ") is zero");
  }
  std::vector<double> out(joint.rows());
  for (std::size_t x = 0; x < joint.rows(); ++x) out[x] = joint(x, y) / py;
  return Pmf(joint.x_alphabet(), std::move(out));
}

inline Pmf posterior(const JointDist& joint, const std::string& y) {
  return posterior(joint, joint.y_alphabet().index_of(y));
}

struct SortedPmf {
  Pmf sorted;
  // sorted[i] == original[perm[i]]
  std::vector<std::size_t> perm;
};

// Stable descending order of v; ties keep their original relative order.
inline std::vector<std::size_t> descending_order(const std::vector<double>& v) {
  std::vector<std::size_t> perm(v.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::stable_sort(perm.begin(), perm.end(),
                   [&](std::size_t a, std::size_t b) { return v[a] > v[b]; });
  return perm;
}

inline SortedPmf sort_descending(const Pmf& p) {
  auto perm = descending_order(p.probs());
  std::vector<double> probs;
  std::vector<std::string> symbols;
  for (auto i : perm) {
    probs.push_back(p[i]);
    symbols.push_back(p.alphabet()[i]);
  }
  return {Pmf(Alphabet(std::move(symbols)), std::move(probs)), std::move(perm)};
}

// Inverse of the permutation applied by sort_descending.
inline std::vector<double> unsort(const std::vector<double>& sorted,
                                  const std::vector<std::size_t>& perm) {
  std::vector<double> out(sorted.size());
  for (std::size_t i = 0; i < perm.size(); ++i) out[perm[i]] = sorted[i];
  return out;
}

}  // namespace leakscope
