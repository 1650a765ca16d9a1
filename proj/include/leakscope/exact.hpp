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

#include <boost/rational.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "leakscope/error.hpp"
#include "leakscope/multiguess.hpp"
#include "leakscope/prob.hpp"

namespace leakscope {

using Rational = boost::rational<std::int64_t>;

inline constexpr std::int64_t kMaxDenominator = 10000;
inline constexpr double kFractionTolerance = 1e-12;

// Closest fraction with denominator <= max_den by continued fractions,
// returned only when it is within tol of x.
inline std::optional<Rational> as_fraction(double x, std::int64_t max_den = kMaxDenominator,
                                           double tol = kFractionTolerance) {
  if (!std::isfinite(x)) return std::nullopt;
  std::int64_t h0 = 0, h1 = 1, k0 = 1, k1 = 0;
  double r = x;
  for (int i = 0; i < 64; ++i) {
    const double fl = std::floor(r);
    if (std::abs(fl) > 1e15) break;
    const auto a = static_cast<std::int64_t>(fl);
    const std::int64_t h2 = a * h1 + h0, k2 = a * k1 + k0;
    if (k2 > max_den) break;
    h0 = h1, h1 = h2, k0 = k1, k1 = k2;
    if (std::abs(x - static_cast<double>(h1) / static_cast<double>(k1)) <= tol) {
      return Rational(h1, k1);
    }
    if (r - fl == 0.0) break;
    r = 1.0 / (r - fl);
  }
  return std::nullopt;
}

inline std::string fraction_string(const Rational& r) {
  if (r.denominator() == 1) return std::to_string(r.numerator());
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

// 12 significant digits, followed by the fraction it matches when one exists.
inline std::string display_number(double x) {
  if (x == kInf) return "+inf";
  if (x == -kInf) return "-inf";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  std::string s = buf;
  if (auto f = as_fraction(x); f && f->denominator() != 1) s += " (" + fraction_string(*f) + ")";
  return s;
}

template <class Scalar>
struct CoverageResult {
  int s_star;
  std::vector<Scalar> t;
};

// Optimal coverage vector from tilted weights w_i proportional to p_i^alpha,
// in any exact field. Only comparisons and field operations are used, so a
// rational input yields the exact rational answer.
template <class Scalar>
CoverageResult<Scalar> coverage_from_weights(const std::vector<Scalar>& w, int k) {
  const std::size_t n = w.size();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return w[a] > w[b]; });
  std::size_t support = 0;
  for (const auto& x : w) support += x > Scalar(0) ? 1 : 0;
  if (k < 1 || static_cast<std::size_t>(k) >= support) {
    throw Error(ErrorKind::kValidation, "exact coverage needs 1 <= k < |supp|");
  }
  int s = k;
  for (int r = 1; r <= k; ++r) {
    Scalar tail(0);
    for (std::size_t i = r - 1; i < n; ++i) tail += w[order[i]];
    if (Scalar(k - r + 1) * w[order[r - 1]] <= tail) {
      s = r;
      break;
    }
  }
  Scalar tail(0);
  for (std::size_t i = s - 1; i < n; ++i) tail += w[order[i]];
  std::vector<Scalar> t(n, Scalar(0));
  for (std::size_t i = 0; i < n; ++i) {
    t[order[i]] = static_cast<int>(i) < s - 1 ? Scalar(1) : Scalar(k - s + 1) * w[order[i]] / tail;
  }
  return {s, t};
}

struct ExampleCase {
  std::string name;
  int k;
  double alpha;
  std::vector<Rational> tilted;     // the case's tilted distribution, exact
  std::vector<Rational> expected;   // published coverage vector
  int expected_s_star;
};

// The five worked cases with alpha = 2. Cases given by p are converted to
// their tilted form p_i^2 / sum p^2; the others are specified that way.
inline std::vector<ExampleCase> example_cases() {
  auto sq = [](std::vector<Rational> p) {
    Rational total(0);
    for (auto& x : p) total += x * x;
    for (auto& x : p) x = x * x / total;
    return p;
  };
  using R = Rational;
  return {
      {"k=2 s*=1", 2, 2.0, sq({R(3, 8), R(3, 8), R(1, 4)}), {R(9, 11), R(9, 11), R(4, 11)}, 1},
      {"k=2 s*=2", 2, 2.0, sq({R(2, 3), R(1, 4), R(1, 12)}), {R(1), R(9, 10), R(1, 10)}, 2},
      {"k=3 s*=1", 3, 2.0, {R(1, 4), R(1, 4), R(1, 5), R(3, 10)}, {R(3, 4), R(3, 4), R(3, 5), R(9, 10)}, 1},
      {"k=3 s*=2", 3, 2.0, {R(3, 8), R(1, 4), R(3, 16), R(3, 16)}, {R(1), R(4, 5), R(3, 5), R(3, 5)}, 2},
      {"k=3 s*=3", 3, 2.0, {R(2, 3), R(1, 4), R(1, 24), R(1, 24)}, {R(1), R(1), R(1, 2), R(1, 2)}, 3},
  };
}

// p recovered from a tilted distribution of order alpha: p_i ∝ w_i^{1/alpha}.
inline Pmf untilt(const std::vector<Rational>& tilted, double alpha) {
  std::vector<double> p;
  double total = 0.0;
  for (const auto& w : tilted) {
    p.push_back(std::pow(boost::rational_cast<double>(w), 1.0 / alpha));
    total += p.back();
  }
  for (auto& x : p) x /= total;
  return Pmf(p);
}

struct ExampleOutcome {
  ExampleCase spec;
  int s_star;                      // floating-point path
  std::vector<double> t;           // floating-point path
  std::vector<Rational> t_exact;   // exact rational path
  double max_abs_error;            // floating path against the published fractions
  bool exact_match;                // exact path equals the published fractions
  bool fractions_recovered;        // floating values round to the published fractions
};

inline std::vector<ExampleOutcome> reproduce_examples() {
  std::vector<ExampleOutcome> out;
  for (const auto& c : example_cases()) {
    ExampleOutcome o{c, 0, {}, {}, 0.0, false, true};
    const Pmf p = untilt(c.tilted, c.alpha);
    const Order alpha = Order::finite(c.alpha);
    o.s_star = s_star(p, c.k, alpha).s_star;
    o.t = optimal_guess_vector(p, c.k, alpha).t;
    const auto exact = coverage_from_weights(c.tilted, c.k);
    o.t_exact = exact.t;
    o.exact_match = exact.t == c.expected && exact.s_star == c.expected_s_star;
    for (std::size_t i = 0; i < o.t.size(); ++i) {
      o.max_abs_error = std::max(o.max_abs_error,
                                 std::abs(o.t[i] - boost::rational_cast<double>(c.expected[i])));
      const auto f = as_fraction(o.t[i]);
      o.fractions_recovered = o.fractions_recovered && f && *f == c.expected[i];
    }
    out.push_back(std::move(o));
  }
  return out;
}

}  // namespace leakscope
