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
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "leakscope/error.hpp"
#include "leakscope/gain.hpp"
#include "leakscope/measures.hpp"
#include "leakscope/prob.hpp"

namespace leakscope {

inline constexpr int kAlphaLeakageStarts = 8;
inline constexpr double kAlphaLeakageStop = 1e-10;
inline constexpr double kPerYTolerance = 1e-9;

struct PerY {
  std::string symbol;
  Nats value;
};

struct LeakageReport {
  std::string measure;
  std::string parameter;  // order or gain spec
  Nats value = 0.0;
  bool upper_bound_only = false;
  std::vector<PerY> per_y;
  std::vector<std::string> notes;
};

inline Nats maximal_leakage(const Pmf& px, const Channel& ch) {
  return sibson_mi(px, ch, Order::infinity());
}

namespace internal {

// Maximizes F(Q) = sum_y (sum_x Q(x) W(y|x)^a)^{1/a} over Q on the given
// support. F is concave for a > 1. Each step moves toward the fixed-point map
// Q(x) <- Q(x) dF/dQ(x) / <Q, grad F>, which is an ascent direction, and
// backtracks until F does not decrease.
inline double sibson_capacity_objective(const Channel& ch, const std::vector<std::size_t>& support,
                                        double a, std::vector<double> q) {
  const std::size_t n = support.size();
  std::vector<double> top(ch.outputs(), 0.0);
  for (std::size_t y = 0; y < ch.outputs(); ++y) {
    for (auto x : support) top[y] = std::max(top[y], ch(x, y));
  }
  // w[i][y] = (W(y|x_i) / top_y)^a
  std::vector<std::vector<double>> w(n, std::vector<double>(ch.outputs(), 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t y = 0; y < ch.outputs(); ++y) {
      if (top[y] > 0.0) w[i][y] = std::pow(ch(support[i], y) / top[y], a);
    }
  }
  auto value = [&](const std::vector<double>& qq) {
    double f = 0.0;
    for (std::size_t y = 0; y < ch.outputs(); ++y) {
      if (top[y] == 0.0) continue;
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += qq[i] * w[i][y];
      if (s > 0.0) f += top[y] * std::pow(s, 1.0 / a);
    }
    return f;
  };

  double f = value(q);
  for (int iter = 0; iter < 200000; ++iter) {
    std::vector<double> grad(n, 0.0);
    for (std::size_t y = 0; y < ch.outputs(); ++y) {
      if (top[y] == 0.0) continue;
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += q[i] * w[i][y];
      if (s <= 0.0) continue;
      const double scale = top[y] * std::pow(s, 1.0 / a - 1.0) / a;
      for (std::size_t i = 0; i < n; ++i) grad[i] += scale * w[i][y];
    }
    double dot = 0.0;
    for (std::size_t i = 0; i < n; ++i) dot += q[i] * grad[i];
    std::vector<double> target(n);
    for (std::size_t i = 0; i < n; ++i) target[i] = q[i] * grad[i] / dot;

    std::vector<double> next(n);
    double f_next = f;
    for (double s = 1.0; s >= 1e-12; s *= 0.5) {
      for (std::size_t i = 0; i < n; ++i) next[i] = q[i] + s * (target[i] - q[i]);
      f_next = value(next);
      if (f_next >= f) break;
    }
    if (f_next < f) break;
    const double change = a / (a - 1.0) * (std::log(f_next) - std::log(f));
    q = next;
    f = f_next;
    if (change < kAlphaLeakageStop) break;
  }
  return f;
}

}  // namespace internal

// Supremum of the order-alpha Arimoto mutual information over inputs
// supported within supp(px). Arimoto MI of an input equals Sibson MI of its
// alpha-tilt, so the search runs over Sibson's concave form.
inline Nats maximal_alpha_leakage(const Pmf& px, const Channel& ch, Order alpha,
                                  std::uint64_t seed = 0x1eaf) {
  if (!(px.alphabet() == ch.input())) {
    throw Error(ErrorKind::kAlphabetMismatch, "pmf alphabet differs from channel input alphabet");
  }
  if (alpha.is_infinity()) return maximal_leakage(px, ch);
  if (alpha.is_one() || alpha.value() < 1.0) {
    throw Error(ErrorKind::kUnsupportedOrder,
                "maximal alpha-leakage is only defined here for alpha in (1, inf]");
  }
  std::vector<std::size_t> support;
  for (std::size_t x = 0; x < px.size(); ++x) {
    if (px[x] > 0.0) support.push_back(x);
  }
  const std::size_t n = support.size();
  const double a = alpha.value();

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double best = 0.0;
  for (int start = 0; start < kAlphaLeakageStarts; ++start) {
    std::vector<double> q(n, 1.0 / n);
    if (start > 0) {
      double total = 0.0;
      for (auto& v : q) total += v = 0.05 - std::log(1.0 - unit(rng));
      for (auto& v : q) v /= total;
    }
    best = std::max(best, internal::sibson_capacity_objective(ch, support, a, q));
  }
  return std::max(0.0, a / (a - 1.0) * std::log(best));
}

inline LeakageReport maximal_g_leakage(const Pmf& px, const Channel& ch, const GainFamily& g) {
  LeakageReport r;
  r.measure = "maximal_g_leakage";
  r.parameter = g.to_string();
  r.value = maximal_leakage(px, ch);
  const auto check = validate_hypotheses(g, HypothesisSet::kConcave);
  if (g.kind() == GainFamily::Kind::kIdentity) {
    r.notes.push_back("g(t) = t: equality with maximal leakage holds exactly");
  } else if (check.passed) {
    r.notes.push_back(
        "value is conditional on g being concave with g(0) = 0 and 0 < g'(0) < inf; all "
        "three verified on the grid");
  } else {
    r.upper_bound_only = true;
    std::string failed;
    for (const auto& c : check.checks) {
      if (!c.ok) failed += (failed.empty() ? "" : ", ") + c.name;
    }
    r.notes.push_back("g fails " + failed + "; value is an upper bound only");
    if (!g.flags().nonneg) {
      r.notes.push_back("g takes negative values, so the bound itself is not guaranteed");
    }
  }
  return r;
}

namespace internal {

inline void require_bounded_class(const GainFamily& g, bool allow_log_gain) {
  if (g.kind() == GainFamily::Kind::kIdentity) return;
  if (g.kind() == GainFamily::Kind::kLog) {
    if (allow_log_gain) return;
    throw Error(ErrorKind::kValidation, "log gain requires an explicit opt-in on this path");
  }
  if (!validate_hypotheses(g, HypothesisSet::kBounded).passed) {
    throw Error(ErrorKind::kValidation,
                "gain must satisfy g(0) = 0, continuity at 0 and 0 < sup g < inf");
  }
}

// D_inf(P_{X|Y=y} || P_X) read off the joint directly; g is never consulted.
inline Nats pointwise_value(const JointDist& joint, const std::vector<double>& px, std::size_t y) {
  double py = 0.0;
  for (std::size_t x = 0; x < joint.rows(); ++x) py += joint(x, y);
  if (!(py > 0.0)) {
    throw Error(ErrorKind::kZeroMarginal, "P_Y(" + joint.y_alphabet()[y] + ") is zero");
  }
  double best = -kInf;
  for (std::size_t x = 0; x < joint.rows(); ++x) {
    if (joint(x, y) > 0.0) best = std::max(best, std::log(joint(x, y) / py / px[x]));
  }
  return std::max(0.0, best);
}

}  // namespace internal

inline Nats pointwise_maximal_leakage(const JointDist& joint, std::size_t y, const GainFamily& g,
                                      bool allow_log_gain = false) {
  internal::require_bounded_class(g, allow_log_gain);
  if (y >= joint.cols()) throw Error(ErrorKind::kValidation, "output index out of range");
  return internal::pointwise_value(joint, joint.px_raw(), y);
}

inline Nats pointwise_maximal_leakage(const JointDist& joint, const std::string& y,
                                      const GainFamily& g, bool allow_log_gain = false) {
  return pointwise_maximal_leakage(joint, joint.y_alphabet().index_of(y), g, allow_log_gain);
}

inline Nats opportunistic_maximal_g_leakage(const JointDist& joint, const GainFamily& g,
                                            bool allow_log_gain = false) {
  internal::require_bounded_class(g, allow_log_gain);
  return sibson_mi(joint, Order::infinity());
}

inline Nats maximal_realizable_g_leakage(const JointDist& joint, const GainFamily& g,
                                         bool allow_log_gain = false) {
  internal::require_bounded_class(g, allow_log_gain);
  const auto px = joint.px_raw();
  const auto py = joint.py_raw();
  double best = 0.0;
  for (std::size_t y = 0; y < joint.cols(); ++y) {
    if (py[y] > 0.0) best = std::max(best, internal::pointwise_value(joint, px, y));
  }
  return best;
}

namespace internal {

inline std::vector<PerY> per_y_pointwise(const JointDist& joint) {
  const auto px = joint.px_raw();
  const auto py = joint.py_raw();
  std::vector<PerY> out;
  for (std::size_t y = 0; y < joint.cols(); ++y) {
    if (py[y] > 0.0) out.push_back({joint.y_alphabet()[y], pointwise_value(joint, px, y)});
  }
  return out;
}

}  // namespace internal

inline LeakageReport opportunistic_report(const JointDist& joint, const GainFamily& g,
                                          bool allow_log_gain = false) {
  LeakageReport r;
  r.measure = "opportunistic_maximal_g_leakage";
  r.parameter = g.to_string();
  r.value = opportunistic_maximal_g_leakage(joint, g, allow_log_gain);
  r.per_y = internal::per_y_pointwise(joint);
  const auto py = joint.py_raw();
  double avg = 0.0;
  for (const auto& e : r.per_y) avg += py[joint.y_alphabet().index_of(e.symbol)] * std::exp(e.value);
  if (std::abs(std::log(avg) - r.value) > kPerYTolerance) {
    throw Error(ErrorKind::kInvariant, "per-y pointwise values do not recombine to the headline");
  }
  r.notes.push_back("closed form; independent of g within its admissible class");
  return r;
}

inline LeakageReport realizable_report(const JointDist& joint, const GainFamily& g,
                                       bool allow_log_gain = false) {
  LeakageReport r;
  r.measure = "maximal_realizable_g_leakage";
  r.parameter = g.to_string();
  r.value = maximal_realizable_g_leakage(joint, g, allow_log_gain);
  r.per_y = internal::per_y_pointwise(joint);
  r.notes.push_back("closed form; independent of g within its admissible class");
  return r;
}

inline LeakageReport pointwise_report(const JointDist& joint, std::size_t y, const GainFamily& g,
                                      bool allow_log_gain = false) {
  LeakageReport r;
  r.measure = "pointwise_maximal_leakage";
  r.parameter = g.to_string();
  r.value = pointwise_maximal_leakage(joint, y, g, allow_log_gain);
  r.per_y.push_back({joint.y_alphabet()[y], r.value});
  return r;
}

// The alpha -> 1 limits of the opportunistic and realizable alpha-leakages
// diverge for every joint.
inline Nats alpha1_variant_value() { return kInf; }

enum class Alpha1Variant { kOpportunistic, kRealizable };

inline LeakageReport alpha1_variant_report(const JointDist& joint, Alpha1Variant variant) {
  LeakageReport r;
  r.measure = variant == Alpha1Variant::kOpportunistic ? "opportunistic_alpha1_leakage"
                                                       : "realizable_alpha1_leakage";
  r.parameter = "alpha:1";
  r.value = alpha1_variant_value();
  r.notes.push_back("the alpha = 1 variant is infinite for every joint distribution");
  if (joint.rows() == 1) {
    r.notes.push_back("|X| = 1: reported as +inf by convention, the limit argument is vacuous here");
  }
  return r;
}

}  // namespace leakscope
