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
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "leakscope/error.hpp"
#include "leakscope/expr.hpp"
#include "leakscope/measures.hpp"
#include "leakscope/prob.hpp"

namespace leakscope {

inline constexpr double kGainGridStep = 1e-3;
inline constexpr int kGainMultistarts = 16;

struct GainFlags {
  bool nonneg = false;
  bool zero_at_zero = false;
  bool continuous_at_zero = false;
  bool concave = false;
  bool bounded_sup = false;
  double sup_value = kInf;
  std::optional<double> derivative_at_zero;  // set only when finite
};

// Flags a caller may assert; unset entries are inferred from the grid.
struct DeclaredFlags {
  std::optional<bool> nonneg;
  std::optional<bool> zero_at_zero;
  std::optional<bool> continuous_at_zero;
  std::optional<bool> concave;
  std::optional<bool> bounded_sup;
};

namespace internal {

inline GainFlags grid_flags(const std::function<double(double)>& g) {
  GainFlags f;
  const int steps = static_cast<int>(std::lround(1.0 / kGainGridStep));
  std::vector<double> v(steps + 1);
  for (int i = 0; i <= steps; ++i) v[i] = g(i * kGainGridStep);
  const double g0 = v[0];

  f.nonneg = std::all_of(v.begin(), v.end(), [](double x) { return x >= -1e-12; });
  f.zero_at_zero = std::abs(g0) <= 1e-12;

  bool interior_finite = std::all_of(v.begin() + 1, v.end(), [](double x) { return std::isfinite(x); });
  f.bounded_sup = interior_finite && g0 != kInf;
  if (f.bounded_sup) {
    f.sup_value = -kInf;
    for (double x : v) f.sup_value = std::max(f.sup_value, x);
  }

  // Distance to g(0) along t = 1e-3 ... 1e-15 must shrink by a decade.
  if (std::isfinite(g0)) {
    double first = std::abs(g(1e-3) - g0), last = first;
    bool settles = true;
    for (int j = 4; j <= 15; ++j) {
      const double d = std::abs(g(std::pow(10.0, -j)) - g0);
      if (!std::isfinite(d) || d > last * (1.0 + 1e-9) + 1e-15) settles = false;
      last = d;
    }
    f.continuous_at_zero = settles && (last <= 0.1 * first || last <= 1e-6);
  }

  // Chord slopes must not increase; t = 0 is skipped when g(0) = -inf.
  if (interior_finite && g0 != kInf) {
    f.concave = true;
    double prev = kInf;
    for (int i = (std::isfinite(g0) ? 0 : 1); i < steps; ++i) {
      const double slope = (v[i + 1] - v[i]) / kGainGridStep;
      if (slope > prev + 1e-7 * std::max(1.0, std::abs(prev))) {
        f.concave = false;
        break;
      }
      prev = slope;
    }
  }

  if (std::isfinite(g0)) {
    const double q1 = (g(1e-6) - g0) / 1e-6;
    const double q2 = (g(1e-8) - g0) / 1e-8;
    if (std::isfinite(q1) && std::isfinite(q2) && std::abs(q1 - q2) <= 1e-3 * std::max(1.0, std::abs(q1))) {
      f.derivative_at_zero = std::abs(q2) < 1e-6 ? 0.0 : q2;
    }
  }
  return f;
}

inline void check_declared(const char* name, const std::optional<bool>& declared, bool observed) {
  if (declared && *declared != observed) {
    throw Error(ErrorKind::kValidation, std::string("declared gain flag '") + name +
                                            "' disagrees with the grid check");
  }
}

}  // namespace internal

class GainFunction {
 public:
  GainFunction(std::string name, std::function<double(double)> eval, DeclaredFlags declared = {})
      : name_(std::move(name)), eval_(std::move(eval)), flags_(internal::grid_flags(eval_)) {
    internal::check_declared("nonneg", declared.nonneg, flags_.nonneg);
    internal::check_declared("zero_at_zero", declared.zero_at_zero, flags_.zero_at_zero);
    internal::check_declared("continuous_at_zero", declared.continuous_at_zero,
                             flags_.continuous_at_zero);
    internal::check_declared("concave", declared.concave, flags_.concave);
    internal::check_declared("bounded_sup", declared.bounded_sup, flags_.bounded_sup);
  }

  static GainFunction from_expression(const std::string& text) {
    auto e = Expression::parse(text);
    return GainFunction(text, [e](double t) { return e(t); });
  }

  double operator()(double t) const { return eval_(t); }
  const GainFlags& flags() const { return flags_; }
  const std::string& name() const { return name_; }

 private:
  std::string name_;
  std::function<double(double)> eval_;
  GainFlags flags_;
};

class GainFamily {
 public:
  enum class Kind { kIdentity, kAlpha, kLog, kCustom };

  static GainFamily identity() { return GainFamily(Kind::kIdentity, 0.0, std::nullopt); }
  static GainFamily alpha(double a) {
    if (!(a > 0.0) || a == 1.0 || !std::isfinite(a)) {
      throw Error(ErrorKind::kValidation, "alpha gain needs alpha in (0,1) or (1,inf)");
    }
    return GainFamily(Kind::kAlpha, a, std::nullopt);
  }
  static GainFamily log() { return GainFamily(Kind::kLog, 0.0, std::nullopt); }
  static GainFamily custom(GainFunction g) { return GainFamily(Kind::kCustom, 0.0, std::move(g)); }

  // "identity", "alpha:<a>", "log" or "custom:<expression>".
  static GainFamily parse(const std::string& spec) {
    if (spec == "identity") return identity();
    if (spec == "log") return log();
    if (spec.rfind("alpha:", 0) == 0) {
      const std::string num = spec.substr(6);
      char* end = nullptr;
      const double a = std::strtod(num.c_str(), &end);
      if (num.empty() || *end != '\0') throw Error(ErrorKind::kParse, "bad alpha in gain spec");
      return alpha(a);
    }
    if (spec.rfind("custom:", 0) == 0) return custom(GainFunction::from_expression(spec.substr(7)));
    throw Error(ErrorKind::kParse, "unknown gain spec '" + spec + "'");
  }

  Kind kind() const { return kind_; }
  double alpha_value() const { return alpha_; }
  const GainFunction& function() const { return *custom_; }

  double operator()(double t) const {
    switch (kind_) {
      case Kind::kIdentity: return t;
      case Kind::kAlpha: return alpha_ / (alpha_ - 1.0) * std::pow(t, (alpha_ - 1.0) / alpha_);
      case Kind::kLog: return std::log(t);
      case Kind::kCustom: return (*custom_)(t);
    }
    return 0.0;
  }

  GainFlags flags() const {
    GainFlags f;
    switch (kind_) {
      case Kind::kIdentity:
        f = {true, true, true, true, true, 1.0, 1.0};
        break;
      case Kind::kAlpha:
        if (alpha_ > 1.0) {
          f = {true, true, true, true, true, alpha_ / (alpha_ - 1.0), std::nullopt};
        } else {
          f = {false, false, false, true, true, alpha_ / (alpha_ - 1.0), std::nullopt};
        }
        break;
      case Kind::kLog:
        f = {false, false, false, true, true, 0.0, std::nullopt};
        break;
      case Kind::kCustom:
        f = custom_->flags();
        break;
    }
    return f;
  }

  std::string to_string() const {
    switch (kind_) {
      case Kind::kIdentity: return "identity";
      case Kind::kAlpha: {
        char buf[48];
        std::snprintf(buf, sizeof(buf), "alpha:%.12g", alpha_);
        return buf;
      }
      case Kind::kLog: return "log";
      case Kind::kCustom: return "custom:" + custom_->name();
    }
    return "";
  }

 private:
  GainFamily(Kind kind, double a, std::optional<GainFunction> g)
      : kind_(kind), alpha_(a), custom_(std::move(g)) {}

  Kind kind_;
  double alpha_;
  std::optional<GainFunction> custom_;
};

// kConcave: concave, g(0) = 0 and 0 < g'(0) < inf.
// kBounded: g(0) = 0, g continuous at 0 and 0 < sup g < inf.
enum class HypothesisSet { kConcave, kBounded };

struct HypothesisCheck {
  std::string name;
  bool ok;
  std::string evidence;
};

struct HypothesisReport {
  HypothesisSet set;
  bool passed;
  std::vector<HypothesisCheck> checks;
};

inline HypothesisReport validate_hypotheses(const GainFamily& g, HypothesisSet set) {
  const GainFlags f = g.flags();
  HypothesisReport r{set, true, {}};
  auto add = [&](std::string name, bool ok, std::string evidence) {
    r.checks.push_back({std::move(name), ok, std::move(evidence)});
    r.passed = r.passed && ok;
  };
  auto num = [](double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", x);
    return std::string(buf);
  };
  add("nonneg", f.nonneg, f.nonneg ? "g >= 0 on grid" : "negative or -inf value on grid");
  add("zero_at_zero", f.zero_at_zero, "g(0) = " + num(g(0.0)));
  if (set == HypothesisSet::kConcave) {
    add("concave", f.concave, f.concave ? "chord slopes non-increasing" : "chord slope increases");
    const bool d_ok = f.derivative_at_zero && *f.derivative_at_zero > 0.0;
    add("derivative_at_zero", d_ok,
        f.derivative_at_zero ? "g'(0) ~ " + num(*f.derivative_at_zero)
                             : std::string("difference quotient diverges at 0"));
  } else {
    add("continuous_at_zero", f.continuous_at_zero,
        f.continuous_at_zero ? "g(t) -> g(0) as t -> 0" : "g(t) does not settle at g(0)");
    const bool sup_ok = f.bounded_sup && f.sup_value > 0.0 && std::isfinite(f.sup_value);
    add("sup_positive_finite", sup_ok, "sup g ~ " + num(f.sup_value));
  }
  return r;
}

struct GainResult {
  double value;
  std::vector<double> strategy;
  bool approximate = false;
  std::optional<double> residual;  // first-order optimality residual, numeric path only
};

namespace internal {

// Maximizes sum_j c_j g(Q_j / m_j) over the simplex in Q by coordinate-pair
// transfers with a shrinking step, from a fixed set of starts.
inline std::vector<double> grouped_ascent(const std::vector<double>& c, const std::vector<double>& m,
                                          const std::function<double(double)>& g) {
  const std::size_t n = c.size();
  auto h = [&](std::size_t j, double q) { return c[j] == 0.0 ? 0.0 : c[j] * g(std::clamp(q, 0.0, m[j]) / m[j]); };
  auto objective = [&](const std::vector<double>& q) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += h(j, q[j]);
    return s;
  };
  auto normalized = [](std::vector<double> v) {
    double s = 0.0;
    for (double x : v) s += x;
    for (double& x : v) x /= s;
    return v;
  };

  std::vector<std::vector<double>> starts;
  starts.push_back(std::vector<double>(n, 1.0 / n));
  starts.push_back(normalized(c));
  {
    std::vector<double> sq(n), rt(n);
    for (std::size_t j = 0; j < n; ++j) {
      sq[j] = c[j] * c[j];
      rt[j] = std::sqrt(c[j]);
    }
    starts.push_back(normalized(sq));
    starts.push_back(normalized(rt));
  }
  for (auto j : descending_order(c)) {
    if (starts.size() >= static_cast<std::size_t>(kGainMultistarts) - 4) break;
    std::vector<double> corner(n, 0.0);
    corner[j] = 1.0;
    starts.push_back(corner);
  }
  std::mt19937_64 rng(0x5eed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  while (starts.size() < static_cast<std::size_t>(kGainMultistarts)) {
    std::vector<double> r(n);
    for (auto& x : r) x = -std::log(1.0 - unit(rng));
    starts.push_back(normalized(r));
  }

  std::vector<double> best;
  double best_value = -kInf;
  for (auto q : starts) {
    for (double step = 0.25; step >= 1e-13; step *= 0.5) {
      for (int sweep = 0; sweep < 200; ++sweep) {
        bool moved = false;
        for (std::size_t i = 0; i < n; ++i) {
          for (std::size_t j = 0; j < n; ++j) {
            if (i == j || q[i] <= 0.0) continue;
            const double d = std::min(step, q[i]);
            const double gain = (h(i, q[i] - d) - h(i, q[i])) + (h(j, q[j] + d) - h(j, q[j]));
            if (gain > 0.0) {
              q[i] -= d;
              q[j] += d;
              moved = true;
            }
          }
        }
        if (!moved) break;
      }
    }
    const double v = objective(q);
    if (v > best_value) {
      best_value = v;
      best = q;
    }
  }
  return best;
}

// Largest KKT violation of sum_j c_j g(Q_j/m_j) at q, via central differences.
inline double first_order_residual(const std::vector<double>& c, const std::vector<double>& m,
                                   const std::function<double(double)>& g,
                                   const std::vector<double>& q) {
  const double eps = 1e-7;
  const std::size_t n = c.size();
  std::vector<double> d(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double lo = std::max(0.0, q[j] - eps), hi = std::min(m[j], q[j] + eps);
    d[j] = c[j] * (g(hi / m[j]) - g(lo / m[j])) / (hi - lo);
  }
  double lambda = -kInf;
  for (std::size_t j = 0; j < n; ++j) {
    if (q[j] > 1e-9) lambda = std::max(lambda, d[j]);
  }
  double worst = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    if (c[j] == 0.0) continue;
    worst = std::max(worst, q[j] > 1e-9 ? std::abs(d[j] - lambda) : std::max(0.0, d[j] - lambda));
  }
  return worst;
}

}  // namespace internal

// sup over strategies of sum_u mult_u * value_u * g(Q(u)) where the
// alphabet consists of groups of mult_j cells that each carry mass value_j.
// This is the maximal expected gain of a pmf built from repeated blocks.
inline double max_expected_gain_grouped(const std::vector<double>& values,
                                        const std::vector<double>& mult, const GainFamily& g) {
  switch (g.kind()) {
    case GainFamily::Kind::kIdentity: {
      double top = 0.0;
      for (std::size_t j = 0; j < values.size(); ++j) {
        if (mult[j] > 0.0) top = std::max(top, values[j]);
      }
      return top;
    }
    case GainFamily::Kind::kAlpha: {
      const double a = g.alpha_value();
      double top = 0.0;
      for (double v : values) top = std::max(top, v);
      double s = 0.0;
      for (std::size_t j = 0; j < values.size(); ++j) {
        if (values[j] > 0.0) s += mult[j] * std::pow(values[j] / top, a);
      }
      return a / (a - 1.0) * top * std::pow(s, 1.0 / a);
    }
    case GainFamily::Kind::kLog: {
      double s = 0.0;
      for (std::size_t j = 0; j < values.size(); ++j) {
        if (values[j] > 0.0) s += mult[j] * values[j] * std::log(values[j]);
      }
      return s;
    }
    case GainFamily::Kind::kCustom: {
      const auto& fn = g.function();
      std::function<double(double)> eval = [&fn](double t) { return fn(t); };
      if (fn.flags().concave) {
        std::vector<double> c(values.size());
        for (std::size_t j = 0; j < values.size(); ++j) c[j] = values[j] * mult[j];
        auto q = internal::grouped_ascent(c, mult, eval);
        double s = 0.0;
        for (std::size_t j = 0; j < c.size(); ++j) {
          if (c[j] != 0.0) s += c[j] * eval(q[j] / mult[j]);
        }
        return s;
      }
      double cells = 0.0;
      for (double x : mult) cells += x;
      if (cells > 256.0) {
        throw Error(ErrorKind::kValidation,
                    "non-concave custom gain on more than 256 cells is not supported");
      }
      std::vector<double> c;
      for (std::size_t j = 0; j < values.size(); ++j) {
        for (int r = 0; r < static_cast<int>(mult[j]); ++r) c.push_back(values[j]);
      }
      std::vector<double> ones(c.size(), 1.0);
      auto q = internal::grouped_ascent(c, ones, eval);
      double s = 0.0;
      for (std::size_t j = 0; j < c.size(); ++j) {
        if (c[j] != 0.0) s += c[j] * eval(q[j]);
      }
      return s;
    }
  }
  return 0.0;
}

inline GainResult max_expected_gain(const Pmf& p, const GainFamily& g) {
  const auto& v = p.probs();
  std::vector<double> ones(v.size(), 1.0);
  switch (g.kind()) {
    case GainFamily::Kind::kIdentity: {
      std::vector<double> s(v.size(), 0.0);
      s[static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin())] = 1.0;
      return {p.max(), s, false, std::nullopt};
    }
    case GainFamily::Kind::kAlpha:
      return {max_expected_gain_grouped(v, ones, g), tilt(p, Order::finite(g.alpha_value())).probs(),
              false, std::nullopt};
    case GainFamily::Kind::kLog:
      return {-shannon_entropy(p), v, false, std::nullopt};
    case GainFamily::Kind::kCustom: {
      const auto& fn = g.function();
      std::function<double(double)> eval = [&fn](double t) { return fn(t); };
      auto q = internal::grouped_ascent(v, ones, eval);
      double s = 0.0;
      for (std::size_t j = 0; j < v.size(); ++j) {
        if (v[j] != 0.0) s += v[j] * eval(q[j]);
      }
      GainResult r{s, q, !fn.flags().concave, std::nullopt};
      if (fn.flags().concave) r.residual = internal::first_order_residual(v, ones, eval, q);
      return r;
    }
  }
  return {0.0, {}, false, std::nullopt};
}

}  // namespace leakscope
