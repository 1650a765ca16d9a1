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
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "leakscope/error.hpp"
#include "leakscope/measures.hpp"
#include "leakscope/prob.hpp"

namespace leakscope {

inline constexpr double kAdmissibleTolerance = 1e-9;
inline constexpr double kThresholdTolerance = 1e-12;
inline constexpr double kRobustnessTolerance = 1e-9;

inline double alpha_loss(double p, Order alpha) {
  if (alpha.is_infinity()) return 1.0 - p;
  if (alpha.is_one()) return p > 0.0 ? -std::log(p) : kInf;
  const double a = alpha.value();
  if (p <= 0.0) return a > 1.0 ? a / (a - 1.0) : kInf;
  return a / (a - 1.0) * -std::expm1((a - 1.0) / a * std::log(p));
}

struct SStarResult {
  int s_star;                        // 1-based
  std::vector<double> sorted_probs;  // descending
  std::vector<std::size_t> perm;     // sorted_probs[i] == p[perm[i]]
  std::string case_label;
};

// Probability that at least one of the k guesses hits each symbol.
struct GuessVector {
  Alphabet alphabet;
  std::vector<double> t;
  int k;
};

struct StrategyDecomposition {
  struct Entry {
    std::vector<std::size_t> subset;  // k distinct symbol indices, ascending
    double weight;
  };
  int k;
  std::vector<Entry> entries;
};

namespace internal {

inline void require_k(int k) {
  if (k < 1) throw Error(ErrorKind::kValidation, "k must be at least 1");
}

// sum_{i >= r} (p_i / p_r)^a on the sorted pmf (0-based r); every term is at
// most 1, so nothing under- or overflows.
inline double tail_ratio_sum(const std::vector<double>& sorted, std::size_t r, Order alpha) {
  double s = 0.0;
  for (std::size_t i = r; i < sorted.size(); ++i) {
    const double ratio = sorted[i] / sorted[r];
    if (alpha.is_infinity()) {
      s += ratio == 1.0 ? 1.0 : 0.0;
    } else if (ratio > 0.0) {
      s += alpha.is_one() ? ratio : std::pow(ratio, alpha.value());
    }
  }
  return s;
}

}  // namespace internal

inline SStarResult s_star(const Pmf& p, int k, Order alpha) {
  internal::require_k(k);
  if (static_cast<std::size_t>(k) >= p.support_size()) {
    throw Error(ErrorKind::kValidation,
                "s* is defined only for k below the support size; use the zero-loss path");
  }
  SStarResult r;
  r.perm = descending_order(p.probs());
  for (auto i : r.perm) r.sorted_probs.push_back(p[i]);
  r.s_star = k;
  for (int s = 1; s <= k; ++s) {
    const double lhs = (k - s + 1) / internal::tail_ratio_sum(r.sorted_probs, s - 1, alpha);
    if (lhs <= 1.0 + kThresholdTolerance) {
      r.s_star = s;
      break;
    }
  }
  r.case_label = r.s_star == 1 ? "proportional" : "deterministic-prefix";
  return r;
}

// Sorted-order coverage probabilities for a given threshold.
namespace internal {

inline std::vector<double> sorted_coverage(const SStarResult& s, int k, Order alpha) {
  const auto& p = s.sorted_probs;
  std::vector<double> t(p.size(), 0.0);
  if (alpha.is_infinity()) {
    for (int i = 0; i < k; ++i) t[i] = 1.0;
    return t;
  }
  const std::size_t r = static_cast<std::size_t>(s.s_star - 1);
  const double tail = tail_ratio_sum(p, r, alpha);
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i < r) {
      t[i] = 1.0;
    } else if (p[i] > 0.0) {
      const double ratio = p[i] / p[r];
      const double w = alpha.is_one() ? ratio : std::pow(ratio, alpha.value());
      t[i] = std::min(1.0, (k - s.s_star + 1) * w / tail);
    }
  }
  return t;
}

inline std::vector<double> full_coverage(const Pmf& p, int k) {
  if (static_cast<std::size_t>(k) > p.size()) {
    throw Error(ErrorKind::kValidation, "k exceeds the alphabet size");
  }
  std::vector<double> t(p.size(), 0.0);
  int left = k;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0) t[i] = 1.0, --left;
  }
  for (std::size_t i = 0; i < p.size() && left > 0; ++i) {
    if (t[i] == 0.0) t[i] = 1.0, --left;
  }
  return t;
}

}  // namespace internal

inline double min_expected_alpha_loss(const Pmf& p, int k, Order alpha) {
  internal::require_k(k);
  if (static_cast<std::size_t>(k) >= p.support_size()) return 0.0;
  const auto s = s_star(p, k, alpha);
  const auto& sp = s.sorted_probs;
  if (alpha.is_infinity()) {
    double top = 0.0;
    for (int i = 0; i < k; ++i) top += sp[i];
    return 1.0 - top;
  }
  const std::size_t r = static_cast<std::size_t>(s.s_star - 1);
  if (alpha.is_one()) {
    double tail = 0.0;
    for (std::size_t i = r; i < sp.size(); ++i) tail += sp[i];
    std::vector<double> coarse(sp.begin(), sp.begin() + r);
    coarse.push_back(tail);
    const double loss = internal::entropy(p.probs()) - internal::entropy(coarse) -
                        tail * std::log(static_cast<double>(k - s.s_star + 1));
    return std::max(0.0, loss);
  }
  const double a = alpha.value();
  const auto t = internal::sorted_coverage(s, k, alpha);
  double loss = 0.0;
  for (std::size_t i = r; i < sp.size(); ++i) {
    if (sp[i] > 0.0) loss += sp[i] * -std::expm1((a - 1.0) / a * std::log(t[i]));
  }
  return std::max(0.0, a / (a - 1.0) * loss);
}

inline GuessVector optimal_guess_vector(const Pmf& p, int k, Order alpha) {
  internal::require_k(k);
  if (static_cast<std::size_t>(k) >= p.support_size()) {
    return {p.alphabet(), internal::full_coverage(p, k), k};
  }
  const auto s = s_star(p, k, alpha);
  return {p.alphabet(), unsort(internal::sorted_coverage(s, k, alpha), s.perm), k};
}

inline bool is_admissible(const std::vector<double>& t, int k) {
  double total = 0.0;
  for (double v : t) {
    if (!(v >= -kAdmissibleTolerance && v <= 1.0 + kAdmissibleTolerance)) return false;
    total += v;
  }
  return std::abs(total - k) <= kAdmissibleTolerance;
}

struct LossBreakdown {
  double loss;
  std::optional<double> regret;          // loss minus the proportional-case closed form
  std::optional<double> bregman_regret;  // k^{(a-1)/a} B_F(p, tilt(t/k, 1/a))
};

inline LossBreakdown expected_alpha_loss(const Pmf& p, const GuessVector& g, Order alpha) {
  if (g.t.size() != p.size()) {
    throw Error(ErrorKind::kAlphabetMismatch, "guess vector length differs from pmf");
  }
  if (!is_admissible(g.t, g.k)) {
    throw Error(ErrorKind::kInadmissibleStrategy, "guess vector is not admissible for k");
  }
  std::vector<double> t(g.t.size());
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = std::clamp(g.t[i], 0.0, 1.0);

  LossBreakdown out{0.0, std::nullopt, std::nullopt};
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0) out.loss += p[i] * alpha_loss(t[i], alpha);
  }
  if (!alpha.is_finite()) return out;

  const double a = alpha.value();
  const double k = g.k;
  const double e = (a - 1.0) / a;
  const double base =
      a / (a - 1.0) * -std::expm1(e * std::log(k) - e * renyi_entropy(p, alpha));
  out.regret = out.loss - base;

  bool covered = true;
  for (std::size_t i = 0; i < p.size(); ++i) covered = covered && !(p[i] > 0.0 && t[i] <= 0.0);
  if (covered) {
    std::vector<double> scaled(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) scaled[i] = t[i] / k;
    double total = 0.0;
    for (double v : scaled) total += v;
    for (double& v : scaled) v /= total;
    const Pmf q = tilt(Pmf(p.alphabet(), scaled), Order::finite(1.0 / a));
    out.bregman_regret = std::pow(k, e) * bregman_F(p, q, a);
  }
  return out;
}

// Writes t as a mixture of k-subsets. Each round takes the k largest
// remaining coordinates and peels off as much weight as keeps every
// coordinate within [0, W], where W is the weight still unassigned.
inline StrategyDecomposition decompose_strategy(const GuessVector& g) {
  if (!is_admissible(g.t, g.k)) {
    throw Error(ErrorKind::kInadmissibleStrategy, "guess vector is not admissible for k");
  }
  const std::size_t n = g.t.size();
  const std::size_t k = static_cast<std::size_t>(g.k);
  const double snap = 1e-13;
  std::vector<double> r(n);
  for (std::size_t i = 0; i < n; ++i) r[i] = std::clamp(g.t[i], 0.0, 1.0);
  double w = 1.0;

  std::map<std::vector<std::size_t>, double> weights;
  const std::size_t max_steps = n * (n - k) + 1;
  std::size_t steps = 0;
  while (w > snap) {
    if (++steps > max_steps) {
      throw Error(ErrorKind::kDecompositionStall, "decomposition exceeded its step bound");
    }
    const auto order = descending_order(r);
    std::vector<std::size_t> chosen(order.begin(), order.begin() + k);
    double delta = r[order[k - 1]];
    if (k < n) delta = std::min(delta, w - r[order[k]]);
    if (!(delta > 0.0)) {
      throw Error(ErrorKind::kDecompositionStall, "decomposition step has no positive weight");
    }
    for (auto i : chosen) r[i] -= delta;
    w -= delta;
    std::sort(chosen.begin(), chosen.end());
    weights[chosen] += delta;

    double total = 0.0;
    for (auto& v : r) {
      if (std::abs(v) < snap) v = 0.0;
      if (std::abs(v - w) < snap) v = w;
      if (v < -kAdmissibleTolerance || v > w + kAdmissibleTolerance) {
        throw Error(ErrorKind::kDecompositionStall, "remaining coverage left [0, W]");
      }
      total += v;
    }
    if (std::abs(total - k * w) > kAdmissibleTolerance) {
      throw Error(ErrorKind::kDecompositionStall, "remaining coverage no longer sums to kW");
    }
  }
  StrategyDecomposition out{g.k, {}};
  for (auto& [subset, weight] : weights) out.entries.push_back({subset, weight});
  return out;
}

namespace internal {

// sum_i p_i t_i^{(a-1)/a} at the loss-optimal guess vector.
inline double optimal_gain_sum(const Pmf& p, int k, Order alpha) {
  if (static_cast<std::size_t>(k) >= p.support_size()) return 1.0;
  const auto t = optimal_guess_vector(p, k, alpha).t;
  const double e = (alpha.value() - 1.0) / alpha.value();
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0) s += p[i] * std::exp(e * std::log(t[i]));
  }
  return s;
}

inline void require_finite_order(Order alpha) {
  if (!alpha.is_finite()) {
    throw Error(ErrorKind::kUnsupportedOrder, "this quantity needs a finite order other than 1");
  }
}

}  // namespace internal

inline Nats alpha_leakage_k(const JointDist& joint, int k, Order alpha) {
  internal::require_k(k);
  internal::require_finite_order(alpha);
  const double a = alpha.value();
  const auto py = joint.py_raw();
  double num = 0.0;
  for (std::size_t y = 0; y < joint.cols(); ++y) {
    if (py[y] > 0.0) num += py[y] * internal::optimal_gain_sum(posterior(joint, y), k, alpha);
  }
  const double den = internal::optimal_gain_sum(joint.px(), k, alpha);
  return std::max(0.0, a / (a - 1.0) * std::log(num / den));
}

struct RobustnessReport {
  bool hypotheses_hold;
  double max_tilted;  // largest tilted prior or posterior value
  Nats leakage_k;
  Nats leakage_1;
  std::optional<bool> equality_holds;  // set only when the hypotheses hold
};

inline RobustnessReport check_robustness(const JointDist& joint, int k, Order alpha) {
  internal::require_k(k);
  internal::require_finite_order(alpha);
  double worst = tilt(joint.px(), alpha).max();
  const auto py = joint.py_raw();
  for (std::size_t y = 0; y < joint.cols(); ++y) {
    if (py[y] > 0.0) worst = std::max(worst, tilt(posterior(joint, y), alpha).max());
  }
  RobustnessReport r;
  r.max_tilted = worst;
  r.hypotheses_hold = worst <= 1.0 / k + kThresholdTolerance;
  r.leakage_k = alpha_leakage_k(joint, k, alpha);
  r.leakage_1 = alpha_leakage_k(joint, 1, alpha);
  if (r.hypotheses_hold) {
    r.equality_holds = std::abs(r.leakage_k - r.leakage_1) <= kRobustnessTolerance;
  }
  return r;
}

// Every symbol of U (here U = X) split into m equiprobable copies.
inline JointDist split_joint(const JointDist& joint, int m) {
  std::vector<std::string> labels;
  std::vector<std::vector<double>> mass;
  for (std::size_t x = 0; x < joint.rows(); ++x) {
    for (int j = 0; j < m; ++j) {
      labels.push_back(joint.x_alphabet()[x] + "#" + std::to_string(j));
      std::vector<double> row(joint.cols());
      for (std::size_t y = 0; y < joint.cols(); ++y) row[y] = joint(x, y) / m;
      mass.push_back(std::move(row));
    }
  }
  return JointDist(Alphabet(std::move(labels)), joint.y_alphabet(), std::move(mass));
}

struct SplitBound {
  Nats lhs_lb;          // k-guess alpha-leakage of the split auxiliary
  Nats rhs;             // single-guess Arimoto MI of U = X
  Nats split_arimoto;   // Arimoto MI of the split auxiliary
  bool tilted_within;   // all tilted split values <= 1/m
};

inline SplitBound maximal_alpha_leakage_k_lower_bound(const JointDist& joint, int k, Order alpha,
                                                      int m) {
  internal::require_k(k);
  internal::require_finite_order(alpha);
  if (m < k) throw Error(ErrorKind::kInvalidSplit, "split size m must be at least k");
  const JointDist split = split_joint(joint, m);
  double worst = tilt(split.px(), alpha).max();
  const auto py = split.py_raw();
  for (std::size_t y = 0; y < split.cols(); ++y) {
    if (py[y] > 0.0) worst = std::max(worst, tilt(posterior(split, y), alpha).max());
  }
  SplitBound b;
  b.tilted_within = worst <= 1.0 / m + kThresholdTolerance;
  b.lhs_lb = alpha_leakage_k(split, k, alpha);
  b.rhs = arimoto_mi(joint, alpha);
  b.split_arimoto = arimoto_mi(split, alpha);
  if (b.lhs_lb < b.rhs - kRobustnessTolerance) {
    throw Error(ErrorKind::kInvariant, "split construction fell below the single-guess value");
  }
  return b;
}

}  // namespace leakscope
