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
#include <vector>

#include "leakscope/error.hpp"
#include "leakscope/prob.hpp"

namespace leakscope {

// Natural-log units. +inf is a legitimate value; NaN never is.
using Nats = double;

namespace internal {

inline void require_same_alphabet(const Pmf& p, const Pmf& q) {
  if (!(p.alphabet() == q.alphabet())) {
    throw Error(ErrorKind::kAlphabetMismatch, "pmfs are over different alphabets");
  }
}

inline void require_compatible(const Pmf& px, const Channel& ch) {
  if (!(px.alphabet() == ch.input())) {
    throw Error(ErrorKind::kAlphabetMismatch, "pmf alphabet differs from channel input alphabet");
  }
}

inline double entropy(const std::vector<double>& p) {
  double h = 0.0;
  for (double v : p) {
    if (v > 0.0) h -= v * std::log(v);
  }
  return std::max(0.0, h);
}

// log sum_i p_i^a for a finite positive order, computed relative to max p.
inline double log_power_sum(const std::vector<double>& p, double a) {
  const double top = *std::max_element(p.begin(), p.end());
  double s = 0.0;
  for (double v : p) {
    if (v > 0.0) s += std::pow(v / top, a);
  }
  return a * std::log(top) + std::log(s);
}

inline double log_sum_exp(const std::vector<double>& terms) {
  double top = -kInf;
  for (double t : terms) top = std::max(top, t);
  if (top == -kInf) return -kInf;
  double s = 0.0;
  for (double t : terms) s += std::exp(t - top);
  return top + std::log(s);
}

}  // namespace internal

inline Nats shannon_entropy(const Pmf& p) { return internal::entropy(p.probs()); }

inline Nats renyi_entropy(const Pmf& p, Order alpha) {
  if (alpha.is_one()) return shannon_entropy(p);
  if (alpha.is_infinity()) return -std::log(p.max());
  const double a = alpha.value();
  return std::max(0.0, internal::log_power_sum(p.probs(), a) / (1.0 - a));
}

inline Nats kl_divergence(const Pmf& p, const Pmf& q) {
  internal::require_same_alphabet(p, q);
  double d = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) continue;
    if (q[i] <= 0.0) return kInf;
    d += p[i] * std::log(p[i] / q[i]);
  }
  return std::max(0.0, d);
}

// sum p log(p / q~) for a sub-normalized q~ with the support of p; never
// negative since the normalizing constant only adds -log(sum q~) >= 0.
inline Nats kl_subnormalized(const Pmf& p, const std::vector<double>& q_tilde) {
  double d = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) continue;
    if (q_tilde[i] <= 0.0) return kInf;
    d += p[i] * std::log(p[i] / q_tilde[i]);
  }
  return d;
}

inline Nats renyi_divergence(const Pmf& p, const Pmf& q, Order alpha) {
  internal::require_same_alphabet(p, q);
  if (alpha.is_one()) return kl_divergence(p, q);
  if (alpha.is_infinity()) {
    double best = -kInf;
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (p[i] <= 0.0) continue;
      if (q[i] <= 0.0) return kInf;
      best = std::max(best, std::log(p[i] / q[i]));
    }
    return std::max(0.0, best);
  }
  const double a = alpha.value();
  std::vector<double> terms;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) continue;
    if (q[i] <= 0.0) {
      if (a > 1.0) return kInf;
      continue;  // q^{1-a} = 0 for a < 1
    }
    terms.push_back(a * std::log(p[i]) + (1.0 - a) * std::log(q[i]));
  }
  if (terms.empty()) return kInf;
  return std::max(0.0, internal::log_sum_exp(terms) / (a - 1.0));
}

inline Nats conditional_entropy(const JointDist& joint) {
  double h = 0.0;
  const auto py = joint.py_raw();
  for (std::size_t y = 0; y < joint.cols(); ++y) {
    for (std::size_t x = 0; x < joint.rows(); ++x) {
      const double m = joint(x, y);
      if (m > 0.0) h -= m * std::log(m / py[y]);
    }
  }
  return std::max(0.0, h);
}

inline Nats shannon_mi(const JointDist& joint) {
  const auto px = joint.px_raw();
  const auto py = joint.py_raw();
  double i = 0.0;
  for (std::size_t x = 0; x < joint.rows(); ++x) {
    for (std::size_t y = 0; y < joint.cols(); ++y) {
      const double m = joint(x, y);
      if (m > 0.0) i += m * std::log(m / (px[x] * py[y]));
    }
  }
  return std::max(0.0, i);
}

inline Nats sibson_mi(const Pmf& px, const Channel& ch, Order alpha) {
  internal::require_compatible(px, ch);
  if (alpha.is_one()) return shannon_mi(joint_from(px, ch));
  double total = 0.0;
  if (alpha.is_infinity()) {
    for (std::size_t y = 0; y < ch.outputs(); ++y) {
      double best = 0.0;
      for (std::size_t x = 0; x < ch.inputs(); ++x) {
        if (px[x] > 0.0) best = std::max(best, ch(x, y));
      }
      total += best;
    }
    return std::max(0.0, std::log(total));
  }
  const double a = alpha.value();
  for (std::size_t y = 0; y < ch.outputs(); ++y) {
    double top = 0.0;
    for (std::size_t x = 0; x < ch.inputs(); ++x) {
      if (px[x] > 0.0) top = std::max(top, ch(x, y));
    }
    if (top == 0.0) continue;
    double s = 0.0;
    for (std::size_t x = 0; x < ch.inputs(); ++x) {
      if (px[x] > 0.0 && ch(x, y) > 0.0) s += px[x] * std::pow(ch(x, y) / top, a);
    }
    total += top * std::pow(s, 1.0 / a);
  }
  return std::max(0.0, a / (a - 1.0) * std::log(total));
}

inline Nats sibson_mi(const JointDist& joint, Order alpha) {
  return sibson_mi(joint.px(), joint.channel(), alpha);
}

namespace internal {

// sum_y (sum_x P_XY(x,y)^a)^{1/a}, or sum_y max_x P_XY(x,y) for a = inf.
inline double arimoto_inner(const JointDist& joint, Order alpha) {
  double total = 0.0;
  for (std::size_t y = 0; y < joint.cols(); ++y) {
    double top = 0.0;
    for (std::size_t x = 0; x < joint.rows(); ++x) top = std::max(top, joint(x, y));
    if (top == 0.0) continue;
    if (alpha.is_infinity()) {
      total += top;
      continue;
    }
    double s = 0.0;
    for (std::size_t x = 0; x < joint.rows(); ++x) {
      if (joint(x, y) > 0.0) s += std::pow(joint(x, y) / top, alpha.value());
    }
    total += top * std::pow(s, 1.0 / alpha.value());
  }
  return total;
}

}  // namespace internal

inline Nats arimoto_cond_entropy(const JointDist& joint, Order alpha) {
  if (alpha.is_one()) return conditional_entropy(joint);
  const double inner = internal::arimoto_inner(joint, alpha);
  if (alpha.is_infinity()) return std::max(0.0, -std::log(inner));
  const double a = alpha.value();
  return std::max(0.0, a / (1.0 - a) * std::log(inner));
}

// Ratio form of H_a(X) - H_a^A(X|Y), which avoids cancelling two entropies.
inline Nats arimoto_mi(const JointDist& joint, Order alpha) {
  if (alpha.is_one()) return shannon_mi(joint);
  const double inner = internal::arimoto_inner(joint, alpha);
  const auto px = joint.px_raw();
  if (alpha.is_infinity()) {
    const double top = *std::max_element(px.begin(), px.end());
    return std::max(0.0, std::log(inner / top));
  }
  const double a = alpha.value();
  const double log_norm = internal::log_power_sum(px, a) / a;
  return std::max(0.0, a / (a - 1.0) * (std::log(inner) - log_norm));
}

inline Nats arimoto_mi(const Pmf& px, const Channel& ch, Order alpha) {
  internal::require_compatible(px, ch);
  return arimoto_mi(joint_from(px, ch), alpha);
}

namespace internal {

inline void require_bregman_domain(const Pmf& p, const Pmf& q, double alpha) {
  require_same_alphabet(p, q);
  if (!(alpha > 0.0) || alpha == 1.0 || !std::isfinite(alpha)) {
    throw Error(ErrorKind::kUnsupportedOrder, "bregman_F needs a finite order other than 1");
  }
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0 && q[i] <= 0.0) {
      throw Error(ErrorKind::kDomain, "q vanishes where p is positive");
    }
  }
}

}  // namespace internal

// Bregman divergence of F(p) = a/(a-1) ((sum p^a)^{1/a} - 1), through the
// order-1/a Renyi divergence between the a-tilts.
inline Nats bregman_F(const Pmf& p, const Pmf& q, double alpha) {
  internal::require_bregman_domain(p, q, alpha);
  const double a = alpha;
  const Order o = Order::finite(a);
  const double d = renyi_divergence(tilt(p, o), tilt(q, o), Order::of(1.0 / a));
  const double norm = std::exp(internal::log_power_sum(p.probs(), a) / a);
  const double b = a / (a - 1.0) * norm * -std::expm1((1.0 - a) / a * d);
  return std::max(0.0, b);
}

// Same divergence from F(p) - F(q) - <grad F(q), p - q>.
inline Nats bregman_F_first_order(const Pmf& p, const Pmf& q, double alpha) {
  internal::require_bregman_domain(p, q, alpha);
  const double a = alpha;
  const double c = a / (a - 1.0);
  const double norm_p = std::exp(internal::log_power_sum(p.probs(), a) / a);
  const double log_sum_q = internal::log_power_sum(q.probs(), a);
  const double norm_q = std::exp(log_sum_q / a);
  const double grad_scale = std::exp((1.0 - a) / a * log_sum_q);
  double inner = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (q[i] <= 0.0) continue;  // p is zero there too
    inner += grad_scale * std::pow(q[i], a - 1.0) * (p[i] - q[i]);
  }
  return c * (norm_p - norm_q) - c * inner;
}

}  // namespace leakscope
