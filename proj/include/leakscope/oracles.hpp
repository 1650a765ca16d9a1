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
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "leakscope/error.hpp"
#include "leakscope/gain.hpp"
#include "leakscope/measures.hpp"
#include "leakscope/multiguess.hpp"
#include "leakscope/prob.hpp"

namespace leakscope {

inline constexpr int kMaxSplit = 10000;
inline constexpr int kBruteForceStarts = 64;
inline constexpr int kMaxExhaustiveAlphabet = 8;
inline constexpr double kProjectionShiftTolerance = 1e-14;

// Dirichlet(c, ..., c) sample with every entry strictly positive.
inline Pmf random_pmf(std::mt19937_64& rng, std::size_t n, double concentration = 1.0) {
  std::gamma_distribution<double> gamma(concentration, 1.0);
  std::vector<double> v(n);
  double total = 0.0;
  for (auto& x : v) {
    do {
      x = gamma(rng);
    } while (!(x > 0.0));
    total += x;
  }
  for (auto& x : v) x /= total;
  return Pmf(v);
}

struct ShatterConfig {
  std::vector<int> sizes;             // m_x per input symbol
  std::optional<std::size_t> x_star;  // set for the single-letter variant

  static ShatterConfig per_input(std::vector<int> sizes) {
    for (int m : sizes) {
      if (m < 1) throw Error(ErrorKind::kValidation, "split sizes must be positive");
    }
    return {std::move(sizes), std::nullopt};
  }

  // x_star keeps a single letter; every other input is split m ways.
  static ShatterConfig distinguished(std::size_t n, std::size_t x_star, int m) {
    if (m < 1) throw Error(ErrorKind::kValidation, "split size must be positive");
    if (x_star >= n) throw Error(ErrorKind::kValidation, "distinguished symbol out of range");
    std::vector<int> sizes(n, m);
    sizes[x_star] = 1;
    return {std::move(sizes), x_star};
  }
};

inline Channel shattered_channel(const Pmf& px, const ShatterConfig& cfg) {
  if (cfg.sizes.size() != px.size()) {
    throw Error(ErrorKind::kAlphabetMismatch, "one split size per input symbol is required");
  }
  if (cfg.x_star && !(px[*cfg.x_star] > 0.0)) {
    throw Error(ErrorKind::kValidation, "distinguished symbol must lie in the support");
  }
  std::vector<std::string> out;
  for (std::size_t x = 0; x < px.size(); ++x) {
    for (int j = 0; j < cfg.sizes[x]; ++j) out.push_back(px.alphabet()[x] + "#" + std::to_string(j));
  }
  std::vector<std::vector<double>> rows(px.size(), std::vector<double>(out.size(), 0.0));
  std::size_t offset = 0;
  for (std::size_t x = 0; x < px.size(); ++x) {
    for (int j = 0; j < cfg.sizes[x]; ++j) rows[x][offset + j] = 1.0 / cfg.sizes[x];
    offset += cfg.sizes[x];
  }
  return Channel(px.alphabet(), Alphabet(std::move(out)), std::move(rows));
}

namespace internal {

// Index maximizing p/q over supp(p); nullopt when q vanishes somewhere on it.
inline std::optional<std::size_t> dinf_argmax(const Pmf& p, const Pmf& q) {
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!(p[i] > 0.0)) continue;
    if (!(q[i] > 0.0)) return std::nullopt;
    if (!best || p[i] / q[i] > p[*best] / q[*best]) best = i;
  }
  return best;
}

}  // namespace internal

// log of sup E_P g / sup E_Q g under the shattered auxiliary at split size m.
// Gains with g(0) = 0 keep x* whole and split the rest; the log gain splits
// x* alone and leaves the other blocks single.
inline Nats variational_dinf_lower(const Pmf& p, const Pmf& q, const GainFamily& g, int m) {
  internal::require_same_alphabet(p, q);
  if (m < 1 || m > kMaxSplit) {
    throw Error(ErrorKind::kValidation, "split size must lie in [1, " + std::to_string(kMaxSplit) + "]");
  }
  const bool log_gain = g.kind() == GainFamily::Kind::kLog;
  if (!log_gain && g.kind() != GainFamily::Kind::kIdentity &&
      !validate_hypotheses(g, HypothesisSet::kBounded).passed) {
    throw Error(ErrorKind::kValidation,
                "gain must satisfy g(0) = 0, continuity at 0 and 0 < sup g < inf");
  }
  const auto x_star = internal::dinf_argmax(p, q);
  if (!x_star) return kInf;

  const std::size_t n = p.size();
  std::vector<double> mult(n), pu(n), qu(n);
  for (std::size_t x = 0; x < n; ++x) {
    const bool split = log_gain ? x == *x_star : x != *x_star;
    mult[x] = split ? m : 1;
    pu[x] = p[x] / mult[x];
    qu[x] = q[x] / mult[x];
  }
  const double num = max_expected_gain_grouped(pu, mult, g);
  const double den = max_expected_gain_grouped(qu, mult, g);
  if (num == 0.0 && den == 0.0) return 0.0;
  return std::log(num / den);
}

struct DinfForms {
  Nats form_a;  // sup_R D(R||Q) - D(R||P), evaluated at the point mass on x*
  Nats form_b;  // sup_f log E_P f / E_Q f, evaluated at the indicator of x*
  Nats dinf;
};

inline DinfForms variational_dinf_forms(const Pmf& p, const Pmf& q) {
  internal::require_same_alphabet(p, q);
  const auto x_star = internal::dinf_argmax(p, q);
  if (!x_star) return {kInf, kInf, kInf};
  std::vector<double> r(p.size(), 0.0), f(p.size(), 0.0);
  r[*x_star] = 1.0;
  f[*x_star] = 1.0;
  const Pmf rx(p.alphabet(), r);
  double ep = 0.0, eq = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    ep += p[i] * f[i];
    eq += q[i] * f[i];
  }
  return {kl_divergence(rx, q) - kl_divergence(rx, p), std::log(ep / eq),
          renyi_divergence(p, q, Order::infinity())};
}

// Euclidean projection onto {0 <= t <= 1, sum t = k} by bisection on the shift.
inline std::vector<double> project_box_simplex(const std::vector<double>& v, int k) {
  double lo = *std::min_element(v.begin(), v.end()) - 1.0;
  double hi = *std::max_element(v.begin(), v.end());
  auto mass = [&](double shift) {
    double s = 0.0;
    for (double x : v) s += std::clamp(x - shift, 0.0, 1.0);
    return s;
  };
  for (int it = 0; it < 200 && hi - lo > kProjectionShiftTolerance; ++it) {
    const double mid = 0.5 * (lo + hi);
    (mass(mid) > k ? lo : hi) = mid;
  }
  const double shift = 0.5 * (lo + hi);
  std::vector<double> t(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) t[i] = std::clamp(v[i] - shift, 0.0, 1.0);
  return t;
}

struct BruteForceResult {
  double loss;
  std::vector<double> t;
};

namespace internal {

inline double alpha_loss_slope(double t, Order alpha) {
  if (alpha.is_infinity()) return -1.0;
  if (t <= 0.0) return -kInf;
  if (alpha.is_one()) return -1.0 / t;
  return -std::pow(t, -1.0 / alpha.value());
}

// Sweeps over coordinate pairs, moving mass between t_i and t_j to the exact
// minimizer along their fixed sum. Gradient steps stall where the loss slope
// blows up near t = 0; this does not.
inline double pairwise_polish(const Pmf& p, Order alpha, std::vector<double>& t) {
  const std::size_t n = t.size();
  auto objective = [&] {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (p[i] > 0.0) s += p[i] * alpha_loss(t[i], alpha);
    }
    return s;
  };
  double f = objective();
  for (int sweep = 0; sweep < 500; ++sweep) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const double s = t[i] + t[j];
        double lo = std::max(0.0, s - 1.0), hi = std::min(1.0, s);
        auto slope = [&](double x) {
          return p[i] * alpha_loss_slope(x, alpha) - p[j] * alpha_loss_slope(s - x, alpha);
        };
        if (slope(hi) <= 0.0) {
          lo = hi;
        } else if (slope(lo) >= 0.0) {
          hi = lo;
        }
        for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
          const double mid = 0.5 * (lo + hi);
          if (mid == lo || mid == hi) break;
          (slope(mid) < 0.0 ? lo : hi) = mid;
        }
        const double old_i = t[i], old_j = t[j];
        const double before = p[i] * alpha_loss(old_i, alpha) + p[j] * alpha_loss(old_j, alpha);
        t[i] = lo;
        t[j] = s - lo;
        const double after = p[i] * alpha_loss(t[i], alpha) + p[j] * alpha_loss(t[j], alpha);
        if (!(after <= before)) {
          t[i] = old_i;
          t[j] = old_j;
        }
      }
    }
    const double f_next = objective();
    const bool done = f - f_next <= 1e-16;
    f = std::min(f, f_next);
    if (done) break;
  }
  return f;
}

}  // namespace internal

// Projected gradient descent on sum_i p_i l_a(t_i) over the box-simplex,
// finished by exact pairwise exchanges.
inline BruteForceResult brute_force_min_alpha_loss(const Pmf& p, int k, Order alpha,
                                                   std::uint64_t seed = 0xb00f) {
  if (k < 1 || static_cast<std::size_t>(k) >= p.support_size()) {
    throw Error(ErrorKind::kValidation, "brute force needs 1 <= k < |supp(p)|");
  }
  if (p.size() > static_cast<std::size_t>(kMaxExhaustiveAlphabet)) {
    throw Error(ErrorKind::kValidation, "brute force is limited to alphabets of size 8");
  }
  const std::size_t n = p.size();
  auto objective = [&](const std::vector<double>& t) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (p[i] > 0.0) s += p[i] * alpha_loss(t[i], alpha);
    }
    return s;
  };
  auto gradient = [&](const std::vector<double>& t) {
    std::vector<double> g(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      if (!(p[i] > 0.0)) continue;
      const double ti = std::max(t[i], 1e-12);
      if (alpha.is_infinity()) {
        g[i] = -p[i];
      } else if (alpha.is_one()) {
        g[i] = -p[i] / ti;
      } else {
        g[i] = -p[i] * std::pow(ti, -1.0 / alpha.value());
      }
    }
    return g;
  };

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  BruteForceResult best{kInf, {}};
  for (int start = 0; start < kBruteForceStarts; ++start) {
    std::vector<double> raw(n);
    for (auto& x : raw) x = unit(rng);
    auto t = project_box_simplex(raw, k);
    for (auto& x : t) x = 0.5 * x + 0.5 * k / static_cast<double>(n);
    double f = objective(t);
    double step = 1.0;
    for (int it = 0; it < 2000; ++it) {
      const auto g = gradient(t);
      std::vector<double> next;
      double f_next = f;
      bool accepted = false;
      for (int bt = 0; bt < 80; ++bt) {
        std::vector<double> v(n);
        for (std::size_t i = 0; i < n; ++i) v[i] = t[i] - step * g[i];
        next = project_box_simplex(v, k);
        double decrease = 0.0;
        for (std::size_t i = 0; i < n; ++i) decrease += g[i] * (next[i] - t[i]);
        f_next = objective(next);
        if (f_next <= f + 1e-4 * decrease) {
          accepted = true;
          break;
        }
        step *= 0.5;
      }
      if (!accepted) break;
      double moved = 0.0;
      for (std::size_t i = 0; i < n; ++i) moved = std::max(moved, std::abs(next[i] - t[i]));
      const double change = f - f_next;
      t = std::move(next);
      f = f_next;
      step = std::min(step * 2.0, 1e6);
      if (change < 1e-12 && moved < 1e-10) break;
    }
    f = internal::pairwise_polish(p, alpha, t);
    if (f < best.loss) best = {f, t};
  }
  return best;
}

struct LpSolution {
  bool feasible;
  std::vector<StrategyDecomposition::Entry> weights;  // nonzero q_S when feasible
};

// Phase-one simplex (Bland's rule) for sum_{S contains i} q_S = t_i,
// sum_S q_S = 1, q >= 0 over every k-subset S of the alphabet.
inline LpSolution lp_admissible_weights(const std::vector<double>& t, int k) {
  const std::size_t n = t.size();
  if (n > static_cast<std::size_t>(kMaxExhaustiveAlphabet)) {
    throw Error(ErrorKind::kValidation, "exhaustive LP is limited to alphabets of size 8");
  }
  if (k < 1 || static_cast<std::size_t>(k) > n) return {false, {}};

  std::vector<std::vector<std::size_t>> subsets;
  std::vector<bool> pick(n, false);
  std::fill(pick.begin(), pick.begin() + k, true);
  do {
    std::vector<std::size_t> s;
    for (std::size_t i = 0; i < n; ++i) {
      if (pick[i]) s.push_back(i);
    }
    subsets.push_back(std::move(s));
  } while (std::prev_permutation(pick.begin(), pick.end()));

  const std::size_t rows = n + 1, vars = subsets.size(), cols = vars + rows;
  // tableau[r] = coefficients over cols, then the right-hand side.
  std::vector<std::vector<double>> tab(rows, std::vector<double>(cols + 1, 0.0));
  for (std::size_t j = 0; j < vars; ++j) {
    for (auto i : subsets[j]) tab[i][j] = 1.0;
    tab[n][j] = 1.0;
  }
  for (std::size_t i = 0; i < n; ++i) tab[i][cols] = t[i];
  tab[n][cols] = 1.0;
  for (std::size_t r = 0; r < rows; ++r) {
    if (tab[r][cols] < 0.0) {
      for (auto& x : tab[r]) x = -x;
    }
    tab[r][vars + r] = 1.0;
  }
  std::vector<std::size_t> basis(rows);
  for (std::size_t r = 0; r < rows; ++r) basis[r] = vars + r;

  const double eps = 1e-12;
  for (int iter = 0; iter < 10000; ++iter) {
    // Reduced cost of column j for minimizing the artificial sum.
    std::optional<std::size_t> enter;
    for (std::size_t j = 0; j < cols && !enter; ++j) {
      if (std::find(basis.begin(), basis.end(), j) != basis.end()) continue;
      double reduced = j >= vars ? 1.0 : 0.0;
      for (std::size_t r = 0; r < rows; ++r) {
        if (basis[r] >= vars) reduced -= tab[r][j];
      }
      if (reduced < -eps) enter = j;
    }
    if (!enter) break;
    std::optional<std::size_t> leave;
    double best_ratio = kInf;
    for (std::size_t r = 0; r < rows; ++r) {
      if (tab[r][*enter] > eps) {
        const double ratio = tab[r][cols] / tab[r][*enter];
        if (ratio < best_ratio - eps || (leave && std::abs(ratio - best_ratio) <= eps && basis[r] < basis[*leave])) {
          best_ratio = ratio;
          leave = r;
        }
      }
    }
    if (!leave) break;
    const double pivot = tab[*leave][*enter];
    for (auto& x : tab[*leave]) x /= pivot;
    for (std::size_t r = 0; r < rows; ++r) {
      if (r == *leave || tab[r][*enter] == 0.0) continue;
      const double factor = tab[r][*enter];
      for (std::size_t c = 0; c <= cols; ++c) tab[r][c] -= factor * tab[*leave][c];
    }
    basis[*leave] = *enter;
  }

  double infeasibility = 0.0;
  for (std::size_t r = 0; r < rows; ++r) {
    if (basis[r] >= vars) infeasibility += std::max(0.0, tab[r][cols]);
  }
  LpSolution out{infeasibility <= kAdmissibleTolerance + 1e-12, {}};
  if (out.feasible) {
    for (std::size_t r = 0; r < rows; ++r) {
      if (basis[r] < vars && tab[r][cols] > eps) {
        out.weights.push_back({subsets[basis[r]], tab[r][cols]});
      }
    }
  }
  return out;
}

inline bool lp_feasibility_admissible(const std::vector<double>& t, int k) {
  return lp_admissible_weights(t, k).feasible;
}

// Maximal g-leakage objective under a shattered auxiliary whose block sizes
// grow like m P_X(x) / max P_X, so that every cell of U carries about the
// same prior mass. Only the block-uniform strategies matter for concave g.
inline Nats maxgleakage_lower_demo(const Pmf& px, const Channel& ch, const GainFamily& g, int m) {
  internal::require_compatible(px, ch);
  if (m < 1 || m > kMaxSplit) {
    throw Error(ErrorKind::kValidation, "split size must lie in [1, " + std::to_string(kMaxSplit) + "]");
  }
  if (g.kind() != GainFamily::Kind::kIdentity &&
      !validate_hypotheses(g, HypothesisSet::kConcave).passed) {
    throw Error(ErrorKind::kValidation,
                "gain must be concave with g(0) = 0 and 0 < g'(0) < inf");
  }
  const std::size_t n = px.size();
  const double top = px.max();
  std::vector<double> mult(n, 1.0), prior(n);
  for (std::size_t x = 0; x < n; ++x) {
    if (px[x] > 0.0) mult[x] = std::max(1.0, std::round(m * px[x] / top));
    prior[x] = px[x] / mult[x];
  }
  const JointDist joint = joint_from(px, ch);
  const auto py = joint.py_raw();
  double num = 0.0;
  for (std::size_t y = 0; y < ch.outputs(); ++y) {
    if (!(py[y] > 0.0)) continue;
    std::vector<double> cell(n);
    for (std::size_t x = 0; x < n; ++x) cell[x] = joint(x, y) / py[y] / mult[x];
    num += py[y] * max_expected_gain_grouped(cell, mult, g);
  }
  const double den = max_expected_gain_grouped(prior, mult, g);
  return std::max(0.0, std::log(num / den));
}

}  // namespace leakscope
