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
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "leakscope/error.hpp"
#include "leakscope/gain.hpp"
#include "leakscope/measures.hpp"
#include "leakscope/multiguess.hpp"
#include "leakscope/oracles.hpp"
#include "leakscope/prob.hpp"

namespace leakscope {

inline constexpr std::array<double, 3> kSuiteOrders = {0.5, 2.0, 5.0};
inline constexpr std::array<int, 5> kSplitSchedule = {1, 10, 100, 1000, 10000};

inline constexpr double kKktTolerance = 1e-6;
inline constexpr double kStationarityTolerance = 1e-9;
inline constexpr int kMinThresholdCount = 5;
inline constexpr double kConvergenceTolerance = 1e-2;
inline constexpr double kSandwichTolerance = 1e-12;
inline constexpr double kFormsTolerance = 1e-12;
inline constexpr double kBregmanTolerance = 1e-9;
inline constexpr double kBregmanLimitTolerance = 1e-5;
inline constexpr double kBregmanLimitOffset = 1e-7;
inline constexpr double kDecompositionTolerance = 1e-9;

struct PropertyResult {
  std::string name;
  bool passed = true;
  int checked = 0;
  int failures = 0;
  double worst = 0.0;  // largest observed error, or the failure count for exact checks
  std::optional<double> tolerance;
  std::string detail;
};

struct SuiteReport {
  std::string suite;
  std::uint64_t seed = 0;
  bool passed = true;
  std::vector<PropertyResult> properties;
};

namespace internal {

class Tally {
 public:
  Tally(std::string name, std::optional<double> tol) {
    r_.name = std::move(name);
    r_.tolerance = tol;
  }
  void error(double e) {
    ++r_.checked;
    if (std::isnan(e)) e = kInf;
    r_.worst = std::max(r_.worst, e);
    if (e > *r_.tolerance) ++r_.failures;
  }
  void check(bool ok) {
    ++r_.checked;
    if (!ok) ++r_.failures;
  }
  void detail(std::string d) { r_.detail = std::move(d); }
  PropertyResult done() {
    r_.passed = r_.checked > 0 && r_.failures == 0;
    if (!r_.tolerance) r_.worst = r_.failures;
    return r_;
  }

 private:
  PropertyResult r_;
};

inline SuiteReport finish(std::string name, std::uint64_t seed, std::vector<PropertyResult> props) {
  SuiteReport s{std::move(name), seed, true, std::move(props)};
  for (const auto& p : s.properties) s.passed = s.passed && p.passed;
  return s;
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline int uniform_int(std::mt19937_64& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

inline double tol_or(const std::optional<double>& override_tol, double fallback) {
  return override_tol ? *override_tol : fallback;
}

}  // namespace internal

struct KktInstance {
  Pmf p;
  int k;
  Order alpha;
  int target_s_star;
};

// Cycles through every (k, s*) pair with k < 6 and every order in
// kSuiteOrders. For s* > 1 the first s*-1 symbols get most of the mass and the
// draw is repeated until the threshold lands on the target.
inline std::vector<KktInstance> kkt_instances(std::uint64_t seed, int count) {
  std::mt19937_64 rng(seed);
  std::vector<std::pair<int, int>> cells;
  for (int k = 1; k <= 5; ++k) {
    for (int s = 1; s <= k; ++s) cells.emplace_back(k, s);
  }
  std::vector<KktInstance> out;
  for (int i = 0; i < count; ++i) {
    const auto [k, s] = cells[i % cells.size()];
    const Order alpha = Order::finite(kSuiteOrders[(i / cells.size()) % kSuiteOrders.size()]);
    const int n = internal::uniform_int(rng, k + 1, 6);
    std::optional<Pmf> chosen;
    for (int attempt = 0; attempt < 5000 && !chosen; ++attempt) {
      std::vector<double> v;
      if (s == 1) {
        const double conc = std::array{0.3, 1.0, 3.0}[attempt % 3];
        v = random_pmf(rng, n, conc).probs();
      } else {
        const double tail = internal::uniform(rng, 0.01, 0.9);
        const auto head = random_pmf(rng, s - 1, 5.0).probs();
        const auto rest = random_pmf(rng, n - s + 1, 3.0).probs();
        for (double h : head) v.push_back((1.0 - tail) * h);
        for (double r : rest) v.push_back(tail * r);
        std::shuffle(v.begin(), v.end(), rng);
      }
      Pmf p(v);
      if (s_star(p, k, alpha).s_star == s || attempt == 4999) chosen = p;
    }
    out.push_back({*chosen, k, alpha, s});
  }
  return out;
}

inline SuiteReport verify_kkt(std::uint64_t seed, std::optional<double> tol = std::nullopt,
                              int count = 200) {
  internal::Tally agree("closed_form_matches_brute_force",
                        internal::tol_or(tol, kKktTolerance));
  internal::Tally stationary("stationarity_and_complementary_slackness",
                             internal::tol_or(tol, kStationarityTolerance));
  internal::Tally admissible("optimal_vector_admissible", std::nullopt);
  internal::Tally coverage("every_threshold_case_covered", std::nullopt);
  std::map<std::pair<int, int>, int> counts;

  for (const auto& inst : kkt_instances(seed, count)) {
    const auto s = s_star(inst.p, inst.k, inst.alpha);
    ++counts[{inst.k, s.s_star}];
    const double closed = min_expected_alpha_loss(inst.p, inst.k, inst.alpha);
    const auto brute = brute_force_min_alpha_loss(inst.p, inst.k, inst.alpha, seed ^ counts.size());
    agree.error(std::abs(closed - brute.loss));

    // t_i = min(1, (p_i / lambda)^a) with lambda fixed by the unsaturated tail.
    const auto g = optimal_guess_vector(inst.p, inst.k, inst.alpha);
    admissible.check(is_admissible(g.t, inst.k));
    const double a = inst.alpha.value();
    double tail = 0.0;
    for (std::size_t i = s.s_star - 1; i < s.sorted_probs.size(); ++i) {
      tail += std::pow(s.sorted_probs[i], a);
    }
    const double lambda_a = tail / (inst.k - s.s_star + 1);
    double err = 0.0;
    for (std::size_t i = 0; i < inst.p.size(); ++i) {
      const double want = std::min(1.0, std::pow(inst.p[i], a) / lambda_a);
      err = std::max(err, std::abs(g.t[i] - want));
    }
    stationary.error(err);
  }
  std::string d;
  for (int k = 1; k <= 5; ++k) {
    for (int s = 1; s <= k; ++s) {
      const int c = counts[{k, s}];
      coverage.check(c >= kMinThresholdCount);
      d += "k=" + std::to_string(k) + ",s*=" + std::to_string(s) + ":" + std::to_string(c) + " ";
    }
  }
  if (!d.empty()) d.pop_back();
  coverage.detail(d);
  return internal::finish("kkt", seed,
                          {agree.done(), stationary.done(), admissible.done(), coverage.done()});
}

struct AdmissibilityCase {
  std::vector<double> t;
  int k;
  std::string family;
};

inline std::vector<AdmissibilityCase> admissibility_cases(std::uint64_t seed, int count) {
  std::mt19937_64 rng(seed);
  std::vector<AdmissibilityCase> out;
  for (int i = 0; i < count; ++i) {
    const int family = i % 5;
    int k = (i / 5) % 2 == 0 ? 2 : 3;
    if (family == 3) k = 2;
    const int n = internal::uniform_int(rng, k + 1, 6);
    auto projected = [&] {
      std::vector<double> v(n);
      for (auto& x : v) x = internal::uniform(rng, -0.5, 1.5);
      return project_box_simplex(v, k);
    };
    std::vector<double> t;
    std::string name;
    switch (family) {
      case 0:
        t = projected();
        name = "projected";
        break;
      case 1: {
        t = projected();
        const int a = internal::uniform_int(rng, 0, n - 1);
        const int b = (a + internal::uniform_int(rng, 1, n - 1)) % n;
        const double delta = internal::uniform(rng, 0.0, 0.6);
        t[a] += delta;
        t[b] -= delta;
        name = "transfer";
        break;
      }
      case 2: {
        t = projected();
        const double eps = std::pow(10.0, internal::uniform(rng, -6.0, -1.0));
        const double scale = internal::uniform_int(rng, 0, 1) ? 1.0 + eps : 1.0 - eps;
        for (auto& x : t) x *= scale;
        name = "rescaled";
        break;
      }
      case 3: {
        // t = 2p, with p_max straddling 1/2 and sometimes sitting on it.
        const double p_max =
            (i / 5) % 4 == 0 ? 0.5 : 0.5 + internal::uniform(rng, -0.05, 0.05);
        const auto rest = random_pmf(rng, n - 1, 1.0).probs();
        t.push_back(2.0 * p_max);
        for (double r : rest) t.push_back(2.0 * (1.0 - p_max) * r);
        name = "twice_pmf";
        break;
      }
      default: {
        const int ones = k + internal::uniform_int(rng, -1, 1);
        t.assign(n, 0.0);
        for (int j = 0; j < std::min(ones, n); ++j) t[j] = 1.0;
        std::shuffle(t.begin(), t.end(), rng);
        name = "vertex";
        break;
      }
    }
    out.push_back({std::move(t), k, std::move(name)});
  }
  return out;
}

inline SuiteReport verify_admissibility(std::uint64_t seed, std::optional<double> tol = std::nullopt,
                                        int count = 1000) {
  internal::Tally agree("closed_test_matches_lp", std::nullopt);
  internal::Tally decomposed("decomposition_reproduces_vector",
                             internal::tol_or(tol, kDecompositionTolerance));
  internal::Tally boundary("boundary_family_crosses_half", std::nullopt);
  int admissible_count = 0, twice_in = 0, twice_out = 0, with_boundary = 0;
  for (const auto& c : admissibility_cases(seed, count)) {
    const bool closed = is_admissible(c.t, c.k);
    const bool lp = lp_feasibility_admissible(c.t, c.k);
    agree.check(closed == lp);
    if (c.family == "twice_pmf") (closed ? twice_in : twice_out)++;
    for (double x : c.t) {
      if (x == 0.0 || x == 1.0) {
        ++with_boundary;
        break;
      }
    }
    if (!closed) continue;
    ++admissible_count;
    const auto d = decompose_strategy({Alphabet::indexed(c.t.size(), "x"), c.t, c.k});
    std::vector<double> cover(c.t.size(), 0.0);
    double total = 0.0;
    for (const auto& e : d.entries) {
      total += e.weight;
      for (auto i : e.subset) cover[i] += e.weight;
    }
    double err = std::abs(total - 1.0);
    for (std::size_t i = 0; i < cover.size(); ++i) {
      err = std::max(err, std::abs(cover[i] - std::clamp(c.t[i], 0.0, 1.0)));
    }
    decomposed.error(err);
  }
  boundary.check(twice_in > 0 && twice_out > 0);
  boundary.detail("admissible=" + std::to_string(twice_in) +
                  " inadmissible=" + std::to_string(twice_out));
  agree.detail("admissible=" + std::to_string(admissible_count) +
               " with_exact_0_or_1=" + std::to_string(with_boundary));
  return internal::finish("admissibility", seed, {agree.done(), decomposed.done(), boundary.done()});
}

struct BregmanTriple {
  Pmf p;
  Pmf q;
  double alpha;
};

inline std::vector<BregmanTriple> bregman_triples(std::uint64_t seed, int count) {
  std::mt19937_64 rng(seed);
  std::vector<BregmanTriple> out;
  for (int i = 0; i < count; ++i) {
    const int n = internal::uniform_int(rng, 2, 6);
    const double conc = std::array{0.5, 1.0, 2.0}[i % 3];
    Pmf p = random_pmf(rng, n, conc);
    Pmf q = random_pmf(rng, n, conc);
    double a = 1.0;
    while (std::abs(a - 1.0) < 0.05) a = internal::uniform(rng, 0.2, 5.0);
    out.push_back({std::move(p), std::move(q), a});
  }
  return out;
}

inline SuiteReport verify_bregman(std::uint64_t seed, std::optional<double> tol = std::nullopt,
                                  int count = 100) {
  const double t = internal::tol_or(tol, kBregmanTolerance);
  internal::Tally dual("first_order_matches_closed_form", t);
  internal::Tally nonneg("nonnegative", std::nullopt);
  internal::Tally zero("zero_exactly_when_equal", std::nullopt);
  internal::Tally limit("order_one_limit_is_kl", internal::tol_or(tol, kBregmanLimitTolerance));
  internal::Tally regret("regret_is_scaled_divergence", t);
  std::mt19937_64 rng(seed ^ 0x5eed);
  for (const auto& c : bregman_triples(seed, count)) {
    const double closed = bregman_F(c.p, c.q, c.alpha);
    const double first = bregman_F_first_order(c.p, c.q, c.alpha);
    dual.error(std::abs(closed - first));
    nonneg.check(closed >= 0.0 && first >= -kBregmanTolerance);
    zero.check(bregman_F(c.p, c.p, c.alpha) <= kBregmanTolerance &&
               std::abs(bregman_F_first_order(c.p, c.p, c.alpha)) <= kBregmanTolerance &&
               closed > kBregmanTolerance);
    const double kl = kl_divergence(c.p, c.q);
    for (double a : {1.0 - kBregmanLimitOffset, 1.0 + kBregmanLimitOffset}) {
      limit.error(std::abs(bregman_F(c.p, c.q, a) - kl));
    }
    const int n = static_cast<int>(c.p.size());
    if (n >= 2) {
      const int k = internal::uniform_int(rng, 1, n - 1);
      std::vector<double> v(n);
      for (auto& x : v) x = internal::uniform(rng, 0.05, 1.0);
      double s = 0.0;
      for (double x : v) s += x;
      for (auto& x : v) x *= k / s;
      if (*std::max_element(v.begin(), v.end()) <= 1.0) {
        const auto b = expected_alpha_loss(c.p, {c.p.alphabet(), v, k}, Order::finite(c.alpha));
        regret.error(std::abs(*b.regret - *b.bregman_regret));
      }
    }
  }
  limit.detail("orders 1 +/- 1e-7");
  return internal::finish("bregman", seed,
                          {dual.done(), nonneg.done(), zero.done(), limit.done(), regret.done()});
}

// Joint distributions close enough to uniform that every tilted prior and
// posterior stays within 1/k.
inline std::vector<std::pair<JointDist, Order>> robust_joints(std::uint64_t seed, int count, int k) {
  std::mt19937_64 rng(seed);
  std::vector<std::pair<JointDist, Order>> out;
  for (int i = 0; i < count; ++i) {
    const Order alpha = Order::finite(kSuiteOrders[i % kSuiteOrders.size()]);
    const int nx = internal::uniform_int(rng, 2 * k, 6);
    const int ny = internal::uniform_int(rng, 2, 4);
    double eps = 0.6;
    for (int attempt = 0;; ++attempt) {
      const auto r = random_pmf(rng, static_cast<std::size_t>(nx * ny), 1.0).probs();
      std::vector<std::vector<double>> mass(nx, std::vector<double>(ny));
      for (int x = 0; x < nx; ++x) {
        for (int y = 0; y < ny; ++y) {
          mass[x][y] = (1.0 - eps) / (nx * ny) + eps * r[x * ny + y];
        }
      }
      JointDist joint(mass);
      if (check_robustness(joint, k, alpha).hypotheses_hold || attempt > 200) {
        out.emplace_back(std::move(joint), alpha);
        break;
      }
      eps *= 0.9;
    }
  }
  return out;
}

inline SuiteReport verify_robustness(std::uint64_t seed, std::optional<double> tol = std::nullopt,
                                     int count = 50) {
  const double t = internal::tol_or(tol, kRobustnessTolerance);
  internal::Tally hyp("hypotheses_hold", std::nullopt);
  internal::Tally equal("k_guess_equals_single_guess", t);
  internal::Tally preserved("split_preserves_arimoto", t);
  internal::Tally dominates("split_bound_dominates_single_guess", std::nullopt);
  internal::Tally tilted("split_tilted_within_one_over_m", std::nullopt);
  for (const auto& [joint, alpha] : robust_joints(seed, count, 2)) {
    const auto r = check_robustness(joint, 2, alpha);
    hyp.check(r.hypotheses_hold);
    equal.error(std::abs(r.leakage_k - r.leakage_1));
  }
  std::mt19937_64 rng(seed ^ 0x5b117);
  for (int i = 0; i < count / 2; ++i) {
    const Order alpha = Order::finite(kSuiteOrders[i % kSuiteOrders.size()]);
    const int nx = internal::uniform_int(rng, 2, 4);
    const int ny = internal::uniform_int(rng, 2, 4);
    const auto r = random_pmf(rng, static_cast<std::size_t>(nx * ny), 0.7).probs();
    std::vector<std::vector<double>> mass(nx, std::vector<double>(ny));
    for (int x = 0; x < nx; ++x) {
      for (int y = 0; y < ny; ++y) mass[x][y] = r[x * ny + y];
    }
    const JointDist joint(mass);
    const int k = 2 + i % 2;
    const int m = std::array{k, k + 1, 2 * k}[i % 3];
    try {
      const auto b = maximal_alpha_leakage_k_lower_bound(joint, k, alpha, m);
      preserved.error(std::abs(b.split_arimoto - b.rhs));
      dominates.check(b.lhs_lb >= b.rhs - kRobustnessTolerance);
      tilted.check(b.tilted_within);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::kInvariant) throw;
      dominates.check(false);
    }
  }
  return internal::finish("robustness", seed,
                          {hyp.done(), equal.done(), preserved.done(), dominates.done(),
                           tilted.done()});
}

inline std::vector<std::pair<Pmf, Pmf>> random_pairs(std::uint64_t seed, int count) {
  std::mt19937_64 rng(seed);
  std::vector<std::pair<Pmf, Pmf>> out;
  for (int i = 0; i < count; ++i) {
    const int n = internal::uniform_int(rng, 2, 6);
    out.emplace_back(random_pmf(rng, n, 1.0), random_pmf(rng, n, 1.0));
  }
  return out;
}

inline SuiteReport verify_variational(std::uint64_t seed, std::optional<double> tol = std::nullopt,
                                      int pair_count = 20, int forms_count = 100) {
  std::vector<PropertyResult> props;
  const auto pairs = random_pairs(seed, pair_count);
  for (const auto& g : {GainFamily::identity(), GainFamily::alpha(2.0), GainFamily::log()}) {
    const std::string tag = g.to_string();
    internal::Tally mono("monotone_in_m[" + tag + "]", std::nullopt);
    internal::Tally close("within_tolerance_at_max_m[" + tag + "]",
                          internal::tol_or(tol, kConvergenceTolerance));
    internal::Tally below("never_exceeds_dinf[" + tag + "]", std::nullopt);
    for (const auto& [p, q] : pairs) {
      const double dinf = renyi_divergence(p, q, Order::infinity());
      double prev = -kInf, last = 0.0;
      bool monotone = true, capped = true;
      for (int m : kSplitSchedule) {
        last = variational_dinf_lower(p, q, g, m);
        monotone = monotone && last >= prev - kSandwichTolerance;
        capped = capped && last <= dinf + kSandwichTolerance;
        prev = last;
      }
      mono.check(monotone);
      below.check(capped);
      close.error(dinf - last);
    }
    props.push_back(mono.done());
    props.push_back(close.done());
    props.push_back(below.done());
  }
  internal::Tally forms("dinf_forms_agree", internal::tol_or(tol, kFormsTolerance));
  for (const auto& [p, q] : random_pairs(seed ^ 0xf0f0, forms_count)) {
    const auto f = variational_dinf_forms(p, q);
    forms.error(std::max({std::abs(f.form_a - f.dinf), std::abs(f.form_b - f.dinf),
                          std::abs(f.form_a - f.form_b)}));
  }
  props.push_back(forms.done());
  return internal::finish("variational", seed, std::move(props));
}

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {"variational", "kkt", "admissibility", "bregman",
                                                 "robustness"};
  return names;
}

inline SuiteReport run_suite(const std::string& name, std::uint64_t seed,
                             std::optional<double> tol = std::nullopt) {
  if (name == "variational") return verify_variational(seed, tol);
  if (name == "kkt") return verify_kkt(seed, tol);
  if (name == "admissibility") return verify_admissibility(seed, tol);
  if (name == "bregman") return verify_bregman(seed, tol);
  if (name == "robustness") return verify_robustness(seed, tol);
  throw Error(ErrorKind::kValidation, "unknown suite '" + name + "'");
}

}  // namespace leakscope
