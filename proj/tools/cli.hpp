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

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "leakscope/error.hpp"
#include "leakscope/exact.hpp"
#include "leakscope/gain.hpp"
#include "leakscope/io.hpp"
#include "leakscope/leakage.hpp"
#include "leakscope/measures.hpp"
#include "leakscope/multiguess.hpp"
#include "leakscope/oracles.hpp"
#include "leakscope/prob.hpp"
#include "leakscope/verify.hpp"

namespace leakscope::cli {

using nlohmann::json;

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitInternal = 3;
inline constexpr std::uint64_t kDefaultSeed = 0;

struct RunConfig {
  std::string command;
  std::optional<std::string> input;
  std::string format = "json";
  std::optional<std::string> alpha;
  std::optional<std::string> gain;
  std::optional<int> k;
  std::optional<std::string> y;
  std::optional<std::string> t;
  std::optional<std::string> suite;
  bool decompose = false;
  std::string out = "json";
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
};

enum class Need { kNo, kOptional, kYes };

struct CommandSpec {
  Need input = Need::kYes;
  Need alpha = Need::kNo;
  Need gain = Need::kNo;
  Need k = Need::kNo;
  Need y = Need::kNo;
  Need t = Need::kNo;
  Need suite = Need::kNo;
  bool decompose = false;
  bool seed = false;
  bool tol = false;
};

inline const std::map<std::string, CommandSpec>& commands() {
  static const std::map<std::string, CommandSpec> table = [] {
    std::map<std::string, CommandSpec> m;
    auto with_alpha = [] {
      CommandSpec s;
      s.alpha = Need::kYes;
      return s;
    };
    auto with_gain = [] {
      CommandSpec s;
      s.gain = Need::kYes;
      return s;
    };
    auto with_k_alpha = [] {
      CommandSpec s;
      s.k = Need::kYes;
      s.alpha = Need::kYes;
      return s;
    };
    m["entropy"] = CommandSpec{};
    m["renyi-entropy"] = with_alpha();
    m["kl"] = CommandSpec{};
    m["renyi-div"] = with_alpha();
    m["shannon-mi"] = CommandSpec{};
    m["sibson"] = with_alpha();
    m["arimoto"] = with_alpha();
    m["arimoto-cond"] = with_alpha();
    m["bregman"] = with_alpha();
    m["maxl"] = CommandSpec{};
    m["max-alpha-l"] = with_alpha();
    m["max-alpha-l"].seed = true;
    m["max-g-l"] = with_gain();
    m["pml"] = CommandSpec{};
    m["pml"].y = Need::kYes;
    m["opp"] = with_gain();
    m["realizable"] = with_gain();
    m["minloss"] = with_k_alpha();
    m["strategy"] = with_k_alpha();
    m["strategy"].decompose = true;
    CommandSpec adm;
    adm.input = Need::kNo;
    adm.k = Need::kYes;
    adm.t = Need::kYes;
    adm.tol = true;
    m["admissible"] = adm;
    m["leakage-k"] = with_k_alpha();
    m["robustness"] = with_k_alpha();
    CommandSpec ver;
    ver.input = Need::kNo;
    ver.suite = Need::kYes;
    ver.seed = true;
    ver.tol = true;
    m["verify"] = ver;
    CommandSpec rep;
    rep.input = Need::kNo;
    m["reproduce-examples"] = rep;
    return m;
  }();
  return table;
}

namespace internal {

inline void require_flag(const char* flag, Need need, bool present, const std::string& command) {
  if (need == Need::kYes && !present) {
    throw Error(ErrorKind::kValidation, command + " requires " + flag);
  }
  if (need == Need::kNo && present) {
    throw Error(ErrorKind::kValidation, command + " does not take " + flag);
  }
}

inline const CommandSpec& validate(const RunConfig& c) {
  const auto it = commands().find(c.command);
  if (it == commands().end()) throw Error(ErrorKind::kValidation, "unknown command '" + c.command + "'");
  const CommandSpec& s = it->second;
  require_flag("--input", s.input, c.input.has_value(), c.command);
  require_flag("--alpha", s.alpha, c.alpha.has_value(), c.command);
  require_flag("--gain", s.gain, c.gain.has_value(), c.command);
  require_flag("--k", s.k, c.k.has_value(), c.command);
  require_flag("--y", s.y, c.y.has_value(), c.command);
  require_flag("--t", s.t, c.t.has_value(), c.command);
  require_flag("--suite", s.suite, c.suite.has_value(), c.command);
  require_flag("--decompose", s.decompose ? Need::kOptional : Need::kNo, c.decompose, c.command);
  require_flag("--seed", s.seed ? Need::kOptional : Need::kNo, c.seed.has_value(), c.command);
  require_flag("--tol", s.tol ? Need::kOptional : Need::kNo, c.tol.has_value(), c.command);
  if (c.format != "json" && c.format != "csv") {
    throw Error(ErrorKind::kValidation, "--format must be json or csv");
  }
  if (c.out != "json" && c.out != "table") {
    throw Error(ErrorKind::kValidation, "--out must be json or table");
  }
  if (c.tol && !(*c.tol > 0.0)) throw Error(ErrorKind::kValidation, "--tol must be positive");
  return s;
}

inline Order parse_order(const std::string& text) {
  if (text == "inf" || text == "+inf" || text == "infinity") return Order::infinity();
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw Error(ErrorKind::kParse, "bad --alpha '" + text + "'");
  }
  if (used != text.size()) throw Error(ErrorKind::kParse, "bad --alpha '" + text + "'");
  return Order::of(v);
}

inline double finite_order(const Order& o) {
  if (!o.is_finite()) {
    throw Error(ErrorKind::kUnsupportedOrder, "this command needs a finite order other than 1");
  }
  return o.value();
}

inline std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  for (const auto& cell : leakscope::internal::split_csv_line(text)) {
    out.push_back(leakscope::internal::parse_cell(cell));
  }
  if (out.empty()) throw Error(ErrorKind::kParse, "--t is empty");
  return out;
}

// Values go into the result as JSON numbers, with a display string alongside.
class Report {
 public:
  explicit Report(std::string command) { root_["command"] = std::move(command); }

  void number(const std::string& key, double x) {
    result_[key] = json_number(x);
    display_[key] = display_number(x);
  }
  void vector(const std::string& key, const std::vector<double>& v) {
    json values = json::array(), shown = json::array();
    for (double x : v) {
      values.push_back(json_number(x));
      shown.push_back(display_number(x));
    }
    result_[key] = values;
    display_[key] = shown;
  }
  json& raw(const std::string& key) { return result_[key]; }

  json finish() {
    root_["result"] = result_;
    if (!display_.empty()) root_["display"] = display_;
    return root_;
  }

 private:
  json root_ = json::object();
  json result_ = json::object();
  json display_ = json::object();
};

inline json per_y_json(const std::vector<PerY>& per_y) {
  json arr = json::array();
  for (const auto& e : per_y) {
    arr.push_back({{"y", e.symbol}, {"value", json_number(e.value)}});
  }
  return arr;
}

inline void leakage_into(Report& r, const LeakageReport& l) {
  r.raw("measure") = l.measure;
  r.raw("parameter") = l.parameter;
  r.number("value", l.value);
  r.raw("upper_bound_only") = l.upper_bound_only;
  r.raw("per_y") = per_y_json(l.per_y);
  r.raw("notes") = l.notes;
}

inline json property_json(const PropertyResult& p) {
  json j = {{"name", p.name},         {"passed", p.passed}, {"checked", p.checked},
            {"failures", p.failures}, {"worst", p.worst}};
  j["tolerance"] = p.tolerance ? json(*p.tolerance) : json(nullptr);
  if (!p.detail.empty()) j["detail"] = p.detail;
  return j;
}

inline const Pmf& single_pmf(const Instance& inst) {
  if (inst.p) return *inst.p;
  if (inst.px) return *inst.px;
  throw Error(ErrorKind::kValidation, "input needs p or px");
}

inline const JointDist& joint_of(const Instance& inst) {
  if (!inst.joint) throw Error(ErrorKind::kValidation, "input needs joint or px with channel");
  return *inst.joint;
}

inline std::pair<const Pmf&, const Pmf&> pair_of(const Instance& inst) {
  if (!inst.p || !inst.q) throw Error(ErrorKind::kValidation, "input needs p and q");
  return {*inst.p, *inst.q};
}

inline void write_table_value(std::ostream& out, const std::string& indent, const std::string& key,
                              const json& value, const json* display) {
  auto shown = [&](const json& v, const json* d) -> std::string {
    if (d && d->is_string()) return d->get<std::string>();
    if (v.is_number()) return display_number(v.get<double>());
    if (v.is_string()) return v.get<std::string>();
    return v.dump();
  };
  if (value.is_array() && !value.empty() && value[0].is_object()) {
    out << indent << key << ":\n";
    for (const auto& item : value) {
      out << indent << "  -";
      for (const auto& [k, v] : item.items()) out << " " << k << "=" << shown(v, nullptr);
      out << "\n";
    }
    return;
  }
  if (value.is_array()) {
    out << indent << key << ":";
    for (std::size_t i = 0; i < value.size(); ++i) {
      const json* d = display && display->is_array() ? &(*display)[i] : nullptr;
      out << " " << shown(value[i], d);
    }
    out << "\n";
    return;
  }
  if (value.is_object()) {
    out << indent << key << ":\n";
    for (const auto& [k, v] : value.items()) write_table_value(out, indent + "  ", k, v, nullptr);
    return;
  }
  out << indent << key << ": " << shown(value, display) << "\n";
}

inline void write_table(std::ostream& out, const json& report) {
  out << "command: " << report["command"].get<std::string>() << "\n";
  const json& result = report["result"];
  const json* display = report.contains("display") ? &report["display"] : nullptr;
  for (const auto& [key, value] : result.items()) {
    const json* d = display && display->contains(key) ? &(*display)[key] : nullptr;
    write_table_value(out, "", key, value, d);
  }
}

inline json dispatch(const RunConfig& c, std::uint64_t seed) {
  Report r(c.command);
  std::optional<Instance> inst;
  if (c.input) inst = load_instance(*c.input, c.format);
  std::optional<Order> alpha;
  if (c.alpha) alpha = parse_order(*c.alpha);
  std::optional<GainFamily> gain;
  if (c.gain) gain = GainFamily::parse(*c.gain);
  const std::string& cmd = c.command;

  if (cmd == "entropy") {
    r.number("value", shannon_entropy(single_pmf(*inst)));
  } else if (cmd == "renyi-entropy") {
    r.number("value", renyi_entropy(single_pmf(*inst), *alpha));
  } else if (cmd == "kl") {
    const auto [p, q] = pair_of(*inst);
    r.number("value", kl_divergence(p, q));
  } else if (cmd == "renyi-div") {
    const auto [p, q] = pair_of(*inst);
    r.number("value", renyi_divergence(p, q, *alpha));
  } else if (cmd == "shannon-mi") {
    r.number("value", shannon_mi(joint_of(*inst)));
  } else if (cmd == "sibson") {
    r.number("value", sibson_mi(joint_of(*inst), *alpha));
  } else if (cmd == "arimoto") {
    r.number("value", arimoto_mi(joint_of(*inst), *alpha));
  } else if (cmd == "arimoto-cond") {
    r.number("value", arimoto_cond_entropy(joint_of(*inst), *alpha));
  } else if (cmd == "bregman") {
    const auto [p, q] = pair_of(*inst);
    const double a = finite_order(*alpha);
    r.number("value", bregman_F(p, q, a));
    r.number("first_order_value", bregman_F_first_order(p, q, a));
  } else if (cmd == "maxl") {
    const auto& j = joint_of(*inst);
    LeakageReport l{"maximal_leakage", "inf", maximal_leakage(j.px(), j.channel()), false,
                    leakscope::internal::per_y_pointwise(j), {}};
    leakage_into(r, l);
  } else if (cmd == "max-alpha-l") {
    const auto& j = joint_of(*inst);
    LeakageReport l{"maximal_alpha_leakage", alpha->to_string(),
                    maximal_alpha_leakage(j.px(), j.channel(), *alpha, seed), false, {}, {}};
    leakage_into(r, l);
  } else if (cmd == "max-g-l") {
    const auto& j = joint_of(*inst);
    auto l = maximal_g_leakage(j.px(), j.channel(), *gain);
    l.per_y = leakscope::internal::per_y_pointwise(j);
    leakage_into(r, l);
  } else if (cmd == "pml") {
    const auto& j = joint_of(*inst);
    leakage_into(r, pointwise_report(j, j.y_alphabet().index_of(*c.y), GainFamily::identity()));
  } else if (cmd == "opp") {
    leakage_into(r, opportunistic_report(joint_of(*inst), *gain));
  } else if (cmd == "realizable") {
    leakage_into(r, realizable_report(joint_of(*inst), *gain));
  } else if (cmd == "minloss" || cmd == "strategy") {
    const Pmf& p = single_pmf(*inst);
    const auto s = s_star(p, *c.k, *alpha);
    const auto g = optimal_guess_vector(p, *c.k, *alpha);
    r.number("loss", min_expected_alpha_loss(p, *c.k, *alpha));
    r.raw("s_star") = s.s_star;
    r.raw("case") = s.case_label;
    r.raw("alphabet") = p.alphabet().symbols();
    r.vector("t", g.t);
    if (c.decompose) {
      json entries = json::array();
      for (const auto& e : decompose_strategy(g).entries) {
        json subset = json::array();
        for (auto i : e.subset) subset.push_back(p.alphabet()[i]);
        entries.push_back({{"subset", subset}, {"weight", e.weight}});
      }
      r.raw("decomposition") = entries;
    }
  } else if (cmd == "admissible") {
    const auto t = parse_list(*c.t);
    double total = 0.0;
    for (double x : t) total += x;
    bool ok = is_admissible(t, *c.k);
    if (c.tol) {
      ok = std::abs(total - *c.k) <= *c.tol;
      for (double x : t) ok = ok && x >= -*c.tol && x <= 1.0 + *c.tol;
    }
    r.raw("admissible") = ok;
    r.number("sum", total);
  } else if (cmd == "leakage-k") {
    r.number("value", alpha_leakage_k(joint_of(*inst), *c.k, *alpha));
  } else if (cmd == "robustness") {
    const auto b = check_robustness(joint_of(*inst), *c.k, *alpha);
    r.raw("hypotheses_hold") = b.hypotheses_hold;
    r.number("max_tilted", b.max_tilted);
    r.number("leakage_k", b.leakage_k);
    r.number("leakage_1", b.leakage_1);
    r.raw("equality_holds") = b.equality_holds ? json(*b.equality_holds) : json(nullptr);
  } else if (cmd == "verify") {
    const auto s = run_suite(*c.suite, seed, c.tol);
    r.raw("suite") = s.suite;
    r.raw("seed") = s.seed;
    r.raw("passed") = s.passed;
    json props = json::array();
    for (const auto& p : s.properties) props.push_back(property_json(p));
    r.raw("properties") = props;
  } else if (cmd == "reproduce-examples") {
    json cases = json::array();
    bool all = true;
    for (const auto& o : reproduce_examples()) {
      json t = json::array(), exact = json::array(), expected = json::array();
      for (double x : o.t) t.push_back(x);
      for (const auto& q : o.t_exact) exact.push_back(fraction_string(q));
      for (const auto& q : o.spec.expected) expected.push_back(fraction_string(q));
      all = all && o.exact_match && o.fractions_recovered;
      cases.push_back({{"case", o.spec.name},
                       {"k", o.spec.k},
                       {"alpha", o.spec.alpha},
                       {"s_star", o.s_star},
                       {"t", t},
                       {"t_exact", exact},
                       {"expected", expected},
                       {"max_abs_error", o.max_abs_error},
                       {"exact_match", o.exact_match},
                       {"fractions_recovered", o.fractions_recovered}});
    }
    r.raw("cases") = cases;
    r.raw("all_match") = all;
  }
  return r.finish();
}

}  // namespace internal

// Flag value first, then LEAKSCOPE_SEED, then the default.
inline std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("LEAKSCOPE_SEED"); env && *env) {
    try {
      std::size_t used = 0;
      const auto v = std::stoull(env, &used);
      if (used == std::string(env).size()) return v;
    } catch (const std::exception&) {
    }
    throw Error(ErrorKind::kValidation, "LEAKSCOPE_SEED must be an unsigned integer");
  }
  return kDefaultSeed;
}

inline json error_json(const std::string& kind, const std::string& message) {
  return {{"error", {{"kind", kind}, {"message", message}}}};
}

// Writes the report (or an error object) to out and returns the exit code.
inline int run(const RunConfig& config, std::ostream& out) {
  json report;
  int code = kExitOk;
  try {
    internal::validate(config);
    report = internal::dispatch(config, resolve_seed(config.seed));
    if (config.command == "verify" && !report["result"]["passed"].get<bool>()) code = kExitInternal;
  } catch (const Error& e) {
    out << error_json(error_kind_name(e.kind()), e.what()).dump() << "\n";
    return is_internal(e.kind()) ? kExitInternal : kExitValidation;
  } catch (const std::exception& e) {
    out << error_json("InternalError", e.what()).dump() << "\n";
    return kExitInternal;
  }
  if (config.out == "table") {
    internal::write_table(out, report);
  } else {
    out << report.dump(2) << "\n";
  }
  return code;
}

}  // namespace leakscope::cli
