#include "classfair/classfair_c.h"

#include <cstring>
#include <ctime>
#include <string>

#include "classfair/algorithms.hpp"
#include "classfair/error.hpp"
#include "classfair/experiments.hpp"
#include "classfair/instance.hpp"
#include "classfair/rng.hpp"
#include "classfair/valuation.hpp"
#include "classfair/version.hpp"
#include "json.hpp"

using json = nlohmann::ordered_json;

struct cf_instance {
  classfair::Instance inst;
};

namespace {

thread_local std::string g_last_error;

cf_status status_of(const classfair::Error& e) {
  using classfair::ErrorCode;
  switch (e.code()) {
    case ErrorCode::invalid_argument:
    case ErrorCode::unknown_name:
      return CF_ERROR_INVALID_ARGUMENT;
    case ErrorCode::validation:
    case ErrorCode::non_edge:
    case ErrorCode::agent_saturated:
    case ErrorCode::item_assigned:
      return CF_ERROR_VALIDATION;
    case ErrorCode::cap_exceeded:
      return CF_ERROR_CAP_EXCEEDED;
    case ErrorCode::parse:
      return CF_ERROR_PARSE;
  }
  return CF_ERROR_INTERNAL;
}

template <typename F>
cf_status guarded(F&& fn) {
  try {
    g_last_error.clear();
    fn();
    return CF_OK;
  } catch (const classfair::Error& e) {
    g_last_error = e.what();
    return status_of(e);
  } catch (const nlohmann::json::exception& e) {
    g_last_error = e.what();
    return CF_ERROR_PARSE;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return CF_ERROR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return CF_ERROR_INTERNAL;
  }
}

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void require(bool cond, const char* what) {
  if (!cond) throw classfair::Error(classfair::ErrorCode::invalid_argument, what);
}

json parse_params(const char* params_json) {
  if (params_json == nullptr || params_json[0] == '\0') return json::object();
  try {
    return json::parse(params_json);
  } catch (const nlohmann::json::exception& e) {
    throw classfair::Error(classfair::ErrorCode::parse,
                           std::string("params JSON: ") + e.what());
  }
}

classfair::OracleCaps caps_from(const json& p) {
  classfair::OracleCaps caps;
  if (p.contains("prop_max_items")) caps.prop_max_items = p.at("prop_max_items").get<int>();
  if (p.contains("prop_max_classes"))
    caps.prop_max_classes = p.at("prop_max_classes").get<int>();
  if (p.contains("cmnw_max_items")) caps.cmnw_max_items = p.at("cmnw_max_items").get<int>();
  return caps;
}

std::string iso_timestamp() {
  char buf[32];
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

classfair::Instance generate(const std::string& name, const json& p) {
  using namespace classfair;
  const auto geti = [&](const char* key, long long dflt, bool required = false) {
    if (!p.contains(key)) {
      if (required)
        throw Error(ErrorCode::invalid_argument,
                    std::string("generator requires parameter '") + key + "'");
      return dflt;
    }
    return p.at(key).get<long long>();
  };
  if (name == "upper_triangular") return gen_upper_triangular(static_cast<int>(geti("n", 0, true)));
  if (name == "cef_impossibility")
    return gen_cef_impossibility(static_cast<int>(geti("n", 0, true)));
  if (name == "divisible_hardness")
    return gen_divisible_hardness(static_cast<int>(geti("n", 0, true)));
  if (name == "price_of_fairness")
    return gen_price_of_fairness(static_cast<int>(geti("k", 0, true)),
                                 static_cast<int>(geti("p", 0, true)),
                                 static_cast<int>(geti("q", 0, true)));
  if (name == "cnsw_counterexample") return gen_cnsw_counterexample();
  if (name == "random_bipartite") {
    const double prob = p.contains("edge_prob") ? p.at("edge_prob").get<double>() : -1.0;
    if (prob < 0.0)
      throw Error(ErrorCode::invalid_argument, "generator requires parameter 'edge_prob'");
    return gen_random_bipartite(static_cast<int>(geti("k", 0, true)),
                                static_cast<int>(geti("agents_per_class", 0, true)),
                                static_cast<int>(geti("num_items", 0, true)), prob,
                                p.contains("seed") ? p.at("seed").get<uint64_t>()
                                                   : kDefaultSeed);
  }
  throw Error(ErrorCode::unknown_name,
              "unknown generator '" + name +
                  "' (expected one of: upper_triangular, cef_impossibility, "
                  "divisible_hardness, price_of_fairness, cnsw_counterexample, "
                  "random_bipartite)");
}

json metrics_to_json(const classfair::MetricsReport& rep) {
  json j;
  j["usw"] = rep.usw;
  j["nonwasteful"] = rep.nonwasteful;
  json cef;
  cef["alpha"] = rep.cef.cef_alpha;
  auto pairs = json::array();
  for (const auto& p : rep.cef.pairs) {
    json pj;
    pj["i"] = p.i;
    pj["j"] = p.j;
    pj["v_i"] = p.v_i;
    pj["v_star"] = p.v_star;
    pj["satisfied"] = p.satisfied;
    pj["ratio"] = p.satisfied ? json(nullptr) : json(p.ratio);
    pairs.push_back(std::move(pj));
  }
  cef["pairs"] = std::move(pairs);
  j["cef"] = std::move(cef);
  j["cef1"] = rep.cef1 ? json(*rep.cef1) : json(nullptr);
  j["cnsw"] = rep.cnsw_value;
  if (!rep.cprop.empty()) {
    auto arr = json::array();
    for (const auto& e : rep.cprop) {
      json ej;
      ej["class"] = e.cls;
      ej["v"] = e.v;
      ej["prop"] = e.prop.value;
      ej["ratio"] = e.ratio;
      ej["divisible_gap_possible"] = e.prop.divisible_gap_possible;
      arr.push_back(std::move(ej));
    }
    j["cprop"] = std::move(arr);
  }
  return j;
}

}  // namespace

extern "C" {

const char* cf_version(void) { return classfair::kVersion; }

const char* cf_last_error(void) { return g_last_error.c_str(); }

void cf_string_free(char* s) { delete[] s; }

cf_status cf_instance_from_json(const char* json_text, cf_instance** out) {
  return guarded([&] {
    require(json_text != nullptr && out != nullptr, "null argument");
    auto inst = classfair::instance_from_json(json_text);
    *out = new cf_instance{std::move(inst)};
  });
}

cf_status cf_instance_to_json(const cf_instance* inst, char** out_json) {
  return guarded([&] {
    require(inst != nullptr && out_json != nullptr, "null argument");
    *out_json = dup_string(classfair::instance_to_json(inst->inst));
  });
}

cf_status cf_instance_generate(const char* generator, const char* params_json,
                               cf_instance** out) {
  return guarded([&] {
    require(generator != nullptr && out != nullptr, "null argument");
    *out = new cf_instance{generate(generator, parse_params(params_json))};
  });
}

cf_status cf_instance_counts(const cf_instance* inst, int32_t* num_classes,
                             int32_t* num_agents, int32_t* num_items) {
  return guarded([&] {
    require(inst != nullptr, "null argument");
    if (num_classes) *num_classes = inst->inst.num_classes();
    if (num_agents) *num_agents = inst->inst.num_agents();
    if (num_items) *num_items = inst->inst.num_items();
  });
}

void cf_instance_free(cf_instance* inst) { delete inst; }

cf_status cf_run(const cf_instance* inst, const char* algorithm, const char* params_json,
                 uint64_t seed, char** out_json) {
  return guarded([&] {
    require(inst != nullptr && algorithm != nullptr && out_json != nullptr, "null argument");
    const json p = parse_params(params_json);
    const std::string algo = algorithm;
    classfair::Matching m(inst->inst);
    if (algo == "random") {
      m = classfair::run_random(inst->inst, seed).matching;
    } else if (algo == "greedy_lexico") {
      m = classfair::run_greedy_lexico(inst->inst);
    } else if (algo == "envy_capped") {
      m = classfair::run_envy_capped_greedy(
          inst->inst, p.contains("alpha") ? p.at("alpha").get<double>() : 0.5);
    } else {
      throw classfair::Error(classfair::ErrorCode::unknown_name,
                             "unknown algorithm '" + algo +
                                 "' (expected random, greedy_lexico, envy_capped)");
    }
    classfair::MetricsOptions opts;
    if (p.contains("cef1")) opts.with_cef1 = p.at("cef1").get<bool>();
    if (p.contains("cprop")) opts.with_cprop = p.at("cprop").get<bool>();
    opts.caps = caps_from(p);
    const auto rep = classfair::compute_metrics(inst->inst, m, opts);

    json j;
    j["version"] = classfair::kVersion;
    j["config"] = json{{"instance", inst->inst.name()}, {"algorithm", algo},
                       {"params", p}};
    j["seed"] = seed;
    j["timestamp"] = iso_timestamp();
    j["report"] = metrics_to_json(rep);
    auto assignment = json::array();
    for (int t = 0; t < inst->inst.num_items(); ++t) assignment.push_back(m.agent_of(t));
    j["assignment"] = std::move(assignment);
    *out_json = dup_string(j.dump(2) + "\n");
  });
}

cf_status cf_oracle(const cf_instance* inst, const char* kind, const char* params_json,
                    char** out_json) {
  return guarded([&] {
    require(inst != nullptr && kind != nullptr && out_json != nullptr, "null argument");
    const classfair::OracleCaps caps = caps_from(parse_params(params_json));
    const std::string k = kind;
    json j;
    j["version"] = classfair::kVersion;
    j["config"] = json{{"oracle", k}, {"instance", inst->inst.name()}};
    j["seed"] = 0;
    j["timestamp"] = iso_timestamp();
    if (k == "usw_opt") {
      j["usw_opt"] = classfair::usw_opt(inst->inst);
    } else if (k == "prop") {
      auto arr = json::array();
      for (int c = 0; c < inst->inst.num_classes(); ++c) {
        const auto pr = classfair::prop_share_oracle(inst->inst, c, caps);
        arr.push_back(json{{"class", c},
                           {"prop", pr.value},
                           {"divisible_gap_possible", pr.divisible_gap_possible},
                           {"flow_upper_bound_num", pr.flow_upper_bound_num}});
      }
      j["prop"] = std::move(arr);
    } else if (k == "cmnw") {
      const auto r = classfair::cmnw_bruteforce(inst->inst, caps);
      j["cnsw"] = r.value;
      j["product"] = r.product;
      auto assignment = json::array();
      for (int t = 0; t < inst->inst.num_items(); ++t)
        assignment.push_back(r.matching.agent_of(t));
      j["assignment"] = std::move(assignment);
      j["nonwasteful"] = classfair::is_nonwasteful(inst->inst, r.matching);
      j["cef1"] = classfair::cef1_check(inst->inst, r.matching);
    } else {
      throw classfair::Error(classfair::ErrorCode::unknown_name,
                             "unknown oracle '" + k + "' (expected prop, cmnw, usw_opt)");
    }
    *out_json = dup_string(j.dump(2) + "\n");
  });
}

cf_status cf_experiment(const char* preset, const char* params_json,
                        const char* config_json, const char* format, char** out_text,
                        int32_t* all_pass) {
  return guarded([&] {
    require(preset != nullptr && out_text != nullptr, "null argument");
    const json p = parse_params(params_json);
    const auto summary = classfair::run_preset(preset, p.dump());
    classfair::OutputEnvelope env;
    env.config_json = (config_json && config_json[0]) ? config_json : "{}";
    env.timestamp = iso_timestamp();
    const std::string fmt = format ? format : "csv";
    if (fmt == "csv")
      *out_text = dup_string(classfair::summary_to_csv(summary, env));
    else if (fmt == "json")
      *out_text = dup_string(classfair::summary_to_json(summary, env));
    else
      throw classfair::Error(classfair::ErrorCode::invalid_argument,
                             "unknown format '" + fmt + "' (expected csv or json)");
    if (all_pass) *all_pass = summary.all_pass() ? 1 : 0;
  });
}

cf_status cf_run_trials(const cf_instance* inst, const char* algorithm,
                        const char* params_json, int32_t trials, uint64_t seed,
                        const char* config_json, const char* format, char** out_text,
                        int32_t* all_pass) {
  return guarded([&] {
    require(inst != nullptr && algorithm != nullptr && out_text != nullptr, "null argument");
    const json p = parse_params(params_json);
    classfair::AlgoSpec spec;
    spec.name = algorithm;
    if (p.contains("alpha")) spec.alpha = p.at("alpha").get<double>();
    classfair::TrialOptions opts;
    if (p.contains("threads")) opts.threads = p.at("threads").get<int>();
    if (p.contains("audit")) opts.audit = p.at("audit").get<bool>();
    if (p.contains("cprop")) opts.with_cprop = p.at("cprop").get<bool>();
    const auto summary = classfair::run_trials(inst->inst, spec, trials, seed, opts);
    classfair::OutputEnvelope env;
    env.config_json = (config_json && config_json[0]) ? config_json : "{}";
    env.timestamp = iso_timestamp();
    const std::string fmt = format ? format : "csv";
    if (fmt == "csv")
      *out_text = dup_string(classfair::summary_to_csv(summary, env));
    else if (fmt == "json")
      *out_text = dup_string(classfair::summary_to_json(summary, env));
    else
      throw classfair::Error(classfair::ErrorCode::invalid_argument,
                             "unknown format '" + fmt + "' (expected csv or json)");
    if (all_pass) *all_pass = summary.all_pass() ? 1 : 0;
  });
}

}  // extern "C"
