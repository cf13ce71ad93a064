// classfair command-line tool. Talks to the library exclusively through the
// C API in classfair_c.h.
//
// Exit codes: 0 success, 1 usage/config error, 2 validation error,
// 3 acceptance-target failure in `exp`.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "classfair/classfair_c.h"
#include "json.hpp"

namespace {

using json = nlohmann::ordered_json;

constexpr uint64_t kDefaultSeed = 0xC1A55FA1ULL;

struct CStringDeleter {
  void operator()(char* s) const { cf_string_free(s); }
};
using CString = std::unique_ptr<char, CStringDeleter>;

struct InstanceDeleter {
  void operator()(cf_instance* i) const { cf_instance_free(i); }
};
using InstancePtr = std::unique_ptr<cf_instance, InstanceDeleter>;

int exit_code_for(cf_status st) {
  switch (st) {
    case CF_OK:
      return 0;
    case CF_ERROR_INVALID_ARGUMENT:
      return 1;
    case CF_ERROR_VALIDATION:
    case CF_ERROR_CAP_EXCEEDED:
    case CF_ERROR_PARSE:
      return 2;
    default:
      return 1;
  }
}

[[noreturn]] void fail(cf_status st) {
  std::cerr << "error: " << cf_last_error() << "\n";
  std::exit(exit_code_for(st));
}

// write-then-rename so readers never observe a partial file
void write_output(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    return;
  }
  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) {
      std::cerr << "error: cannot open '" << tmp << "' for writing\n";
      std::exit(1);
    }
    f << content;
    if (!f.good()) {
      std::cerr << "error: short write to '" << tmp << "'\n";
      std::exit(1);
    }
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::cerr << "error: cannot rename '" << tmp << "' to '" << path << "'\n";
    std::exit(1);
  }
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) {
    std::cerr << "error: cannot read '" << path << "'\n";
    std::exit(2);
  }
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

// shared generator/instance-source flags for run and oracle
struct InstanceSource {
  std::string file;
  std::string generator;
  std::optional<long long> n, k, p, q, apc, num_items;
  std::optional<double> edge_prob;
  std::optional<uint64_t> gen_seed;

  // seed_alias: let --seed name the generator seed too, for subcommands
  // where no other seed exists
  void add_flags(CLI::App* app, bool seed_alias = false) {
    app->add_option("--instance", file, "instance JSON file");
    app->add_option("--gen", generator, "generate the instance instead of loading it");
    app->add_option("--n", n, "generator size parameter");
    app->add_option("--k", k, "number of classes");
    app->add_option("--p", p, "price-of-fairness p");
    app->add_option("--q", q, "price-of-fairness q");
    app->add_option("--agents-per-class", apc, "agents per class (random_bipartite)");
    app->add_option("--num-items", num_items, "item count (random_bipartite)");
    app->add_option("--edge-prob", edge_prob, "edge probability (random_bipartite)");
    app->add_option(seed_alias ? "--gen-seed,--seed" : "--gen-seed", gen_seed,
                    "generator seed (random_bipartite)");
  }

  json params() const {
    json out = json::object();
    if (n) out["n"] = *n;
    if (k) out["k"] = *k;
    if (p) out["p"] = *p;
    if (q) out["q"] = *q;
    if (apc) out["agents_per_class"] = *apc;
    if (num_items) out["num_items"] = *num_items;
    if (edge_prob) out["edge_prob"] = *edge_prob;
    if (gen_seed) out["seed"] = *gen_seed;
    return out;
  }

  InstancePtr load() const {
    if (file.empty() == generator.empty()) {
      std::cerr << "error: exactly one of --instance or --gen is required\n";
      std::exit(1);
    }
    cf_instance* raw = nullptr;
    cf_status st;
    if (!file.empty()) {
      st = cf_instance_from_json(read_file(file).c_str(), &raw);
    } else {
      st = cf_instance_generate(generator.c_str(), params().dump().c_str(), &raw);
    }
    if (st != CF_OK) fail(st);
    return InstancePtr(raw);
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"classfair: online class-fair bipartite matching lab"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(cf_version()));

  // gen
  auto* gen = app.add_subcommand("gen", "generate an instance and write its JSON");
  std::string gen_name, gen_out;
  InstanceSource gen_src;
  gen->add_option("generator", gen_name,
                  "upper_triangular | cef_impossibility | divisible_hardness | "
                  "price_of_fairness | cnsw_counterexample | random_bipartite")
      ->required();
  gen->add_option("--n", gen_src.n, "size parameter");
  gen->add_option("--k", gen_src.k, "number of classes");
  gen->add_option("--p", gen_src.p, "price-of-fairness p");
  gen->add_option("--q", gen_src.q, "price-of-fairness q");
  gen->add_option("--agents-per-class", gen_src.apc, "agents per class");
  gen->add_option("--num-items", gen_src.num_items, "item count");
  gen->add_option("--edge-prob", gen_src.edge_prob, "edge probability");
  gen->add_option("--seed", gen_src.gen_seed, "generator seed");
  gen->add_option("--out", gen_out, "output path (default stdout)");

  // run
  auto* run = app.add_subcommand("run", "run one algorithm pass and report metrics");
  InstanceSource run_src;
  run_src.add_flags(run);
  std::string run_algo = "random", run_out;
  double run_alpha = 0.5;
  uint64_t run_seed = kDefaultSeed;
  bool run_no_cef1 = false, run_cprop = false;
  run->add_option("--algorithm", run_algo, "random | greedy_lexico | envy_capped");
  run->add_option("--alpha", run_alpha, "envy cap level (envy_capped)");
  run->add_option("--seed", run_seed, "run seed");
  run->add_flag("--no-cef1", run_no_cef1, "skip the CEF1 check (costly on large bundles)");
  run->add_flag("--cprop", run_cprop, "include prop-oracle comparisons (size caps apply)");
  std::optional<int> run_prop_cap, run_prop_classes, run_cmnw_cap;
  run->add_option("--prop-max-items", run_prop_cap, "prop oracle item cap (default 10)");
  run->add_option("--prop-max-classes", run_prop_classes, "prop oracle class cap (default 4)");
  run->add_option("--cmnw-max-items", run_cmnw_cap, "cmnw oracle item cap (default 8)");
  run->add_option("--out", run_out, "output path (default stdout)");

  // exp
  auto* exp = app.add_subcommand("exp", "run a named experiment preset");
  std::string exp_name, exp_out, exp_format = "csv";
  std::optional<long long> exp_n, exp_trials, exp_k, exp_p, exp_q, exp_instances;
  std::optional<double> exp_tol;
  uint64_t exp_seed = kDefaultSeed;
  int exp_threads = 0;
  exp->add_option("preset", exp_name,
                  "cef_lower | cef_upper | ode_check | cprop | pof | divisible | cnsw")
      ->required();
  exp->add_option("--n", exp_n, "instance size");
  exp->add_option("--trials", exp_trials, "Monte Carlo trials");
  exp->add_option("--seed", exp_seed, "master seed");
  exp->add_option("--threads", exp_threads, "trial executor threads (0 = auto)");
  exp->add_option("--k", exp_k, "price-of-fairness k");
  exp->add_option("--p", exp_p, "price-of-fairness p");
  exp->add_option("--q", exp_q, "price-of-fairness q");
  exp->add_option("--tol", exp_tol, "fixed-point tolerance (divisible)");
  exp->add_option("--instances", exp_instances, "panel size (cnsw)");
  exp->add_option("--out", exp_out, "output path (default stdout)");
  exp->add_option("--format", exp_format, "csv | json");

  // oracle
  auto* oracle = app.add_subcommand("oracle", "exact brute-force oracles");
  std::string oracle_kind, oracle_out;
  InstanceSource oracle_src;
  std::optional<int> oracle_prop_cap, oracle_prop_classes, oracle_cmnw_cap;
  oracle->add_option("kind", oracle_kind, "prop | cmnw | usw_opt")->required();
  oracle_src.add_flags(oracle, /*seed_alias=*/true);
  oracle->add_option("--prop-max-items", oracle_prop_cap, "prop oracle item cap (default 10)");
  oracle->add_option("--prop-max-classes", oracle_prop_classes,
                     "prop oracle class cap (default 4)");
  oracle->add_option("--cmnw-max-items", oracle_cmnw_cap, "cmnw oracle item cap (default 8)");
  oracle->add_option("--out", oracle_out, "output path (default stdout)");

  CLI11_PARSE(app, argc, argv);

  if (gen->parsed()) {
    cf_instance* raw = nullptr;
    cf_status st = cf_instance_generate(gen_name.c_str(), gen_src.params().dump().c_str(), &raw);
    if (st != CF_OK) fail(st);
    InstancePtr inst(raw);
    char* text = nullptr;
    st = cf_instance_to_json(inst.get(), &text);
    if (st != CF_OK) fail(st);
    CString owned(text);
    write_output(gen_out, owned.get());
    return 0;
  }

  if (run->parsed()) {
    InstancePtr inst = run_src.load();
    json params{{"alpha", run_alpha}, {"cef1", !run_no_cef1}, {"cprop", run_cprop}};
    if (run_prop_cap) params["prop_max_items"] = *run_prop_cap;
    if (run_prop_classes) params["prop_max_classes"] = *run_prop_classes;
    if (run_cmnw_cap) params["cmnw_max_items"] = *run_cmnw_cap;
    char* text = nullptr;
    cf_status st =
        cf_run(inst.get(), run_algo.c_str(), params.dump().c_str(), run_seed, &text);
    if (st != CF_OK) fail(st);
    CString owned(text);
    write_output(run_out, owned.get());
    return 0;
  }

  if (exp->parsed()) {
    json params = json::object();
    if (exp_n) params["n"] = *exp_n;
    if (exp_trials) params["trials"] = *exp_trials;
    params["seed"] = exp_seed;
    if (exp_threads != 0) params["threads"] = exp_threads;
    if (exp_k) params["k"] = *exp_k;
    if (exp_p) params["p"] = *exp_p;
    if (exp_q) params["q"] = *exp_q;
    if (exp_tol) params["tol"] = *exp_tol;
    if (exp_instances) params["instances"] = *exp_instances;
    json config{{"subcommand", "exp"}, {"preset", exp_name}, {"params", params},
                {"format", exp_format}};
    char* text = nullptr;
    int32_t all_pass = 1;
    cf_status st = cf_experiment(exp_name.c_str(), params.dump().c_str(),
                                 config.dump().c_str(), exp_format.c_str(), &text,
                                 &all_pass);
    if (st != CF_OK) fail(st);
    CString owned(text);
    write_output(exp_out, owned.get());
    if (!all_pass) {
      std::cerr << "acceptance target failed in preset '" << exp_name << "'\n";
      return 3;
    }
    return 0;
  }

  if (oracle->parsed()) {
    InstancePtr inst = oracle_src.load();
    json params = json::object();
    if (oracle_prop_cap) params["prop_max_items"] = *oracle_prop_cap;
    if (oracle_prop_classes) params["prop_max_classes"] = *oracle_prop_classes;
    if (oracle_cmnw_cap) params["cmnw_max_items"] = *oracle_cmnw_cap;
    char* text = nullptr;
    cf_status st = cf_oracle(inst.get(), oracle_kind.c_str(), params.dump().c_str(), &text);
    if (st != CF_OK) fail(st);
    CString owned(text);
    write_output(oracle_out, owned.get());
    return 0;
  }

  return 1;
}
