// Exercises the shared-library surface only: everything goes through
// classfair_c.h, never the C++ headers.
#include <cstring>
#include <string>

#include "classfair/classfair_c.h"
#include "doctest.h"
#include "json.hpp"

using json = nlohmann::json;

namespace {

struct Owned {
  char* s = nullptr;
  ~Owned() { cf_string_free(s); }
};

struct OwnedInstance {
  cf_instance* i = nullptr;
  ~OwnedInstance() { cf_instance_free(i); }
};

}  // namespace

TEST_CASE("version and null handling") {
  CHECK(std::string(cf_version()) == "0.1.0");
  CHECK(cf_instance_from_json(nullptr, nullptr) == CF_ERROR_INVALID_ARGUMENT);
  CHECK(std::string(cf_last_error()).find("null") != std::string::npos);
}

TEST_CASE("generate, counts, JSON round trip") {
  OwnedInstance inst;
  REQUIRE(cf_instance_generate("cef_impossibility", R"({"n":3})", &inst.i) == CF_OK);
  int32_t k = 0, agents = 0, items = 0;
  REQUIRE(cf_instance_counts(inst.i, &k, &agents, &items) == CF_OK);
  CHECK(k == 2);
  CHECK(agents == 6);
  CHECK(items == 3);

  Owned text;
  REQUIRE(cf_instance_to_json(inst.i, &text.s) == CF_OK);
  OwnedInstance back;
  REQUIRE(cf_instance_from_json(text.s, &back.i) == CF_OK);
  Owned text2;
  REQUIRE(cf_instance_to_json(back.i, &text2.s) == CF_OK);
  CHECK(std::string(text.s) == text2.s);  // canonical fixed point
}

TEST_CASE("instance errors map to codes with messages") {
  cf_instance* raw = nullptr;
  CHECK(cf_instance_from_json("{nope", &raw) == CF_ERROR_PARSE);
  const char* bad = R"({"name":"x","num_classes":2,
      "agents":[{"id":0,"class":0}],"items":[]})";
  CHECK(cf_instance_from_json(bad, &raw) == CF_ERROR_VALIDATION);
  CHECK(std::string(cf_last_error()).find("class 1 is empty") != std::string::npos);

  CHECK(cf_instance_generate("no_such_generator", "{}", &raw) == CF_ERROR_INVALID_ARGUMENT);
  CHECK(std::string(cf_last_error()).find("upper_triangular") != std::string::npos);
  CHECK(cf_instance_generate("upper_triangular", "{}", &raw) == CF_ERROR_INVALID_ARGUMENT);
  CHECK(std::string(cf_last_error()).find("'n'") != std::string::npos);
}

TEST_CASE("cf_run produces a full metrics report") {
  OwnedInstance inst;
  REQUIRE(cf_instance_generate("random_bipartite",
                               R"({"k":2,"agents_per_class":3,"num_items":6,
                                   "edge_prob":0.6,"seed":9})",
                               &inst.i) == CF_OK);
  Owned out;
  REQUIRE(cf_run(inst.i, "random", "{}", 42, &out.s) == CF_OK);
  const json j = json::parse(out.s);
  CHECK(j.at("report").at("nonwasteful").get<bool>());
  CHECK(j.at("seed").get<uint64_t>() == 42);
  CHECK(j.at("report").at("cef").contains("alpha"));
  CHECK(j.at("assignment").size() == 6);

  // deterministic rerun (timestamp aside)
  Owned out2;
  REQUIRE(cf_run(inst.i, "random", "{}", 42, &out2.s) == CF_OK);
  json a = json::parse(out.s), b = json::parse(out2.s);
  a.erase("timestamp");
  b.erase("timestamp");
  CHECK(a == b);

  CHECK(cf_run(inst.i, "mystery", "{}", 0, &out2.s) == CF_ERROR_INVALID_ARGUMENT);
}

TEST_CASE("cf_run greedy on the contested item reports zero alpha") {
  OwnedInstance inst;
  const char* text = R"({"name":"contested","num_classes":2,
      "agents":[{"id":0,"class":0},{"id":1,"class":1}],
      "items":[{"id":0,"neighbors":[0,1]}]})";
  REQUIRE(cf_instance_from_json(text, &inst.i) == CF_OK);
  Owned out;
  REQUIRE(cf_run(inst.i, "greedy_lexico", "{}", 0, &out.s) == CF_OK);
  const json j = json::parse(out.s);
  CHECK(j.at("report").at("cef").at("alpha").get<double>() == 0.0);
}

TEST_CASE("oracle surfaces") {
  OwnedInstance ut;
  REQUIRE(cf_instance_generate("upper_triangular", R"({"n":5})", &ut.i) == CF_OK);
  Owned out;
  REQUIRE(cf_oracle(ut.i, "usw_opt", "{}", &out.s) == CF_OK);
  CHECK(json::parse(out.s).at("usw_opt").get<int>() == 5);

  OwnedInstance cx;
  REQUIRE(cf_instance_generate("cnsw_counterexample", "{}", &cx.i) == CF_OK);
  Owned out2;
  REQUIRE(cf_oracle(cx.i, "cmnw", "{}", &out2.s) == CF_OK);
  const json j = json::parse(out2.s);
  CHECK(j.at("cnsw").get<double>() == doctest::Approx(3.0));
  CHECK(j.at("product").get<long long>() == 9);
  CHECK(j.at("nonwasteful").get<bool>());
  CHECK(j.at("cef1").get<bool>());

  Owned out3;
  REQUIRE(cf_oracle(cx.i, "prop", "{}", &out3.s) == CF_OK);
  CHECK(json::parse(out3.s).at("prop").size() == 2);

  // cap exceeded names the cap
  OwnedInstance big;
  REQUIRE(cf_instance_generate("upper_triangular", R"({"n":11})", &big.i) == CF_OK);
  Owned out4;
  CHECK(cf_oracle(big.i, "prop", "{}", &out4.s) == CF_ERROR_CAP_EXCEEDED);
  CHECK(std::string(cf_last_error()).find("cap") != std::string::npos);
  CHECK(cf_oracle(big.i, "what", "{}", &out4.s) == CF_ERROR_INVALID_ARGUMENT);

  // a raised cap admits the same instance
  Owned out5;
  CHECK(cf_oracle(big.i, "prop", R"({"prop_max_items":12})", &out5.s) == CF_OK);
}

TEST_CASE("cf_experiment runs presets and reports all_pass") {
  Owned out;
  int32_t all_pass = 0;
  REQUIRE(cf_experiment("pof", R"({"k":50,"p":1,"q":2})", R"({"via":"capi"})", "csv",
                        &out.s, &all_pass) == CF_OK);
  CHECK(all_pass == 1);
  const std::string text = out.s;
  CHECK(text.find("analytic_ratio_num,100") != std::string::npos);
  CHECK(text.find("# config: {\"via\":\"capi\"}") != std::string::npos);

  Owned outj;
  REQUIRE(cf_experiment("divisible", R"({"n":5000})", "{}", "json", &outj.s, &all_pass) ==
          CF_OK);
  const json j = json::parse(outj.s);
  CHECK(j.at("preset").get<std::string>() == "divisible");
  CHECK(all_pass == 1);

  CHECK(cf_experiment("nonsense", "{}", "{}", "csv", &out.s, &all_pass) ==
        CF_ERROR_INVALID_ARGUMENT);
  CHECK(cf_experiment("pof", "{}", "{}", "yaml", &out.s, &all_pass) ==
        CF_ERROR_INVALID_ARGUMENT);
}

TEST_CASE("cf_run_trials") {
  OwnedInstance inst;
  const char* text = R"({"name":"contested","num_classes":2,
      "agents":[{"id":0,"class":0},{"id":1,"class":1}],
      "items":[{"id":0,"neighbors":[0,1]}]})";
  REQUIRE(cf_instance_from_json(text, &inst.i) == CF_OK);
  Owned out;
  int32_t all_pass = 0;
  REQUIRE(cf_run_trials(inst.i, "random", "{}", 2000, 7, "{}", "json", &out.s,
                        &all_pass) == CF_OK);
  const json j = json::parse(out.s);
  bool found = false;
  for (const auto& r : j.at("rows")) {
    if (r.at("metric") == "v_class_0") {
      CHECK(std::abs(r.at("mean").get<double>() - 0.5) < 0.05);
      found = true;
    }
  }
  CHECK(found);
}
