#include <cmath>

#include "classfair/error.hpp"
#include "classfair/instance.hpp"
#include "classfair/matching.hpp"
#include "classfair/rng.hpp"
#include "doctest.h"

using namespace classfair;

TEST_CASE("assign is persistent and validated") {
  const Instance inst = make_instance(2, {0, 1}, {{0, 1}, {0, 1}});
  const Matching empty(inst);
  const Matching one = assign(empty, 0, 0);
  CHECK(one.size() == 1);
  CHECK(empty.size() == 0);  // original untouched
  CHECK(one.agent_of(0) == 0);

  // distinct error codes per failure mode
  try {
    assign(one, 1, 0);
    FAIL("expected saturated-agent error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::agent_saturated);
  }
  try {
    assign(one, 0, 1);
    FAIL("expected item-assigned error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::item_assigned);
  }
  const Instance sparse = make_instance(2, {0, 1}, {{0}, {1}});
  try {
    assign(Matching(sparse), 0, 1);
    FAIL("expected non-edge error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::non_edge);
  }
}

TEST_CASE("assign only touches the target class bundle") {
  const Instance inst = make_instance(3, {0, 1, 2}, {{0, 1, 2}, {0, 1, 2}});
  Matching m(inst);
  m.add(0, 1);
  const auto before = m.bundles();
  const Matching m2 = assign(m, 1, 2);
  const auto after = m2.bundles();
  CHECK(after[0] == before[0]);
  CHECK(after[1] == before[1]);
  CHECK(after[2] != before[2]);
}

TEST_CASE("is_nonwasteful") {
  const Instance inst = make_instance(2, {0, 1}, {{0, 1}, {0, 1}});
  Matching m(inst);
  CHECK_FALSE(is_nonwasteful(inst, m));  // an edge exists, nothing matched
  m.add(0, 0);
  m.add(1, 1);
  CHECK(is_nonwasteful(inst, m));  // both items matched

  const Instance cnsw = gen_cnsw_counterexample();
  Matching x(cnsw);
  x.add(0, 4);
  x.add(1, 5);
  x.add(2, 6);
  x.add(3, 7);
  x.add(4, 2);
  x.add(5, 3);
  CHECK(is_nonwasteful(cnsw, x));
}

TEST_CASE("non-wastefulness is monotone under assignment") {
  Rng rng = make_rng(99);
  for (int it = 0; it < 60; ++it) {
    const Instance inst =
        gen_random_bipartite(1 + static_cast<int>(uniform_below(rng, 3)),
                             1 + static_cast<int>(uniform_below(rng, 3)),
                             1 + static_cast<int>(uniform_below(rng, 6)),
                             0.2 + 0.6 * uniform_unit(rng), rng());
    Matching m(inst);
    bool was_nw = is_nonwasteful(inst, m);
    // greedily add random edges; once NW, it must stay NW
    for (int t = 0; t < inst.num_items(); ++t) {
      for (int a : inst.neighbors(t)) {
        if (!m.agent_saturated(a) && !m.item_assigned(t) && uniform_unit(rng) < 0.7) {
          m.add(t, a);
          const bool now = is_nonwasteful(inst, m);
          if (was_nw) CHECK(now);
          was_nw = now;
          break;
        }
      }
    }
  }
}

TEST_CASE("usw equals the total bundle size") {
  Rng rng = make_rng(123);
  for (int it = 0; it < 40; ++it) {
    const Instance inst = gen_random_bipartite(2, 2, 6, 0.5, rng());
    Matching m(inst);
    for (int t = 0; t < inst.num_items(); ++t)
      for (int a : inst.neighbors(t))
        if (!m.agent_saturated(a) && !m.item_assigned(t) && uniform_unit(rng) < 0.5)
          m.add(t, a);
    int total = 0;
    for (const auto& b : m.bundles()) total += static_cast<int>(b.size());
    CHECK(total == m.size());
  }
}

TEST_CASE("fractional shares and loads") {
  const Instance inst = make_instance(2, {0, 1}, {{0, 1}, {0, 1}});
  FractionalMatching fm(inst);
  fm.add_shares(0, {{0, 0.5}, {1, 0.5}});
  CHECK(fm.agent_load(0) == doctest::Approx(0.5));
  CHECK(fm.agent_load(1) == doctest::Approx(0.5));
  CHECK(fm.item_load(0) == doctest::Approx(1.0));

  // two successive half-assignments of the same item reach load 1
  FractionalMatching g(inst);
  g.add_shares(1, {{0, 0.5}});
  const FractionalMatching g2 = frac_assign(g, 1, {{1, 0.5}});
  CHECK(g2.item_load(1) == doctest::Approx(1.0));
  CHECK(g.item_load(1) == doctest::Approx(0.5));  // persistent

  // non-edge share
  const Instance sparse = make_instance(2, {0, 1}, {{0}});
  FractionalMatching s(sparse);
  CHECK_THROWS_AS(s.add_shares(0, {{1, 0.1}}), Error);
  // overload
  CHECK_THROWS_AS(fm.add_shares(0, {{0, 0.2}}), Error);
  FractionalMatching h(inst);
  CHECK_THROWS_AS(h.add_shares(0, {{0, 0.8}, {1, 0.8}}), Error);
}

TEST_CASE("class_loads") {
  const Instance inst = make_instance(2, {0, 0, 0, 1}, {{0, 1, 2, 3}});
  FractionalMatching fm(inst);
  CHECK(class_loads(inst, fm) == std::vector<double>{0.0, 0.0});

  // one item split (1+a)/2 vs (1-a)/2 with a = 1/3
  const double a = 1.0 / 3.0;
  fm.add_shares(0, {{0, (1 + a) / 2 / 3}, {1, (1 + a) / 2 / 3}, {2, (1 + a) / 2 / 3},
                    {3, (1 - a) / 2}});
  const auto loads = class_loads(inst, fm);
  CHECK(loads[0] == doctest::Approx(2.0 / 3.0));
  CHECK(loads[1] == doctest::Approx(1.0 / 3.0));

  // a fully saturated class of n agents has load n
  const Instance comp = make_instance(1, {0, 0, 0}, {{0, 1, 2}, {0, 1, 2}, {0, 1, 2}});
  FractionalMatching full(comp);
  for (int t = 0; t < 3; ++t) full.add_shares(t, {{t, 1.0}});
  CHECK(class_loads(comp, full)[0] == doctest::Approx(3.0));
}
