#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "strongflow/flow.hpp"
#include "test_util.hpp"

using namespace strongflow;

namespace {

FlowInstance path_instance(int len, long long cap) {
  // s = 0 -> 2 -> 3 -> ... -> t = 1 with uniform capacity.
  FlowInstance g;
  g.n = len + 1;
  g.s = 0;
  g.t = 1;
  g.out.assign(g.n, {});
  int prev = g.s;
  for (int i = 2; i <= len; ++i) {
    g.add_pair(prev, i, Value(cap), Value(0));
    prev = i;
  }
  g.add_pair(prev, g.t, Value(cap), Value(0));
  return g;
}

}  // namespace

TEST_CASE("residual formula and infinity absorption") {
  FlowInstance g;
  g.n = 3;
  g.s = 0;
  g.t = 1;
  g.out.assign(3, {});
  int e = g.add_pair(0, 2, Value(5), Value(7));
  int h = g.add_pair(2, 1, Value::infinity(), Value(0));
  FlowState st(g);
  st.f[e] = Value(2);
  st.f[FlowInstance::rev(e)] = Value(1);
  CHECK(residual(g, st, e) == Value(4));
  CHECK(residual(g, st, FlowInstance::rev(e)) == Value(8));
  CHECK(residual(g, st, h).is_infinite());
  st.f[h] = Value(1000);
  CHECK(residual(g, st, h).is_infinite());
  CHECK(residual(g, st, FlowInstance::rev(h)) == Value(1000));
  // Residual pair identity: u^f_e + u^f_rev = u_e + u_rev.
  CHECK(residual(g, st, e) + residual(g, st, FlowInstance::rev(e)) ==
        Value(12));
}

TEST_CASE("send_flow undoes reverse flow first") {
  FlowInstance g;
  g.n = 2;
  g.s = 0;
  g.t = 1;
  g.out.assign(2, {});
  int e = g.add_pair(0, 1, Value(10), Value(10));

  FlowState st(g);
  st.f[FlowInstance::rev(e)] = Value(3);
  send_flow(g, st, e, Value(5));
  CHECK(st.f[FlowInstance::rev(e)] == Value(0));
  CHECK(st.f[e] == Value(2));

  st = FlowState(g);
  st.f[e] = Value(1);
  send_flow(g, st, e, Value(2));
  CHECK(st.f[e] == Value(3));
  CHECK(st.f[FlowInstance::rev(e)] == Value(0));

  FlowState before = st;
  send_flow(g, st, e, Value(0));
  CHECK(st.f == before.f);

  CHECK_THROWS_AS(send_flow(g, st, e, Value(100)), flow_error);
  CHECK_THROWS_AS(send_flow(g, st, e, Value(-1)), flow_error);
  CHECK_THROWS_AS(send_flow(g, st, e, Value::infinity()), flow_error);
}

TEST_CASE("send_flow respects residual exactly") {
  FlowInstance g;
  g.n = 2;
  g.s = 0;
  g.t = 1;
  g.out.assign(2, {});
  int e = g.add_pair(0, 1, Value(4), Value(6));
  FlowState st(g);
  st.f[FlowInstance::rev(e)] = Value(6);
  // residual of e is 4 - 0 + 6 = 10; exactly 10 must pass, 10+eps must not.
  send_flow(g, st, e, Value(10));
  CHECK(st.f[e] == Value(4));
  CHECK(st.f[FlowInstance::rev(e)] == Value(0));
  CHECK(residual(g, st, e) == Value(0));
}

TEST_CASE("flow_value equals excess identity on random flows") {
  for (uint64_t trial = 0; trial < 60; ++trial) {
    auto rng = sftest::rng_for(trial);
    FlowInstance g = sftest::random_instance(rng, 8, 20, 12, 20);
    FlowState st = sftest::random_feasible_flow(g, rng, 15);
    REQUIRE(is_feasible(g, st));
    CHECK(flow_value(g, st) == -excess(g, st, g.s));
    CHECK(flow_value(g, st) == excess(g, st, g.t));
    CHECK_FALSE(flow_value(g, st).is_negative());
  }
}

TEST_CASE("zero flow and single path flow values") {
  FlowInstance g = path_instance(3, 7);
  FlowState st(g);
  CHECK(flow_value(g, st) == Value(0));
  for (int e = 0; e < g.arc_count(); e += 2) st.f[e] = Value(3);
  CHECK(flow_value(g, st) == Value(3));
}

TEST_CASE("instance validation rules") {
  FlowInstance g;
  g.n = 4;
  g.s = 0;
  g.t = 1;
  g.out.assign(4, {});
  CHECK_THROWS_AS(g.add_pair(2, 2, Value(1), Value(0)), flow_error);
  g.add_pair(0, 2, Value(3), Value(0));
  g.add_pair(2, 1, Value(3), Value(0));
  g.check_valid(true);

  // Direct s-t pair rejected on load, both orientations.
  FlowInstance bad = g;
  bad.add_pair(0, 1, Value(1), Value(0));
  CHECK_THROWS_AS(bad.check_valid(true), flow_error);
  bad = g;
  bad.add_pair(1, 0, Value(1), Value(0));
  CHECK_THROWS_AS(bad.check_valid(true), flow_error);

  // Doubly infinite input pair rejected on load but fine as extension.
  bad = g;
  bad.add_pair(2, 3, Value::infinity(), Value::infinity());
  CHECK_THROWS_AS(bad.check_valid(true), flow_error);
  bad.check_valid(false);
}

TEST_CASE("extend_instance capacity conventions") {
  FlowInstance g;
  g.n = 4;
  g.s = 0;
  g.t = 1;
  g.out.assign(4, {});
  g.add_pair(0, 2, Value(5), Value(0));
  g.add_pair(2, 1, Value(5), Value(0));
  int before = g.arc_count();
  extend_instance(g, {{2, 3}}, {{3, 2}});
  REQUIRE(g.arc_count() == before + 4);
  CHECK(g.arcs[before].tail == 2);
  CHECK(g.arcs[before].head == 3);
  CHECK(g.arcs[before].cap.is_infinite());
  CHECK(g.arcs[before + 1].cap == Value(0));
  CHECK(g.arcs[before + 2].cap.is_infinite());
  CHECK(g.arcs[before + 3].cap.is_infinite());
  // Parallel duplicates allowed.
  extend_instance(g, {{2, 3}}, {});
  CHECK(g.arc_count() == before + 6);
  CHECK_THROWS_AS(extend_instance(g, {{3, 3}}, {}), flow_error);
}

TEST_CASE("decompose on hand-built flows") {
  FlowInstance g = path_instance(3, 7);
  FlowState st(g);
  for (int e = 0; e < g.arc_count(); e += 2) st.f[e] = Value(7);
  auto terms = decompose(g, st);
  REQUIRE(terms.size() == 1);
  CHECK_FALSE(terms[0].cycle);
  CHECK(terms[0].amount == Value(7));
  CHECK(terms[0].arcs.size() == 3);

  // Add a disjoint 3-cycle 2->3->4->2 carrying 2 units.
  FlowInstance g2;
  g2.n = 6;
  g2.s = 0;
  g2.t = 1;
  g2.out.assign(6, {});
  int p1 = g2.add_pair(0, 5, Value(4), Value(0));
  int p2 = g2.add_pair(5, 1, Value(4), Value(0));
  int c1 = g2.add_pair(2, 3, Value(9), Value(0));
  int c2 = g2.add_pair(3, 4, Value(9), Value(0));
  int c3 = g2.add_pair(4, 2, Value(9), Value(0));
  FlowState st2(g2);
  st2.f[p1] = st2.f[p2] = Value(3);
  st2.f[c1] = st2.f[c2] = st2.f[c3] = Value(2);
  auto terms2 = decompose(g2, st2);
  REQUIRE(terms2.size() == 2);
  CHECK_FALSE(terms2[0].cycle);
  CHECK(terms2[1].cycle);
  CHECK(terms2[0].amount == Value(3));
  CHECK(terms2[1].amount == Value(2));
}

TEST_CASE("decompose handles cycles through s and t") {
  FlowInstance g;
  g.n = 4;
  g.s = 0;
  g.t = 1;
  g.out.assign(4, {});
  int sa = g.add_pair(0, 2, Value(9), Value(0));
  int at = g.add_pair(2, 1, Value(9), Value(0));
  int tb = g.add_pair(1, 3, Value(9), Value(0));
  int bs = g.add_pair(3, 0, Value(9), Value(0));
  FlowState st(g);
  // Pure cycle through both s and t; value 0, so no paths may be output.
  st.f[sa] = st.f[at] = st.f[tb] = st.f[bs] = Value(1);
  auto terms = decompose(g, st);
  REQUIRE(terms.size() == 1);
  CHECK(terms[0].cycle);
  CHECK(terms[0].amount == Value(1));
  CHECK(terms[0].arcs.size() == 4);

  // Superpose an honest path; exactly one path of amount 2 must emerge.
  st.f[sa] = Value(3);
  st.f[at] = Value(3);
  auto terms2 = decompose(g, st);
  Value path_total(0);
  int paths = 0;
  for (const auto& term : terms2) {
    if (!term.cycle) {
      ++paths;
      path_total += term.amount;
      CHECK(g.arcs[term.arcs.front()].tail == g.s);
      CHECK(g.arcs[term.arcs.back()].head == g.t);
    }
  }
  CHECK(paths == 1);
  CHECK(path_total == Value(2));
}

TEST_CASE("decompose re-sums exactly on random feasible flows") {
  for (uint64_t trial = 100; trial < 200; ++trial) {
    auto rng = sftest::rng_for(trial);
    FlowInstance g = sftest::random_instance(rng, 9, 24, 10, 25);
    FlowState st = sftest::random_feasible_flow(g, rng, 20);
    REQUIRE(is_feasible(g, st));
    auto terms = decompose(g, st);
    CHECK(static_cast<int>(terms.size()) <= g.arc_count());
    FlowState resum(g);
    Value path_total(0);
    for (const auto& term : terms) {
      for (int e : term.arcs) resum.f[e] += term.amount;
      if (!term.cycle) {
        path_total += term.amount;
        CHECK(g.arcs[term.arcs.front()].tail == g.s);
        CHECK(g.arcs[term.arcs.back()].head == g.t);
        // Path arcs chain and visit no node twice.
        std::set<int> seen{g.arcs[term.arcs.front()].tail};
        for (size_t i = 0; i < term.arcs.size(); ++i) {
          if (i > 0)
            CHECK(g.arcs[term.arcs[i]].tail == g.arcs[term.arcs[i - 1]].head);
          CHECK(seen.insert(g.arcs[term.arcs[i]].head).second);
        }
      }
    }
    CHECK(resum.f == st.f);
    CHECK(path_total == flow_value(g, st));
  }
}

namespace {

void check_basic_acyclic(const FlowInstance& g, const FlowState& st,
                         const FlowState& original) {
  CHECK(sftest::basic_acyclic_violation(g, st, original) == "");
}

}  // namespace

TEST_CASE("to_acyclic_basic on hand-built flows") {
  // 2-cycle superposed on a path.
  FlowInstance g;
  g.n = 3;
  g.s = 0;
  g.t = 1;
  g.out.assign(3, {});
  int sa = g.add_pair(0, 2, Value(5), Value(0));
  int at = g.add_pair(2, 1, Value(5), Value(0));
  int ab = g.add_pair(2, 0, Value(3), Value(3));
  FlowState st(g);
  st.f[sa] = Value(2);
  st.f[at] = Value(2);
  st.f[ab] = Value(1);
  st.f[FlowInstance::rev(ab)] = Value(1);
  FlowState original = st;
  to_acyclic_basic(g, st);
  check_basic_acyclic(g, st, original);
  // The interior s-a-t path is pivoted to a bound, so the value rises to
  // the path capacity.
  CHECK(flow_value(g, st) == Value(5));
  CHECK(st.f[ab].is_zero());
  CHECK(st.f[FlowInstance::rev(ab)].is_zero());

  // Already basic acyclic: unchanged.
  FlowState again = st;
  to_acyclic_basic(g, again);
  CHECK(again.f == st.f);
}

TEST_CASE("to_acyclic_basic property oracle on random flows") {
  for (uint64_t trial = 300; trial < 420; ++trial) {
    auto rng = sftest::rng_for(trial);
    FlowInstance g = sftest::random_instance(rng, 8, 18, 9, 20);
    if (!is_bounded(g)) continue;
    FlowState st = sftest::random_feasible_flow(g, rng, 16);
    REQUIRE(is_feasible(g, st));
    FlowState original = st;
    to_acyclic_basic(g, st);
    check_basic_acyclic(g, st, original);
  }
}

TEST_CASE("min_cut_from_flow on saturated path and non-max error") {
  FlowInstance g = path_instance(3, 4);
  FlowState st(g);
  CHECK_THROWS_AS(min_cut_from_flow(g, st), flow_error);
  for (int e = 0; e < g.arc_count(); e += 2) st.f[e] = Value(4);
  Cut cut = min_cut_from_flow(g, st);
  CHECK(cut.capacity == Value(4));
  CHECK(cut.in_s[g.s]);
  CHECK_FALSE(cut.in_s[g.t]);
}

TEST_CASE("normalize_input adds exactly the missing infinite arcs") {
  FlowInstance g = path_instance(3, 4);  // nodes 0..3, interior 2,3
  int before = g.arc_count();
  normalize_input(g);
  // Interior nodes 2 and 3 each need (i,s) and (t,i).
  CHECK(g.arc_count() == before + 8);
  std::set<std::pair<int, int>> added;
  for (int e = before; e < g.arc_count(); e += 2)
    added.insert({g.arcs[e].tail, g.arcs[e].head});
  CHECK(added == std::set<std::pair<int, int>>{
                     {2, 0}, {3, 0}, {1, 2}, {1, 3}});
  // Idempotent: nothing more to add.
  int after = g.arc_count();
  FlowInstance g2 = g;
  // check_valid(true) would reject the extension arcs added above, so
  // normalize again only through the bounded path: arcs already exist.
  std::vector<char> has_to_s(g2.n, 0), has_from_t(g2.n, 0);
  for (int e = 0; e < g2.arc_count(); ++e) {
    if (!g2.arcs[e].cap.is_infinite()) continue;
    if (g2.arcs[e].head == g2.s) has_to_s[g2.arcs[e].tail] = 1;
    if (g2.arcs[e].tail == g2.t) has_from_t[g2.arcs[e].head] = 1;
  }
  for (int i = 0; i < g2.n; ++i) {
    if (i == g2.s || i == g2.t) continue;
    CHECK(has_to_s[i]);
    CHECK(has_from_t[i]);
  }
  CHECK(after == g.arc_count());
}

TEST_CASE("normalize_input rejects unbounded instances") {
  FlowInstance g;
  g.n = 3;
  g.s = 0;
  g.t = 1;
  g.out.assign(3, {});
  g.add_pair(0, 2, Value::infinity(), Value(0));
  g.add_pair(2, 1, Value::infinity(), Value(0));
  CHECK_FALSE(is_bounded(g));
  CHECK_THROWS_AS(normalize_input(g), flow_error);

  // Finite bottleneck keeps it bounded.
  FlowInstance g2;
  g2.n = 3;
  g2.s = 0;
  g2.t = 1;
  g2.out.assign(3, {});
  g2.add_pair(0, 2, Value::infinity(), Value(0));
  g2.add_pair(2, 1, Value(5), Value(0));
  CHECK(is_bounded(g2));
  normalize_input(g2);
}

TEST_CASE("rev involution and residual pair identity after mutations") {
  for (uint64_t trial = 500; trial < 540; ++trial) {
    auto rng = sftest::rng_for(trial);
    FlowInstance g = sftest::random_instance(rng, 7, 15, 8, 30);
    FlowState st = sftest::random_feasible_flow(g, rng, 12);
    for (int e = 0; e < g.arc_count(); ++e) {
      CHECK(FlowInstance::rev(FlowInstance::rev(e)) == e);
      CHECK(g.arcs[e].tail == g.arcs[FlowInstance::rev(e)].head);
      CHECK(g.arcs[e].head == g.arcs[FlowInstance::rev(e)].tail);
      Value lhs = residual(g, st, e) + residual(g, st, FlowInstance::rev(e));
      Value rhs = g.arcs[e].cap + g.arcs[FlowInstance::rev(e)].cap;
      CHECK(lhs == rhs);
    }
  }
}
