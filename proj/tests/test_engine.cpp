#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "strongflow/engine.hpp"
#include "strongflow/oracle.hpp"
#include "test_util.hpp"

using namespace strongflow;

namespace {

std::vector<Value> caps_of(const FlowInstance& g) {
  std::vector<Value> out;
  out.reserve(g.arc_count());
  for (const Arc& a : g.arcs) out.push_back(a.cap);
  return out;
}

// Spanning path over all nodes; every arc respects it, so the treedepth
// backend accepts any instance with this tree.
std::vector<int> path_tree(int n) {
  std::vector<int> parent(n, -1);
  for (int i = 1; i < n; ++i) parent[i] = i - 1;
  return parent;
}

// (s,i) and (i,t) arc ids per interior node of the engine graph. The
// normalization pass guarantees both exist and coalescing makes them unique.
void boundary_ids(const Engine& eng, std::vector<int>& si,
                  std::vector<int>& it) {
  const FlowInstance& g = eng.graph();
  si.assign(g.n, -1);
  it.assign(g.n, -1);
  for (int e = 0; e < eng.base_arc_count(); ++e) {
    const Arc& a = g.arcs[e];
    if (a.tail == g.s && a.head != g.t) si[a.head] = e;
    if (a.head == g.t && a.tail != g.s) it[a.tail] = e;
  }
}

// Everything about one iterate boundary that the drift and monotonicity
// checks need to compare against the next boundary.
struct Snapshot {
  std::vector<Value> f, r;
  std::vector<char> abn, ext;
  std::vector<int> root;
  Value eps;
  int arcs = 0;
};

Snapshot observe(const Engine& eng) {
  Snapshot s;
  s.arcs = eng.graph().arc_count();
  s.f = eng.flow_state().f;
  s.r = eng.safe_caps();
  s.eps = eng.eps();
  s.abn.resize(s.arcs);
  s.ext.resize(s.arcs);
  for (int e = 0; e < s.arcs; ++e) {
    s.abn[e] = eng.arc_abundant(e) ? 1 : 0;
    s.ext[e] = eng.arc_extension(e) ? 1 : 0;
  }
  int n = eng.graph().n;
  s.root.resize(n);
  for (int v = 0; v < n; ++v) s.root[v] = eng.root_of(v);
  return s;
}

// The abundant flags must equal the set of live arcs whose residual is at
// least gamma * eps; nothing less (sweeps are exhaustive) and nothing more
// (abundance is permanent, so early flags would break monotonicity).
std::string abundance_violation(const Engine& eng) {
  const FlowInstance& g = eng.graph();
  Value thr = eng.gamma() * eng.eps();
  for (int e = 0; e < g.arc_count(); ++e) {
    bool want = !eng.arc_dead(e) &&
                Value::cmp(residual(g, eng.flow_state(), e), thr) >= 0;
    if (eng.arc_abundant(e) != want)
      return "abundant flag mismatch on arc " + std::to_string(e) +
             (want ? " (missing)" : " (spurious)");
  }
  return "";
}

// Recomputes the component partition from scratch: forward closure from s
// over abundant arcs, backward closure to t, and connected components of
// two-way abundant pairs elsewhere. Engine roots must agree exactly.
std::string partition_violation(const Engine& eng) {
  const FlowInstance& g = eng.graph();
  int n = g.n;
  std::vector<std::vector<int>> fwd(n), bwd(n);
  for (int e = 0; e < g.arc_count(); ++e) {
    if (eng.arc_dead(e) || !eng.arc_abundant(e)) continue;
    fwd[g.arcs[e].tail].push_back(g.arcs[e].head);
    bwd[g.arcs[e].head].push_back(g.arcs[e].tail);
  }
  auto closure = [&](int start, const std::vector<std::vector<int>>& adj) {
    std::vector<char> seen(n, 0);
    std::vector<int> q{start};
    seen[start] = 1;
    for (size_t at = 0; at < q.size(); ++at)
      for (int v : adj[q[at]])
        if (!seen[v]) {
          seen[v] = 1;
          q.push_back(v);
        }
    return seen;
  };
  std::vector<char> in_s = closure(g.s, fwd), in_t = closure(g.t, bwd);

  std::vector<int> uf(n);
  for (int v = 0; v < n; ++v) uf[v] = v;
  auto find = [&](int x) {
    while (uf[x] != x) x = uf[x] = uf[uf[x]];
    return x;
  };
  for (int e = 0; e < g.arc_count(); e += 2) {
    if (eng.arc_dead(e)) continue;
    if (!eng.arc_abundant(e) || !eng.arc_abundant(FlowInstance::rev(e)))
      continue;
    uf[find(g.arcs[e].tail)] = find(g.arcs[e].head);
  }

  for (int v = 0; v < n; ++v) {
    if (in_s[v] && in_t[v])
      return "node " + std::to_string(v) + " reachable abundantly both ways";
    if (in_s[v] != (eng.root_of(v) == g.s))
      return "source side mismatch at node " + std::to_string(v);
    if (in_t[v] != (eng.root_of(v) == g.t))
      return "sink side mismatch at node " + std::to_string(v);
  }
  for (int v = 0; v < n; ++v) {
    if (in_s[v] || in_t[v]) continue;
    int r = eng.root_of(v);
    if (find(r) != find(v))
      return "root of " + std::to_string(v) + " lies outside its component";
    if (eng.root_of(r) != r)
      return "stale root stored at node " + std::to_string(v);
    if (in_s[r] || in_t[r])
      return "interior node rooted on the source or sink side";
  }
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v) {
      if (in_s[u] || in_t[u] || in_s[v] || in_t[v]) continue;
      if ((find(u) == find(v)) != (eng.root_of(u) == eng.root_of(v)))
        return "free components and roots disagree on nodes " +
               std::to_string(u) + "," + std::to_string(v);
    }
  return "";
}

// Full between-iterations validity: feasibility and near-optimality against
// the exact oracle, safe capacities, the saturated-or-gap-or-boundary
// trichotomy on arcs between components, one-sided root boundary arcs, and
// the component partition itself.
std::string iterate_violation(const Engine& eng, const Value& nu,
                              const std::vector<int>& si,
                              const std::vector<int>& it) {
  const FlowInstance& g = eng.graph();
  const FlowState& f = eng.flow_state();
  std::string why;
  if (!is_feasible(g, f, &why)) return "infeasible: " + why;
  if (!is_bounded(g)) return "grown instance has an all-infinite s-t path";
  Value grown = oracle::max_flow_value(g, caps_of(g));
  if (!(grown == nu)) return "added arcs changed the optimum value";
  if (flow_value(g, f) + eng.eps() < nu) return "flow too far from optimal";
  if (!oracle::safe_capacities(g, f, eng.safe_caps(), &why))
    return "safe capacities: " + why;
  if (eng.done()) return "";

  const std::vector<Value>& r = eng.safe_caps();
  Value margin = Value(2) * eng.eps() / (eng.gamma() * eng.gamma());
  for (int e = 0; e < g.arc_count(); e += 2) {
    if (eng.arc_dead(e) || eng.arc_shortcut(e)) continue;
    if (eng.root_of(g.arcs[e].tail) == eng.root_of(g.arcs[e].head)) continue;
    int eb = FlowInstance::rev(e);
    Value res_f = residual(g, f, e), res_b = residual(g, f, eb);
    if (res_f.is_zero() || res_b.is_zero()) continue;
    if (eng.arc_boundary(e)) continue;
    if (Value::cmp(res_f, r[e] + margin) < 0 ||
        Value::cmp(res_b, r[eb] + margin) < 0)
      return "cross pair " + std::to_string(e) +
             " neither saturated nor a gap nor boundary";
  }

  for (int i : eng.roots()) {
    if (i == g.s || i == g.t) continue;
    if (si[i] < 0 || it[i] < 0) return "root misses its boundary arcs";
    if (!residual(g, f, si[i]).is_zero() && !residual(g, f, it[i]).is_zero())
      return "both boundary arcs of root " + std::to_string(i) + " have slack";
  }

  std::string v = abundance_violation(eng);
  if (!v.empty()) return v;
  return partition_violation(eng);
}

// Between consecutive boundaries: the accuracy contracts by gamma^3 and
// per-arc net flow drifts stay within the safe capacity plus slack. Arcs
// added in between may carry at most 3 * (old eps). Extension arcs also get
// the new-arc allowance because cover flow may land on a live one.
std::string successor_violation(const Snapshot& a, const Snapshot& b,
                                const Value& gamma) {
  Value g3 = gamma * gamma * gamma;
  if (Value::cmp(b.eps * g3, a.eps) > 0)
    return "accuracy shrank by less than the cube of gamma";
  Value slack = a.eps / g3;
  Value triple = Value(3) * a.eps;
  for (int e = 0; e < a.arcs; ++e) {
    int eb = FlowInstance::rev(e);
    Value drift = (b.f[e] - b.f[eb]) - (a.f[e] - a.f[eb]);
    Value bound = Value::min(a.r[e], a.eps) + slack;
    if (a.ext[e]) bound = Value::max(bound, triple);
    if (Value::cmp(drift, bound) > 0)
      return "net flow on arc " + std::to_string(e) + " drifted by " +
             drift.to_string() + " > " + bound.to_string();
  }
  for (int e = a.arcs; e < b.arcs; ++e)
    if (Value::cmp(b.f[e], triple) > 0)
      return "fresh arc " + std::to_string(e) + " carries more than 3 eps";
  return "";
}

// Drives one engine to completion, checking validity at every boundary,
// drift between boundaries, monotone classification, the one-shot gap rule,
// the bounded regular window per pair, pinned infinite-pair residuals, and
// the extension and shortcut count bounds. Ends with the solved result
// checked against the oracle on the original instance.
void drive_checked(const FlowInstance& in, const EngineConfig& cfg,
                   const std::string& tag) {
  Engine eng(in, cfg);
  const FlowInstance& g = eng.graph();
  int base = eng.base_arc_count();
  std::vector<int> si, it;
  boundary_ids(eng, si, it);
  Value nu = oracle::max_flow_value(g, caps_of(g));

  std::vector<int> gap_count(base / 2, 0), regular_count(base / 2, 0);
  std::vector<Value> pair_total(base / 2);
  std::vector<int> pinned;
  for (int e = 0; e < base; e += 2) {
    const Arc& fa = g.arcs[e];
    const Arc& ba = g.arcs[e + 1];
    pair_total[e / 2] = fa.cap + ba.cap;
    bool interior = fa.tail != g.s && fa.tail != g.t && fa.head != g.s &&
                    fa.head != g.t;
    if (interior && fa.cap.is_finite() != ba.cap.is_finite())
      pinned.push_back(fa.cap.is_finite() ? e : e + 1);
  }
  Value g6 = eng.gamma() * eng.gamma();
  g6 = g6 * g6 * eng.gamma() * eng.gamma();
  double short_bound = g.n * std::log2(static_cast<double>(g.n));

  auto boundary_checks = [&](const char* when) {
    std::string v = iterate_violation(eng, nu, si, it);
    if (!v.empty()) FAIL(tag << " " << when << ": " << v);
    for (int e = 0; e < base; e += 2) {
      const Value& tot = pair_total[e / 2];
      if (!tot.is_finite()) continue;
      if (Value::cmp(tot * g6, eng.eps()) >= 0 &&
          Value::cmp(tot, eng.gamma() * eng.eps()) < 0 &&
          ++regular_count[e / 2] > 3)
        FAIL(tag << " " << when << ": pair " << e
                 << " stayed in the active capacity window too long");
    }
    for (int e : pinned)
      if (!residual(g, eng.flow_state(), e).is_zero())
        FAIL(tag << " " << when << ": residual reopened opposite an "
                 << "infinite arc " << e);
    if (eng.extension_arc_ids().size() > static_cast<size_t>(2 * g.n))
      FAIL(tag << " " << when << ": more than 2n extension arcs");
    if (static_cast<double>(eng.shortcut_arc_ids().size()) > short_bound)
      FAIL(tag << " " << when << ": more than n log n shortcut arcs");
  };

  boundary_checks("initially");
  Snapshot prev = observe(eng);
  long long rounds = 0, ess_sum = 0;
  while (!eng.done()) {
    std::vector<int> gaps = eng.gap_arcs();
    for (int e : gaps)
      if (e < base && ++gap_count[e / 2] > 1)
        FAIL(tag << ": pair " << e << " was a gap pair twice");
    eng.iterate();
    ++rounds;
    if (rounds > eng.iteration_cap()) FAIL(tag << ": runaway iteration loop");
    ess_sum += static_cast<long long>(eng.last_essential().size());
    Snapshot cur = observe(eng);
    std::string v = successor_violation(prev, cur, eng.gamma());
    if (!v.empty()) FAIL(tag << " round " << rounds << ": " << v);
    for (int e = 0; e < prev.arcs; ++e)
      if (prev.abn[e] && !cur.abn[e])
        FAIL(tag << ": arc " << e << " lost its abundant flag");
    for (int v2 = 0; v2 < g.n; ++v2)
      if (cur.root[prev.root[v2]] != cur.root[v2])
        FAIL(tag << ": components split at node " << v2);
    if (!eng.done())
      for (int e : gaps)
        if (!eng.arc_abundant(e) || !eng.arc_abundant(FlowInstance::rev(e)))
          FAIL(tag << ": gap pair " << e << " did not become free");
    boundary_checks(("after round " + std::to_string(rounds)).c_str());
    prev = std::move(cur);
  }
  CHECK(eng.metrics().iterations == rounds);
  CHECK(eng.metrics().essential_total == ess_sum);

  SolveResult out = eng.solve();
  Value want = oracle::max_flow_value(in, caps_of(in));
  CHECK(out.value == want);
  CHECK(out.cut.capacity == want);
  REQUIRE(out.flow.size() == static_cast<size_t>(in.arc_count()));
  FlowState mapped;
  mapped.f = out.flow;
  std::string why;
  if (!is_feasible(in, mapped, &why)) FAIL(tag << ": final flow " << why);
  CHECK(flow_value(in, mapped) == want);
  CHECK(out.cut.in_s[in.s]);
  CHECK_FALSE(out.cut.in_s[in.t]);
}

}  // namespace

TEST_CASE("hand instances solve to their known values") {
  for (ItcoBackend bk : {ItcoBackend::oracle, ItcoBackend::italiano,
                         ItcoBackend::treedepth, ItcoBackend::ordered}) {
    FlowInstance g;
    g.n = 3;
    g.out.assign(3, {});
    g.add_pair(0, 2, Value(3), Value(0));
    g.add_pair(2, 1, Value(5), Value(0));
    EngineConfig cfg;
    cfg.backend = bk;
    if (bk == ItcoBackend::treedepth) cfg.tree_parent = path_tree(g.n);
    SolveResult r = solve_max_flow(g, cfg);
    CHECK(r.value == Value(3));
    CHECK(r.cut.capacity == Value(3));
  }
}

TEST_CASE("parallel pairs are summed by coalescing") {
  FlowInstance g;
  g.n = 3;
  g.out.assign(3, {});
  g.add_pair(0, 2, Value(2), Value(0));
  g.add_pair(0, 2, Value(2), Value(0));
  g.add_pair(2, 0, Value(0), Value(2));
  g.add_pair(2, 1, Value(5), Value(1));
  SolveResult r = solve_max_flow(g);
  CHECK(r.value == Value(5));
  FlowState st;
  st.f = r.flow;
  std::string why;
  CHECK(is_feasible(g, st, &why));
  CHECK(flow_value(g, st) == Value(5));
}

TEST_CASE("infinite arcs are usable when some finite cut remains") {
  FlowInstance g;
  g.n = 4;
  g.out.assign(4, {});
  g.add_pair(0, 2, Value::infinity(), Value(0));
  g.add_pair(2, 1, Value(7), Value(0));
  g.add_pair(0, 3, Value(4), Value(0));
  g.add_pair(3, 1, Value::infinity(), Value(0));
  SolveResult r = solve_max_flow(g);
  CHECK(r.value == Value(11));
}

TEST_CASE("reverse capacities open backward routes") {
  FlowInstance g;
  g.n = 4;
  g.out.assign(4, {});
  g.add_pair(0, 2, Value(5), Value(0));
  g.add_pair(3, 2, Value(0), Value(4));
  g.add_pair(3, 1, Value(9), Value(0));
  SolveResult r = solve_max_flow(g);
  CHECK(r.value == Value(4));
}

TEST_CASE("empty and zero-capacity instances solve to zero") {
  FlowInstance g;
  g.n = 2;
  g.out.assign(2, {});
  SolveResult r = solve_max_flow(g);
  CHECK(r.value == Value(0));
  CHECK(r.flow.empty());

  FlowInstance z;
  z.n = 4;
  z.out.assign(4, {});
  z.add_pair(0, 2, Value(0), Value(0));
  z.add_pair(2, 1, Value(0), Value(0));
  SolveResult rz = solve_max_flow(z);
  CHECK(rz.value == Value(0));
}

TEST_CASE("an all-infinite s-t path is rejected up front") {
  FlowInstance g;
  g.n = 3;
  g.out.assign(3, {});
  g.add_pair(0, 2, Value::infinity(), Value(0));
  g.add_pair(2, 1, Value::infinity(), Value(0));
  CHECK_THROWS_AS(Engine{g}, flow_error);
}

TEST_CASE("stepping past completion and over the cap both throw") {
  FlowInstance g;
  g.n = 3;
  g.out.assign(3, {});
  g.add_pair(0, 2, Value(3), Value(0));
  g.add_pair(2, 1, Value(5), Value(0));
  Engine eng(g);
  eng.solve();
  CHECK(eng.done());
  CHECK_THROWS_AS(eng.iterate(), flow_error);

  EngineConfig capped;
  capped.iteration_cap = 0;
  Engine tight(g, capped);
  CHECK_THROWS_AS(tight.solve(), flow_error);
}

TEST_CASE("the treedepth backend rejects malformed trees") {
  FlowInstance g;
  g.n = 4;
  g.out.assign(4, {});
  g.add_pair(0, 2, Value(3), Value(0));
  g.add_pair(2, 1, Value(5), Value(0));
  EngineConfig cfg;
  cfg.backend = ItcoBackend::treedepth;

  cfg.tree_parent = {};
  CHECK_THROWS_AS((Engine{g, cfg}), flow_error);
  cfg.tree_parent = {-1, 0, 0};
  CHECK_THROWS_AS((Engine{g, cfg}), flow_error);
  cfg.tree_parent = {-1, -1, 0, 0};
  CHECK_THROWS_AS((Engine{g, cfg}), flow_error);
  cfg.tree_parent = {-1, 0, 7, 0};
  CHECK_THROWS_AS((Engine{g, cfg}), flow_error);
  cfg.tree_parent = {-1, 0, 3, 2};
  CHECK_THROWS_AS((Engine{g, cfg}), flow_error);
  cfg.tree_parent = path_tree(4);
  CHECK(solve_max_flow(g, cfg).value == Value(3));
}

TEST_CASE("the default iteration cap reflects the coalesced size") {
  auto rng = sftest::rng_for(41);
  for (int i = 0; i < 10; ++i) {
    FlowInstance in = sftest::random_bounded_instance(rng, 14, 30, 50, 25);
    Engine eng(in);
    long long finite = 0;
    for (int e = 0; e < eng.base_arc_count(); ++e) {
      const Value& c = eng.graph().arcs[e].cap;
      if (c.is_finite() && c.is_positive()) ++finite;
    }
    CHECK(eng.iteration_cap() == 20 * (eng.graph().n + finite) + 100);
  }
}

TEST_CASE("solved flows match the augmenting-path oracle on every backend") {
  int idx = 0;
  for (ItcoBackend bk : {ItcoBackend::oracle, ItcoBackend::italiano,
                         ItcoBackend::treedepth, ItcoBackend::ordered}) {
    auto rng = sftest::rng_for(300 + 10 * idx++);
    for (int i = 0; i < 40; ++i) {
      FlowInstance in =
          sftest::random_bounded_instance(rng, 30, 100, 1000000, 20);
      EngineConfig cfg;
      cfg.backend = bk;
      if (bk == ItcoBackend::treedepth) cfg.tree_parent = path_tree(in.n);
      SolveResult r = solve_max_flow(in, cfg);
      Value want = oracle::max_flow_value(in, caps_of(in));
      if (!(r.value == want))
        FAIL("backend " << idx << " instance " << i << ": value "
                        << r.value.to_string() << " vs oracle "
                        << want.to_string());
      if (!(r.cut.capacity == want))
        FAIL("backend " << idx << " instance " << i << ": cut off");
      FlowState st;
      st.f = r.flow;
      std::string why;
      if (!is_feasible(in, st, &why))
        FAIL("backend " << idx << " instance " << i << ": " << why);
      if (!(flow_value(in, st) == want))
        FAIL("backend " << idx << " instance " << i << ": mapped value off");
    }
  }

  auto rng = sftest::rng_for(349);
  for (int i = 0; i < 12; ++i) {
    FlowInstance in =
        sftest::random_bounded_instance(rng, 60, 200, 1000000, 20);
    SolveResult r = solve_max_flow(in);
    CHECK(r.value == oracle::max_flow_value(in, caps_of(in)));
  }
}

TEST_CASE("repeat runs are byte-identical") {
  auto rng = sftest::rng_for(42);
  for (int i = 0; i < 6; ++i) {
    FlowInstance in = sftest::random_bounded_instance(rng, 20, 60, 1000, 25);
    EngineConfig cfg;
    cfg.backend = i % 2 ? ItcoBackend::ordered : ItcoBackend::italiano;
    SolveResult a = solve_max_flow(in, cfg);
    SolveResult b = solve_max_flow(in, cfg);
    CHECK(a.value == b.value);
    CHECK(a.metrics.iterations == b.metrics.iterations);
    CHECK(a.metrics.cover_arcs_total == b.metrics.cover_arcs_total);
    REQUIRE(a.flow.size() == b.flow.size());
    bool same = true;
    for (size_t e = 0; e < a.flow.size(); ++e)
      same = same && a.flow[e] == b.flow[e];
    CHECK(same);
    bool cuts = a.cut.in_s == b.cut.in_s;
    CHECK(cuts);
  }
}

TEST_CASE("every boundary of small runs is a checked valid state") {
  struct Shape {
    int stream, count, max_n, max_pairs;
    long long max_cap;
    int inf;
  };
  const Shape shapes[] = {
      {70, 16, 8, 18, 12, 25},      {100, 14, 16, 40, 1000, 20},
      {130, 10, 24, 70, 1000000, 20}, {160, 10, 24, 60, 6, 30},
      {190, 8, 12, 30, 1, 25},
  };
  for (const Shape& sh : shapes) {
    for (int i = 0; i < sh.count; ++i) {
      auto rng = sftest::rng_for(sh.stream + i);
      FlowInstance in = sftest::random_bounded_instance(
          rng, sh.max_n, sh.max_pairs, sh.max_cap, sh.inf);
      EngineConfig cfg;
      cfg.debug_level = i < 2 ? 2 : 1;
      drive_checked(in, cfg,
                    "stream " + std::to_string(sh.stream + i));
    }
  }
}

TEST_CASE("boundary checks hold on the other backends too") {
  int idx = 0;
  for (ItcoBackend bk :
       {ItcoBackend::oracle, ItcoBackend::treedepth, ItcoBackend::ordered}) {
    for (int i = 0; i < 10; ++i) {
      auto rng = sftest::rng_for(220 + 30 * idx + i);
      FlowInstance in = sftest::random_bounded_instance(rng, 16, 40, 200, 20);
      EngineConfig cfg;
      cfg.backend = bk;
      cfg.debug_level = 1;
      if (bk == ItcoBackend::treedepth) cfg.tree_parent = path_tree(in.n);
      drive_checked(in, cfg,
                    "backend " + std::to_string(idx) + " run " +
                        std::to_string(i));
    }
    ++idx;
  }
}
