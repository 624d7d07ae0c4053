#include "strongflow/oracle.hpp"

#include <algorithm>
#include <deque>

namespace strongflow {
namespace oracle {

FlowInstance with_caps(const FlowInstance& g, const std::vector<Value>& cap) {
  if ((int)cap.size() != g.arc_count())
    throw flow_error("with_caps: capacity vector size mismatch");
  FlowInstance out = g;
  for (int e = 0; e < g.arc_count(); ++e) {
    if (cap[e].is_negative()) throw flow_error("with_caps: negative capacity");
    out.arcs[e].cap = cap[e];
  }
  return out;
}

std::vector<Value> residual_caps(const FlowInstance& g, const FlowState& st) {
  std::vector<Value> out(g.arc_count(), Value(0));
  for (int e = 0; e < g.arc_count(); ++e) out[e] = residual(g, st, e);
  return out;
}

FlowState max_flow(const FlowInstance& g, const std::vector<Value>& cap) {
  FlowInstance h = with_caps(g, cap);
  FlowState st(h);
  std::vector<int> via(h.n);
  for (;;) {
    std::fill(via.begin(), via.end(), -1);
    via[h.s] = -2;
    std::deque<int> queue{h.s};
    while (!queue.empty() && via[h.t] == -1) {
      int v = queue.front();
      queue.pop_front();
      for (int a : h.out[v]) {
        int to = h.arcs[a].head;
        if (via[to] != -1 || residual(h, st, a).is_zero()) continue;
        via[to] = a;
        queue.push_back(to);
      }
    }
    if (via[h.t] == -1) break;
    Value bottleneck = Value::infinity();
    for (int v = h.t; v != h.s; v = h.arcs[via[v]].tail)
      bottleneck = Value::min(bottleneck, residual(h, st, via[v]));
    if (bottleneck.is_infinite())
      throw flow_error("max_flow: unbounded instance");
    for (int v = h.t; v != h.s; v = h.arcs[via[v]].tail)
      send_flow(h, st, via[v], bottleneck);
  }
  return st;
}

Value max_flow_value(const FlowInstance& g, const std::vector<Value>& cap) {
  FlowState st = max_flow(g, cap);
  return flow_value(g, st);
}

namespace {

void enumerate_paths(const FlowInstance& g, const std::vector<Value>& cap,
                     int v, std::vector<char>& on_path, const Value& so_far,
                     int required_arc, bool used_required, Value& best) {
  if (v == g.t) {
    if (required_arc < 0 || used_required)
      best = Value::max(best, so_far);
    return;
  }
  on_path[v] = 1;
  for (int a : g.out[v]) {
    if (cap[a].is_zero()) continue;
    int to = g.arcs[a].head;
    if (on_path[to]) continue;
    enumerate_paths(g, cap, to, on_path, Value::min(so_far, cap[a]),
                    required_arc, used_required || a == required_arc, best);
  }
  on_path[v] = 0;
}

}  // namespace

Value max_cap_path_brute(const FlowInstance& g, const std::vector<Value>& cap) {
  std::vector<char> on_path(g.n, 0);
  Value best(0);
  enumerate_paths(g, cap, g.s, on_path, Value::infinity(), -1, false, best);
  return best;
}

bool arc_on_bottleneck_path(const FlowInstance& g,
                            const std::vector<Value>& cap, int e,
                            const Value& b) {
  std::vector<char> on_path(g.n, 0);
  Value best(0);
  enumerate_paths(g, cap, g.s, on_path, Value::infinity(), e, false, best);
  if (best < b) return false;
  // Some path through e reaches bottleneck >= b; it attains exactly b only
  // if e itself caps it.
  return cap[e] == b;
}

bool safe_capacities(const FlowInstance& g, const FlowState& f,
                     const std::vector<Value>& r, std::string* why) {
  std::vector<Value> res = residual_caps(g, f);
  for (int e = 0; e < g.arc_count(); ++e) {
    if (r[e].is_negative()) {
      if (why) *why = "negative entry on arc " + std::to_string(e);
      return false;
    }
    if (r[e] > res[e]) {
      if (why) *why = "exceeds residual capacity on arc " + std::to_string(e);
      return false;
    }
  }
  if (max_flow_value(g, r) != max_flow_value(g, res)) {
    if (why) *why = "residual max-flow value not preserved";
    return false;
  }
  return true;
}

std::vector<std::vector<char>> closure(
    int n, const std::vector<std::pair<int, int>>& arcs) {
  std::vector<std::vector<char>> reach(n, std::vector<char>(n, 0));
  for (auto& [a, b] : arcs)
    if (a != b) reach[a][b] = 1;
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i) {
      if (!reach[i][k]) continue;
      for (int j = 0; j < n; ++j)
        if (reach[k][j]) reach[i][j] = 1;
    }
  for (int i = 0; i < n; ++i) reach[i][i] = 0;
  return reach;
}

std::vector<char> reachable_from(int n,
                                 const std::vector<std::pair<int, int>>& arcs,
                                 int src) {
  std::vector<std::vector<int>> out(n);
  for (auto& [a, b] : arcs) out[a].push_back(b);
  std::vector<char> seen(n, 0);
  seen[src] = 1;
  std::deque<int> queue{src};
  while (!queue.empty()) {
    int v = queue.front();
    queue.pop_front();
    for (int to : out[v])
      if (!seen[to]) {
        seen[to] = 1;
        queue.push_back(to);
      }
  }
  return seen;
}

bool check_cover(int n, const std::vector<std::pair<int, int>>& arcs,
                 const std::vector<int>& s, const std::vector<int>& v_out,
                 const std::vector<std::pair<int, int>>& e_out,
                 std::string* why) {
  std::vector<char> in_v_out(n, 0);
  for (int v : v_out) {
    if (v < 0 || v >= n) {
      if (why) *why = "cover node out of range";
      return false;
    }
    in_v_out[v] = 1;
  }
  for (int v : s)
    if (v < 0 || v >= n || !in_v_out[v]) {
      if (why) *why = "queried node missing from cover nodes";
      return false;
    }
  std::vector<std::vector<char>> full = closure(n, arcs);
  for (auto& [a, b] : e_out) {
    if (a < 0 || a >= n || b < 0 || b >= n || !in_v_out[a] || !in_v_out[b]) {
      if (why) *why = "cover arc endpoint outside cover nodes";
      return false;
    }
    if (a == b || !full[a][b]) {
      if (why)
        *why = "cover arc (" + std::to_string(a) + "," + std::to_string(b) +
               ") not in the closure";
      return false;
    }
  }
  std::vector<std::vector<char>> small = closure(n, e_out);
  for (int a : s)
    for (int b : s)
      if (a != b && full[a][b] != small[a][b]) {
        if (why)
          *why = "reachability of (" + std::to_string(a) + "," +
                 std::to_string(b) + ") not preserved";
        return false;
      }
  return true;
}

std::vector<Value> wit_route_slow(const WitnessList& list,
                                  const std::vector<Value>& f,
                                  const std::vector<int>& reverse_entries) {
  int k = list.size();
  if ((int)f.size() != k)
    throw witness_error("wit_route_slow: flow size mismatch");
  std::vector<char> in_r(k, 0);
  for (int i : reverse_entries) {
    const WitnessList::Entry& en = list.entry(i);
    if (en.w != en.b || list.index_of(en.b, en.a) >= i ||
        list.index_of(en.b, en.a) < 0)
      throw witness_error("wit_route_slow: invalid reverse entry");
    in_r[i] = 1;
  }
  std::vector<Value> g = f;
  for (int i = k - 1; i >= 0; --i) {
    const WitnessList::Entry& en = list.entry(i);
    if (in_r[i]) {
      g[list.index_of(en.b, en.a)] -= g[i];
      g[i] = Value(0);
    } else if (en.w != en.b) {
      for (int idx : list.walk(en.a, en.b)) g[idx] += g[i];
      g[i] = Value(0);
    }
  }
  return g;
}

}  // namespace oracle
}  // namespace strongflow
