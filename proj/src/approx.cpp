#include "strongflow/approx.hpp"

#include <algorithm>
#include <deque>
#include <queue>

namespace strongflow {

MaxCapResult max_cap_path(const FlowInstance& g,
                          const std::vector<Value>& cap) {
  if ((int)cap.size() != g.arc_count())
    throw flow_error("max_cap_path: capacity vector size mismatch");
  // label[v] = widest bottleneck of any s-v path found so far.
  std::vector<Value> label(g.n, Value(0));
  std::vector<int> via(g.n, -1);
  std::vector<char> done(g.n, 0);
  label[g.s] = Value::infinity();
  // Max-heap keyed by label at push time; stale entries are skipped.
  using Item = std::pair<Value, int>;
  std::priority_queue<Item> heap;
  heap.push({label[g.s], g.s});
  while (!heap.empty()) {
    auto [key, v] = heap.top();
    heap.pop();
    if (done[v] || key < label[v]) continue;
    done[v] = 1;
    if (v == g.t) break;
    for (int a : g.out[v]) {
      int to = g.arcs[a].head;
      if (done[to]) continue;
      Value through = Value::min(label[v], cap[a]);
      if (through > label[to]) {
        label[to] = through;
        via[to] = a;
        heap.push({through, to});
      }
    }
  }
  MaxCapResult out;
  out.bottleneck = label[g.t];
  if (out.bottleneck.is_zero()) return out;
  if (out.bottleneck.is_infinite())
    throw flow_error("max_cap_path: all-infinite s-t path");
  for (int v = g.t; v != g.s; v = g.arcs[via[v]].tail) {
    int a = via[v];
    if (cap[a] == out.bottleneck && (out.arc < 0 || a < out.arc)) out.arc = a;
  }
  return out;
}

FlowState fast_max_flow(const FlowInstance& g, const std::vector<Value>& w) {
  if ((int)w.size() != g.arc_count())
    throw flow_error("fast_max_flow: weight vector size mismatch");
  for (const Value& x : w) {
    if (x.is_negative() || x.is_infinite() || x.floor() != x)
      throw flow_error("fast_max_flow: weights must be finite integers");
  }
  FlowInstance h = g;
  for (int e = 0; e < g.arc_count(); ++e) h.arcs[e].cap = w[e];
  FlowState st(h);
  std::vector<int> level(h.n), it(h.n);
  auto bfs = [&]() {
    std::fill(level.begin(), level.end(), -1);
    level[h.s] = 0;
    std::deque<int> queue{h.s};
    while (!queue.empty()) {
      int v = queue.front();
      queue.pop_front();
      for (int a : h.out[v]) {
        int to = h.arcs[a].head;
        if (level[to] >= 0 || !residual(h, st, a).is_positive()) continue;
        level[to] = level[v] + 1;
        queue.push_back(to);
      }
    }
    return level[h.t] >= 0;
  };
  // Blocking-flow DFS with an explicit stack of (node, picked arc).
  std::vector<std::pair<int, int>> path;
  while (bfs()) {
    std::fill(it.begin(), it.end(), 0);
    for (;;) {
      int v = path.empty() ? h.s : h.arcs[path.back().second].head;
      if (v == h.t) {
        Value push = Value::infinity();
        for (auto& pa : path) push = Value::min(push, residual(h, st, pa.second));
        for (auto& pa : path) send_flow(h, st, pa.second, push);
        // Retreat to just below the first saturated arc.
        size_t keep = 0;
        while (keep < path.size() &&
               residual(h, st, path[keep].second).is_positive())
          ++keep;
        path.resize(keep);
        continue;
      }
      bool advanced = false;
      for (int& i = it[v]; i < (int)h.out[v].size(); ++i) {
        int a = h.out[v][i];
        if (level[h.arcs[a].head] != level[v] + 1 ||
            !residual(h, st, a).is_positive())
          continue;
        path.push_back({v, a});
        advanced = true;
        break;
      }
      if (advanced) continue;
      if (path.empty()) break;
      level[v] = -1;  // dead end in this phase
      path.pop_back();
    }
    path.clear();
  }
  return st;
}

std::vector<Value> integer_weights(const FlowInstance& g,
                                   const std::vector<Value>& u,
                                   const Value& accuracy, bool division_free) {
  Value m((long long)g.arc_count());
  MaxCapResult widest = max_cap_path(g, u);
  if (widest.bottleneck.is_zero())
    throw flow_error("integer_weights: instance value is zero");
  Value clip = m * m * m * accuracy;           // m^3 M
  Value scale = m * m * accuracy;              // u_e / delta = u_e * m^2 M / u_bar
  std::vector<Value> w(g.arc_count(), Value(0));
  for (int e = 0; e < g.arc_count(); ++e) {
    if (u[e].is_infinite()) {
      w[e] = clip;
      continue;
    }
    if (division_free) {
      // Largest k with k * u_bar <= m^2 M * u_e, capped at m^3 M.
      Value target = scale * u[e];
      Value lo(0), hi = clip;
      while (lo < hi) {
        Value mid = ((lo + hi + Value(1)) / Value(2)).floor();
        if (mid * widest.bottleneck <= target)
          lo = mid;
        else
          hi = mid - Value(1);
      }
      w[e] = lo;
    } else {
      w[e] = Value::min((u[e] * scale / widest.bottleneck).floor(), clip);
    }
  }
  return w;
}

ApproxResult approx_flow(const FlowInstance& g, const std::vector<Value>& u,
                         const Value& accuracy, bool division_free) {
  if (!accuracy.is_positive() || accuracy.is_infinite())
    throw flow_error("approx_flow: accuracy must be positive and finite");
  ApproxResult out{FlowState(g), -1, accuracy};
  MaxCapResult widest = max_cap_path(g, u);
  if (widest.bottleneck.is_zero()) return out;  // value 0: zero flow, no arc

  Value m((long long)g.arc_count());
  Value delta = widest.bottleneck / (m * m * accuracy);
  std::vector<Value> w = integer_weights(g, u, accuracy, division_free);
  FlowState integral = fast_max_flow(g, w);
  for (int e = 0; e < g.arc_count(); ++e) out.flow.f[e] = integral.f[e] * delta;

  // The basic-acyclic conversion reads capacities off the instance, so give
  // it a copy carrying u.
  FlowInstance h = g;
  for (int e = 0; e < g.arc_count(); ++e) h.arcs[e].cap = u[e];
  to_acyclic_basic(h, out.flow);

  std::vector<Value> res(g.arc_count(), Value(0));
  for (int e = 0; e < g.arc_count(); ++e)
    res[e] = u[e] - out.flow.f[e] + out.flow.f[FlowInstance::rev(e)];
  MaxCapResult cert = max_cap_path(g, res);
  out.certificate_arc = cert.arc;
  return out;
}

}  // namespace strongflow
