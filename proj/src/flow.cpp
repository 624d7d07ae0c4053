#include "strongflow/flow.hpp"

#include <algorithm>
#include <queue>

namespace strongflow {

int FlowInstance::add_pair(int tail, int head, Value cap_fwd, Value cap_rev) {
  if (tail == head) throw flow_error("self-loop arc");
  if (tail < 0 || tail >= n || head < 0 || head >= n)
    throw flow_error("arc endpoint out of range");
  if (cap_fwd.is_negative() || cap_rev.is_negative())
    throw flow_error("negative capacity");
  int e = static_cast<int>(arcs.size());
  arcs.push_back({tail, head, std::move(cap_fwd)});
  arcs.push_back({head, tail, std::move(cap_rev)});
  if (static_cast<int>(out.size()) < n) out.resize(n);
  out[tail].push_back(e);
  out[head].push_back(e + 1);
  return e;
}

void FlowInstance::check_valid(bool freshly_loaded) const {
  if (n < 2) throw flow_error("instance needs at least two nodes");
  if (s == t || s < 0 || t < 0 || s >= n || t >= n)
    throw flow_error("bad source/sink");
  if (arcs.size() % 2 != 0) throw flow_error("arcs not paired");
  for (int e = 0; e < arc_count(); ++e) {
    const Arc& a = arcs[e];
    const Arc& b = arcs[rev(e)];
    if (a.tail == a.head) throw flow_error("self-loop arc");
    if (a.tail != b.head || a.head != b.tail)
      throw flow_error("reverse pairing broken at arc " + std::to_string(e));
    if (a.cap.is_negative()) throw flow_error("negative capacity");
  }
  if (freshly_loaded) {
    for (int e = 0; e < arc_count(); e += 2) {
      const Arc& a = arcs[e];
      if (a.cap.is_infinite() && arcs[e + 1].cap.is_infinite())
        throw flow_error(
            "input pair with infinite capacity in both directions");
      bool touches_s = a.tail == s || a.head == s;
      bool touches_t = a.tail == t || a.head == t;
      if (touches_s && touches_t)
        throw flow_error("input arc directly connecting source and sink");
    }
  }
}

Value residual(const FlowInstance& g, const FlowState& st, int e) {
  return g.arcs[e].cap - st.f[e] + st.f[FlowInstance::rev(e)];
}

void send_flow(const FlowInstance& g, FlowState& st, int e,
               const Value& amount) {
  if (amount.is_negative()) throw flow_error("send_flow: negative amount");
  if (amount.is_infinite()) throw flow_error("send_flow: infinite amount");
  if (amount.is_zero()) return;
  if (amount > residual(g, st, e))
    throw flow_error("send_flow: amount exceeds residual capacity");
  int r = FlowInstance::rev(e);
  Value undo = Value::min(st.f[r], amount);
  st.f[r] -= undo;
  st.f[e] += amount - undo;
}

Value excess(const FlowInstance& g, const FlowState& st, int node) {
  Value in(0), out(0);
  for (int e : g.out[node]) {
    out += st.f[e];
    in += st.f[FlowInstance::rev(e)];
  }
  return in - out;
}

Value flow_value(const FlowInstance& g, const FlowState& st) {
  return -excess(g, st, g.s);
}

bool is_feasible(const FlowInstance& g, const FlowState& st,
                 std::string* why) {
  if (st.f.size() != g.arcs.size()) {
    if (why) *why = "flow vector size mismatch";
    return false;
  }
  for (int e = 0; e < g.arc_count(); ++e) {
    if (st.f[e].is_negative() || st.f[e].is_infinite()) {
      if (why) *why = "flow out of range on arc " + std::to_string(e);
      return false;
    }
    if (st.f[e] > g.arcs[e].cap) {
      if (why) *why = "capacity exceeded on arc " + std::to_string(e);
      return false;
    }
  }
  for (int v = 0; v < g.n; ++v) {
    if (v == g.s || v == g.t) continue;
    if (!excess(g, st, v).is_zero()) {
      if (why) *why = "conservation violated at node " + std::to_string(v);
      return false;
    }
  }
  return true;
}

void extend_instance(FlowInstance& g,
                     const std::vector<std::pair<int, int>>& f_one,
                     const std::vector<std::pair<int, int>>& f_two) {
  for (auto [a, b] : f_one) g.add_pair(a, b, Value::infinity(), Value(0));
  for (auto [a, b] : f_two)
    g.add_pair(a, b, Value::infinity(), Value::infinity());
}

namespace {

// Peels path and cycle terms off a working copy of the flow. A walk keeps
// following positive-flow arcs; revisiting a walk node closes a cycle, and
// a walk from s that dead-ends at t is an s-t path. Interior nodes can
// never dead-end while the flow is conserved.
class SupportPeeler {
 public:
  SupportPeeler(const FlowInstance& g, FlowState& st)
      : g_(g), st_(st), cursor_(g.n, 0), walk_pos_(g.n, -1) {}

  void peel_from(int start, int path_sink, std::vector<FlowTerm>& terms) {
    while (walk_once(start, path_sink, terms)) {
    }
  }

 private:
  int next_support_arc(int v) {
    int& c = cursor_[v];
    while (c < static_cast<int>(g_.out[v].size())) {
      int e = g_.out[v][c];
      if (st_.f[e].is_positive()) return e;
      ++c;
    }
    return -1;
  }

  void extract(std::vector<int> arcs, bool cycle,
               std::vector<FlowTerm>& terms) {
    Value amount = st_.f[arcs[0]];
    for (int e : arcs) amount = Value::min(amount, st_.f[e]);
    for (int e : arcs) {
      st_.f[e] -= amount;
      cursor_[g_.arcs[e].tail] = 0;
    }
    terms.push_back({cycle, amount, std::move(arcs)});
  }

  // One walk attempt; true if a term was extracted.
  bool walk_once(int start, int path_sink, std::vector<FlowTerm>& terms) {
    walk_arcs_.clear();
    for (int v : walk_nodes_) walk_pos_[v] = -1;
    walk_nodes_.clear();
    int v = start;
    walk_pos_[v] = 0;
    walk_nodes_.push_back(v);
    for (;;) {
      int e = next_support_arc(v);
      if (e < 0) {
        // Dead end. A dead end at the designated sink turns the walk
        // into a path term; anywhere else the walk yields nothing
        // (empty walks at exhausted start nodes included).
        if (v == path_sink && !walk_arcs_.empty()) {
          extract(walk_arcs_, false, terms);
          return true;
        }
        return false;
      }
      int w = g_.arcs[e].head;
      if (walk_pos_[w] >= 0) {
        std::vector<int> cyc(walk_arcs_.begin() + walk_pos_[w],
                             walk_arcs_.end());
        cyc.push_back(e);
        extract(std::move(cyc), true, terms);
        return true;
      }
      walk_arcs_.push_back(e);
      walk_pos_[w] = static_cast<int>(walk_arcs_.size());
      walk_nodes_.push_back(w);
      v = w;
    }
  }

  const FlowInstance& g_;
  FlowState& st_;
  std::vector<int> cursor_;
  std::vector<int> walk_arcs_;
  std::vector<int> walk_nodes_;
  std::vector<int> walk_pos_;
};

}  // namespace

std::vector<FlowTerm> decompose(const FlowInstance& g, const FlowState& st) {
  std::string why;
  if (!is_feasible(g, st, &why)) throw flow_error("decompose: " + why);
  FlowState work = st;
  std::vector<FlowTerm> terms;
  SupportPeeler peeler(g, work);
  // First everything reachable from s: s-t paths and cycles through s.
  peeler.peel_from(g.s, g.t, terms);
  // The rest is a circulation; peel cycles from wherever support remains.
  for (int v = 0; v < g.n; ++v) peeler.peel_from(v, -1, terms);
  for (int e = 0; e < g.arc_count(); ++e) {
    if (!work.f[e].is_zero())
      throw flow_error("decompose: leftover flow after peeling");
  }
  std::stable_partition(terms.begin(), terms.end(),
                        [](const FlowTerm& t) { return !t.cycle; });
  return terms;
}

namespace {

// Directed cycle in the support of f, as arc ids; empty if none.
std::vector<int> find_support_cycle(const FlowInstance& g,
                                    const FlowState& st) {
  std::vector<int> color(g.n, 0);  // 0 fresh, 1 on stack, 2 done
  std::vector<int> via(g.n, -1);
  std::vector<std::pair<int, int>> stack;  // (node, out index)
  for (int root = 0; root < g.n; ++root) {
    if (color[root] != 0) continue;
    stack.push_back({root, 0});
    color[root] = 1;
    while (!stack.empty()) {
      int v = stack.back().first;
      int idx = stack.back().second;
      if (idx >= static_cast<int>(g.out[v].size())) {
        color[v] = 2;
        stack.pop_back();
        continue;
      }
      stack.back().second = idx + 1;
      int e = g.out[v][idx];
      if (!st.f[e].is_positive()) continue;
      int w = g.arcs[e].head;
      if (color[w] == 1) {
        std::vector<int> cyc{e};
        for (int x = v; x != w; x = g.arcs[via[x]].tail) cyc.push_back(via[x]);
        std::reverse(cyc.begin(), cyc.end());
        return cyc;
      }
      if (color[w] == 0) {
        color[w] = 1;
        via[w] = e;
        stack.push_back({w, 0});
      }
    }
  }
  return {};
}

bool is_interior(const FlowInstance& g, const FlowState& st, int e) {
  return st.f[e].is_positive() && st.f[e] < g.arcs[e].cap;
}

// An undirected cycle or an s-t connection among interior arcs, as
// (arc id, +1/-1 traversal direction) steps; empty if the interior arcs
// already form a forest separating s from t.
std::vector<std::pair<int, int>> find_pivot_walk(const FlowInstance& g,
                                                 const FlowState& st,
                                                 bool* is_path) {
  std::vector<std::vector<std::pair<int, int>>> inc(g.n);
  for (int e = 0; e < g.arc_count(); ++e) {
    if (!is_interior(g, st, e)) continue;
    inc[g.arcs[e].tail].push_back({e, +1});
    inc[g.arcs[e].head].push_back({e, -1});
  }
  std::vector<int> state(g.n, 0);
  std::vector<int> parent_node(g.n, -1);
  std::vector<std::pair<int, int>> parent_arc(g.n, {-1, 0});
  std::vector<std::pair<int, int>> stack;
  for (int root = 0; root < g.n; ++root) {
    if (state[root] != 0) continue;
    stack.push_back({root, 0});
    state[root] = 1;
    while (!stack.empty()) {
      int v = stack.back().first;
      int idx = stack.back().second;
      if (idx >= static_cast<int>(inc[v].size())) {
        state[v] = 2;
        stack.pop_back();
        continue;
      }
      stack.back().second = idx + 1;
      auto [e, dir] = inc[v][idx];
      if (e == parent_arc[v].first) continue;  // not back along the tree arc
      int w = dir > 0 ? g.arcs[e].head : g.arcs[e].tail;
      if (state[w] >= 1) {
        if (state[w] == 2) continue;  // cross link into a finished branch
        // Undirected cycle: tree chain v..w plus the closing arc.
        std::vector<std::pair<int, int>> walk;
        for (int x = v; x != w; x = parent_node[x])
          walk.push_back(parent_arc[x]);
        std::reverse(walk.begin(), walk.end());
        walk.push_back({e, dir});
        *is_path = false;
        return walk;
      }
      state[w] = 1;
      parent_node[w] = v;
      parent_arc[w] = {e, dir};
      stack.push_back({w, 0});
    }
  }
  // No cycle: the interior arcs form a forest. Check s-t connectivity.
  std::vector<char> seen(g.n, 0);
  std::vector<int> order{g.s};
  std::vector<int> prev(g.n, -1);
  std::vector<std::pair<int, int>> how(g.n, {-1, 0});
  seen[g.s] = 1;
  for (size_t qi = 0; qi < order.size(); ++qi) {
    int v = order[qi];
    for (auto [e, dir] : inc[v]) {
      int w = dir > 0 ? g.arcs[e].head : g.arcs[e].tail;
      if (seen[w]) continue;
      seen[w] = 1;
      how[w] = {e, dir};
      prev[w] = v;
      order.push_back(w);
    }
  }
  if (seen[g.t]) {
    std::vector<std::pair<int, int>> walk;
    for (int x = g.t; x != g.s; x = prev[x]) walk.push_back(how[x]);
    std::reverse(walk.begin(), walk.end());
    *is_path = true;
    return walk;
  }
  return {};
}

// Largest theta for +theta on forward steps, -theta on backward steps.
Value max_push(const FlowInstance& g, const FlowState& st,
               const std::vector<std::pair<int, int>>& walk) {
  Value theta = Value::infinity();
  for (auto [e, dir] : walk) {
    if (dir > 0) {
      if (g.arcs[e].cap.is_finite())
        theta = Value::min(theta, g.arcs[e].cap - st.f[e]);
    } else {
      theta = Value::min(theta, st.f[e]);
    }
  }
  return theta;
}

void apply_push(FlowState& st, const std::vector<std::pair<int, int>>& walk,
                const Value& theta) {
  for (auto [e, dir] : walk) {
    if (dir > 0)
      st.f[e] += theta;
    else
      st.f[e] -= theta;
  }
}

}  // namespace

void to_acyclic_basic(const FlowInstance& g, FlowState& st) {
  std::string why;
  if (!is_feasible(g, st, &why)) throw flow_error("to_acyclic_basic: " + why);
  // Cancel directed support cycles. Flow into s and out of t lies only on
  // such cycles, so this also clears it.
  for (;;) {
    std::vector<int> cyc = find_support_cycle(g, st);
    if (cyc.empty()) break;
    Value amount = st.f[cyc[0]];
    for (int e : cyc) amount = Value::min(amount, st.f[e]);
    for (int e : cyc) st.f[e] -= amount;
  }
  // Pivot interior arcs until they form a forest separating s from t.
  // Pushes only move flow on arcs already in the support and the support
  // never grows, so no directed cycle can reappear.
  for (;;) {
    bool is_path = false;
    std::vector<std::pair<int, int>> walk = find_pivot_walk(g, st, &is_path);
    if (walk.empty()) break;
    if (is_path) {
      // Push toward t, never away: keeps the value nondecreasing. An
      // unbounded push would mean an infinite-capacity s-t route.
      Value theta = max_push(g, st, walk);
      if (theta.is_infinite())
        throw flow_error("to_acyclic_basic: unbounded augmenting path");
      apply_push(st, walk, theta);
    } else {
      Value fwd = max_push(g, st, walk);
      if (fwd.is_finite()) {
        apply_push(st, walk, fwd);
      } else {
        std::vector<std::pair<int, int>> flipped;
        flipped.reserve(walk.size());
        for (auto [e, dir] : walk) flipped.push_back({e, -dir});
        Value bwd = max_push(g, st, flipped);
        if (bwd.is_infinite())
          throw flow_error("to_acyclic_basic: degenerate pivot cycle");
        apply_push(st, flipped, bwd);
      }
    }
  }
}

Cut min_cut_from_flow(const FlowInstance& g, const FlowState& st) {
  Cut cut;
  cut.in_s.assign(g.n, 0);
  std::queue<int> q;
  q.push(g.s);
  cut.in_s[g.s] = 1;
  while (!q.empty()) {
    int v = q.front();
    q.pop();
    for (int e : g.out[v]) {
      int w = g.arcs[e].head;
      if (cut.in_s[w]) continue;
      if (residual(g, st, e).is_positive()) {
        cut.in_s[w] = 1;
        q.push(w);
      }
    }
  }
  if (cut.in_s[g.t])
    throw flow_error("min_cut_from_flow: flow is not maximum");
  cut.capacity = Value(0);
  for (int e = 0; e < g.arc_count(); ++e) {
    const Arc& a = g.arcs[e];
    if (cut.in_s[a.tail] && !cut.in_s[a.head]) cut.capacity += a.cap;
  }
  return cut;
}

bool is_bounded(const FlowInstance& g) {
  std::vector<char> seen(g.n, 0);
  std::queue<int> q;
  q.push(g.s);
  seen[g.s] = 1;
  while (!q.empty()) {
    int v = q.front();
    q.pop();
    for (int e : g.out[v]) {
      if (!g.arcs[e].cap.is_infinite()) continue;
      int w = g.arcs[e].head;
      if (!seen[w]) {
        seen[w] = 1;
        q.push(w);
      }
    }
  }
  return !seen[g.t];
}

void normalize_input(FlowInstance& g) {
  g.check_valid(true);
  if (!is_bounded(g))
    throw flow_error("unbounded instance: infinite-capacity s-t path");
  std::vector<char> has_to_s(g.n, 0), has_from_t(g.n, 0);
  for (int e = 0; e < g.arc_count(); ++e) {
    const Arc& a = g.arcs[e];
    if (!a.cap.is_infinite()) continue;
    if (a.head == g.s) has_to_s[a.tail] = 1;
    if (a.tail == g.t) has_from_t[a.head] = 1;
  }
  for (int i = 0; i < g.n; ++i) {
    if (i == g.s || i == g.t) continue;
    if (!has_to_s[i]) g.add_pair(i, g.s, Value::infinity(), Value(0));
    if (!has_from_t[i]) g.add_pair(g.t, i, Value::infinity(), Value(0));
  }
}

}  // namespace strongflow
