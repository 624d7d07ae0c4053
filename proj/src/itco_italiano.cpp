#include "strongflow/itco.hpp"

#include <algorithm>

namespace strongflow {

namespace {

struct OutItem {
  int a;  // tree source being extended
  int u;  // arc tail
  int v;  // arc head
};

}  // namespace

void ItalianoItco::tc_init(int node_count) {
  if (node_count < 0) throw itco_error("tc_init: negative node count");
  n_ = node_count;
  star_.assign((size_t)n_ * n_, false);
  out_.assign(n_, {});
  arcs_.clear();
  list_ = WitnessList(n_);
  visit_steps_ = 0;
  extensions_ = 0;
}

// Per new arc (u, v), every node a whose out-tree already contains u grows
// its tree through v and onward along v's out-arcs; u's own tree does the
// same directly. Arcs whose pair is already reachable are dropped: they
// change no reachability and would duplicate witness-list pairs.
void ItalianoItco::tc_add(const std::vector<std::pair<int, int>>& arcs) {
  std::vector<OutItem> stack;
  for (auto [u, v] : arcs) {
    if (u < 0 || u >= n_ || v < 0 || v >= n_)
      throw itco_error("tc_add: node out of range");
    if (u == v) throw itco_error("tc_add: self-loop");
    if (star(u, v)) continue;

    star_[(size_t)u * n_ + v] = true;
    arcs_.emplace_back(u, v);
    list_.append(u, v, v);
    for (int a = 0; a < n_; ++a)
      if (a != u) stack.push_back({a, u, v});
    // The new arc extends u's own tree; its pair is already recorded, so
    // only the continuation through v's out-arcs remains.
    for (int w : out_[v]) stack.push_back({u, v, w});
    out_[u].push_back(v);

    while (!stack.empty()) {
      OutItem it = stack.back();
      stack.pop_back();
      ++visit_steps_;
      if (!reaches(it.a, it.u) || reaches(it.a, it.v)) continue;
      star_[(size_t)it.a * n_ + it.v] = true;
      list_.append(it.a, it.v, it.u);
      ++extensions_;
      for (int w : out_[it.v]) stack.push_back({it.a, it.v, w});
    }
  }
}

// Closure restricted to S when that is the smaller graph, otherwise the
// arc set itself (whose closure trivially preserves all reachability).
Cover ItalianoItco::tc_cover(const std::vector<int>& s) {
  Cover cover;
  std::vector<int> nodes;
  for (int v : s) {
    if (v < 0 || v >= n_) throw itco_error("tc_cover: node out of range");
    nodes.push_back(v);
  }
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());

  if ((long long)nodes.size() * (long long)nodes.size() <=
      (long long)arcs_.size()) {
    cover.nodes = std::move(nodes);
    for (int a : cover.nodes)
      for (int b : cover.nodes)
        if (a != b && star(a, b)) cover.arcs.emplace_back(a, b);
    return cover;
  }
  cover.nodes.resize(n_);
  for (int v = 0; v < n_; ++v) cover.nodes[v] = v;
  cover.arcs = arcs_;
  return cover;
}

std::vector<std::pair<std::string, long long>> ItalianoItco::counters() const {
  return {{"visit_steps", visit_steps_}, {"extensions", extensions_}};
}

}  // namespace strongflow
