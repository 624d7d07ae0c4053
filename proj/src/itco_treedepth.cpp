#include "strongflow/itco.hpp"

#include <algorithm>

namespace strongflow {

namespace {

struct ArcItem {
  int tail;
  int head;
};

}  // namespace

void TreeDepthItco::tc_init(int) {
  throw itco_error("tc_init: tree backend needs tc_init_tree");
}

void TreeDepthItco::tc_init_tree(const std::vector<int>& parent) {
  int n = (int)parent.size();
  if (n <= 0) throw itco_error("tc_init_tree: empty tree");
  int root = -1;
  for (int v = 0; v < n; ++v) {
    if (parent[v] == -1) {
      if (root >= 0) throw itco_error("tc_init_tree: two roots");
      root = v;
    } else if (parent[v] < 0 || parent[v] >= n || parent[v] == v) {
      throw itco_error("tc_init_tree: bad parent link");
    }
  }
  if (root < 0) throw itco_error("tc_init_tree: no root");

  n_ = n;
  parent_ = parent;
  depth_.assign(n_, 0);
  anc_.assign(n_, {});
  depth_[root] = 1;
  // Depths by walking parent chains, memoized; a chain longer than n nodes
  // can only mean a parent cycle.
  for (int v = 0; v < n_; ++v) {
    std::vector<int> chain;
    int x = v;
    while (depth_[x] == 0) {
      chain.push_back(x);
      x = parent_[x];
      if ((int)chain.size() > n_)
        throw itco_error("tc_init_tree: parent links form a cycle");
    }
    for (auto it = chain.rbegin(); it != chain.rend(); ++it)
      depth_[*it] = depth_[parent_[*it]] + 1;
  }
  depth_bound_ = 0;
  for (int v = 0; v < n_; ++v) {
    depth_bound_ = std::max(depth_bound_, depth_[v]);
    anc_[v].resize(depth_[v]);
    int x = v;
    for (int d = depth_[v]; d >= 1; --d) {
      anc_[v][d - 1] = x;
      x = parent_[x];
    }
  }

  to_anc_.assign(n_, {});
  from_anc_.assign(n_, {});
  for (int v = 0; v < n_; ++v) {
    to_anc_[v].assign(depth_[v], false);
    from_anc_[v].assign(depth_[v], false);
  }
  desc_out_.assign(n_, {});
  desc_in_.assign(n_, {});
  cov_.assign(n_, {});
  arcs_.clear();
  list_ = WitnessList(n_);
  visit_steps_ = 0;
  extensions_ = 0;
}

bool TreeDepthItco::is_tree_ancestor(int a, int b) const {
  return depth_[a] <= depth_[b] && anc_[b][depth_[a] - 1] == a;
}

bool TreeDepthItco::star(int a, int b) const {
  if (a == b) return false;
  if (depth_[a] < depth_[b] && anc_[b][depth_[a] - 1] == a)
    return from_anc_[b][depth_[a] - 1];
  if (depth_[b] < depth_[a] && anc_[a][depth_[b] - 1] == b)
    return to_anc_[a][depth_[b] - 1];
  return false;
}

void TreeDepthItco::set_star(int a, int b) {
  if (depth_[a] < depth_[b]) {
    from_anc_[b][depth_[a] - 1] = true;
    cov_[b].emplace_back(a, b);
  } else {
    to_anc_[a][depth_[b] - 1] = true;
    cov_[a].emplace_back(a, b);
  }
}

// Per new arc (u, v) and per common tree ancestor a of u and v, extends
// the reachability a keeps of its own subtree: forward from a through the
// arc (a's out-tree) and backward to a through the arc (a's in-tree). The
// deeper of u, v equals some a; that node's trees grow directly through
// the arcs leaving v or entering u.
void TreeDepthItco::tc_add(const std::vector<std::pair<int, int>>& arcs) {
  std::vector<ArcItem> out_stack, in_stack;
  for (auto [u, v] : arcs) {
    if (u < 0 || u >= n_ || v < 0 || v >= n_)
      throw itco_error("tc_add: node out of range");
    if (u == v) throw itco_error("tc_add: self-loop");
    if (!is_tree_ancestor(u, v) && !is_tree_ancestor(v, u))
      throw itco_error("tc_add: arc does not respect the tree");
    if (star(u, v)) continue;

    arcs_.emplace_back(u, v);
    set_star(u, v);
    list_.append(u, v, v);

    int shallow = depth_[u] <= depth_[v] ? u : v;
    for (int a : anc_[shallow]) {
      desc_out_[a][u].push_back(v);
      desc_in_[a][v].push_back(u);

      out_stack.clear();
      in_stack.clear();
      if (a == u) {
        // a's out-tree gained v via the arc itself.
        auto it = desc_out_[a].find(v);
        if (it != desc_out_[a].end())
          for (int w : it->second) out_stack.push_back({v, w});
      } else {
        out_stack.push_back({u, v});
      }
      if (a == v) {
        // a's in-tree gained u via the arc itself.
        auto it = desc_in_[a].find(u);
        if (it != desc_in_[a].end())
          for (int w : it->second) in_stack.push_back({w, u});
      } else {
        in_stack.push_back({u, v});
      }

      while (!out_stack.empty()) {
        ArcItem arc = out_stack.back();
        out_stack.pop_back();
        ++visit_steps_;
        if (!reaches(a, arc.tail) || reaches(a, arc.head)) continue;
        set_star(a, arc.head);
        list_.append(a, arc.head, arc.tail);
        ++extensions_;
        auto it = desc_out_[a].find(arc.head);
        if (it != desc_out_[a].end())
          for (int w : it->second) out_stack.push_back({arc.head, w});
      }
      while (!in_stack.empty()) {
        ArcItem arc = in_stack.back();
        in_stack.pop_back();
        ++visit_steps_;
        if (!reaches(arc.head, a) || reaches(arc.tail, a)) continue;
        set_star(arc.tail, a);
        list_.append(arc.tail, a, arc.head);
        ++extensions_;
        auto it = desc_in_[a].find(arc.tail);
        if (it != desc_in_[a].end())
          for (int w : it->second) in_stack.push_back({w, arc.tail});
      }
    }
  }
}

// Union of the root paths of S and of the reachability pairs stored at the
// nodes of S; every path between nodes of S must cross their root paths,
// which makes those pairs a cover.
Cover TreeDepthItco::tc_cover(const std::vector<int>& s) {
  Cover cover;
  std::vector<int> nodes;
  for (int v : s) {
    if (v < 0 || v >= n_) throw itco_error("tc_cover: node out of range");
    nodes.push_back(v);
  }
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());

  std::vector<char> seen(n_, 0);
  for (int v : nodes) {
    for (int a : anc_[v])
      if (!seen[a]) {
        seen[a] = 1;
        cover.nodes.push_back(a);
      }
    cover.arcs.insert(cover.arcs.end(), cov_[v].begin(), cov_[v].end());
  }
  std::sort(cover.nodes.begin(), cover.nodes.end());
  return cover;
}

std::vector<std::pair<std::string, long long>> TreeDepthItco::counters()
    const {
  return {{"visit_steps", visit_steps_}, {"extensions", extensions_}};
}

}  // namespace strongflow
