#include "strongflow/itco.hpp"

#include <algorithm>
#include <deque>
#include <tuple>

namespace strongflow {

Itco::~Itco() = default;

void Itco::tc_init_ordered(int, const std::vector<Value>&) {
  throw itco_error("tc_init_ordered: backend has no node ordering");
}

void Itco::tc_reorder(const std::vector<int>&, const std::vector<Value>&) {
  throw itco_error("tc_reorder: backend has no node ordering");
}

void Itco::tc_init_tree(const std::vector<int>&) {
  throw itco_error("tc_init_tree: backend has no representing tree");
}

std::vector<std::pair<std::string, long long>> Itco::counters() const {
  return {};
}

ItcoBackend itco_backend_from_name(const std::string& name) {
  if (name == "oracle") return ItcoBackend::oracle;
  if (name == "italiano") return ItcoBackend::italiano;
  if (name == "treedepth") return ItcoBackend::treedepth;
  if (name == "ordered") return ItcoBackend::ordered;
  throw itco_error("unknown cover backend '" + name + "'");
}

const char* itco_backend_name(ItcoBackend kind) {
  switch (kind) {
    case ItcoBackend::oracle: return "oracle";
    case ItcoBackend::italiano: return "italiano";
    case ItcoBackend::treedepth: return "treedepth";
    case ItcoBackend::ordered: return "ordered";
  }
  throw itco_error("unknown cover backend");
}

std::unique_ptr<Itco> make_itco(ItcoBackend kind) {
  switch (kind) {
    case ItcoBackend::oracle: return std::make_unique<OracleItco>();
    case ItcoBackend::italiano: return std::make_unique<ItalianoItco>();
    case ItcoBackend::treedepth: return std::make_unique<TreeDepthItco>();
    case ItcoBackend::ordered: return std::make_unique<OrderedItco>();
  }
  throw itco_error("unknown cover backend");
}

namespace {

void check_node(int n, int v, const char* where) {
  if (v < 0 || v >= n)
    throw itco_error(std::string(where) + ": node out of range");
}

// Shared by every backend: sorted unique copy of a query set, validated.
std::vector<int> clean_set(int n, const std::vector<int>& s,
                           const char* where) {
  std::vector<int> out(s);
  for (int v : out) check_node(n, v, where);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

void OracleItco::tc_init(int node_count) {
  if (node_count < 0) throw itco_error("tc_init: negative node count");
  if (node_count > limit_)
    throw itco_error("tc_init: node count exceeds the oracle backend limit");
  n_ = node_count;
  star_.assign((size_t)n_ * n_, false);
  out_.assign(n_, {});
  arcs_.clear();
  list_ = WitnessList(n_);
}

// Inserts one arc and re-derives the full reachability matrix, appending
// every newly reachable pair to the witness list in breadth-first distance
// order, witnessed by its predecessor on a shortest path. Distance order
// guarantees that both halves of each new pair are already listed.
void OracleItco::keep(int u, int v) {
  arcs_.emplace_back(u, v);
  out_[u].push_back(v);
  list_.append(u, v, v);
  star_[(size_t)u * n_ + v] = true;

  struct Found {
    int dist;
    int a;
    int b;
    int pred;
  };
  std::vector<Found> fresh;
  std::vector<int> dist(n_), pred(n_);
  for (int a = 0; a < n_; ++a) {
    std::fill(dist.begin(), dist.end(), -1);
    dist[a] = 0;
    std::deque<int> queue{a};
    while (!queue.empty()) {
      int x = queue.front();
      queue.pop_front();
      for (int y : out_[x]) {
        if (dist[y] >= 0) continue;
        dist[y] = dist[x] + 1;
        pred[y] = x;
        queue.push_back(y);
      }
    }
    for (int b = 0; b < n_; ++b) {
      if (b == a || dist[b] < 0 || star(a, b)) continue;
      fresh.push_back({dist[b], a, b, pred[b]});
    }
  }
  std::sort(fresh.begin(), fresh.end(), [](const Found& l, const Found& r) {
    return std::tie(l.dist, l.a, l.b) < std::tie(r.dist, r.a, r.b);
  });
  for (const Found& f : fresh) {
    star_[(size_t)f.a * n_ + f.b] = true;
    list_.append(f.a, f.b, f.pred);
  }
}

void OracleItco::tc_add(const std::vector<std::pair<int, int>>& arcs) {
  for (auto [u, v] : arcs) {
    check_node(n_, u, "tc_add");
    check_node(n_, v, "tc_add");
    if (u == v) throw itco_error("tc_add: self-loop");
    if (star(u, v)) continue;
    keep(u, v);
  }
}

Cover OracleItco::tc_cover(const std::vector<int>& s) {
  Cover cover;
  cover.nodes = clean_set(n_, s, "tc_cover");
  for (int a : cover.nodes)
    for (int b : cover.nodes)
      if (a != b && star(a, b)) cover.arcs.emplace_back(a, b);
  return cover;
}

}  // namespace strongflow
