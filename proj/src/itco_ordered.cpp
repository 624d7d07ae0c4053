#include "strongflow/itco.hpp"

#include <algorithm>
#include <deque>

#include "strongflow/oracle.hpp"

namespace strongflow {

void OrderedItco::tc_init(int node_count) {
  tc_init_ordered(node_count,
                  std::vector<Value>((size_t)std::max(node_count, 0)));
}

void OrderedItco::tc_init_ordered(int node_count,
                                  const std::vector<Value>& x) {
  if (node_count < 0) throw itco_error("tc_init: negative node count");
  if ((int)x.size() != node_count)
    throw itco_error("tc_init: one ordering value per node required");
  n_ = node_count;
  x_ = x;
  order_.clear();
  for (int v = 0; v < n_; ++v) order_.insert({x_[v], v});

  k_count_ = 1;
  while ((1LL << k_count_) < (long long)std::max(n_, 1)) ++k_count_;
  sizes_.assign(k_count_, 0);
  for (int k = 0; k < k_count_; ++k)
    sizes_[k] = (int)std::min<long long>(1LL << (k + 1), n_);
  sets_.assign(k_count_, {});
  member_.assign(k_count_, std::vector<char>(n_, 0));
  t_.assign(k_count_, 0);

  star_.assign((size_t)n_ * n_, false);
  out_.assign(n_, {});
  star_out_.assign(n_, {});
  arcs_.clear();
  list_ = WitnessList(n_);
  new_transitive_ = 0;
  update_steps_ = 0;
  update(k_count_ - 1);
  if (debug_) check_invariants();
}

std::vector<int> OrderedItco::prefix(int count) const {
  std::vector<int> out;
  out.reserve(std::max(count, 0));
  for (const auto& key : order_) {
    if ((int)out.size() >= count) break;
    out.push_back(key.second);
  }
  return out;
}

int OrderedItco::prefix_size_of(const std::vector<int>& s) const {
  std::vector<char> wanted(n_, 0);
  int missing = 0;
  for (int v : s) {
    if (v < 0 || v >= n_) throw itco_error("prefix: node out of range");
    if (!wanted[v]) {
      wanted[v] = 1;
      ++missing;
    }
  }
  int pos = 0;
  for (const auto& key : order_) {
    ++pos;
    if (wanted[key.second] && --missing == 0) return pos;
  }
  return 0;  // s was empty
}

// Rebuilds the prefix sets up to level k_star from the current ordering and
// re-closes reachability inside the next-larger prefix, recording every new
// pair in the witness list grounded on a plain arc.
void OrderedItco::update(int k_star) {
  int l_star = std::min(k_star + 1, k_count_ - 1);
  std::vector<int> top = prefix(sizes_[k_star]);
  for (int k = 0; k <= k_star; ++k) {
    sets_[k].assign(top.begin(), top.begin() + sizes_[k]);
    std::fill(member_[k].begin(), member_[k].end(), 0);
    for (int v : sets_[k]) member_[k][v] = 1;
    t_[k] = 0;
  }

  const std::vector<int>& local = sets_[l_star];
  const std::vector<char>& in_local = member_[l_star];
  // Snapshot of the pair graph restricted to the prefix; pairs derived
  // below don't change reachability, so they can stay out of it.
  std::vector<std::vector<int>> adj(n_);
  for (int a : local) {
    for (int b : star_out_[a])
      if (in_local[b]) adj[a].push_back(b);
    update_steps_ += (long long)adj[a].size() + 1;
  }

  // Per-source reachability tree, walked in discovery order so that each
  // new pair (a, b) appears after the pair (a, parent of b) it builds on.
  std::vector<char> seen(n_, 0);
  for (int a : local) {
    std::deque<std::pair<int, int>> queue{{-1, a}};
    std::vector<int> touched{a};
    seen[a] = 1;
    while (!queue.empty()) {
      auto [w, b] = queue.front();
      queue.pop_front();
      if (w >= 0 && !reaches(a, b)) new_transitive(a, w, b);
      for (int c : adj[b]) {
        if (seen[c]) continue;
        seen[c] = 1;
        touched.push_back(c);
        queue.push_back({b, c});
      }
      ++update_steps_;
    }
    for (int v : touched) seen[v] = 0;
  }
}

// Records the pair (a, b), witnessed so that the new entry's second half is
// a plain arc: the witness chain of (w, b) is unrolled until the arc that
// grounds it, recursively recording (a, <chain node>) pairs on the way.
// Entry indices strictly decrease along the chain, so this terminates.
void OrderedItco::new_transitive(int a, int w, int b) {
  ++new_transitive_;
  int idx = list_.index_of(w, b);
  if (idx < 0)
    throw itco_error("internal: pair missing from the witness list");
  const WitnessList::Entry& en = list_.entry(idx);
  int wit = w;
  if (en.w != b) {
    // (w, b) is itself transitive; its witness splits it as (w, v), (v, b)
    // with (v, b) a plain arc.
    int v = en.w;
    if (!reaches(a, v)) new_transitive(a, w, v);
    wit = v;
  }
  star_[(size_t)a * n_ + b] = true;
  star_out_[a].push_back(b);
  list_.append(a, b, wit);
}

void OrderedItco::tc_add(const std::vector<std::pair<int, int>>& arcs) {
  for (auto [u, v] : arcs) {
    if (u < 0 || u >= n_ || v < 0 || v >= n_)
      throw itco_error("tc_add: node out of range");
    if (u == v) throw itco_error("tc_add: self-loop");
    if (star(u, v)) continue;
    star_[(size_t)u * n_ + v] = true;
    star_out_[u].push_back(v);
    out_[u].push_back(v);
    arcs_.emplace_back(u, v);
    list_.append(u, v, v);
  }
  // Highest level whose prefix set misses an endpoint; everything up to it
  // is stale. The top level holds all nodes, so it never triggers.
  int stale = -1;
  for (int k = k_count_ - 2; k >= 0; --k) {
    bool inside = true;
    for (auto [u, v] : arcs)
      if (!member_[k][u] || !member_[k][v]) {
        inside = false;
        break;
      }
    if (!inside) {
      stale = k;
      break;
    }
  }
  if (stale >= 0) update(stale);
  if (debug_) check_invariants();
}

void OrderedItco::tc_reorder(const std::vector<int>& s,
                             const std::vector<Value>& y) {
  if (s.size() != y.size())
    throw itco_error("tc_reorder: one value per node required");
  if (s.empty()) return;
  std::vector<char> dup(n_, 0);
  for (int v : s) {
    if (v < 0 || v >= n_) throw itco_error("tc_reorder: node out of range");
    if (dup[v]) throw itco_error("tc_reorder: node listed twice");
    dup[v] = 1;
  }

  // Charge every level with the prefix size under the outgoing ordering.
  long long charge = prefix_size_of(s);
  for (int k = 0; k < k_count_; ++k) t_[k] += charge;
  for (size_t i = 0; i < s.size(); ++i) {
    order_.erase({x_[s[i]], s[i]});
    x_[s[i]] = y[i];
    order_.insert({x_[s[i]], s[i]});
  }

  int stale = -1;
  for (int k = k_count_ - 1; k >= 0; --k)
    if (2 * t_[k] > sizes_[k]) {
      stale = k;
      break;
    }
  if (stale >= 0) update(stale);
  if (debug_) check_invariants();
}

Cover OrderedItco::tc_cover(const std::vector<int>& s) {
  for (int v : s)
    if (v < 0 || v >= n_) throw itco_error("tc_cover: node out of range");
  int k_star = k_count_ - 1;
  for (int k = 0; k < k_count_; ++k) {
    bool inside = true;
    for (int v : s)
      if (!member_[k][v]) {
        inside = false;
        break;
      }
    if (inside) {
      k_star = k;
      break;
    }
  }
  Cover cover;
  cover.nodes = sets_[k_star];
  std::sort(cover.nodes.begin(), cover.nodes.end());
  for (int a : cover.nodes)
    for (int b : star_out_[a])
      if (member_[k_star][b]) cover.arcs.emplace_back(a, b);
  if (debug_) check_invariants();
  return cover;
}

std::vector<std::pair<std::string, long long>> OrderedItco::counters() const {
  return {{"new_transitive", new_transitive_}, {"update_steps", update_steps_}};
}

// Full audit of the maintained state against definitions: nested prefix
// sets of the right sizes, the pair matrix sound and prefix-complete for
// reachability, counters within budget, and the witness list exactly
// mirroring the arcs and pairs.
void OrderedItco::check_invariants() const {
  for (int k = 0; k < k_count_; ++k) {
    if ((int)sets_[k].size() != sizes_[k])
      throw itco_error("invariant: prefix set has the wrong size");
    if (k + 1 < k_count_)
      for (int v : sets_[k])
        if (!member_[k + 1][v])
          throw itco_error("invariant: prefix sets not nested");
  }
  for (int v = 0; v < n_; ++v)
    if (!member_[k_count_ - 1][v])
      throw itco_error("invariant: top level must hold every node");

  auto full = oracle::closure(n_, arcs_);
  for (int a = 0; a < n_; ++a)
    for (int b = 0; b < n_; ++b)
      if (star(a, b) && !(a != b && full[a][b]))
        throw itco_error("invariant: pair matrix exceeds the closure");
  for (int k = 0; k < k_count_; ++k) {
    std::vector<std::pair<int, int>> inside;
    for (int a : sets_[k])
      for (int b : star_out_[a])
        if (member_[k][b]) inside.emplace_back(a, b);
    auto restricted = oracle::closure(n_, inside);
    for (int a : sets_[k])
      for (int b : sets_[k])
        if (a != b && restricted[a][b] != full[a][b])
          throw itco_error("invariant: prefix closure out of date");
    if (2 * t_[k] > sizes_[k])
      throw itco_error("invariant: reorder counter over budget");
    for (int v : prefix((int)(sizes_[k] - t_[k])))
      if (!member_[k][v])
        throw itco_error("invariant: prefix drifted out of its level");
  }

  std::vector<char> listed((size_t)n_ * n_, 0);
  std::vector<char> plain((size_t)n_ * n_, 0);
  for (int i = 0; i < list_.size(); ++i) {
    const WitnessList::Entry& en = list_.entry(i);
    listed[(size_t)en.a * n_ + en.b] = 1;
    if (en.w == en.b) plain[(size_t)en.a * n_ + en.b] = 1;
    if (en.w != en.b && !list_.is_arc(en.w, en.b))
      throw itco_error("invariant: witness entry not grounded on an arc");
  }
  for (auto [u, v] : arcs_) {
    if (!plain[(size_t)u * n_ + v])
      throw itco_error("invariant: arc missing from the witness list");
    plain[(size_t)u * n_ + v] = 0;
  }
  for (size_t i = 0; i < plain.size(); ++i)
    if (plain[i])
      throw itco_error("invariant: witness list holds a foreign arc");
  for (int a = 0; a < n_; ++a)
    for (int b = 0; b < n_; ++b)
      if (listed[(size_t)a * n_ + b] != (char)(star(a, b) ? 1 : 0))
        throw itco_error("invariant: witness pairs differ from the matrix");
  if (new_transitive_ > (long long)n_ * n_)
    throw itco_error("invariant: too many derived pairs");
}

}  // namespace strongflow
