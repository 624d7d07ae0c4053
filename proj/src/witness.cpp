#include "strongflow/witness.hpp"

#include <algorithm>

namespace strongflow {

void WitnessList::append(int a, int b, int w) {
  if (a < 0 || a >= n_ || b < 0 || b >= n_ || w < 0 || w >= n_)
    throw witness_error("append: node out of range");
  if (a == b) throw witness_error("append: a == b");
  if (has_pair(a, b)) throw witness_error("append: pair already present");
  if (w != b) {
    if (!has_pair(a, w) || !has_pair(w, b))
      throw witness_error("append: witness halves not present");
  }
  index_[{a, b}] = (int)entries_.size();
  entries_.push_back({a, b, w});
}

bool WitnessList::has_pair(int a, int b) const {
  return index_.count({a, b}) != 0;
}

bool WitnessList::is_arc(int a, int b) const {
  auto it = index_.find({a, b});
  return it != index_.end() && entries_[it->second].w == b;
}

int WitnessList::index_of(int a, int b) const {
  auto it = index_.find({a, b});
  return it == index_.end() ? -1 : it->second;
}

std::vector<int> WitnessList::walk(int a, int b) const {
  int start = index_of(a, b);
  if (start < 0) throw witness_error("walk: pair not in list");
  std::vector<int> out;
  std::vector<int> stack{start};
  while (!stack.empty()) {
    int i = stack.back();
    stack.pop_back();
    const Entry& en = entries_[i];
    if (en.w == en.b) {
      out.push_back(i);
    } else {
      stack.push_back(index_of(en.w, en.b));
      stack.push_back(index_of(en.a, en.w));
    }
  }
  return out;
}

bool WitnessList::is_rooted() const {
  int k = (int)entries_.size();
  std::vector<char> out_rooted(k, 0), in_rooted(k, 0);
  for (int i = 0; i < k; ++i) {
    const Entry& en = entries_[i];
    if (en.w == en.b) {
      out_rooted[i] = in_rooted[i] = 1;
      continue;
    }
    int left = index_of(en.a, en.w);
    int right = index_of(en.w, en.b);
    out_rooted[i] = entries_[right].w == en.b && out_rooted[left];
    in_rooted[i] = entries_[left].w == en.w && in_rooted[right];
    if (!out_rooted[i] && !in_rooted[i]) return false;
  }
  return true;
}

bool WitnessList::is_path_structured() const {
  std::vector<int> seen(n_, -1);
  for (int i = 0; i < (int)entries_.size(); ++i) {
    std::vector<int> arcs = walk(entries_[i].a, entries_[i].b);
    seen[entries_[i].a] = i;
    for (int idx : arcs) {
      int head = entries_[idx].b;
      if (seen[head] == i) return false;
      seen[head] = i;
    }
  }
  return true;
}

std::string WitnessList::dump() const {
  std::string out;
  for (int i = 0; i < (int)entries_.size(); ++i) {
    out += std::to_string(i) + " " + std::to_string(entries_[i].a) + " " +
           std::to_string(entries_[i].b) + " " + std::to_string(entries_[i].w) +
           "\n";
  }
  return out;
}

std::vector<Value> wit_route(const WitnessList& list,
                             const std::vector<Value>& f,
                             const std::vector<int>& reverse_entries) {
  int k = list.size();
  if ((int)f.size() != k) throw witness_error("wit_route: flow size mismatch");
  std::vector<char> in_r(k, 0);
  for (int i : reverse_entries) {
    if (i < 0 || i >= k) throw witness_error("wit_route: bad reverse entry");
    const WitnessList::Entry& en = list.entry(i);
    if (en.w != en.b)
      throw witness_error("wit_route: reverse entry is not a plain arc");
    int opp = list.index_of(en.b, en.a);
    if (opp < 0 || opp >= i)
      throw witness_error("wit_route: reverse entry lacks an earlier opposite");
    in_r[i] = 1;
  }
  std::vector<Value> g = f;
  for (int i = k - 1; i >= 0; --i) {
    const WitnessList::Entry& en = list.entry(i);
    if (in_r[i]) {
      int opp = list.index_of(en.b, en.a);
      g[opp] -= g[i];
      g[i] = Value(0);
    } else if (en.w != en.b) {
      int left = list.index_of(en.a, en.w);
      int right = list.index_of(en.w, en.b);
      g[left] += g[i];
      g[right] += g[i];
      g[i] = Value(0);
    }
  }
  return g;
}

}  // namespace strongflow
