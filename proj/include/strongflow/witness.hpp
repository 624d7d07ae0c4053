#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "strongflow/value.hpp"

namespace strongflow {

struct witness_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Append-only list of entries (a, b, w) over nodes 0..n-1. An entry with
// w == b records the plain arc (a, b); an entry with w != b records the
// transitive pair (a, b), spelled out by the earlier pairs (a, w) and (w, b).
// Node pairs are unique across entries.
class WitnessList {
 public:
  struct Entry {
    int a = 0;
    int b = 0;
    int w = 0;
  };

  WitnessList() = default;
  explicit WitnessList(int node_count) : n_(node_count) {}

  int node_count() const { return n_; }
  int size() const { return (int)entries_.size(); }
  const Entry& entry(int i) const { return entries_[i]; }

  // For w != b the pairs (a, w) and (w, b) must already be present and
  // (a, b) must not be.
  void append(int a, int b, int w);

  bool has_pair(int a, int b) const;  // (a, b) in E*(L)
  bool is_arc(int a, int b) const;    // (a, b) in E(L)
  int index_of(int a, int b) const;   // entry index, -1 if absent

  // Expands (a, b) into the sequence of plain-arc entry indices obtained by
  // substituting every transitive pair with its two witness halves. The
  // result is an a-b walk; arcs may repeat in a non-rooted list.
  std::vector<int> walk(int a, int b) const;

  // True when every pair of the list is out-rooted at its tail or in-rooted
  // at its head; such lists expand to simple paths.
  bool is_rooted() const;
  // Directly checks that every walk visits no node twice.
  bool is_path_structured() const;

  // One line per entry: "i a b w", zero-based.
  std::string dump() const;

 private:
  int n_ = 0;
  std::vector<Entry> entries_;
  std::map<std::pair<int, int>, int> index_;
};

// Single backward pass over the list: flow on an entry listed in
// reverse_entries is subtracted from its opposite pair, flow on any other
// transitive pair is split onto the pair's two witness halves. The result
// is supported on plain arcs only and preserves the divergence of f at
// every node. Entries in reverse_entries must be plain arcs whose opposite
// pair appears earlier in the list.
std::vector<Value> wit_route(const WitnessList& list,
                             const std::vector<Value>& f,
                             const std::vector<int>& reverse_entries);

}  // namespace strongflow
