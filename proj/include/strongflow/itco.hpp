#pragma once

#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "strongflow/value.hpp"
#include "strongflow/witness.hpp"

namespace strongflow {

struct itco_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A transitive cover of a query set S: nodes containing S, arcs drawn from
// the reachability closure of the tracked graph, such that the closure of
// the cover arcs restricted to S equals the closure of the tracked graph
// restricted to S.
struct Cover {
  std::vector<int> nodes;
  std::vector<std::pair<int, int>> arcs;
};

enum class ItcoBackend { oracle, italiano, treedepth, ordered };

ItcoBackend itco_backend_from_name(const std::string& name);
const char* itco_backend_name(ItcoBackend kind);

// Incremental transitive cover: a growing arc set over a fixed node set,
// answering cover queries and recording every arc and every reachability
// pair it derives in an append-only witness list.
//
// All backends filter re-added arcs (including arcs they already derived
// transitively), so tc_add is idempotent. Self-loops are rejected.
class Itco {
 public:
  virtual ~Itco();

  virtual void tc_init(int node_count) = 0;
  virtual void tc_add(const std::vector<std::pair<int, int>>& arcs) = 0;
  virtual Cover tc_cover(const std::vector<int>& s) = 0;
  virtual const WitnessList& tc_wit_list() const = 0;

  // Ordered variant: nodes carry mutable ordering values and covers of
  // high-ordered query sets stay small. Plain backends reject these.
  virtual void tc_init_ordered(int node_count, const std::vector<Value>& x);
  virtual void tc_reorder(const std::vector<int>& s,
                          const std::vector<Value>& y);

  // Tree variant: parent[i] is i's parent, -1 at the single root. Added
  // arcs must join an ancestor-descendant pair. Plain backends reject.
  virtual void tc_init_tree(const std::vector<int>& parent);

  // Work counters, for metrics and for the amortized-cost tests.
  virtual std::vector<std::pair<std::string, long long>> counters() const;
};

std::unique_ptr<Itco> make_itco(ItcoBackend kind);

// Reference backend: keeps a dense reachability matrix, recomputed from
// scratch on every insertion. Quadratic memory, cubic-ish updates; only
// meant for tests and small instances, hence the node limit.
class OracleItco : public Itco {
 public:
  explicit OracleItco(int node_limit = 256) : limit_(node_limit) {}

  void tc_init(int node_count) override;
  void tc_add(const std::vector<std::pair<int, int>>& arcs) override;
  Cover tc_cover(const std::vector<int>& s) override;
  const WitnessList& tc_wit_list() const override { return list_; }

  bool star(int a, int b) const { return star_[(size_t)a * n_ + b]; }

 private:
  void keep(int u, int v);

  int limit_ = 256;
  int n_ = 0;
  std::vector<bool> star_;
  std::vector<std::vector<int>> out_;
  std::vector<std::pair<int, int>> arcs_;
  WitnessList list_;
};

// General-purpose backend: grows one out-tree per node, so the matrix is
// the exact closure after every insertion. Covers are the closure
// restricted to S when S is small, the whole arc set otherwise.
class ItalianoItco : public Itco {
 public:
  void tc_init(int node_count) override;
  void tc_add(const std::vector<std::pair<int, int>>& arcs) override;
  Cover tc_cover(const std::vector<int>& s) override;
  const WitnessList& tc_wit_list() const override { return list_; }
  std::vector<std::pair<std::string, long long>> counters() const override;

  bool star(int a, int b) const { return star_[(size_t)a * n_ + b]; }
  long long arc_count() const { return (long long)arcs_.size(); }

 private:
  bool reaches(int a, int b) const { return a == b || star(a, b); }

  int n_ = 0;
  std::vector<bool> star_;
  std::vector<std::vector<int>> out_;
  std::vector<std::pair<int, int>> arcs_;
  WitnessList list_;
  long long visit_steps_ = 0;  // guard evaluations across all insertions
  long long extensions_ = 0;   // reachability pairs derived
};

// Backend for arc sets that respect a rooted spanning tree (every arc joins
// an ancestor-descendant pair). Keeps, per node a, the reachability closure
// of the arcs lying inside a's subtree; covers restrict queries to ancestor
// sets, so their size scales with the tree depth instead of |S| squared.
class TreeDepthItco : public Itco {
 public:
  void tc_init(int node_count) override;  // rejects: the tree is required
  void tc_init_tree(const std::vector<int>& parent) override;
  void tc_add(const std::vector<std::pair<int, int>>& arcs) override;
  Cover tc_cover(const std::vector<int>& s) override;
  const WitnessList& tc_wit_list() const override { return list_; }
  std::vector<std::pair<std::string, long long>> counters() const override;

  int depth_bound() const { return depth_bound_; }
  bool star(int a, int b) const;
  // True when a lies on the tree path from b to the root (a == b included).
  bool is_tree_ancestor(int a, int b) const;

 private:
  bool reaches(int a, int b) const { return a == b || star(a, b); }
  void set_star(int a, int b);

  int n_ = 0;
  int depth_bound_ = 0;
  std::vector<int> parent_;
  std::vector<int> depth_;                // root has depth 1
  std::vector<std::vector<int>> anc_;     // root path of each node, top down
  // Reachability pairs, stored at the deeper endpoint and indexed by the
  // depth of the shallower one: to_anc_ holds arcs up the tree, from_anc_
  // arcs down the tree.
  std::vector<std::vector<bool>> to_anc_;
  std::vector<std::vector<bool>> from_anc_;
  // Arcs of the subtree of a, keyed by tail (desc_out_) and head (desc_in_).
  std::vector<std::unordered_map<int, std::vector<int>>> desc_out_;
  std::vector<std::unordered_map<int, std::vector<int>>> desc_in_;
  // Reachability pairs whose deeper endpoint is a; the cover arc pool.
  std::vector<std::vector<std::pair<int, int>>> cov_;
  std::vector<std::pair<int, int>> arcs_;
  WitnessList list_;
  long long visit_steps_ = 0;
  long long extensions_ = 0;
};

// Backend with mutable per-node ordering values. Maintains nested prefix
// sets V_1 (containing the 2 highest-ordered nodes) up to V_K (all nodes)
// that lazily track the ordering as it changes, with the closure kept
// exact inside every prefix; a cover query returns the smallest prefix
// containing S, whose size is within a factor 4 of optimal.
class OrderedItco : public Itco {
 public:
  void tc_init(int node_count) override;  // all ordering values zero
  void tc_init_ordered(int node_count, const std::vector<Value>& x) override;
  void tc_add(const std::vector<std::pair<int, int>>& arcs) override;
  void tc_reorder(const std::vector<int>& s,
                  const std::vector<Value>& y) override;
  Cover tc_cover(const std::vector<int>& s) override;
  const WitnessList& tc_wit_list() const override { return list_; }
  std::vector<std::pair<std::string, long long>> counters() const override;

  // Full invariant audit after every public operation; cubic, tests only.
  void set_debug(bool on) { debug_ = on; }

  bool star(int a, int b) const { return star_[(size_t)a * n_ + b]; }
  int level_count() const { return k_count_; }
  const std::vector<int>& level(int k) const { return sets_[k]; }
  long long level_counter(int k) const { return t_[k]; }
  // The count highest-ordered nodes (ordering value descending, id as the
  // tie break).
  std::vector<int> prefix(int count) const;
  // Size of the shortest prefix containing every node of s.
  int prefix_size_of(const std::vector<int>& s) const;

 private:
  void update(int k_star);
  void new_transitive(int a, int w, int b);
  void check_invariants() const;
  bool reaches(int a, int b) const { return a == b || star(a, b); }

  struct OrderCmp {
    // Ordering value descending, node id ascending as the tie break.
    bool operator()(const std::pair<Value, int>& a,
                    const std::pair<Value, int>& b) const {
      if (a.first != b.first) return b.first < a.first;
      return a.second < b.second;
    }
  };

  int n_ = 0;
  int k_count_ = 0;             // number of prefix levels
  std::vector<int> sizes_;      // target size of each level, min(2^k, n)
  std::vector<std::vector<int>> sets_;
  std::vector<std::vector<char>> member_;
  std::vector<long long> t_;    // reorders charged to each level
  std::vector<Value> x_;
  // Node ids sorted by (x descending, id ascending); the realized ordering.
  std::set<std::pair<Value, int>, OrderCmp> order_;
  std::vector<bool> star_;
  std::vector<std::vector<int>> out_;        // arcs, by tail
  std::vector<std::vector<int>> star_out_;   // star pairs, by tail
  std::vector<std::pair<int, int>> arcs_;
  WitnessList list_;
  bool debug_ = false;
  long long new_transitive_ = 0;
  long long update_steps_ = 0;
};

}  // namespace strongflow
