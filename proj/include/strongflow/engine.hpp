#pragma once

#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "strongflow/flow.hpp"
#include "strongflow/itco.hpp"
#include "strongflow/value.hpp"

namespace strongflow {

struct EngineConfig {
  ItcoBackend backend = ItcoBackend::italiano;
  // Rooted spanning tree for the treedepth backend: parent[i] is i's parent
  // node, -1 at the root. Ignored by the other backends.
  std::vector<int> tree_parent;
  // Hard bound on scaling iterations; -1 picks 20 * m_c + 100 where m_c is
  // the node count plus the number of finite positive capacities.
  long long iteration_cap = -1;
  // 0 none, 1 cheap per-iteration audits, 2 adds full index rebuild checks.
  int debug_level = 0;
};

struct EngineMetrics {
  long long iterations = 0;
  long long essential_total = 0;   // sum of |essential set| per iteration
  long long cover_arcs_total = 0;  // sum of cover sizes over all queries
  long long extension_arcs = 0;    // transitive pairs kept with flow
  long long shortcut_arcs = 0;     // node-to-root pairs ever added
};

struct SolveResult {
  std::vector<Value> flow;  // per arc of the input instance
  Cut cut;
  Value value;
  EngineMetrics metrics;
};

// Scaling solver. It maintains a feasible flow f together with safe
// capacities r and an accuracy bound eps, learns abundant arcs (residual
// at least gamma * eps) as eps shrinks, and contracts them into free
// components represented by root nodes. Each iteration routes an
// approximate max flow on a compact auxiliary instance built from the
// essential arcs and a transitive cover of their component roots, then
// re-tightens r and eps. Once eps reaches zero the flow is exactly
// optimal on the grown instance; the flow carried by shortcut and
// transitive cover arcs is then routed back onto input arcs using the
// component trees and the witness list.
class Engine {
 public:
  Engine(const FlowInstance& input, const EngineConfig& cfg = EngineConfig());

  // One scaling iteration; requires eps() > 0.
  void iterate();
  bool done() const { return eps_.is_zero(); }
  // Runs remaining iterations, then routes back and extracts the result.
  // Throws flow_error if the iteration cap is exceeded.
  SolveResult solve();

  // State accessors, primarily for the invariant checks in the tests. The
  // instance grows over time: arcs keep their ids, extension and shortcut
  // pairs are appended, pruned pairs stay behind with dead() set.
  const FlowInstance& graph() const { return g_; }
  const FlowState& flow_state() const { return f_; }
  const std::vector<Value>& safe_caps() const { return r_; }
  const Value& eps() const { return eps_; }
  const Value& gamma() const { return gamma_; }
  const Value& accuracy() const { return m_big_; }  // gamma^5
  int root_of(int v) const { return root_[v]; }
  std::vector<int> roots() const;
  bool arc_abundant(int e) const { return abundant_[e] != 0; }
  bool arc_shortcut(int e) const { return shortcut_[e] != 0; }
  bool arc_extension(int e) const { return extension_[e] != 0; }
  bool arc_dead(int e) const { return dead_[e] != 0; }
  int base_arc_count() const { return base_arcs_; }
  const std::vector<int>& extension_arc_ids() const { return f_ext_; }
  const std::vector<int>& shortcut_arc_ids() const { return f_short_; }
  const std::vector<int>& last_essential() const { return last_ess_; }
  // Arc e is a boundary arc when its pair joins s or t with a root node.
  bool arc_boundary(int e) const;
  // Arcs between components, not boundary, whose pair exceeds the safe
  // capacity by 2 * gamma^-2 * eps in both directions.
  std::vector<int> gap_arcs() const;
  const EngineMetrics& metrics() const { return met_; }
  const Itco& itco() const { return *itco_; }
  long long iteration_cap() const { return cap_iters_; }

 private:
  struct TreeEdge {
    int x = 0;
    int y = 0;
    int arc = 0;  // id of the x -> y arc; y -> x is its pair partner
  };

  // Max pairing heap of (residual, arc, generation) entries with lazy
  // invalidation: an entry counts while its generation matches the arc's
  // and the arc still joins two components.
  struct HeapPool {
    struct Node {
      Value key;
      int arc = 0;
      long long gen = 0;
      int child = -1;
      int sib = -1;
    };
    std::vector<Node> nodes;
    std::vector<int> free_list;

    int make(const Value& key, int arc, long long gen);
    int meld(int a, int b);
    int push(int root, const Value& key, int arc, long long gen);
    int pop(int root);  // removes the top node, returns the new root
  };

  using ResTree = std::multimap<Value, int>;

  // construction
  void coalesce_input(const FlowInstance& input);
  void init_state();
  void init_itco();
  std::vector<int> contracted_tree() const;
  int new_pair(int tail, int head, Value cap_fwd, Value cap_rev);

  // residual bookkeeping
  Value residual_of(int e) const { return residual(g_, f_, e); }
  void track_insert(int e);
  void track_erase(int e);
  void track_rekey(int e);
  void track_relocate_pair(int e);
  void touch(int e);
  void apply_send(int e, const Value& amount);
  void saturate(int e);
  Value x_value(int root_node);

  // iteration pieces
  void set_r(int e, Value v);
  void post_process(const Value& delta, const std::vector<int>& work);
  void refresh_safe_caps(const Value& delta);
  void sweep_abundant(std::vector<int>* newly);
  void process_merges(const std::vector<int>& queue);
  void merge_components(int survivor, int absorbed, int conn_tail,
                        int conn_head, int conn_arc,
                        std::vector<int>* worklist);
  void audit(int level) const;

  // final rerouting
  void reroute_shortcut();
  void route_witnesses();
  SolveResult extract_result();

  // instance and iterate state
  FlowInstance input_;
  FlowInstance g_;
  FlowState f_;
  std::vector<Value> r_;
  Value eps_;
  Value gamma_;   // 4 n^2
  Value gamma2_;  // gamma^2
  Value m_big_;   // gamma^5
  Value u_total_;
  int n_ = 0;
  int s_ = 0;
  int t_ = 1;
  int base_arcs_ = 0;
  long long mc_ = 0;
  long long cap_iters_ = 0;
  EngineConfig cfg_;
  EngineMetrics met_;
  std::unique_ptr<Itco> itco_;
  bool extracted_ = false;
  SolveResult result_;

  // arc classification and bookkeeping
  std::vector<unsigned char> abundant_, shortcut_, extension_, dead_;
  std::vector<int> f_ext_, f_short_;
  std::vector<int> bnd_si_, bnd_it_;      // (s,i) / (i,t) arc per node
  std::vector<std::vector<int>> side_inputs_;  // input arc ids per base arc
  std::map<std::pair<int, int>, int> ext_pair_;  // live extension pair ids
  std::vector<int> cur_shortcut_;  // node -> latest (node, root) arc, -1 root

  // components
  std::vector<int> root_;
  std::vector<std::vector<int>> members_;
  std::vector<std::vector<TreeEdge>> tree_edges_;
  std::vector<int> heap_root_;  // per current root: heap node id or -1

  // residual index over live non-abundant non-shortcut arcs
  ResTree cross_, intra_;
  std::vector<ResTree::iterator> tree_it_;
  std::vector<unsigned char> tree_loc_;  // 0 none, 1 cross, 2 intra
  std::vector<long long> gen_;
  HeapPool pool_;

  // per-iteration scratch
  std::vector<int> last_ess_;
  std::vector<long long> touch_mark_;
  long long touch_epoch_ = 0;
  std::vector<int> touched_;
  std::vector<long long> assign_mark_;
  long long assign_epoch_ = 0;
};

SolveResult solve_max_flow(const FlowInstance& input,
                           const EngineConfig& cfg = EngineConfig());

}  // namespace strongflow
