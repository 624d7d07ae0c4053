#ifndef STRONGFLOW_FLOW_HPP
#define STRONGFLOW_FLOW_HPP

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "strongflow/value.hpp"

namespace strongflow {

struct flow_error : std::runtime_error {
  explicit flow_error(const std::string& what) : std::runtime_error(what) {}
};

// One directed arc. Arcs are always created in pairs; the reverse of arc e
// is e ^ 1, so even indices are the "forward" member of their pair.
struct Arc {
  int tail = 0;
  int head = 0;
  Value cap;
};

// Symmetric multigraph flow instance: every arc has a paired reverse arc,
// parallel pairs are allowed, capacities live in Q>=0 plus infinity.
struct FlowInstance {
  int n = 0;
  int s = 0;
  int t = 1;
  std::vector<Arc> arcs;
  std::vector<std::vector<int>> out;  // arc ids by tail node

  static int rev(int e) { return e ^ 1; }
  int arc_count() const { return static_cast<int>(arcs.size()); }
  int pair_count() const { return static_cast<int>(arcs.size()) / 2; }

  // Appends the pair {(tail,head) with cap_fwd, (head,tail) with cap_rev}
  // and returns the forward arc id.
  int add_pair(int tail, int head, Value cap_fwd, Value cap_rev);

  // Structural validation; `freshly_loaded` additionally enforces the
  // input-only rules (no s-t arc, at least one finite capacity per pair).
  void check_valid(bool freshly_loaded) const;
};

// Flow values per arc, parallel to instance.arcs.
struct FlowState {
  std::vector<Value> f;

  FlowState() = default;
  explicit FlowState(const FlowInstance& g) : f(g.arcs.size(), Value(0)) {}

  // Keeps f aligned after the instance gained arc pairs.
  void resize_for(const FlowInstance& g) { f.resize(g.arcs.size(), Value(0)); }
};

struct Cut {
  std::vector<char> in_s;  // per node: on the source side?
  Value capacity;
};

// One term of a flow decomposition: an arc sequence that is either an
// s-t path or a directed cycle, together with the amount it carries.
struct FlowTerm {
  bool cycle = false;
  Value amount;
  std::vector<int> arcs;
};

Value residual(const FlowInstance& g, const FlowState& st, int e);

// Raises f_e - f_{rev e} by amount, undoing reverse flow first.
void send_flow(const FlowInstance& g, FlowState& st, int e,
               const Value& amount);

// Signed inflow-minus-outflow at a node.
Value excess(const FlowInstance& g, const FlowState& st, int node);

// <f> = -excess(s).
Value flow_value(const FlowInstance& g, const FlowState& st);

// 0 <= f <= u everywhere and conservation at interior nodes.
bool is_feasible(const FlowInstance& g, const FlowState& st,
                 std::string* why = nullptr);

// (G,u) extended by f_one arcs (capacity inf, paired reverse 0) and f_two
// arcs (inf both ways). Existing arc ids are untouched; each call appends.
void extend_instance(FlowInstance& g,
                     const std::vector<std::pair<int, int>>& f_one,
                     const std::vector<std::pair<int, int>>& f_two);

// Greedy path/cycle decomposition of a feasible flow; at most one term
// per support arc, paths listed before cycles.
std::vector<FlowTerm> decompose(const FlowInstance& g, const FlowState& st);

// Converts a feasible flow into an acyclic basic one: support acyclic and
// a subset of the input support, value never decreased, no flow into s or
// out of t, and the arcs strictly between their bounds form a forest that
// separates s from t.
void to_acyclic_basic(const FlowInstance& g, FlowState& st);

// Source side of the residual reachability cut; errors if the flow is not
// maximum (t still reachable).
Cut min_cut_from_flow(const FlowInstance& g, const FlowState& st);

// Ensures every interior node has infinite-capacity (i,s) and (t,i) arcs,
// first rejecting unbounded inputs (an all-infinite s-t path).
void normalize_input(FlowInstance& g);

// True iff no s-t path uses only infinite-capacity arcs.
bool is_bounded(const FlowInstance& g);

}  // namespace strongflow

#endif
