#pragma once

#include <string>
#include <utility>
#include <vector>

#include "strongflow/flow.hpp"
#include "strongflow/witness.hpp"

namespace strongflow {
namespace oracle {

// Reference implementations used by the test suites to validate the fast
// paths. Everything here favors obviousness over speed.

// Copy of g with its per-arc capacities replaced.
FlowInstance with_caps(const FlowInstance& g, const std::vector<Value>& cap);

// Per-arc residual capacities of st in g.
std::vector<Value> residual_caps(const FlowInstance& g, const FlowState& st);

// Edmonds-Karp maximum flow of (g, cap), starting from zero flow.
FlowState max_flow(const FlowInstance& g, const std::vector<Value>& cap);
Value max_flow_value(const FlowInstance& g, const std::vector<Value>& cap);

// Largest bottleneck over all simple s-t paths, by path enumeration.
// Intended for tiny instances only.
Value max_cap_path_brute(const FlowInstance& g, const std::vector<Value>& cap);
// True when some simple s-t path through arc e has bottleneck exactly b.
bool arc_on_bottleneck_path(const FlowInstance& g,
                            const std::vector<Value>& cap, int e,
                            const Value& b);

// Checks 0 <= r <= residual caps of f and that replacing the residual
// capacities by r preserves the residual max-flow value.
bool safe_capacities(const FlowInstance& g, const FlowState& f,
                     const std::vector<Value>& r, std::string* why = nullptr);

// Floyd-Warshall reachability: entry [a][b] is true iff a != b and a
// directed a-b path exists in arcs.
std::vector<std::vector<char>> closure(
    int n, const std::vector<std::pair<int, int>>& arcs);

// BFS reachability from src, src itself included.
std::vector<char> reachable_from(int n,
                                 const std::vector<std::pair<int, int>>& arcs,
                                 int src);

// Verifies that (v_out, e_out) is a transitive cover of s in (0..n-1, arcs):
// s inside v_out, e_out arcs between v_out nodes that are closure arcs, and
// e_out preserving reachability between all nodes of s.
bool check_cover(int n, const std::vector<std::pair<int, int>>& arcs,
                 const std::vector<int>& s, const std::vector<int>& v_out,
                 const std::vector<std::pair<int, int>>& e_out,
                 std::string* why = nullptr);

// Walk-substitution routing: processes entries back to front, moving flow on
// a reverse entry onto its opposite pair and flow on any other transitive
// pair onto its fully expanded walk, one arc at a time. Quadratic; matches
// wit_route exactly.
std::vector<Value> wit_route_slow(const WitnessList& list,
                                  const std::vector<Value>& f,
                                  const std::vector<int>& reverse_entries);

}  // namespace oracle
}  // namespace strongflow
