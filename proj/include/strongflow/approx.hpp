#pragma once

#include <vector>

#include "strongflow/flow.hpp"

namespace strongflow {

struct MaxCapResult {
  Value bottleneck;  // 0 when t is unreachable through positive capacities
  int arc = -1;      // an arc capping a widest s-t path, -1 when unreachable
};

// Widest s-t path bottleneck for (g, cap): grows a tree from s, always
// extending along the largest admissible capacity. Among bottleneck arcs of
// the found path the lowest arc index is reported.
MaxCapResult max_cap_path(const FlowInstance& g, const std::vector<Value>& cap);

// Exact maximum flow of (g, w) for finite integer capacities w, computed
// with Dinic's algorithm from the zero flow.
FlowState fast_max_flow(const FlowInstance& g, const std::vector<Value>& w);

// Capacities rounded down to integer multiples of the widest-path grid and
// clipped at m^3 * accuracy, either by direct division or by the
// division-free binary search; both give the same weights.
std::vector<Value> integer_weights(const FlowInstance& g,
                                   const std::vector<Value>& u,
                                   const Value& accuracy, bool division_free);

struct ApproxResult {
  FlowState flow;           // acyclic basic flow on (g, u)
  int certificate_arc = -1;  // widest residual bottleneck arc, -1 if value 0
  Value accuracy;           // the M this result was computed for
};

// Approximate maximum flow: rounds u to the grid defined by the widest-path
// bottleneck, solves that integer instance exactly, scales back, and turns
// the result into an acyclic basic flow f. The returned certificate arc e*
// satisfies, for the residual capacities u^f and m = arc count,
//   value(g, u^f) <= m * u^f_{e*} <= m * value(g, u^f) <= value(g, u) / M.
ApproxResult approx_flow(const FlowInstance& g, const std::vector<Value>& u,
                         const Value& accuracy, bool division_free = false);

}  // namespace strongflow
