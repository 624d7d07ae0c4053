#include <cstdio>
#include <random>

#include "strongflow/engine.hpp"
#include "strongflow/oracle.hpp"
#include "../tests/test_util.hpp"

using namespace strongflow;

int main(int argc, char** argv) {
  int count = argc > 1 ? std::atoi(argv[1]) : 50;
  int maxn = argc > 2 ? std::atoi(argv[2]) : 8;
  int maxp = argc > 3 ? std::atoi(argv[3]) : 12;
  int backend = argc > 4 ? std::atoi(argv[4]) : 1;
  for (int k = 0; k < count; ++k) {
    auto rng = sftest::rng_for(9000 + k);
    FlowInstance g =
        sftest::random_bounded_instance(rng, maxn, maxp, 1000000, 20);
    std::vector<Value> caps;
    for (const Arc& a : g.arcs) caps.push_back(a.cap);
    Value want = oracle::max_flow_value(g, caps);
    EngineConfig cfg;
    cfg.backend = (ItcoBackend)backend;
    cfg.debug_level = 2;
    if (cfg.backend == ItcoBackend::treedepth) {
      cfg.tree_parent.assign(g.n, -1);
      for (int v = 1; v < g.n; ++v) cfg.tree_parent[v] = v - 1;
    }
    try {
      SolveResult res = solve_max_flow(g, cfg);
      if (Value::cmp(res.value, want) != 0) {
        std::printf("k=%d VALUE MISMATCH got %s want %s (n=%d m=%d)\n", k,
                    res.value.to_string().c_str(), want.to_string().c_str(), g.n,
                    g.arc_count());
        return 1;
      }
      std::string why;
      FlowState st;
      st.f = res.flow;
      if (!is_feasible(g, st, &why)) {
        std::printf("k=%d INFEASIBLE: %s\n", k, why.c_str());
        return 1;
      }
      if (Value::cmp(res.cut.capacity, want) != 0) {
        std::printf("k=%d CUT MISMATCH\n", k);
        return 1;
      }
    } catch (const std::exception& ex) {
      std::printf("k=%d THREW: %s (n=%d pairs=%d)\n", k, ex.what(), g.n,
                  g.arc_count() / 2);
      return 1;
    }
  }
  std::printf("ok %d instances\n", count);
  return 0;
}
