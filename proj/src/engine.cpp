#include "strongflow/engine.hpp"

#include <algorithm>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "strongflow/approx.hpp"
#include "strongflow/witness.hpp"

namespace strongflow {

namespace {

int rv(int e) { return FlowInstance::rev(e); }

}  // namespace

// ---------------------------------------------------------------- heap pool

int Engine::HeapPool::make(const Value& key, int arc, long long gen) {
  int id;
  if (!free_list.empty()) {
    id = free_list.back();
    free_list.pop_back();
    nodes[id] = Node{key, arc, gen, -1, -1};
  } else {
    id = (int)nodes.size();
    nodes.push_back(Node{key, arc, gen, -1, -1});
  }
  return id;
}

int Engine::HeapPool::meld(int a, int b) {
  if (a < 0) return b;
  if (b < 0) return a;
  int c = Value::cmp(nodes[a].key, nodes[b].key);
  bool a_top = c > 0 || (c == 0 && nodes[a].arc <= nodes[b].arc);
  int top = a_top ? a : b;
  int sub = a_top ? b : a;
  nodes[sub].sib = nodes[top].child;
  nodes[top].child = sub;
  return top;
}

int Engine::HeapPool::push(int root, const Value& key, int arc, long long gen) {
  return meld(root, make(key, arc, gen));
}

int Engine::HeapPool::pop(int root) {
  int c = nodes[root].child;
  nodes[root].child = -1;
  free_list.push_back(root);
  std::vector<int> seq;
  while (c >= 0) {
    int a = c;
    int b = nodes[a].sib;
    int next = b >= 0 ? nodes[b].sib : -1;
    nodes[a].sib = -1;
    if (b >= 0) nodes[b].sib = -1;
    seq.push_back(b >= 0 ? meld(a, b) : a);
    c = next;
  }
  int out = -1;
  for (int i = (int)seq.size() - 1; i >= 0; --i) out = meld(seq[i], out);
  return out;
}

// ------------------------------------------------------------- construction

Engine::Engine(const FlowInstance& input, const EngineConfig& cfg)
    : input_(input), cfg_(cfg) {
  input_.check_valid(true);
  if (!is_bounded(input_))
    throw flow_error("unbounded instance: infinite-capacity s-t path");
  n_ = input_.n;
  s_ = input_.s;
  t_ = input_.t;
  Value nsq((long long)n_ * n_);
  gamma_ = Value(4) * nsq;
  gamma2_ = gamma_ * gamma_;
  m_big_ = gamma2_ * gamma2_ * gamma_;
  coalesce_input(input_);
  init_state();
  init_itco();
}

// Parallel input arcs are merged into one pair per unordered node pair. A
// side holding an infinite input arc is replaced by the sum of all finite
// input capacities, which no flow can exceed, except that interior sides
// stay infinite unless both directions would be: those arcs are learned as
// abundant right away. Every interior node also gets (s,i) and (i,t) pairs
// whose reverse sides are unbounded, so excess can always be parked.
void Engine::coalesce_input(const FlowInstance& input) {
  g_ = FlowInstance();
  g_.n = n_;
  g_.s = s_;
  g_.t = t_;
  g_.out.assign(n_, {});

  u_total_ = Value(0);
  for (const Arc& a : input.arcs)
    if (a.cap.is_finite()) u_total_ += a.cap;

  std::map<std::pair<int, int>, std::vector<int>> groups;
  for (int e = 0; e < input.arc_count(); ++e) {
    int a = input.arcs[e].tail, b = input.arcs[e].head;
    groups[{std::min(a, b), std::max(a, b)}].push_back(e);
  }

  bnd_si_.assign(n_, -1);
  bnd_it_.assign(n_, -1);
  side_inputs_.clear();

  auto split_side = [&](const std::vector<int>& es, int tail) {
    std::vector<int> ids;
    Value cap(0);
    bool inf = false;
    for (int e : es) {
      if (input.arcs[e].tail != tail) continue;
      ids.push_back(e);
      if (input.arcs[e].cap.is_finite())
        cap += input.arcs[e].cap;
      else
        inf = true;
    }
    return std::tuple<std::vector<int>, Value, bool>(std::move(ids),
                                                     std::move(cap), inf);
  };

  auto add_base = [&](int tail, int head, Value cf, Value cr,
                      std::vector<int> fwd_ids, std::vector<int> rev_ids) {
    int fe = g_.add_pair(tail, head, std::move(cf), std::move(cr));
    side_inputs_.push_back(std::move(fwd_ids));
    side_inputs_.push_back(std::move(rev_ids));
    return fe;
  };

  for (auto& [key, es] : groups) {
    auto [a, b] = key;
    if (a == s_ || b == s_) {
      int i = a == s_ ? b : a;
      auto [ids_f, cap_f, inf_f] = split_side(es, s_);
      auto [ids_r, cap_r, inf_r] = split_side(es, i);
      (void)cap_r;
      (void)inf_r;
      Value cf = inf_f ? cap_f + u_total_ : cap_f;
      bnd_si_[i] = add_base(s_, i, std::move(cf), Value::infinity(),
                            std::move(ids_f), std::move(ids_r));
    } else if (a == t_ || b == t_) {
      int i = a == t_ ? b : a;
      auto [ids_f, cap_f, inf_f] = split_side(es, i);
      auto [ids_r, cap_r, inf_r] = split_side(es, t_);
      (void)cap_r;
      (void)inf_r;
      Value cf = inf_f ? cap_f + u_total_ : cap_f;
      bnd_it_[i] = add_base(i, t_, std::move(cf), Value::infinity(),
                            std::move(ids_f), std::move(ids_r));
    } else {
      auto [ids_f, cap_f, inf_f] = split_side(es, a);
      auto [ids_r, cap_r, inf_r] = split_side(es, b);
      Value cf = inf_f ? Value::infinity() : cap_f;
      Value cr = inf_r ? Value::infinity() : cap_r;
      if (inf_f && inf_r) cr = cap_r + u_total_;
      add_base(a, b, std::move(cf), std::move(cr), std::move(ids_f),
               std::move(ids_r));
    }
  }

  for (int i = 0; i < n_; ++i) {
    if (i == s_ || i == t_) continue;
    if (bnd_si_[i] < 0)
      bnd_si_[i] = add_base(s_, i, Value(0), Value::infinity(), {}, {});
    if (bnd_it_[i] < 0)
      bnd_it_[i] = add_base(i, t_, Value(0), Value::infinity(), {}, {});
  }

  base_arcs_ = g_.arc_count();
  mc_ = n_;
  for (const Arc& a : g_.arcs)
    if (a.cap.is_finite() && a.cap.is_positive()) mc_++;
  cap_iters_ = cfg_.iteration_cap < 0 ? 20 * mc_ + 100 : cfg_.iteration_cap;
}

void Engine::init_state() {
  int m = g_.arc_count();
  f_ = FlowState(g_);
  r_.assign(m, Value(0));
  abundant_.assign(m, 0);
  shortcut_.assign(m, 0);
  extension_.assign(m, 0);
  dead_.assign(m, 0);
  gen_.assign(m, 0);
  tree_loc_.assign(m, 0);
  tree_it_.assign(m, ResTree::iterator());
  touch_mark_.assign(m, 0);
  assign_mark_.assign(m, 0);
  cur_shortcut_.assign(n_, -1);
  root_.resize(n_);
  members_.assign(n_, {});
  tree_edges_.assign(n_, {});
  heap_root_.assign(n_, -1);
  for (int v = 0; v < n_; ++v) {
    root_[v] = v;
    members_[v] = {v};
  }

  // start from the boundary-saturated flow: source and sink pairs full,
  // interior pairs full on one finite side
  for (int p = 0; p < m / 2; ++p) {
    int ef = 2 * p, eb = ef + 1;
    const Arc& af = g_.arcs[ef];
    if (af.tail == s_ || af.head == t_) {
      f_.f[ef] = af.cap;
    } else if (!af.cap.is_finite()) {
      f_.f[eb] = g_.arcs[eb].cap;
    } else if (!g_.arcs[eb].cap.is_finite()) {
      f_.f[ef] = af.cap;
    } else {
      f_.f[eb] = g_.arcs[eb].cap;
    }
  }

  // park interior excesses on the unbounded (i,s) and (t,i) sides
  std::vector<Value> ex(n_, Value(0));
  for (int e = 0; e < m; ++e) {
    if (f_.f[e].is_zero()) continue;
    ex[g_.arcs[e].head] += f_.f[e];
    ex[g_.arcs[e].tail] -= f_.f[e];
  }
  for (int i = 0; i < n_; ++i) {
    if (i == s_ || i == t_) continue;
    if (ex[i].is_positive())
      f_.f[rv(bnd_si_[i])] = ex[i];
    else if (ex[i].is_negative())
      f_.f[rv(bnd_it_[i])] = -ex[i];
  }

  eps_ = Value(0);
  for (int e = 0; e < m; ++e)
    if (g_.arcs[e].cap.is_finite()) eps_ += g_.arcs[e].cap;

  for (int e = 0; e < m; ++e) r_[e] = residual_of(e);

  if (eps_.is_zero()) return;  // no finite capacity: nothing to learn

  for (int e = 0; e < m; ++e) {
    if (residual_of(e).is_finite())
      track_insert(e);
    else
      abundant_[e] = 1;
  }
}

void Engine::init_itco() {
  itco_ = make_itco(cfg_.backend);
  if (cfg_.backend == ItcoBackend::treedepth) {
    itco_->tc_init_tree(contracted_tree());
  } else if (cfg_.backend == ItcoBackend::ordered) {
    std::vector<Value> x(n_, Value(0));
    if (!eps_.is_zero())
      for (int v = 0; v < n_; ++v) x[v] = x_value(v);
    itco_->tc_init_ordered(n_, x);
  } else {
    itco_->tc_init(n_);
  }
  if (eps_.is_zero()) return;
  std::vector<std::pair<int, int>> abd;
  std::vector<int> ids;
  for (int e = 0; e < g_.arc_count(); ++e) {
    if (!abundant_[e]) continue;
    abd.push_back({g_.arcs[e].tail, g_.arcs[e].head});
    ids.push_back(e);
  }
  if (!abd.empty()) itco_->tc_add(abd);
  process_merges(ids);  // cannot fire on the initial flow, kept for uniformity
}

// The engine inserts pairs joining s and t with every interior node, so the
// tree handed to the treedepth backend must keep s and t as ancestors of
// everything: s becomes the root, t its only child, and interior nodes skip
// over s and t in their parent chain (falling back to t at the top).
std::vector<int> Engine::contracted_tree() const {
  const std::vector<int>& par = cfg_.tree_parent;
  if ((int)par.size() != n_)
    throw flow_error("treedepth backend needs a spanning tree of the nodes");
  int roots = 0;
  for (int v = 0; v < n_; ++v) {
    if (par[v] == -1)
      roots++;
    else if (par[v] < 0 || par[v] >= n_ || par[v] == v)
      throw flow_error("tree parent out of range");
  }
  if (roots != 1) throw flow_error("tree must have exactly one root");
  std::vector<std::vector<int>> kids(n_);
  int top = -1, seen = 0;
  for (int v = 0; v < n_; ++v) {
    if (par[v] == -1)
      top = v;
    else
      kids[par[v]].push_back(v);
  }
  std::vector<int> stack{top};
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    ++seen;
    for (int c : kids[v]) stack.push_back(c);
  }
  if (seen != n_) throw flow_error("tree parent chain does not end");
  std::vector<int> out(n_, -1);
  if (t_ != s_) out[t_] = s_;
  for (int v = 0; v < n_; ++v) {
    if (v == s_ || v == t_) continue;
    int p = par[v];
    int steps = 0;
    while (p != -1 && (p == s_ || p == t_)) {
      p = par[p];
      if (++steps > n_) throw flow_error("tree parent chain does not end");
    }
    out[v] = p == -1 ? t_ : p;
  }
  out[s_] = -1;
  return out;
}

int Engine::new_pair(int tail, int head, Value cap_fwd, Value cap_rev) {
  int fe = g_.add_pair(tail, head, std::move(cap_fwd), std::move(cap_rev));
  f_.resize_for(g_);
  int m = g_.arc_count();
  abundant_.resize(m, 0);
  shortcut_.resize(m, 0);
  extension_.resize(m, 0);
  dead_.resize(m, 0);
  r_.resize(m, Value(0));
  gen_.resize(m, 0);
  tree_loc_.resize(m, 0);
  tree_it_.resize(m, ResTree::iterator());
  touch_mark_.resize(m, 0);
  assign_mark_.resize(m, 0);
  return fe;
}

// ------------------------------------------------------ residual bookkeeping

void Engine::track_insert(int e) {
  Value key = residual_of(e);
  if (!key.is_finite())
    throw flow_error("tracking an arc with unbounded residual");
  bool cross = root_[g_.arcs[e].tail] != root_[g_.arcs[e].head];
  ResTree& tree = cross ? cross_ : intra_;
  tree_it_[e] = tree.insert({key, e});
  tree_loc_[e] = cross ? 1 : 2;
  if (cross && cfg_.backend == ItcoBackend::ordered) {
    int a = root_[g_.arcs[e].tail], b = root_[g_.arcs[e].head];
    heap_root_[a] = pool_.push(heap_root_[a], key, e, gen_[e]);
    heap_root_[b] = pool_.push(heap_root_[b], key, e, gen_[e]);
  }
}

void Engine::track_erase(int e) {
  if (tree_loc_[e] == 0) return;
  (tree_loc_[e] == 1 ? cross_ : intra_).erase(tree_it_[e]);
  tree_loc_[e] = 0;
  gen_[e]++;
}

void Engine::track_rekey(int e) {
  if (tree_loc_[e] == 0) return;
  ResTree& tree = tree_loc_[e] == 1 ? cross_ : intra_;
  Value key = residual_of(e);
  tree.erase(tree_it_[e]);
  tree_it_[e] = tree.insert({key, e});
  gen_[e]++;
  if (tree_loc_[e] == 1 && cfg_.backend == ItcoBackend::ordered) {
    int a = root_[g_.arcs[e].tail], b = root_[g_.arcs[e].head];
    heap_root_[a] = pool_.push(heap_root_[a], key, e, gen_[e]);
    heap_root_[b] = pool_.push(heap_root_[b], key, e, gen_[e]);
  }
}

// Arcs whose endpoints were just merged move from the cross index to the
// intra one; the key is unchanged, so heap copies stay valid until popped.
void Engine::track_relocate_pair(int e) {
  for (int a : {e, rv(e)}) {
    if (tree_loc_[a] == 0) continue;
    bool cross = root_[g_.arcs[a].tail] != root_[g_.arcs[a].head];
    unsigned char want = cross ? 1 : 2;
    if (tree_loc_[a] == want) continue;
    ResTree& from = tree_loc_[a] == 1 ? cross_ : intra_;
    ResTree& to = cross ? cross_ : intra_;
    Value key = tree_it_[a]->first;
    from.erase(tree_it_[a]);
    tree_it_[a] = to.insert({std::move(key), a});
    tree_loc_[a] = want;
  }
}

void Engine::touch(int e) {
  for (int a : {e, rv(e)}) {
    if (touch_mark_[a] != touch_epoch_) {
      touch_mark_[a] = touch_epoch_;
      touched_.push_back(a);
    }
  }
}

void Engine::set_r(int e, Value v) { r_[e] = std::move(v); }

void Engine::apply_send(int e, const Value& amount) {
  if (amount.is_zero()) return;
  send_flow(g_, f_, e, amount);
  touch(e);
  track_rekey(e);
  track_rekey(rv(e));
}

// Pushes e to its capacity and repairs conservation: the endpoints hand the
// difference to their component roots over the shortcut pairs, and each
// involved interior root parks it on its source and sink pairs.
void Engine::saturate(int e) {
  Value d = residual_of(e);
  if (d.is_zero()) return;
  if (!d.is_finite())
    throw flow_error("saturating an arc with unbounded residual");
  f_.f[e] = g_.arcs[e].cap;
  f_.f[rv(e)] = Value(0);
  touch(e);
  track_rekey(e);
  track_rekey(rv(e));
  int i = g_.arcs[e].tail, j = g_.arcs[e].head;
  int p = root_[i], q = root_[j];
  if (p != s_ && p != t_) {
    Value dp = Value::min(d, residual_of(bnd_si_[p]));
    apply_send(bnd_si_[p], dp);
    apply_send(rv(bnd_it_[p]), d - dp);
  }
  if (p != i) apply_send(rv(cur_shortcut_[i]), d);
  if (q != j) apply_send(cur_shortcut_[j], d);
  if (q != s_ && q != t_) {
    Value dq = Value::min(d, residual_of(bnd_it_[q]));
    apply_send(bnd_it_[q], dq);
    apply_send(rv(bnd_si_[q]), d - dq);
  }
}

// Largest cross-component residual below the abundance line at this root,
// popping entries that went stale. Entries at or above the line can be
// dropped for good: any later rekey pushes fresh copies.
Value Engine::x_value(int root_node) {
  Value thr = gamma_ * eps_;
  int& h = heap_root_[root_node];
  while (h >= 0) {
    const HeapPool::Node& top = pool_.nodes[h];
    int e = top.arc;
    bool live = gen_[e] == top.gen &&
                root_[g_.arcs[e].tail] != root_[g_.arcs[e].head];
    if (live && top.key < thr) return top.key;
    h = pool_.pop(h);
  }
  return Value(0);
}

// ---------------------------------------------------------------- iteration

void Engine::iterate() {
  if (done()) throw flow_error("iterate called after the accuracy reached zero");
  met_.iterations++;
  if (met_.iterations > cap_iters_)
    throw flow_error("iteration cap exceeded");

  Value nsq((long long)n_ * n_);
  Value thr_hi = gamma_ * eps_;
  Value thr_lo = eps_ / m_big_;

  // essential arcs: cross-component residuals inside the active window
  last_ess_.clear();
  for (auto it = cross_.lower_bound(thr_lo);
       it != cross_.end() && it->first < thr_hi; ++it)
    last_ess_.push_back(it->second);
  std::sort(last_ess_.begin(), last_ess_.end());
  met_.essential_total += (long long)last_ess_.size();

  std::vector<int> ress;
  ress.reserve(2 * last_ess_.size());
  for (int e : last_ess_) {
    ress.push_back(root_[g_.arcs[e].tail]);
    ress.push_back(root_[g_.arcs[e].head]);
  }
  std::sort(ress.begin(), ress.end());
  ress.erase(std::unique(ress.begin(), ress.end()), ress.end());

  // error floor contributed by the arcs below the window
  Value delta1;
  {
    auto it = cross_.lower_bound(thr_lo);
    if (it != cross_.begin()) delta1 = nsq * std::prev(it)->first;
  }

  Value delta2;
  std::vector<int> new_ext, fresh_ext;

  if (!last_ess_.empty()) {
    Cover cover = itco_->tc_cover(ress);
    met_.cover_arcs_total += (long long)cover.arcs.size();
    bool s_in = std::binary_search(ress.begin(), ress.end(), s_);
    bool t_in = std::binary_search(ress.begin(), ress.end(), t_);
    if (s_in && t_in) {
      // compact auxiliary instance over the essential endpoints, the cover
      // nodes, and the roots needed to wire non-roots back up
      std::vector<int> vbar;
      for (int e : last_ess_) {
        vbar.push_back(g_.arcs[e].tail);
        vbar.push_back(g_.arcs[e].head);
      }
      for (int v : cover.nodes) vbar.push_back(v);
      {
        size_t plain = vbar.size();
        for (size_t k = 0; k < plain; ++k) vbar.push_back(root_[vbar[k]]);
      }
      std::sort(vbar.begin(), vbar.end());
      vbar.erase(std::unique(vbar.begin(), vbar.end()), vbar.end());

      std::vector<int> idx(n_, -1);
      for (int k = 0; k < (int)vbar.size(); ++k) idx[vbar[k]] = k;

      FlowInstance aux;
      aux.n = (int)vbar.size();
      aux.s = idx[s_];
      aux.t = idx[t_];
      std::vector<Value> ubar;
      std::vector<int> back;  // aux arc -> engine arc, -1 on cover pairs
      std::vector<std::pair<int, int>> hpair;

      auto push_aux = [&](int tail, int head, Value cf, Value cr, int bf,
                          int bb, std::pair<int, int> hp) {
        ubar.push_back(cf);
        ubar.push_back(cr);
        aux.add_pair(tail, head, std::move(cf), std::move(cr));
        back.push_back(bf);
        back.push_back(bb);
        hpair.push_back(hp);
        hpair.push_back({-1, -1});
      };

      for (size_t k = 0; k < last_ess_.size();) {
        int pid = last_ess_[k] >> 1;
        bool hf = false, hb = false;
        for (; k < last_ess_.size() && (last_ess_[k] >> 1) == pid; ++k) {
          if (last_ess_[k] & 1)
            hb = true;
          else
            hf = true;
        }
        int ef = 2 * pid, eb = ef + 1;
        push_aux(idx[g_.arcs[ef].tail], idx[g_.arcs[ef].head],
                 hf ? r_[ef] : Value(0), hb ? r_[eb] : Value(0), ef, eb,
                 {-1, -1});
      }
      for (const auto& [a, b] : cover.arcs)
        push_aux(idx[a], idx[b], Value::infinity(), Value(0), -1, -1, {a, b});
      for (int v : vbar)
        if (root_[v] != v)
          push_aux(idx[v], idx[root_[v]], Value::infinity(), Value::infinity(),
                   cur_shortcut_[v], rv(cur_shortcut_[v]), {-1, -1});

      ApproxResult ap = approx_flow(aux, ubar, m_big_);

      if (ap.certificate_arc >= 0) {
        int ce = ap.certificate_arc;
        Value room = ubar[ce] - ap.flow.f[ce] + ap.flow.f[rv(ce)];
        if (!room.is_finite())
          throw flow_error("auxiliary certificate arc has unbounded residual");
        delta2 = Value((long long)aux.arc_count()) * room;
      }

      // fold the auxiliary flow back onto the engine arcs; flow on a cover
      // pair lands on a transitive extension pair, reusing a live one
      for (int e = 0; e < aux.arc_count(); ++e) {
        const Value& y = ap.flow.f[e];
        if (y.is_zero()) continue;
        if (back[e] >= 0) {
          apply_send(back[e], y);
          continue;
        }
        auto [a, b] = hpair[e];
        if (a < 0) throw flow_error("auxiliary flow on a reverse cover arc");
        auto hit = ext_pair_.find({a, b});
        int fe;
        if (hit != ext_pair_.end()) {
          fe = hit->second;
          apply_send(fe, y);
        } else {
          fe = new_pair(a, b, Value::infinity(), Value(0));
          f_.f[fe] = y;
          abundant_[fe] = 1;
          extension_[fe] = 1;
          extension_[rv(fe)] = 1;
          track_insert(rv(fe));
          ext_pair_[{a, b}] = fe;
          fresh_ext.push_back(fe);
        }
        new_ext.push_back(fe);
      }
    }
  }

  Value delta = delta1 + delta2;

  std::vector<int> work;
  work.reserve(last_ess_.size() + new_ext.size());
  for (int e : last_ess_)
    if (!arc_boundary(e)) work.push_back(e);
  work.insert(work.end(), new_ext.begin(), new_ext.end());
  std::sort(work.begin(), work.end());
  work.erase(std::unique(work.begin(), work.end()), work.end());

  post_process(delta, work);
  refresh_safe_caps(delta);

  // keep the fresh extension pairs that still carry flow, drop the rest
  for (int fe : fresh_ext) {
    if (!f_.f[fe].is_zero()) {
      f_ext_.push_back(fe);
      met_.extension_arcs++;
      continue;
    }
    int be = rv(fe);
    track_erase(be);
    ext_pair_.erase({g_.arcs[fe].tail, g_.arcs[fe].head});
    g_.arcs[fe].cap = Value(0);
    g_.arcs[be].cap = Value(0);
    abundant_[fe] = 0;
    dead_[fe] = dead_[be] = 1;
    r_[fe] = Value(0);
    r_[be] = Value(0);
  }

  Value eps_next = Value(2) * nsq * delta;
  if (Value::cmp(eps_next * gamma_ * gamma2_, eps_) > 0)
    throw flow_error("accuracy did not contract by the required factor");
  eps_ = eps_next;

  if (!eps_.is_zero()) {
    std::vector<int> fresh;
    sweep_abundant(&fresh);
    if (!fresh.empty()) {
      std::vector<std::pair<int, int>> arcs;
      arcs.reserve(fresh.size());
      for (int e : fresh) arcs.push_back({g_.arcs[e].tail, g_.arcs[e].head});
      itco_->tc_add(arcs);
    }
    process_merges(fresh);
    if (cfg_.backend == ItcoBackend::ordered && !ress.empty()) {
      std::vector<Value> ys;
      ys.reserve(ress.size());
      for (int v : ress)
        ys.push_back(root_[v] == v ? x_value(v) : Value(0));
      itco_->tc_reorder(ress, ys);
    }
  }

  if (cfg_.debug_level > 0) audit(cfg_.debug_level);
}

// Near-saturated pair sides are pushed over their bound so both directions
// leave the active window; everything else gets its safe capacity pinned a
// step under the residual. Rebalanced arcs get the looser 3*delta cap.
void Engine::post_process(const Value& delta, const std::vector<int>& work) {
  touch_epoch_++;
  assign_epoch_++;
  touched_.clear();
  Value dbl = Value(2) * delta;
  Value trip = Value(3) * delta;
  for (int e : work) {
    if (dead_[e]) continue;
    int eb = rv(e);
    Value res_b = residual_of(eb);
    Value res_f = residual_of(e);
    if (res_b.is_positive() && res_b < dbl && res_f.is_positive()) {
      saturate(eb);
      set_r(e, Value::min(residual_of(e), trip));
      set_r(eb, Value(0));
    } else if (res_f.is_positive() && res_f < dbl && res_b.is_positive()) {
      saturate(e);
      set_r(eb, Value::min(residual_of(eb), trip));
      set_r(e, Value(0));
    } else {
      set_r(e, Value::min(res_f, delta));
      assign_mark_[e] = assign_epoch_;
      continue;
    }
    assign_mark_[e] = assign_epoch_;
    assign_mark_[eb] = assign_epoch_;
  }
}

void Engine::refresh_safe_caps(const Value& delta) {
  Value trip = Value(3) * delta;
  for (int e = 0; e < g_.arc_count(); ++e) {
    if (dead_[e] || shortcut_[e]) continue;
    if (assign_mark_[e] == assign_epoch_) continue;
    const Value& cap = touch_mark_[e] == touch_epoch_ ? trip : delta;
    set_r(e, Value::min(residual_of(e), cap));
  }
}

void Engine::sweep_abundant(std::vector<int>* newly) {
  Value thr = gamma_ * eps_;
  for (ResTree* tree : {&cross_, &intra_}) {
    auto it = tree->lower_bound(thr);
    while (it != tree->end()) {
      int e = it->second;
      it = tree->erase(it);
      tree_loc_[e] = 0;
      gen_[e]++;
      abundant_[e] = 1;
      newly->push_back(e);
    }
  }
  std::sort(newly->begin(), newly->end());
}

// Abundant arcs leaving the source component or entering the sink component
// pull the other side in; an abundant two-way pair joins two interior
// components. Absorbing spreads, so freshly qualified arcs are requeued.
void Engine::process_merges(const std::vector<int>& queue) {
  touch_epoch_++;
  touched_.clear();
  std::vector<int> q = queue;
  for (size_t at = 0; at < q.size(); ++at) {
    int e = q[at];
    if (dead_[e] || shortcut_[e]) continue;
    int a = g_.arcs[e].tail, b = g_.arcs[e].head;
    int ra = root_[a], rb = root_[b];
    if (ra == rb) continue;
    bool fwd = abundant_[e] != 0, bwd = abundant_[rv(e)] != 0;
    bool s_out = (ra == s_ && fwd) || (rb == s_ && bwd);
    bool t_in = (rb == t_ && fwd) || (ra == t_ && bwd);
    if (s_out && t_in)
      throw flow_error("abundant residual arc joins the source and sink sides");
    if (s_out) {
      int gone = ra == s_ ? rb : ra;
      int ct = a, ch = b, ce = e;
      if (!(ra == s_ && fwd)) {
        ct = b;
        ch = a;
        ce = rv(e);
      }
      merge_components(s_, gone, ct, ch, ce, &q);
    } else if (t_in) {
      int gone = rb == t_ ? ra : rb;
      int ct = a, ch = b, ce = e;
      if (!(rb == t_ && fwd)) {
        ct = b;
        ch = a;
        ce = rv(e);
      }
      merge_components(t_, gone, ct, ch, ce, &q);
    } else if (fwd && bwd) {
      int surv = ra, gone = rb;
      size_t sa = members_[ra].size(), sb = members_[rb].size();
      if (sb > sa || (sb == sa && rb < ra)) {
        surv = rb;
        gone = ra;
      }
      merge_components(surv, gone, a, b, e, &q);
    }
  }
  for (int e : touched_)
    if (!dead_[e] && !shortcut_[e]) set_r(e, Value::min(r_[e], residual_of(e)));
}

void Engine::merge_components(int survivor, int gone, int conn_tail,
                              int conn_head, int conn_arc,
                              std::vector<int>* worklist) {
  // every absorbed node gets a fresh shortcut pair to its new root
  std::vector<int> moved = std::move(members_[gone]);
  members_[gone].clear();
  for (int i : moved) {
    int fe = new_pair(i, survivor, Value::infinity(), Value::infinity());
    shortcut_[fe] = shortcut_[rv(fe)] = 1;
    abundant_[fe] = abundant_[rv(fe)] = 1;
    r_[fe] = Value::infinity();
    r_[rv(fe)] = Value::infinity();
    cur_shortcut_[i] = fe;
    f_short_.push_back(fe);
    met_.shortcut_arcs++;
  }
  for (int i : moved) root_[i] = survivor;
  for (int i : moved)
    for (int e : g_.out[i]) track_relocate_pair(e);
  members_[survivor].insert(members_[survivor].end(), moved.begin(),
                            moved.end());

  if (cfg_.backend == ItcoBackend::ordered) {
    heap_root_[survivor] = pool_.meld(heap_root_[survivor], heap_root_[gone]);
    heap_root_[gone] = -1;
  }

  tree_edges_[survivor].insert(tree_edges_[survivor].end(),
                               tree_edges_[gone].begin(),
                               tree_edges_[gone].end());
  tree_edges_[gone].clear();
  tree_edges_[survivor].push_back(TreeEdge{conn_tail, conn_head, conn_arc});

  // low-residual boundary arcs of the vanished root are pushed to their cap
  Value dbl = Value(2) * eps_;
  for (int be : {bnd_si_[gone], bnd_it_[gone]}) {
    Value res = residual_of(be);
    if (res.is_positive() && res < dbl) saturate(be);
  }

  if (survivor == s_) {
    for (int i : moved)
      for (int e : g_.out[i])
        if (abundant_[e] && !shortcut_[e] && !dead_[e]) worklist->push_back(e);
  } else if (survivor == t_) {
    for (int i : moved)
      for (int e : g_.out[i])
        if (abundant_[rv(e)] && !shortcut_[rv(e)] && !dead_[rv(e)])
          worklist->push_back(rv(e));
  }
}

// ----------------------------------------------------------- final rerouting

// Replaces all shortcut flow by flow on the component trees: each node's net
// shortcut divergence is peeled leaves-first, surpluses climbing toward the
// root and deficits drawing from it. In the source component surpluses go
// straight out on (i,s), in the sink component deficits on (t,i).
void Engine::reroute_shortcut() {
  Value before = flow_value(g_, f_);
  std::vector<Value> d(n_, Value(0));
  for (int fe : f_short_) {
    int be = rv(fe);
    Value net = f_.f[fe] - f_.f[be];
    if (!net.is_zero()) {
      d[g_.arcs[fe].tail] += net;
      d[g_.arcs[fe].head] -= net;
    }
    f_.f[fe] = Value(0);
    f_.f[be] = Value(0);
  }

  std::vector<std::vector<std::pair<int, int>>> adj(n_);
  for (int k = 0; k < n_; ++k)
    for (const TreeEdge& te : tree_edges_[k]) {
      adj[te.x].push_back({te.y, te.arc});
      adj[te.y].push_back({te.x, rv(te.arc)});
    }

  std::vector<int> parent(n_, -1), up(n_, -1), down(n_, -1), order;
  std::vector<char> seen(n_, 0);
  for (int k = 0; k < n_; ++k) {
    if (root_[k] != k) continue;
    order.clear();
    order.push_back(k);
    seen[k] = 1;
    for (size_t at = 0; at < order.size(); ++at) {
      int u = order[at];
      for (auto [v, a] : adj[u]) {
        if (seen[v]) continue;
        seen[v] = 1;
        parent[v] = u;
        down[v] = a;
        up[v] = rv(a);
        order.push_back(v);
      }
    }
    if (order.size() != members_[k].size())
      throw flow_error("component tree does not span its members");
    for (size_t at = order.size(); at-- > 1;) {
      int i = order[at];
      if (d[i].is_positive()) {
        if (k == s_) {
          send_flow(g_, f_, rv(bnd_si_[i]), d[i]);
        } else {
          send_flow(g_, f_, up[i], d[i]);
          d[parent[i]] += d[i];
        }
      } else if (d[i].is_negative()) {
        if (k == t_) {
          send_flow(g_, f_, rv(bnd_it_[i]), -d[i]);
        } else {
          send_flow(g_, f_, down[i], -d[i]);
          d[parent[i]] += d[i];
        }
      }
    }
    if (k != s_ && k != t_ && !d[k].is_zero())
      throw flow_error("shortcut rerouting left excess at an interior root");
  }
  if (Value::cmp(flow_value(g_, f_), before) != 0)
    throw flow_error("shortcut rerouting changed the flow value");
}

// Flow on abundant arcs, extension pairs included, is pooled per witness
// entry and routed down to plain arcs by the witness list, then the plain
// totals are netted per node pair back onto the instance arcs.
void Engine::route_witnesses() {
  Value before = flow_value(g_, f_);
  const WitnessList& lst = itco_->tc_wit_list();
  std::vector<Value> fw(lst.size(), Value(0));
  std::vector<int> carriers;
  for (int e = 0; e < g_.arc_count(); ++e) {
    if (dead_[e] || shortcut_[e] || !abundant_[e]) continue;
    if (!f_.f[e].is_positive()) continue;
    int i = lst.index_of(g_.arcs[e].tail, g_.arcs[e].head);
    if (i < 0) throw flow_error("abundant flow outside the recorded cover");
    fw[i] += f_.f[e];
    carriers.push_back(e);
  }

  // reverse sides of extension pairs that turned into recorded plain arcs
  // cancel against their opposite pair instead of routing on their own
  std::vector<int> rev_entries;
  for (int fe : f_ext_) {
    if (dead_[fe]) continue;
    int a = g_.arcs[fe].tail, b = g_.arcs[fe].head;
    if (!lst.is_arc(b, a)) continue;
    int ir = lst.index_of(b, a);
    int ia = lst.index_of(a, b);
    if (ia >= 0 && ia < ir) rev_entries.push_back(ir);
  }
  std::sort(rev_entries.begin(), rev_entries.end());
  rev_entries.erase(std::unique(rev_entries.begin(), rev_entries.end()),
                    rev_entries.end());

  std::vector<Value> h = wit_route(lst, fw, rev_entries);

  for (int e : carriers) f_.f[e] = Value(0);

  for (int i = 0; i < lst.size(); ++i) {
    const WitnessList::Entry& en = lst.entry(i);
    if (en.w != en.b && !h[i].is_zero())
      throw flow_error("witness routing left flow on a transitive pair");
  }

  std::vector<char> used(lst.size(), 0);
  for (int i = 0; i < lst.size(); ++i) {
    if (used[i]) continue;
    const WitnessList::Entry& en = lst.entry(i);
    if (en.w != en.b) continue;
    used[i] = 1;
    Value net = h[i];
    int j = lst.index_of(en.b, en.a);
    if (j >= 0) {
      used[j] = 1;
      net -= h[j];
    }
    if (net.is_zero()) continue;
    int from = en.a, to = en.b;
    Value amt = net;
    if (net.is_negative()) {
      from = en.b;
      to = en.a;
      amt = -net;
    }
    int target = -1;
    for (int e2 : g_.out[from])
      if (e2 < base_arcs_ && g_.arcs[e2].head == to) {
        target = e2;
        break;
      }
    if (target < 0)
      throw flow_error("witness flow without a matching instance arc");
    send_flow(g_, f_, target, amt);
  }

  std::string why;
  if (!is_feasible(g_, f_, &why))
    throw flow_error("witness routing broke feasibility: " + why);
  if (Value::cmp(flow_value(g_, f_), before) != 0)
    throw flow_error("witness routing changed the flow value");
}

SolveResult Engine::extract_result() {
  if (!done()) throw flow_error("result requested before the run finished");
  if (extracted_) return result_;

  reroute_shortcut();
  route_witnesses();
  to_acyclic_basic(g_, f_);

  for (int e = base_arcs_; e < g_.arc_count(); ++e)
    if (!f_.f[e].is_zero())
      throw flow_error("auxiliary arcs still carry flow after rerouting");

  Value engine_val = flow_value(g_, f_);

  // spread each pair's flow over the input arcs it was coalesced from
  FlowState fin;
  fin.resize_for(input_);
  for (int e = 0; e < base_arcs_; ++e) {
    if (f_.f[e].is_zero()) continue;
    Value rem = f_.f[e];
    for (int ia : side_inputs_[e]) {
      if (rem.is_zero()) break;
      Value take = Value::min(rem, input_.arcs[ia].cap);
      fin.f[ia] = take;
      rem -= take;
    }
    if (!rem.is_zero())
      throw flow_error("pair flow exceeds the matching input capacities");
  }

  std::string why;
  if (!is_feasible(input_, fin, &why))
    throw flow_error("extracted flow is infeasible: " + why);
  Value val = flow_value(input_, fin);
  if (Value::cmp(val, engine_val) != 0)
    throw flow_error("flow value changed while mapping back to input arcs");

  result_.cut = min_cut_from_flow(input_, fin);
  result_.value = std::move(val);
  result_.flow = std::move(fin.f);
  result_.metrics = met_;
  extracted_ = true;
  return result_;
}

SolveResult Engine::solve() {
  while (!done()) iterate();
  return extract_result();
}

// ----------------------------------------------------------------- accessors

std::vector<int> Engine::roots() const {
  std::vector<int> out;
  for (int v = 0; v < n_; ++v)
    if (root_[v] == v) out.push_back(v);
  return out;
}

bool Engine::arc_boundary(int e) const {
  int a = g_.arcs[e].tail, b = g_.arcs[e].head;
  int i;
  if (a == s_ || a == t_)
    i = b;
  else if (b == s_ || b == t_)
    i = a;
  else
    return false;
  return i != s_ && i != t_ && root_[i] == i;
}

std::vector<int> Engine::gap_arcs() const {
  std::vector<int> out;
  if (eps_.is_zero()) return out;
  Value margin = Value(2) * eps_ / gamma2_;
  for (int p = 0; p < g_.arc_count() / 2; ++p) {
    int ef = 2 * p, eb = ef + 1;
    if (dead_[ef] || shortcut_[ef]) continue;
    if (root_[g_.arcs[ef].tail] == root_[g_.arcs[ef].head]) continue;
    if (arc_boundary(ef)) continue;
    if (residual_of(ef) >= r_[ef] + margin &&
        residual_of(eb) >= r_[eb] + margin)
      out.push_back(ef);
  }
  return out;
}

void Engine::audit(int level) const {
  std::string why;
  if (!is_feasible(g_, f_, &why)) throw flow_error("audit: " + why);
  for (int e = 0; e < g_.arc_count(); ++e) {
    if (dead_[e]) continue;
    if (Value::cmp(r_[e], residual_of(e)) > 0)
      throw flow_error("audit: safe capacity above the residual");
  }
  if (level < 2) return;
  long long total = 0;
  for (int v = 0; v < n_; ++v) {
    if (root_[v] == v) {
      total += (long long)members_[v].size();
      for (int i : members_[v])
        if (root_[i] != v) throw flow_error("audit: member list out of date");
    } else {
      if (!members_[v].empty())
        throw flow_error("audit: absorbed root keeps members");
      int fe = cur_shortcut_[v];
      if (fe < 0 || !shortcut_[fe] || g_.arcs[fe].tail != v ||
          g_.arcs[fe].head != root_[v])
        throw flow_error("audit: stale shortcut pointer");
    }
  }
  if (total != n_)
    throw flow_error("audit: components do not partition the nodes");
  for (int e = 0; e < g_.arc_count(); ++e) {
    bool should = !dead_[e] && !shortcut_[e] && !abundant_[e];
    if (should != (tree_loc_[e] != 0))
      throw flow_error("audit: residual index membership is stale");
    if (tree_loc_[e]) {
      bool cross = root_[g_.arcs[e].tail] != root_[g_.arcs[e].head];
      if ((tree_loc_[e] == 1) != cross)
        throw flow_error("audit: arc filed in the wrong residual index");
      if (tree_it_[e]->second != e ||
          Value::cmp(tree_it_[e]->first, residual_of(e)) != 0)
        throw flow_error("audit: residual index key out of date");
    }
  }
}

SolveResult solve_max_flow(const FlowInstance& input, const EngineConfig& cfg) {
  Engine eng(input, cfg);
  return eng.solve();
}

}  // namespace strongflow
