#include "automata.hpp"

#include <algorithm>
#include <cassert>
#include <deque>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>

namespace hyso {

// ---------------------------------------------------------------------------
// LassoWord

LassoWord LassoWord::drop_track(int track, int ap_count) const {
  auto squeeze = [&](ZipLetter l) {
    ZipLetter low = l & ((ZipLetter(1) << (track * ap_count)) - 1);
    ZipLetter high = l >> ((track + 1) * ap_count);
    return low | (high << (track * ap_count));
  };
  LassoWord out;
  out.arity = arity - 1;
  for (ZipLetter l : prefix) out.prefix.push_back(squeeze(l));
  for (ZipLetter l : cycle) out.cycle.push_back(squeeze(l));
  return out;
}

LassoWord LassoWord::select_track(int track, int ap_count) const {
  ZipLetter mask = (ap_count >= 64) ? ~ZipLetter(0)
                                    : ((ZipLetter(1) << ap_count) - 1);
  auto pick = [&](ZipLetter l) { return (l >> (track * ap_count)) & mask; };
  LassoWord out;
  out.arity = 1;
  for (ZipLetter l : prefix) out.prefix.push_back(pick(l));
  for (ZipLetter l : cycle) out.cycle.push_back(pick(l));
  return out;
}

LassoWord LassoWord::canonical() const {
  LassoWord w = *this;
  // Primitive period.
  for (size_t d = 1; d < w.cycle.size(); ++d) {
    if (w.cycle.size() % d != 0) continue;
    bool periodic = true;
    for (size_t i = d; i < w.cycle.size() && periodic; ++i)
      periodic = w.cycle[i] == w.cycle[i % d];
    if (periodic) {
      w.cycle.resize(d);
      break;
    }
  }
  // Fold the prefix tail into the cycle where they agree.
  while (!w.prefix.empty() && w.prefix.back() == w.cycle.back()) {
    w.prefix.pop_back();
    std::rotate(w.cycle.begin(), w.cycle.end() - 1, w.cycle.end());
  }
  return w;
}

// ---------------------------------------------------------------------------
// Operation context

namespace {
thread_local OpContext* g_ctx = nullptr;
}

void OpContext::charge(size_t n) {
  peak_states = std::max(peak_states, n);
  if (n > state_budget)
    throw BudgetError("state budget exceeded (" + std::to_string(n) + " > " +
                      std::to_string(state_budget) + ")");
}

OpContext* current_op_context() { return g_ctx; }

OpScope::OpScope(OpContext& ctx) : prev_(g_ctx) { g_ctx = &ctx; }
OpScope::~OpScope() { g_ctx = prev_; }

namespace {
void charge(size_t n) {
  if (g_ctx) g_ctx->charge(n);
}
}  // namespace

// ---------------------------------------------------------------------------
// Nba basics

bool Nba::all_accepting() const {
  for (uint8_t a : acc)
    if (!a) return false;
  return true;
}

size_t Nba::add_state(bool initial, bool accepting) {
  succ.emplace_back();
  init.push_back(initial);
  acc.push_back(accepting);
  return succ.size() - 1;
}

void Nba::add_edge(uint32_t src, Bdd guard, uint32_t dst) {
  if (guard == GuardManager::bot) return;
  succ[src].push_back({guard, dst});
}

Nba make_empty_nba(std::shared_ptr<GuardManager> gm, int arity) {
  Nba a;
  a.gm = std::move(gm);
  a.arity = arity;
  return a;
}

Nba make_universal_nba(std::shared_ptr<GuardManager> gm, int arity) {
  Nba a;
  a.gm = std::move(gm);
  a.arity = arity;
  a.add_state(true, true);
  a.add_edge(0, GuardManager::top, 0);
  return a;
}

Nba make_lasso_pattern_nba(std::shared_ptr<GuardManager> gm,
                           const LassoWord& w, int pinned_tracks, int arity) {
  Nba a;
  a.gm = gm;
  a.arity = arity;
  size_t n = w.total_len();
  for (size_t i = 0; i < n; ++i) a.add_state(i == 0, true);
  for (size_t i = 0; i < n; ++i) {
    size_t nxt = (i + 1 == n) ? w.period_start() : i + 1;
    a.add_edge(static_cast<uint32_t>(i),
               gm->letter_guard(w.at(i), pinned_tracks),
               static_cast<uint32_t>(nxt));
  }
  return a;
}

Nba make_lasso_nba(std::shared_ptr<GuardManager> gm, const LassoWord& w) {
  return make_lasso_pattern_nba(gm, w, w.arity, w.arity);
}

bool is_deterministic(const Nba& a) {
  int inits = 0;
  for (uint8_t i : a.init) inits += i;
  if (inits > 1) return false;
  for (const auto& edges : a.succ)
    for (size_t i = 0; i < edges.size(); ++i)
      for (size_t j = i + 1; j < edges.size(); ++j)
        if (a.gm->mk_and(edges[i].guard, edges[j].guard) != GuardManager::bot)
          return false;
  return true;
}

// ---------------------------------------------------------------------------
// SCC analysis (iterative Tarjan)

namespace {

struct SccInfo {
  std::vector<int> comp;       // state -> component id
  int count = 0;               // number of components
  std::vector<uint8_t> nontrivial;  // component has an internal edge
};

SccInfo scc_decompose(const Nba& a) {
  size_t n = a.size();
  SccInfo out;
  out.comp.assign(n, -1);
  std::vector<int> low(n, 0), idx(n, -1);
  std::vector<uint32_t> stck;
  std::vector<uint8_t> on(n, 0);
  int counter = 0;

  struct Frame {
    uint32_t v;
    size_t edge;
  };
  for (uint32_t root = 0; root < n; ++root) {
    if (idx[root] != -1) continue;
    std::vector<Frame> frames{{root, 0}};
    idx[root] = low[root] = counter++;
    stck.push_back(root);
    on[root] = 1;
    while (!frames.empty()) {
      Frame& fr = frames.back();
      if (fr.edge < a.succ[fr.v].size()) {
        uint32_t w = a.succ[fr.v][fr.edge].dst;
        ++fr.edge;
        if (idx[w] == -1) {
          idx[w] = low[w] = counter++;
          stck.push_back(w);
          on[w] = 1;
          frames.push_back({w, 0});
        } else if (on[w]) {
          low[fr.v] = std::min(low[fr.v], idx[w]);
        }
      } else {
        uint32_t v = fr.v;
        frames.pop_back();
        if (!frames.empty())
          low[frames.back().v] = std::min(low[frames.back().v], low[v]);
        if (low[v] == idx[v]) {
          int c = out.count++;
          for (;;) {
            uint32_t w = stck.back();
            stck.pop_back();
            on[w] = 0;
            out.comp[w] = c;
            if (w == v) break;
          }
        }
      }
    }
  }
  out.nontrivial.assign(out.count, 0);
  for (uint32_t v = 0; v < n; ++v)
    for (const auto& e : a.succ[v])
      if (out.comp[e.dst] == out.comp[v]) out.nontrivial[out.comp[v]] = 1;
  return out;
}

std::vector<uint8_t> reachable_states(const Nba& a) {
  std::vector<uint8_t> seen(a.size(), 0);
  std::deque<uint32_t> q;
  for (uint32_t s = 0; s < a.size(); ++s)
    if (a.init[s]) {
      seen[s] = 1;
      q.push_back(s);
    }
  while (!q.empty()) {
    uint32_t v = q.front();
    q.pop_front();
    for (const auto& e : a.succ[v])
      if (!seen[e.dst]) {
        seen[e.dst] = 1;
        q.push_back(e.dst);
      }
  }
  return seen;
}

// States from which some accepting cycle is reachable.
std::vector<uint8_t> live_states(const Nba& a, const SccInfo& scc) {
  size_t n = a.size();
  std::vector<uint8_t> target(n, 0);
  for (uint32_t v = 0; v < n; ++v)
    if (a.acc[v] && scc.nontrivial[scc.comp[v]]) target[v] = 1;
  // Backward closure.
  std::vector<std::vector<uint32_t>> pred(n);
  for (uint32_t v = 0; v < n; ++v)
    for (const auto& e : a.succ[v]) pred[e.dst].push_back(v);
  std::deque<uint32_t> q;
  std::vector<uint8_t> live = target;
  for (uint32_t v = 0; v < n; ++v)
    if (live[v]) q.push_back(v);
  while (!q.empty()) {
    uint32_t v = q.front();
    q.pop_front();
    for (uint32_t p : pred[v])
      if (!live[p]) {
        live[p] = 1;
        q.push_back(p);
      }
  }
  return live;
}

Nba restrict_states(const Nba& a, const std::vector<uint8_t>& keep) {
  Nba out;
  out.gm = a.gm;
  out.arity = a.arity;
  std::vector<int> remap(a.size(), -1);
  for (uint32_t v = 0; v < a.size(); ++v)
    if (keep[v]) remap[v] = static_cast<int>(out.add_state(a.init[v], a.acc[v]));
  for (uint32_t v = 0; v < a.size(); ++v) {
    if (!keep[v]) continue;
    for (const auto& e : a.succ[v])
      if (keep[e.dst])
        out.add_edge(remap[v], e.guard, remap[e.dst]);
  }
  return out;
}

Nba prune(const Nba& a) {
  if (a.size() == 0) return a;
  std::vector<uint8_t> reach = reachable_states(a);
  Nba r = restrict_states(a, reach);
  if (r.size() == 0) return r;
  SccInfo scc = scc_decompose(r);
  std::vector<uint8_t> live = live_states(r, scc);
  bool any = false;
  for (uint32_t v = 0; v < r.size(); ++v) any = any || (live[v] && r.init[v]);
  if (!any) return make_empty_nba(a.gm, a.arity);
  return restrict_states(r, live);
}

void merge_parallel_edges(Nba& a) {
  for (auto& edges : a.succ) {
    std::map<uint32_t, Bdd> merged;
    for (const auto& e : edges) {
      auto [it, fresh] = merged.emplace(e.dst, e.guard);
      if (!fresh) it->second = a.gm->mk_or(it->second, e.guard);
    }
    edges.clear();
    for (auto& [dst, g] : merged) edges.push_back({g, dst});
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Products

Nba intersect(const Nba& a, const Nba& b) {
  assert(a.gm == b.gm);
  if (a.arity != b.arity) throw std::invalid_argument("intersect: arity mismatch");
  const bool aall = a.all_accepting();
  const bool ball = b.all_accepting();
  // Phase counter is only needed when both sides carry real acceptance.
  const bool phased = !aall && !ball;

  Nba out;
  out.gm = a.gm;
  out.arity = a.arity;

  auto key = [](uint32_t qa, uint32_t qb, uint32_t ph) {
    return (uint64_t(qa) << 34) | (uint64_t(qb) << 2) | ph;
  };
  std::unordered_map<uint64_t, uint32_t> ids;
  std::deque<std::tuple<uint32_t, uint32_t, uint32_t>> work;

  auto accepting = [&](uint32_t qa, uint32_t qb, uint32_t ph) {
    if (aall && ball) return true;
    if (aall) return static_cast<bool>(b.acc[qb]);
    if (ball) return static_cast<bool>(a.acc[qa]);
    return ph == 0 && a.acc[qa];
  };
  auto get = [&](uint32_t qa, uint32_t qb, uint32_t ph, bool initial) {
    uint64_t k = key(qa, qb, ph);
    auto it = ids.find(k);
    if (it != ids.end()) return it->second;
    uint32_t id = static_cast<uint32_t>(
        out.add_state(initial, accepting(qa, qb, ph)));
    charge(out.size());
    ids.emplace(k, id);
    work.emplace_back(qa, qb, ph);
    return id;
  };

  for (uint32_t qa = 0; qa < a.size(); ++qa)
    for (uint32_t qb = 0; qb < b.size(); ++qb)
      if (a.init[qa] && b.init[qb]) get(qa, qb, 0, true);

  while (!work.empty()) {
    auto [qa, qb, ph] = work.front();
    work.pop_front();
    uint32_t src = ids[key(qa, qb, ph)];
    uint32_t ph2 = ph;
    if (phased) {
      if (ph == 0 && a.acc[qa]) ph2 = 1;
      else if (ph == 1 && b.acc[qb]) ph2 = 0;
    }
    for (const auto& ea : a.succ[qa])
      for (const auto& eb : b.succ[qb]) {
        Bdd g = a.gm->mk_and(ea.guard, eb.guard);
        if (g == GuardManager::bot) continue;
        out.add_edge(src, g, get(ea.dst, eb.dst, ph2, false));
      }
  }
  return out;
}

Nba nba_union(const Nba& a, const Nba& b) {
  assert(a.gm == b.gm);
  if (a.arity != b.arity) throw std::invalid_argument("union: arity mismatch");
  Nba out;
  out.gm = a.gm;
  out.arity = a.arity;
  for (uint32_t v = 0; v < a.size(); ++v) out.add_state(a.init[v], a.acc[v]);
  size_t off = a.size();
  for (uint32_t v = 0; v < b.size(); ++v) out.add_state(b.init[v], b.acc[v]);
  for (uint32_t v = 0; v < a.size(); ++v)
    for (const auto& e : a.succ[v]) out.add_edge(v, e.guard, e.dst);
  for (uint32_t v = 0; v < b.size(); ++v)
    for (const auto& e : b.succ[v])
      out.add_edge(static_cast<uint32_t>(off + v), e.guard,
                   static_cast<uint32_t>(off + e.dst));
  charge(out.size());
  return out;
}

Nba project_exists(const Nba& a, int track) {
  if (a.arity < 1 || track < 0 || track >= a.arity)
    throw std::invalid_argument("project_exists: track out of range");
  Nba out;
  out.gm = a.gm;
  out.arity = a.arity - 1;
  out.init = a.init;
  out.acc = a.acc;
  out.succ.resize(a.size());
  for (uint32_t v = 0; v < a.size(); ++v)
    for (const auto& e : a.succ[v])
      out.succ[v].push_back({a.gm->project_track(e.guard, track, a.arity),
                             e.dst});
  return out;
}

Nba lift(const Nba& a, int target_arity) {
  if (target_arity < a.arity)
    throw std::invalid_argument("lift: target arity too small");
  if (target_arity == a.arity) return a;
  std::vector<int> track_map;
  for (int t = 0; t + 1 < a.arity; ++t) track_map.push_back(t);
  track_map.push_back(target_arity - 1);
  Nba out;
  out.gm = a.gm;
  out.arity = target_arity;
  out.init = a.init;
  out.acc = a.acc;
  out.succ.resize(a.size());
  for (uint32_t v = 0; v < a.size(); ++v)
    for (const auto& e : a.succ[v])
      out.succ[v].push_back({a.gm->lift_tracks(e.guard, track_map), e.dst});
  return out;
}

// ---------------------------------------------------------------------------
// Emptiness and membership

std::optional<LassoWord> is_empty(const Nba& a) {
  if (a.size() == 0) return std::nullopt;
  std::vector<uint8_t> reach = reachable_states(a);
  Nba r = restrict_states(a, reach);
  if (r.size() == 0) return std::nullopt;
  SccInfo scc = scc_decompose(r);

  // First accepting state inside a cycle-bearing component, by state id.
  int target = -1;
  for (uint32_t v = 0; v < r.size(); ++v)
    if (r.acc[v] && scc.nontrivial[scc.comp[v]]) {
      target = static_cast<int>(v);
      break;
    }
  if (target < 0) return std::nullopt;

  auto bfs_path = [&](uint32_t from, uint32_t to, bool within_comp,
                      bool at_least_one_step) {
    // Returns the guards along a shortest path.
    std::vector<int> prev_state(r.size(), -1);
    std::vector<Bdd> prev_guard(r.size(), GuardManager::bot);
    std::deque<uint32_t> q;
    std::vector<uint8_t> seen(r.size(), 0);
    auto expand = [&](uint32_t v) {
      for (const auto& e : r.succ[v]) {
        if (within_comp && scc.comp[e.dst] != scc.comp[to]) continue;
        if (!seen[e.dst]) {
          seen[e.dst] = 1;
          prev_state[e.dst] = static_cast<int>(v);
          prev_guard[e.dst] = e.guard;
          q.push_back(e.dst);
        }
      }
    };
    if (at_least_one_step) {
      expand(from);
    } else {
      seen[from] = 1;
      q.push_back(from);
      if (from == to) return std::vector<Bdd>{};
    }
    while (!q.empty()) {
      uint32_t v = q.front();
      q.pop_front();
      if (v == to) {
        std::vector<Bdd> guards;
        uint32_t cur = v;
        while (true) {
          int p = prev_state[cur];
          guards.push_back(prev_guard[cur]);
          if (p < 0) break;
          if (static_cast<uint32_t>(p) == from && guards.size() > 0) {
            // Reached the start.
            cur = p;
            break;
          }
          cur = p;
        }
        std::reverse(guards.begin(), guards.end());
        return guards;
      }
      expand(v);
    }
    return std::vector<Bdd>{};  // unreachable by construction
  };

  // Path from an initial state to the target.
  std::vector<int> prev_state(r.size(), -1);
  std::vector<Bdd> prev_guard(r.size(), GuardManager::bot);
  std::vector<uint8_t> seen(r.size(), 0);
  std::deque<uint32_t> q;
  for (uint32_t v = 0; v < r.size(); ++v)
    if (r.init[v]) {
      seen[v] = 1;
      q.push_back(v);
    }
  while (!q.empty() && !seen[target]) {
    uint32_t v = q.front();
    q.pop_front();
    for (const auto& e : r.succ[v])
      if (!seen[e.dst]) {
        seen[e.dst] = 1;
        prev_state[e.dst] = static_cast<int>(v);
        prev_guard[e.dst] = e.guard;
        q.push_back(e.dst);
      }
  }
  std::vector<Bdd> stem;
  for (uint32_t cur = target; prev_state[cur] >= 0;
       cur = static_cast<uint32_t>(prev_state[cur]))
    stem.push_back(prev_guard[cur]);
  std::reverse(stem.begin(), stem.end());

  std::vector<Bdd> loop =
      bfs_path(target, target, /*within_comp=*/true, /*at_least_one_step=*/true);
  assert(!loop.empty());

  LassoWord w;
  w.arity = a.arity;
  for (Bdd g : stem) w.prefix.push_back(a.gm->min_letter(g, a.arity));
  for (Bdd g : loop) w.cycle.push_back(a.gm->min_letter(g, a.arity));
  return w;
}

bool accepts(const Nba& a, const LassoWord& w) {
  if (w.arity != a.arity) throw std::invalid_argument("accepts: arity mismatch");
  if (a.size() == 0) return false;
  Nba word = make_lasso_nba(a.gm, w);
  return is_empty(intersect(a, word)).has_value();
}

// ---------------------------------------------------------------------------
// Reduction: pruning, safety determinization, bisimulation quotient

namespace {

// Subset construction; exact for all-accepting (safety-shaped) automata once
// dead states are pruned. Returns nothing if the cap is exceeded.
std::optional<Nba> try_subset_det(const Nba& a, size_t cap) {
  Nba out;
  out.gm = a.gm;
  out.arity = a.arity;
  std::map<std::vector<uint32_t>, uint32_t> ids;
  std::deque<std::vector<uint32_t>> work;

  std::vector<uint32_t> start;
  for (uint32_t v = 0; v < a.size(); ++v)
    if (a.init[v]) start.push_back(v);
  if (start.empty()) return make_empty_nba(a.gm, a.arity);
  ids.emplace(start, out.add_state(true, true));
  work.push_back(start);

  while (!work.empty()) {
    std::vector<uint32_t> s = work.front();
    work.pop_front();
    uint32_t src = ids[s];
    std::vector<Bdd> guards;
    for (uint32_t v : s)
      for (const auto& e : a.succ[v]) guards.push_back(e.guard);
    std::sort(guards.begin(), guards.end());
    guards.erase(std::unique(guards.begin(), guards.end()), guards.end());
    for (Bdd region : a.gm->regions(guards)) {
      std::vector<uint32_t> t;
      for (uint32_t v : s)
        for (const auto& e : a.succ[v])
          if (a.gm->mk_and(region, e.guard) != GuardManager::bot)
            t.push_back(e.dst);
      std::sort(t.begin(), t.end());
      t.erase(std::unique(t.begin(), t.end()), t.end());
      if (t.empty()) continue;
      auto it = ids.find(t);
      uint32_t dst;
      if (it == ids.end()) {
        if (ids.size() >= cap) return std::nullopt;
        dst = static_cast<uint32_t>(out.add_state(false, true));
        charge(out.size());
        ids.emplace(t, dst);
        work.push_back(t);
      } else {
        dst = it->second;
      }
      out.add_edge(src, region, dst);
    }
  }
  merge_parallel_edges(out);
  return out;
}

Nba bisim_quotient(const Nba& a) {
  size_t n = a.size();
  if (n == 0) return a;
  std::vector<int> cls(n);
  for (uint32_t v = 0; v < n; ++v) cls[v] = a.acc[v] ? 1 : 0;

  using Sig = std::vector<std::pair<int, Bdd>>;
  for (;;) {
    std::map<std::pair<int, Sig>, int> next_ids;
    std::vector<int> next(n);
    for (uint32_t v = 0; v < n; ++v) {
      std::map<int, Bdd> per_class;
      for (const auto& e : a.succ[v]) {
        auto [it, fresh] = per_class.emplace(cls[e.dst], e.guard);
        if (!fresh) it->second = a.gm->mk_or(it->second, e.guard);
      }
      Sig sig(per_class.begin(), per_class.end());
      auto key = std::make_pair(cls[v], std::move(sig));
      auto [it, fresh] = next_ids.emplace(key, static_cast<int>(next_ids.size()));
      (void)fresh;
      next[v] = it->second;
    }
    bool changed = false;
    for (uint32_t v = 0; v < n; ++v) changed = changed || next[v] != cls[v];
    cls = std::move(next);
    if (!changed) break;
  }

  int classes = 0;
  for (uint32_t v = 0; v < n; ++v) classes = std::max(classes, cls[v] + 1);
  Nba out;
  out.gm = a.gm;
  out.arity = a.arity;
  std::vector<int> rep(classes, -1);
  for (int c = 0; c < classes; ++c) out.add_state(false, false);
  for (uint32_t v = 0; v < n; ++v) {
    if (a.init[v]) out.init[cls[v]] = 1;
    if (a.acc[v]) out.acc[cls[v]] = 1;
    if (rep[cls[v]] < 0) rep[cls[v]] = static_cast<int>(v);
  }
  for (int c = 0; c < classes; ++c) {
    std::map<int, Bdd> per_class;
    for (const auto& e : a.succ[rep[c]]) {
      auto [it, fresh] = per_class.emplace(cls[e.dst], e.guard);
      if (!fresh) it->second = a.gm->mk_or(it->second, e.guard);
    }
    for (auto& [dc, g] : per_class) out.add_edge(c, g, dc);
  }
  return out;
}

}  // namespace

Nba reduce(const Nba& a) {
  Nba p = prune(a);
  if (p.size() == 0) return make_empty_nba(a.gm, a.arity);
  merge_parallel_edges(p);
  if (p.all_accepting()) {
    size_t cap = std::max<size_t>(128, 4 * p.size());
    if (auto det = try_subset_det(p, cap)) {
      Nba q = bisim_quotient(*det);
      charge(q.size());
      return q;
    }
  }
  Nba q = bisim_quotient(p);
  charge(q.size());
  return q;
}

// ---------------------------------------------------------------------------
// Complementation

namespace {

Nba det_complement(const Nba& a) {
  // Two-copy complement of a deterministic (possibly incomplete) automaton.
  Nba out;
  out.gm = a.gm;
  out.arity = a.arity;
  size_t n = a.size();
  // copy 0: ids [0, n); copy 1: ids via map; sink last.
  std::vector<int> copy1(n, -1);
  for (uint32_t v = 0; v < n; ++v) out.add_state(a.init[v], false);
  for (uint32_t v = 0; v < n; ++v)
    if (!a.acc[v])
      copy1[v] = static_cast<int>(out.add_state(a.init[v], true));
  uint32_t sink = static_cast<uint32_t>(out.add_state(false, true));
  out.add_edge(sink, GuardManager::top, sink);

  for (uint32_t v = 0; v < n; ++v) {
    Bdd covered = GuardManager::bot;
    for (const auto& e : a.succ[v]) {
      covered = a.gm->mk_or(covered, e.guard);
      out.add_edge(v, e.guard, e.dst);
      if (copy1[e.dst] >= 0) {
        out.add_edge(v, e.guard, copy1[e.dst]);
        if (copy1[v] >= 0) out.add_edge(copy1[v], e.guard, copy1[e.dst]);
      }
    }
    Bdd rest = a.gm->mk_not(covered);
    if (rest != GuardManager::bot) {
      out.add_edge(v, rest, sink);
      if (copy1[v] >= 0) out.add_edge(copy1[v], rest, sink);
    }
  }
  charge(out.size());
  return out;
}

// Checks whether no component mixes accepting and rejecting cycles; if so,
// fills `bad` with the states of components lacking an accepting cycle.
bool weak_bad_states(const Nba& a, std::vector<uint8_t>& bad) {
  SccInfo scc = scc_decompose(a);
  size_t n = a.size();
  std::vector<uint8_t> has_acc(scc.count, 0);
  for (uint32_t v = 0; v < n; ++v)
    if (a.acc[v] && scc.nontrivial[scc.comp[v]]) has_acc[scc.comp[v]] = 1;
  // Rejecting cycle inside a component: a cycle avoiding accepting states.
  std::vector<uint8_t> has_rej(scc.count, 0);
  {
    // Build the subgraph of non-accepting states with intra-component edges
    // and look for cycles per component.
    Nba sub;
    sub.gm = a.gm;
    sub.arity = a.arity;
    std::vector<int> remap(n, -1);
    for (uint32_t v = 0; v < n; ++v)
      if (!a.acc[v]) remap[v] = static_cast<int>(sub.add_state(false, false));
    for (uint32_t v = 0; v < n; ++v) {
      if (a.acc[v]) continue;
      for (const auto& e : a.succ[v])
        if (!a.acc[e.dst] && scc.comp[e.dst] == scc.comp[v])
          sub.add_edge(remap[v], e.guard, remap[e.dst]);
    }
    SccInfo sub_scc = scc_decompose(sub);
    for (uint32_t v = 0; v < n; ++v)
      if (remap[v] >= 0 && sub_scc.nontrivial[sub_scc.comp[remap[v]]])
        has_rej[scc.comp[v]] = 1;
  }
  for (int c = 0; c < scc.count; ++c)
    if (has_acc[c] && has_rej[c]) return false;
  bad.assign(n, 0);
  for (uint32_t v = 0; v < n; ++v)
    if (!has_acc[scc.comp[v]]) bad[v] = 1;
  return true;
}

// Breakpoint determinization of an inherently weak automaton read as a
// co-Buchi automaton (runs must eventually avoid `bad`), then the dual
// Buchi acceptance yields the complement.
Nba breakpoint_complement(const Nba& a, const std::vector<uint8_t>& bad) {
  Nba out;
  out.gm = a.gm;
  out.arity = a.arity;

  using Macro = std::pair<std::vector<uint32_t>, std::vector<uint32_t>>;
  std::map<Macro, uint32_t> ids;
  std::deque<Macro> work;

  auto intern = [&](Macro m, bool initial) {
    auto it = ids.find(m);
    if (it != ids.end()) return it->second;
    bool brk = m.second.empty();
    uint32_t id = static_cast<uint32_t>(out.add_state(initial, brk));
    charge(out.size());
    ids.emplace(m, id);
    work.push_back(std::move(m));
    return id;
  };

  Macro start;
  for (uint32_t v = 0; v < a.size(); ++v)
    if (a.init[v]) start.first.push_back(v);
  for (uint32_t v : start.first)
    if (!bad[v]) start.second.push_back(v);
  intern(start, true);

  while (!work.empty()) {
    Macro m = work.front();
    work.pop_front();
    uint32_t src = ids[m];
    std::vector<Bdd> guards;
    for (uint32_t v : m.first)
      for (const auto& e : a.succ[v]) guards.push_back(e.guard);
    std::sort(guards.begin(), guards.end());
    guards.erase(std::unique(guards.begin(), guards.end()), guards.end());

    auto step = [&](const std::vector<uint32_t>& set, Bdd region) {
      std::vector<uint32_t> t;
      for (uint32_t v : set)
        for (const auto& e : a.succ[v])
          if (a.gm->mk_and(region, e.guard) != GuardManager::bot)
            t.push_back(e.dst);
      std::sort(t.begin(), t.end());
      t.erase(std::unique(t.begin(), t.end()), t.end());
      return t;
    };

    std::vector<Bdd> regions = a.gm->regions(guards);
    Bdd covered = GuardManager::bot;
    for (Bdd g : guards) covered = a.gm->mk_or(covered, g);
    Bdd rest = a.gm->mk_not(covered);
    if (rest != GuardManager::bot) regions.push_back(rest);

    for (Bdd region : regions) {
      Macro t;
      t.first = step(m.first, region);
      if (!m.second.empty()) {
        std::vector<uint32_t> o = step(m.second, region);
        for (uint32_t v : o)
          if (!bad[v]) t.second.push_back(v);
      } else {
        for (uint32_t v : t.first)
          if (!bad[v]) t.second.push_back(v);
      }
      out.add_edge(src, region, intern(std::move(t), false));
    }
  }
  return out;
}

// Kupferman-Vardi rank-based complement; general fallback, budget-guarded.
Nba rank_complement(const Nba& a) {
  const int n = static_cast<int>(a.size());
  const int max_rank = 2 * n;

  struct Macro {
    std::vector<std::pair<uint32_t, int>> ranking;  // (state, rank) sorted
    std::vector<uint32_t> owing;                    // O-set, sorted
    bool operator<(const Macro& o) const {
      if (ranking != o.ranking) return ranking < o.ranking;
      return owing < o.owing;
    }
  };

  Nba out;
  out.gm = a.gm;
  out.arity = a.arity;
  std::map<Macro, uint32_t> ids;
  std::deque<Macro> work;

  auto intern = [&](Macro m, bool initial) {
    auto it = ids.find(m);
    if (it != ids.end()) return it->second;
    uint32_t id =
        static_cast<uint32_t>(out.add_state(initial, m.owing.empty()));
    charge(out.size());
    ids.emplace(m, id);
    work.push_back(std::move(m));
    return id;
  };

  Macro start;
  for (uint32_t v = 0; v < a.size(); ++v)
    if (a.init[v]) start.ranking.emplace_back(v, max_rank);
  intern(start, true);

  while (!work.empty()) {
    Macro m = work.front();
    work.pop_front();
    uint32_t src = ids[m];

    std::vector<Bdd> guards;
    for (auto [v, r] : m.ranking)
      for (const auto& e : a.succ[v]) guards.push_back(e.guard);
    std::sort(guards.begin(), guards.end());
    guards.erase(std::unique(guards.begin(), guards.end()), guards.end());
    std::vector<Bdd> regions = a.gm->regions(guards);
    Bdd covered = GuardManager::bot;
    for (Bdd g : guards) covered = a.gm->mk_or(covered, g);
    Bdd rest = a.gm->mk_not(covered);
    if (rest != GuardManager::bot) regions.push_back(rest);

    for (Bdd region : regions) {
      // Rank bound for each successor.
      std::map<uint32_t, int> bound;
      for (auto [v, r] : m.ranking)
        for (const auto& e : a.succ[v])
          if (a.gm->mk_and(region, e.guard) != GuardManager::bot) {
            auto [it, fresh] = bound.emplace(e.dst, r);
            if (!fresh) it->second = std::min(it->second, r);
          }
      std::vector<std::pair<uint32_t, int>> succs(bound.begin(), bound.end());
      std::vector<uint32_t> owing_succ;
      if (!m.owing.empty()) {
        std::set<uint32_t> os;
        for (uint32_t v : m.owing)
          for (const auto& e : a.succ[v])
            if (a.gm->mk_and(region, e.guard) != GuardManager::bot)
              os.insert(e.dst);
        owing_succ.assign(os.begin(), os.end());
      }

      // Enumerate all rankings below the bounds (even ranks on accepting
      // states). Exponential; acceptable as a guarded last resort.
      std::vector<int> choice(succs.size(), 0);
      std::vector<std::vector<int>> options(succs.size());
      for (size_t i = 0; i < succs.size(); ++i) {
        for (int r = 0; r <= succs[i].second; ++r) {
          if (a.acc[succs[i].first] && r % 2 == 1) continue;
          options[i].push_back(r);
        }
      }
      std::vector<size_t> pos(succs.size(), 0);
      bool done = succs.empty();
      if (succs.empty()) {
        // No runs survive; accept everything from here.
        Macro t;
        out.add_edge(src, region, intern(std::move(t), false));
        continue;
      }
      while (!done) {
        Macro t;
        for (size_t i = 0; i < succs.size(); ++i)
          t.ranking.emplace_back(succs[i].first, options[i][pos[i]]);
        auto rank_of = [&](uint32_t v) {
          for (auto [s, r] : t.ranking)
            if (s == v) return r;
          return -1;
        };
        if (!m.owing.empty()) {
          for (uint32_t v : owing_succ)
            if (rank_of(v) % 2 == 0) t.owing.push_back(v);
        } else {
          for (auto [s, r] : t.ranking)
            if (r % 2 == 0) t.owing.push_back(s);
        }
        out.add_edge(src, region, intern(std::move(t), false));
        // Advance the odometer.
        size_t i = 0;
        for (; i < succs.size(); ++i) {
          if (++pos[i] < options[i].size()) break;
          pos[i] = 0;
        }
        done = i == succs.size();
      }
    }
  }
  return out;
}

}  // namespace

Nba complement(const Nba& a0) {
  if (a0.arity == 0) {
    // Over the singleton alphabet the language is empty or everything.
    return is_empty(a0) ? make_empty_nba(a0.gm, 0)
                        : make_universal_nba(a0.gm, 0);
  }
  Nba a = reduce(a0);
  if (a.size() == 0) return make_universal_nba(a0.gm, a0.arity);
  if (is_deterministic(a)) return reduce(det_complement(a));
  std::vector<uint8_t> bad;
  if (weak_bad_states(a, bad)) return reduce(breakpoint_complement(a, bad));
  return reduce(rank_complement(a));
}

std::optional<LassoWord> language_included(const Nba& a, const Nba& b) {
  return is_empty(intersect(a, complement(b)));
}

std::optional<LassoWord> find_extension(const Nba& a, const LassoWord& w) {
  Nba pattern = make_lasso_pattern_nba(a.gm, w, w.arity, a.arity);
  return is_empty(intersect(a, pattern));
}

std::string to_text(const Nba& a) {
  std::ostringstream os;
  os << "NBA arity=" << a.arity << " states=" << a.size() << "\n";
  os << "Acceptance: Buchi\n";
  for (uint32_t v = 0; v < a.size(); ++v) {
    os << "State " << v;
    if (a.init[v]) os << " Start";
    if (a.acc[v]) os << " Acc";
    os << "\n";
    for (const auto& e : a.succ[v])
      os << "  [" << a.gm->to_string(e.guard, a.arity) << "] -> " << e.dst
         << "\n";
  }
  return os.str();
}

}  // namespace hyso
