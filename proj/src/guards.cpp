#include "guards.hpp"

#include <algorithm>
#include <cassert>
#include <stdexcept>

namespace hyso {

namespace {
enum Op { OP_AND = 1, OP_OR = 2, OP_XOR = 3, OP_NOT = 4, OP_EXISTS = 5 };

// Node ids are kept below 2^28 so two of them and a tag fit in 64 bits.
constexpr uint32_t kMaxId = (1u << 28) - 1;

uint64_t pack(uint32_t tag, uint32_t a, uint32_t b) {
  return (uint64_t(tag) << 56) | (uint64_t(a) << 28) | b;
}
}  // namespace

GuardManager::GuardManager(int ap_count) : nap_(ap_count) {
  // Slots 0/1 are the false/true terminals; var is a sentinel.
  nodes_.push_back({1 << 30, 0, 0});
  nodes_.push_back({1 << 30, 1, 1});
}

Bdd GuardManager::mk_node(int var, Bdd lo, Bdd hi) {
  if (lo == hi) return lo;
  uint64_t key = pack(static_cast<uint32_t>(var) + 16, lo, hi);
  auto it = unique_.find(key);
  if (it != unique_.end()) return it->second;
  if (nodes_.size() >= kMaxId) throw std::runtime_error("guard table overflow");
  Bdd id = static_cast<Bdd>(nodes_.size());
  nodes_.push_back({var, lo, hi});
  unique_.emplace(key, id);
  return id;
}

Bdd GuardManager::var(int track, int ap) {
  return mk_node(var_index(track, ap), bot, top);
}

Bdd GuardManager::nvar(int track, int ap) {
  return mk_node(var_index(track, ap), top, bot);
}

Bdd GuardManager::mk_not(Bdd a) {
  if (a == bot) return top;
  if (a == top) return bot;
  uint64_t key = pack(OP_NOT, a, 0);
  auto it = cache_.find(key);
  if (it != cache_.end()) return it->second;
  const Node n = nodes_[a];
  Bdd r = mk_node(n.var, mk_not(n.lo), mk_not(n.hi));
  cache_.emplace(key, r);
  return r;
}

Bdd GuardManager::apply(int op, Bdd a, Bdd b) {
  switch (op) {
    case OP_AND:
      if (a == bot || b == bot) return bot;
      if (a == top) return b;
      if (b == top) return a;
      if (a == b) return a;
      break;
    case OP_OR:
      if (a == top || b == top) return top;
      if (a == bot) return b;
      if (b == bot) return a;
      if (a == b) return a;
      break;
    case OP_XOR:
      if (a == bot) return b;
      if (b == bot) return a;
      if (a == top) return mk_not(b);
      if (b == top) return mk_not(a);
      if (a == b) return bot;
      break;
  }
  if (a > b && (op == OP_AND || op == OP_OR || op == OP_XOR)) std::swap(a, b);
  uint64_t key = pack(op, a, b);
  auto it = cache_.find(key);
  if (it != cache_.end()) return it->second;
  const Node na = nodes_[a];
  const Node nb = nodes_[b];
  int v = std::min(na.var, nb.var);
  Bdd alo = na.var == v ? na.lo : a;
  Bdd ahi = na.var == v ? na.hi : a;
  Bdd blo = nb.var == v ? nb.lo : b;
  Bdd bhi = nb.var == v ? nb.hi : b;
  Bdd r = mk_node(v, apply(op, alo, blo), apply(op, ahi, bhi));
  cache_.emplace(key, r);
  return r;
}

Bdd GuardManager::mk_and(Bdd a, Bdd b) { return apply(OP_AND, a, b); }
Bdd GuardManager::mk_or(Bdd a, Bdd b) { return apply(OP_OR, a, b); }
Bdd GuardManager::mk_xor(Bdd a, Bdd b) { return apply(OP_XOR, a, b); }

bool GuardManager::eval(Bdd a, ZipLetter letter) const {
  while (a > top) {
    const Node& n = nodes_[a];
    a = (letter >> n.var) & 1 ? n.hi : n.lo;
  }
  return a == top;
}

Bdd GuardManager::exists_var(Bdd a, int var) {
  if (a <= top) return a;
  const Node n = nodes_[a];
  if (n.var > var) return a;
  uint64_t key = pack(OP_EXISTS, a, static_cast<uint32_t>(var));
  auto it = cache_.find(key);
  if (it != cache_.end()) return it->second;
  Bdd r;
  if (n.var == var) {
    r = mk_or(n.lo, n.hi);
  } else {
    r = mk_node(n.var, exists_var(n.lo, var), exists_var(n.hi, var));
  }
  cache_.emplace(key, r);
  return r;
}

Bdd GuardManager::remap(Bdd a, const std::vector<int>& var_map,
                        std::unordered_map<Bdd, Bdd>& memo) {
  if (a <= top) return a;
  auto it = memo.find(a);
  if (it != memo.end()) return it->second;
  const Node n = nodes_[a];
  Bdd r = mk_node(var_map[n.var], remap(n.lo, var_map, memo),
                  remap(n.hi, var_map, memo));
  memo.emplace(a, r);
  return r;
}

Bdd GuardManager::project_track(Bdd a, int track, int arity) {
  for (int ap = 0; ap < nap_; ++ap) a = exists_var(a, var_index(track, ap));
  // Shift the variables of tracks above `track` down by one track.
  std::vector<int> var_map(arity * nap_);
  for (int t = 0; t < arity; ++t)
    for (int ap = 0; ap < nap_; ++ap)
      var_map[var_index(t, ap)] =
          t < track ? var_index(t, ap) : var_index(t - 1, ap);
  std::unordered_map<Bdd, Bdd> memo;
  return remap(a, var_map, memo);
}

Bdd GuardManager::lift_tracks(Bdd a, const std::vector<int>& track_map) {
  for (size_t i = 1; i < track_map.size(); ++i)
    assert(track_map[i - 1] < track_map[i]);
  std::vector<int> var_map(track_map.size() * nap_);
  for (size_t t = 0; t < track_map.size(); ++t)
    for (int ap = 0; ap < nap_; ++ap)
      var_map[var_index(static_cast<int>(t), ap)] =
          var_index(track_map[t], ap);
  std::unordered_map<Bdd, Bdd> memo;
  return remap(a, var_map, memo);
}

Bdd GuardManager::letter_guard(ZipLetter letter, int arity) {
  Bdd g = top;
  for (int v = arity * nap_ - 1; v >= 0; --v) {
    Bdd lit = (letter >> v) & 1 ? mk_node(v, bot, top) : mk_node(v, top, bot);
    g = mk_and(g, lit);
  }
  return g;
}

Bdd GuardManager::track_eq(int track_a, int track_b, int ap) {
  return mk_equiv(var(track_a, ap), var(track_b, ap));
}

ZipLetter GuardManager::min_letter(Bdd a, int arity) const {
  (void)arity;
  assert(a != bot);
  ZipLetter letter = 0;
  while (a > top) {
    const Node& n = nodes_[a];
    if (n.lo != bot) {
      a = n.lo;
    } else {
      letter |= ZipLetter(1) << n.var;
      a = n.hi;
    }
  }
  return letter;
}

std::vector<Bdd> GuardManager::regions(const std::vector<Bdd>& guards) {
  std::vector<Bdd> parts{top};
  for (Bdd g : guards) {
    std::vector<Bdd> next;
    next.reserve(parts.size() * 2);
    for (Bdd p : parts) {
      Bdd with = mk_and(p, g);
      Bdd without = mk_and(p, mk_not(g));
      if (with != bot) next.push_back(with);
      if (without != bot) next.push_back(without);
    }
    parts = std::move(next);
  }
  return parts;
}

std::string GuardManager::to_string(Bdd a, int arity) const {
  if (a == bot) return "false";
  if (a == top) return "true";
  // DNF-ish dump of the first few cubes, for debugging only.
  std::string out;
  struct Item {
    Bdd node;
    std::string cube;
  };
  std::vector<Item> stack{{a, ""}};
  int emitted = 0;
  while (!stack.empty() && emitted < 8) {
    Item it = stack.back();
    stack.pop_back();
    if (it.node == bot) continue;
    if (it.node == top) {
      if (!out.empty()) out += " | ";
      out += it.cube.empty() ? "true" : it.cube;
      ++emitted;
      continue;
    }
    const Node& n = nodes_[it.node];
    int track = n.var / nap_;
    int ap = n.var % nap_;
    std::string name =
        "p" + std::to_string(ap) + "@" + std::to_string(track);
    (void)arity;
    std::string sep = it.cube.empty() ? "" : "&";
    stack.push_back({n.hi, it.cube + sep + name});
    stack.push_back({n.lo, it.cube + sep + "!" + name});
  }
  if (!stack.empty()) out += " | ...";
  return out;
}

}  // namespace hyso
