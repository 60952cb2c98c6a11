#pragma once

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "guards.hpp"

namespace hyso {

// Ultimately periodic word prefix . cycle^omega over the zipped alphabet.
struct LassoWord {
  int arity = 0;
  std::vector<ZipLetter> prefix;
  std::vector<ZipLetter> cycle;

  ZipLetter at(size_t i) const {
    if (i < prefix.size()) return prefix[i];
    return cycle[(i - prefix.size()) % cycle.size()];
  }
  size_t period_start() const { return prefix.size(); }
  size_t total_len() const { return prefix.size() + cycle.size(); }

  // Projects out one track (for replaying sub-assignments).
  LassoWord drop_track(int track, int ap_count) const;
  // Keeps a single track as an arity-1 lasso.
  LassoWord select_track(int track, int ap_count) const;
  // Normal form: primitive cycle, shortest prefix. Equal normal forms
  // iff equal omega-words.
  LassoWord canonical() const;
  bool operator==(const LassoWord& o) const = default;
};

// Thrown when a construction exceeds the configured state budget.
class BudgetError : public std::runtime_error {
public:
  explicit BudgetError(const std::string& what) : std::runtime_error(what) {}
};

// Per-task accounting: automaton state budget plus peak-size statistics.
// Installed with OpScope; automata operations consult the current context.
struct OpContext {
  size_t state_budget = 1000000;
  size_t peak_states = 0;
  void charge(size_t n);
};

OpContext* current_op_context();

class OpScope {
public:
  explicit OpScope(OpContext& ctx);
  ~OpScope();
  OpScope(const OpScope&) = delete;
  OpScope& operator=(const OpScope&) = delete;

private:
  OpContext* prev_;
};

struct Transition {
  Bdd guard;
  uint32_t dst;
};

// Nondeterministic Buchi automaton over the zipped alphabet Sigma^arity
// with symbolic guards. Immutable by convention after construction.
struct Nba {
  std::shared_ptr<GuardManager> gm;
  int arity = 0;
  std::vector<std::vector<Transition>> succ;
  std::vector<uint8_t> init;
  std::vector<uint8_t> acc;

  size_t size() const { return succ.size(); }
  bool all_accepting() const;
  size_t add_state(bool initial, bool accepting);
  void add_edge(uint32_t src, Bdd guard, uint32_t dst);
};

Nba make_empty_nba(std::shared_ptr<GuardManager> gm, int arity);
Nba make_universal_nba(std::shared_ptr<GuardManager> gm, int arity);
// Automaton accepting exactly the given lasso word.
Nba make_lasso_nba(std::shared_ptr<GuardManager> gm, const LassoWord& w);
// Same, but with letters pinned only on the first `pinned_tracks` tracks;
// the remaining tracks of the target arity are unconstrained.
Nba make_lasso_pattern_nba(std::shared_ptr<GuardManager> gm,
                           const LassoWord& w, int pinned_tracks, int arity);

Nba intersect(const Nba& a, const Nba& b);
Nba nba_union(const Nba& a, const Nba& b);
Nba complement(const Nba& a);
Nba project_exists(const Nba& a, int track);
// Widens a to `target_arity` tracks: tracks 0..arity-2 stay in place, the
// last track moves to position target_arity-1, new middle tracks are free.
Nba lift(const Nba& a, int target_arity);

std::optional<LassoWord> is_empty(const Nba& a);
bool accepts(const Nba& a, const LassoWord& w);
// None iff L(a) is a subset of L(b); otherwise a witness in L(a) \ L(b).
std::optional<LassoWord> language_included(const Nba& a, const Nba& b);

// Prunes unreachable/dead states, merges parallel edges, and quotients the
// automaton (canonical minimal form for deterministic safety automata,
// bisimulation quotient otherwise).
Nba reduce(const Nba& a);

bool is_deterministic(const Nba& a);

// Finds an accepting lasso of `a` whose first w.arity tracks spell w; used
// to recover projected-away traces from product chains.
std::optional<LassoWord> find_extension(const Nba& a, const LassoWord& w);

// HOA-flavoured textual dump for debugging.
std::string to_text(const Nba& a);

}  // namespace hyso
