#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

namespace hyso {

// A zipped letter over k tracks: bit (track * ap_count + ap) is set iff the
// proposition `ap` holds on track `track`. At most 64 track/ap slots.
using ZipLetter = uint64_t;

// Handle into a GuardManager's node table. 0 and 1 are the terminals.
using Bdd = uint32_t;

// Reduced ordered BDD manager for transition guards. Variables are literals
// (track, ap) of a zipped alphabet, ordered by track-major index
// v = track * ap_count + ap. All automata participating in one operation
// must share a manager.
class GuardManager {
public:
  static constexpr Bdd bot = 0;
  static constexpr Bdd top = 1;

  explicit GuardManager(int ap_count);

  int ap_count() const { return nap_; }

  int var_index(int track, int ap) const { return track * nap_ + ap; }

  Bdd var(int track, int ap);
  Bdd nvar(int track, int ap);

  Bdd mk_not(Bdd a);
  Bdd mk_and(Bdd a, Bdd b);
  Bdd mk_or(Bdd a, Bdd b);
  Bdd mk_xor(Bdd a, Bdd b);
  Bdd mk_equiv(Bdd a, Bdd b) { return mk_not(mk_xor(a, b)); }
  Bdd mk_implies(Bdd a, Bdd b) { return mk_or(mk_not(a), b); }

  bool sat(Bdd a) const { return a != bot; }

  // Evaluates the guard on a concrete zipped letter.
  bool eval(Bdd a, ZipLetter letter) const;

  // Existentially quantifies every variable of `track` (in an automaton of
  // the given arity) and shifts the variables of higher tracks down by one
  // track. The result is a guard over arity-1 tracks.
  Bdd project_track(Bdd a, int track, int arity);

  // Remaps track t to track_map[t]; track_map must be strictly increasing.
  // Used to lift a guard into a wider zipped alphabet.
  Bdd lift_tracks(Bdd a, const std::vector<int>& track_map);

  // Guard satisfied by exactly this letter (all arity*nap literals pinned).
  Bdd letter_guard(ZipLetter letter, int arity);

  // Guard for "track i and track j agree on proposition ap".
  Bdd track_eq(int track_a, int track_b, int ap);

  // Lexicographically least satisfying letter, preferring absent props.
  // Unconstrained slots are cleared. Precondition: sat(a).
  ZipLetter min_letter(Bdd a, int arity) const;

  // Splits the space of letters into disjoint satisfiable regions that are
  // homogeneous w.r.t. every guard in `guards` (each region is a conjunction
  // of guards and negated guards). Returns one representative guard per
  // region, in deterministic order.
  std::vector<Bdd> regions(const std::vector<Bdd>& guards);

  size_t node_count() const { return nodes_.size(); }

  std::string to_string(Bdd a, int arity) const;

private:
  struct Node {
    int var;
    Bdd lo, hi;
  };

  int nap_;
  std::vector<Node> nodes_;
  std::unordered_map<uint64_t, Bdd> unique_;
  std::unordered_map<uint64_t, Bdd> cache_;

  Bdd mk_node(int var, Bdd lo, Bdd hi);
  Bdd apply(int op, Bdd a, Bdd b);
  Bdd exists_var(Bdd a, int var);
  Bdd remap(Bdd a, const std::vector<int>& var_map,
            std::unordered_map<Bdd, Bdd>& memo);
};

}  // namespace hyso
