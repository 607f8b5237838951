#pragma once

// The CHR transition system over states <goal, store, h, tokens>_v with the
// transitions solve, introduce, simplify and propagate.

#include <array>
#include <cstdint>
#include <deque>
#include <optional>
#include <random>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "chrtc/rule.hpp"

namespace chrtc {

inline constexpr std::size_t kDefaultFuel = 10000;

using EntryId = std::uint64_t;

struct StoreEntry {
  EntryId id = 0;
  ClassConstraint constraint;

  friend bool operator==(const StoreEntry&, const StoreEntry&) = default;
};

/// A pending propagation: rule name plus the store entries matched by each
/// head position, in head order.
struct Token {
  std::string rule;
  std::vector<EntryId> ids;

  friend auto operator<=>(const Token&, const Token&) = default;
  friend bool operator==(const Token&, const Token&) = default;
};

struct ChrState {
  std::deque<Item> goal;
  std::vector<StoreEntry> store;  // ascending id
  Substitution h;
  std::set<Token> tokens;
  VarSet protected_vars;  // never changes along a derivation
  // Disequalities assumed to hold (only critical pair states carry any).
  std::vector<Equation> disequalities;
  EntryId next_id = 1;
};

ChrState initial_state(std::vector<Item> goal, VarSet protected_vars);

/// Store constraints normalized by h, in store order.
std::vector<ClassConstraint> normalized_store(const ChrState& s);

enum class Transition { solve, introduce, simplify, propagate };
inline constexpr std::size_t kTransitionCount = 4;
std::string_view to_string(Transition t);

/// New propagation applications made possible by adding `entry` to `store`:
/// every tuple of distinct entries that contains `entry` and is jointly
/// unifiable with a propagation rule's head under h.
std::set<Token> tokens_for(const StoreEntry& entry, std::span<const StoreEntry> store,
                           const Program& program, const Substitution& h);

/// Chooses which transition to apply. The default is deterministic: leftmost
/// goal item first, then simplification rules before propagation rules, each
/// in program order, then lowest entry ids. A seeded random policy picks
/// uniformly among all enabled transitions.
class SelectionPolicy {
 public:
  static SelectionPolicy leftmost() { return SelectionPolicy(); }
  static SelectionPolicy random(std::uint64_t seed);

  bool is_random() const { return rng_.has_value(); }
  std::size_t pick(std::size_t n);

 private:
  std::optional<std::mt19937_64> rng_;
};

enum class StepStatus { progressed, final, unsatisfiable };

struct StepResult {
  StepStatus status = StepStatus::final;
  Transition transition = Transition::solve;
  std::string rule;  // empty for solve/introduce
  ChrState state;
  std::optional<Equation> failed_equation;  // set when a solve step fails
};

StepResult step(const ChrState& state, const Program& program);
StepResult step(const ChrState& state, const Program& program, SelectionPolicy& policy);

struct TraceStep {
  std::size_t index = 0;
  Transition transition = Transition::solve;
  std::string rule;
  ChrState state;  // state after the step
};

enum class DeriveStatus { final, unsatisfiable, fuel_exceeded };
std::string_view to_string(DeriveStatus s);

struct DeriveOptions {
  std::size_t fuel = kDefaultFuel;
  bool record_trace = false;
  std::optional<std::uint64_t> random_seed;
};

struct Derivation {
  DeriveStatus status = DeriveStatus::final;
  ChrState initial;
  ChrState state;  // last state reached
  std::vector<TraceStep> trace;
  std::size_t steps = 0;
  std::array<std::size_t, kTransitionCount> counts{};
  std::size_t introduced = 0;  // store entries ever created
  // Rule whose False body fired, or empty when a solve step failed.
  std::string failing_rule;
  std::optional<Equation> failed_equation;

  bool ok() const { return status == DeriveStatus::final; }
  std::size_t count(Transition t) const { return counts[static_cast<std::size_t>(t)]; }
  std::vector<ClassConstraint> store() const { return normalized_store(state); }
  /// h restricted to the protected variables.
  Substitution residual() const { return state.h.restricted(state.protected_vars); }
};

Derivation derive(ChrState initial, const Program& program, const DeriveOptions& options = {});
Derivation derive(std::vector<Item> goal, const Program& program, VarSet protected_vars,
                  const DeriveOptions& options = {});

}  // namespace chrtc
