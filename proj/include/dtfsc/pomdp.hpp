#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace dtfsc {

using StateId = std::uint32_t;
using ActionId = std::uint32_t;
using ObsId = std::uint32_t;
using NodeId = std::uint32_t;
using Value = std::int32_t;

/// One component of a factored observation space. Booleans are stored as the
/// integer range [0, 1].
struct FeatureSpec {
  std::string name;
  bool is_boolean = true;
  Value lo = 0;
  Value hi = 1;

  static FeatureSpec boolean(std::string name) { return {std::move(name), true, 0, 1}; }
  static FeatureSpec integer(std::string name, Value lo, Value hi) {
    return {std::move(name), false, lo, hi};
  }

  std::size_t domain_size() const { return static_cast<std::size_t>(hi - lo) + 1; }
  bool contains(Value v) const { return v >= lo && v <= hi; }

  friend bool operator==(const FeatureSpec&, const FeatureSpec&) = default;
};

/// Checks name uniqueness and lo <= hi. Throws ModelError.
void validate_features(std::span<const FeatureSpec> features);

/// Feature-value vector, positionally aligned with an observation space.
struct Observation {
  std::vector<Value> values;

  Observation() = default;
  Observation(std::initializer_list<Value> v) : values(v) {}
  explicit Observation(std::vector<Value> v) : values(std::move(v)) {}

  std::size_t size() const { return values.size(); }
  Value operator[](std::size_t i) const { return values[i]; }

  /// "1,0,0,1" rendering used in diagnostics and counterexamples.
  std::string to_string() const;

  friend bool operator==(const Observation&, const Observation&) = default;
  friend auto operator<=>(const Observation&, const Observation&) = default;
};

struct ObservationHash {
  std::size_t operator()(const Observation& z) const noexcept;
};

struct Outcome {
  StateId state;
  double probability;

  friend bool operator==(const Outcome&, const Outcome&) = default;
};

/// Probability distribution over states with strictly positive support.
using Dist = std::vector<Outcome>;

/// Sum tolerance for doubles.
inline constexpr double kDistTolerance = 1e-9;

class Pomdp;

/// Incremental construction of a Pomdp. `build()` validates every model
/// invariant and canonicalises the observation table.
class PomdpBuilder {
 public:
  PomdpBuilder(std::vector<FeatureSpec> features, std::vector<std::string> actions);

  StateId add_state(Observation z);
  void set_transition(StateId s, ActionId a, Dist d);
  void set_init(StateId s) { init_ = s; }
  void add_target(StateId s) { targets_.push_back(s); }

  std::size_t num_states() const { return state_obs_.size(); }

  Pomdp build() &&;

 private:
  std::vector<FeatureSpec> features_;
  std::vector<std::string> actions_;
  std::vector<Observation> state_obs_;
  std::vector<std::map<ActionId, Dist>> trans_;
  StateId init_ = 0;
  std::vector<StateId> targets_;
};

/// Finite POMDP with a factored observation space. Immutable once built.
///
/// Observation ids index the table of distinct observations, sorted
/// lexicographically by value vector, so ids do not depend on state order.
class Pomdp {
 public:
  struct Choice {
    ActionId action;
    Dist dist;
  };

  std::size_t num_states() const { return state_obs_.size(); }
  std::size_t num_actions() const { return actions_.size(); }
  std::size_t num_observations() const { return obs_table_.size(); }

  const std::vector<FeatureSpec>& features() const { return features_; }
  const std::vector<std::string>& action_names() const { return actions_; }
  const std::string& action_name(ActionId a) const { return actions_.at(a); }
  std::optional<ActionId> find_action(std::string_view name) const;

  const Observation& observation(ObsId z) const { return obs_table_[z]; }
  ObsId obs_of(StateId s) const { return state_obs_[s]; }
  const Observation& observation_of(StateId s) const { return obs_table_[state_obs_[s]]; }
  std::optional<ObsId> find_observation(const Observation& z) const;
  std::span<const StateId> states_with(ObsId z) const { return states_by_obs_[z]; }

  /// Enabled choices of `s`, sorted by action id.
  std::span<const Choice> choices(StateId s) const { return trans_[s]; }
  /// nullptr when `a` is not enabled in `s`.
  const Dist* transition(StateId s, ActionId a) const;
  std::span<const ActionId> enabled(ObsId z) const { return enabled_by_obs_[z]; }

  StateId init() const { return init_; }
  const std::vector<StateId>& targets() const { return targets_; }
  bool is_target(StateId s) const { return target_mask_[s]; }
  bool is_target_observation(ObsId z) const { return target_obs_mask_[z]; }

  /// True if every enabled action of `s` is a self-loop.
  bool is_absorbing(StateId s) const;

 private:
  friend class PomdpBuilder;
  Pomdp() = default;

  std::vector<FeatureSpec> features_;
  std::vector<std::string> actions_;
  std::vector<Observation> obs_table_;
  std::vector<ObsId> state_obs_;
  std::vector<std::vector<StateId>> states_by_obs_;
  std::vector<std::vector<ActionId>> enabled_by_obs_;
  std::vector<std::vector<Choice>> trans_;
  StateId init_ = 0;
  std::vector<StateId> targets_;
  std::vector<bool> target_mask_;
  std::vector<bool> target_obs_mask_;
};

/// Deterministic observation-based memoryless policy.
struct StationaryObsPolicy {
  std::map<Observation, ActionId> choice;
};

/// Markov chain over model states obtained by fixing one action per state.
/// Absorbing states carry a single self-loop with probability 1.
class InducedChain {
 public:
  InducedChain() = default;

  std::size_t size() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::span<const Outcome> successors(StateId s) const {
    return {outcomes_.data() + offsets_[s], outcomes_.data() + offsets_[s + 1]};
  }
  bool is_absorbing(StateId s) const { return absorbing_[s]; }
  /// Action chosen in `s`; empty for absorbing states.
  std::optional<ActionId> chosen(StateId s) const { return chosen_[s]; }

  /// Appends the next state. States must be added in id order.
  void add_state(std::span<const Outcome> succ, std::optional<ActionId> action);
  void add_absorbing();

 private:
  std::vector<std::size_t> offsets_{0};
  std::vector<Outcome> outcomes_;
  std::vector<bool> absorbing_;
  std::vector<std::optional<ActionId>> chosen_;
};

/// A(z): the actions enabled in every state carrying `z`.
std::vector<ActionId> enabled_actions(const Pomdp& model, const Observation& z);

/// Chain where non-target, non-frontier states take policy(obs(s)); targets
/// and frontier states are absorbing. The policy must cover every observation
/// reachable from `sources` (default: the initial state) before the frontier;
/// states outside that reach set without a choice are made absorbing.
InducedChain induce_chain(const Pomdp& model, const StationaryObsPolicy& policy,
                          std::span<const Observation> frontier);
InducedChain induce_chain(const Pomdp& model, const StationaryObsPolicy& policy,
                          std::span<const Observation> frontier,
                          std::span<const StateId> sources);

/// Id-based variant used by the synthesiser: `choice[z]` is the action for
/// observation id z, `frontier[z]` marks frontier observations.
InducedChain induce_chain_by_id(const Pomdp& model,
                                std::span<const std::optional<ActionId>> choice,
                                const std::vector<bool>& frontier,
                                std::span<const StateId> sources);

/// Probability-1 reachability of `goal` from `from`, decided on the support
/// graph only: true iff every state reachable from `from` without passing
/// through `goal` can still reach `goal`.
bool almost_sure_reach(const InducedChain& chain, std::span<const StateId> goal, StateId from);
bool almost_sure_reach(const InducedChain& chain, const std::vector<bool>& goal, StateId from);

/// States of `chain` that can reach `goal` (support graph, backward search).
std::vector<bool> can_reach(const InducedChain& chain, const std::vector<bool>& goal);

}  // namespace dtfsc
