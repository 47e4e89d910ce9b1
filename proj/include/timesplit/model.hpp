#pragma once

// Networks of input/output stochastic automata with urgency, and their
// flattening into a finite location graph whose edges are timer expirations.
//
// Components own discrete variables and timers. Timed outputs fire when
// their timer expires; urgent outputs fire as soon as their guard holds;
// inputs react to outputs of other components (broadcast). Guards and
// effects only see the owning component's variables.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "timesplit/distribution.hpp"

namespace timesplit::model {

using TimerId = dbm::TimerId;
using LocationId = std::uint32_t;
using EdgeId = std::uint32_t;

using Guard = std::function<bool(std::span<const int>)>;
using Effect = std::function<void(std::span<int>)>;

struct Variable {
    std::string name;
    int lower = 0;
    int upper = 1;
    int initial = 0;
};

struct TimerDecl {
    std::string name;
    Distribution distribution;
    /// Member of the initial timer set T0.
    bool initial = false;
};

/// `action!` fired when `timer` expires while `guard` holds.
struct TimedOutput {
    std::string action;
    std::size_t timer = 0;
    Guard guard;
    Effect effect;
    std::vector<std::size_t> restarts;
};

/// `action!!` fired as soon as `guard` holds.
struct UrgentOutput {
    std::string action;
    Guard guard;
    Effect effect;
    std::vector<std::size_t> restarts;
};

/// `action??` / `action?` reaction to another component's output.
struct InputHandler {
    std::string action;
    Guard guard;
    Effect effect;
    std::vector<std::size_t> restarts;
};

struct Component {
    std::string name;
    std::vector<Variable> variables;
    std::vector<TimerDecl> timers;
    std::vector<TimedOutput> timed;
    std::vector<UrgentOutput> urgent;
    std::vector<InputHandler> inputs;

    std::size_t add_variable(std::string var_name, int lower, int upper, int initial) {
        variables.push_back({std::move(var_name), lower, upper, initial});
        return variables.size() - 1;
    }
    std::size_t add_timer(std::string timer_name, Distribution distribution, bool initial) {
        timers.push_back({std::move(timer_name), std::move(distribution), initial});
        return timers.size() - 1;
    }
};

/// Concatenation of all components' variables in declaration order.
using DiscreteState = std::vector<int>;

class Network {
 public:
    std::size_t add_component(Component component);

    const std::vector<Component>& components() const noexcept { return components_; }
    std::size_t num_variables() const noexcept { return num_variables_; }
    std::size_t num_timers() const noexcept { return timer_owner_.size(); }

    std::size_t variable_offset(std::size_t component) const { return var_offsets_.at(component); }
    TimerId timer_id(std::size_t component, std::size_t local_timer) const {
        return static_cast<TimerId>(timer_offsets_.at(component) + local_timer);
    }
    const TimerDecl& timer(TimerId id) const;
    /// "Component.timer".
    std::string timer_name(TimerId id) const;
    /// Index of the component owning a timer.
    std::size_t timer_owner(TimerId id) const { return timer_owner_.at(id); }

    DiscreteState initial_state() const;
    std::vector<TimerId> initial_timers() const;

    /// Sorted ids of timers whose timed output is enabled in `state`.
    std::vector<TimerId> enabled_timers(const DiscreteState& state) const;

    void set_target(std::function<bool(const DiscreteState&)> predicate, std::string description) {
        target_ = std::move(predicate);
        target_description_ = std::move(description);
    }
    bool has_target() const noexcept { return static_cast<bool>(target_); }
    bool is_target(const DiscreteState& state) const { return target_ && target_(state); }
    const std::string& target_description() const noexcept { return target_description_; }

 private:
    std::vector<Component> components_;
    std::vector<std::size_t> var_offsets_;
    std::vector<std::size_t> timer_offsets_;
    std::vector<std::size_t> timer_owner_;
    std::size_t num_variables_ = 0;
    std::function<bool(const DiscreteState&)> target_;
    std::string target_description_;
};

struct ClosureOptions {
    std::size_t step_limit = 10'000;
    /// Explore every interleaving of simultaneously enabled urgent outputs
    /// and fail if they disagree. Exponential; meant for small models.
    bool check_confluence = false;
};

struct ClosureResult {
    DiscreteState state;
    /// Sorted, unique.
    std::vector<TimerId> restarts;
};

/// Fires enabled urgent outputs (component order, then transition order)
/// with their broadcast inputs until none is enabled. Throws ModelError on
/// divergence or detected non-confluence.
ClosureResult urgent_closure(const Network& network, DiscreteState state, std::vector<TimerId> pending_restarts,
                             const ClosureOptions& options = {});

struct Diagnostic {
    enum class Severity { error, warning };
    Severity severity = Severity::error;
    std::string message;
};

/// Well-formedness checks: Dirac or invalid distributions, open inputs,
/// empty variable ranges, missing target.
std::vector<Diagnostic> validate(const Network& network);

bool has_errors(const std::vector<Diagnostic>& diagnostics);

struct Location {
    DiscreteState state;
    /// Sorted active timer set T_l.
    std::vector<TimerId> active;
    bool target = false;
};

/// Expiration of `timer` in `source`, including the urgent chain it
/// triggers. `restarts` are the timers (re)sampled along the way.
struct Edge {
    LocationId source = 0;
    TimerId timer = 0;
    std::vector<TimerId> restarts;
    LocationId target = 0;
};

struct TimerDef {
    std::string name;
    Distribution distribution;
};

/// Finite closed location graph. Target locations are absorbing: the
/// property of interest stops at the first target visit.
class FlatModel {
 public:
    FlatModel(std::vector<TimerDef> timers, std::vector<Location> locations, std::vector<Edge> edges,
              std::vector<std::string> location_labels, std::string target_description);

    const std::vector<TimerDef>& timers() const noexcept { return timers_; }
    const TimerDef& timer(TimerId t) const { return timers_.at(t); }
    std::size_t num_timers() const noexcept { return timers_.size(); }

    const std::vector<Location>& locations() const noexcept { return locations_; }
    const Location& location(LocationId l) const { return locations_.at(l); }
    std::size_t num_locations() const noexcept { return locations_.size(); }
    LocationId initial_location() const noexcept { return 0; }
    bool is_target(LocationId l) const { return locations_[l].target; }
    bool has_target() const;

    const std::vector<Edge>& edges() const noexcept { return edges_; }
    const Edge& edge(EdgeId e) const { return edges_.at(e); }
    std::span<const EdgeId> outgoing(LocationId l) const { return outgoing_.at(l); }
    std::span<const EdgeId> incoming(LocationId l) const { return incoming_.at(l); }
    /// Edge taken when `timer` expires in `l`; nullopt if none.
    std::optional<EdgeId> edge_for(LocationId l, TimerId timer) const;

    const std::string& location_label(LocationId l) const { return labels_.at(l); }
    const std::string& target_description() const noexcept { return target_description_; }

    nlohmann::json to_json() const;
    /// Location graph; target locations drawn as double circles.
    std::string to_dot() const;

 private:
    std::vector<TimerDef> timers_;
    std::vector<Location> locations_;
    std::vector<Edge> edges_;
    std::vector<std::vector<EdgeId>> outgoing_;
    std::vector<std::vector<EdgeId>> incoming_;
    std::vector<std::string> labels_;
    std::string target_description_;
};

struct FlattenOptions {
    std::size_t location_cap = 1'000'000;
    ClosureOptions closure;
};

/// Breadth-first exploration of stable discrete states. Location numbering
/// follows BFS order with outgoing timers in id order, so identical networks
/// yield identical models. Throws ModelError on timer deactivation,
/// spontaneous activation, or when the cap is exceeded.
FlatModel flatten(const Network& network, const FlattenOptions& options = {});

}  // namespace timesplit::model
