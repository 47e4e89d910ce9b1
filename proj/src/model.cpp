#include "timesplit/model.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <sstream>

#include "timesplit/error.hpp"

namespace timesplit::model {

// ---------------------------------------------------------------------------
// Network

std::size_t Network::add_component(Component component) {
    var_offsets_.push_back(num_variables_);
    num_variables_ += component.variables.size();
    timer_offsets_.push_back(timer_owner_.size());
    for (std::size_t i = 0; i < component.timers.size(); ++i) {
        timer_owner_.push_back(components_.size());
    }
    components_.push_back(std::move(component));
    return components_.size() - 1;
}

const TimerDecl& Network::timer(TimerId id) const {
    const std::size_t owner = timer_owner_.at(id);
    return components_[owner].timers[id - timer_offsets_[owner]];
}

std::string Network::timer_name(TimerId id) const {
    return components_[timer_owner_.at(id)].name + "." + timer(id).name;
}

DiscreteState Network::initial_state() const {
    DiscreteState state;
    state.reserve(num_variables_);
    for (const auto& c : components_) {
        for (const auto& v : c.variables) {
            state.push_back(v.initial);
        }
    }
    return state;
}

std::vector<TimerId> Network::initial_timers() const {
    std::vector<TimerId> result;
    for (std::size_t c = 0; c < components_.size(); ++c) {
        for (std::size_t t = 0; t < components_[c].timers.size(); ++t) {
            if (components_[c].timers[t].initial) {
                result.push_back(timer_id(c, t));
            }
        }
    }
    return result;
}

namespace {

std::span<const int> local_view(const Network& net, const DiscreteState& state, std::size_t c) {
    return {state.data() + net.variable_offset(c), net.components()[c].variables.size()};
}

std::span<int> local_view(const Network& net, DiscreteState& state, std::size_t c) {
    return {state.data() + net.variable_offset(c), net.components()[c].variables.size()};
}

void apply(const Network& net, DiscreteState& state, std::size_t c, const Effect& effect,
           const std::vector<std::size_t>& restarts, std::vector<TimerId>& restarted, const std::string& action) {
    if (effect) {
        effect(local_view(net, state, c));
    }
    const auto& comp = net.components()[c];
    const auto local = local_view(net, std::as_const(state), c);
    for (std::size_t v = 0; v < comp.variables.size(); ++v) {
        if (local[v] < comp.variables[v].lower || local[v] > comp.variables[v].upper) {
            throw ModelError("action '" + action + "' drives " + comp.name + "." + comp.variables[v].name +
                             " out of its range");
        }
    }
    for (std::size_t t : restarts) {
        restarted.push_back(net.timer_id(c, t));
    }
}

/// Every other component reacts with its first enabled handler for `action`.
void broadcast(const Network& net, DiscreteState& state, std::size_t sender, const std::string& action,
               std::vector<TimerId>& restarted) {
    const auto& comps = net.components();
    for (std::size_t c = 0; c < comps.size(); ++c) {
        if (c == sender) {
            continue;
        }
        for (const auto& input : comps[c].inputs) {
            if (input.action == action && (!input.guard || input.guard(local_view(net, std::as_const(state), c)))) {
                apply(net, state, c, input.effect, input.restarts, restarted, action);
                break;
            }
        }
    }
}

struct Enabled {
    std::size_t component;
    std::size_t transition;
};

std::vector<Enabled> enabled_urgent(const Network& net, const DiscreteState& state, bool all) {
    std::vector<Enabled> result;
    const auto& comps = net.components();
    for (std::size_t c = 0; c < comps.size(); ++c) {
        for (std::size_t k = 0; k < comps[c].urgent.size(); ++k) {
            const auto& out = comps[c].urgent[k];
            if (!out.guard || out.guard(local_view(net, state, c))) {
                result.push_back({c, k});
                if (!all) {
                    return result;
                }
            }
        }
    }
    return result;
}

void fire_urgent(const Network& net, DiscreteState& state, Enabled which, std::vector<TimerId>& restarted) {
    const auto& out = net.components()[which.component].urgent[which.transition];
    apply(net, state, which.component, out.effect, out.restarts, restarted, out.action);
    broadcast(net, state, which.component, out.action, restarted);
}

void normalize_restarts(std::vector<TimerId>& restarts) {
    std::sort(restarts.begin(), restarts.end());
    restarts.erase(std::unique(restarts.begin(), restarts.end()), restarts.end());
}

ClosureResult closure_impl(const Network& net, DiscreteState state, std::vector<TimerId> restarts,
                           const ClosureOptions& options, std::size_t& steps) {
    while (true) {
        auto enabled = enabled_urgent(net, state, options.check_confluence);
        if (enabled.empty()) {
            break;
        }
        if (++steps > options.step_limit) {
            throw ModelError("urgent closure diverges (more than " + std::to_string(options.step_limit) +
                             " urgent steps)");
        }
        if (options.check_confluence && enabled.size() > 1) {
            std::optional<ClosureResult> reference;
            for (const auto& choice : enabled) {
                DiscreteState branch = state;
                std::vector<TimerId> branch_restarts = restarts;
                fire_urgent(net, branch, choice, branch_restarts);
                auto result = closure_impl(net, std::move(branch), std::move(branch_restarts), options, steps);
                if (!reference) {
                    reference = std::move(result);
                } else if (reference->state != result.state || reference->restarts != result.restarts) {
                    throw ModelError("urgent actions are not confluent (weak determinism violated)");
                }
            }
            return *reference;
        }
        fire_urgent(net, state, enabled.front(), restarts);
    }
    normalize_restarts(restarts);
    return {std::move(state), std::move(restarts)};
}

/// Fires the timed output of `timer` and its broadcast; returns restarts.
std::vector<TimerId> fire_timed(const Network& net, DiscreteState& state, TimerId timer) {
    const std::size_t c = net.timer_owner(timer);
    const std::size_t local = timer - net.timer_id(c, 0);
    for (const auto& out : net.components()[c].timed) {
        if (out.timer == local && (!out.guard || out.guard(local_view(net, std::as_const(state), c)))) {
            std::vector<TimerId> restarted;
            apply(net, state, c, out.effect, out.restarts, restarted, out.action);
            broadcast(net, state, c, out.action, restarted);
            return restarted;
        }
    }
    throw ModelError("timer " + net.timer_name(timer) + " expired without an enabled transition");
}

std::string describe(const Network& net, const std::vector<TimerId>& timers) {
    std::string text;
    for (TimerId t : timers) {
        text += (text.empty() ? "" : ", ") + net.timer_name(t);
    }
    return "{" + text + "}";
}

}  // namespace

std::vector<TimerId> Network::enabled_timers(const DiscreteState& state) const {
    std::vector<TimerId> result;
    for (std::size_t c = 0; c < components_.size(); ++c) {
        const auto local = local_view(*this, state, c);
        for (const auto& out : components_[c].timed) {
            if (!out.guard || out.guard(local)) {
                result.push_back(timer_id(c, out.timer));
            }
        }
    }
    normalize_restarts(result);
    return result;
}

ClosureResult urgent_closure(const Network& network, DiscreteState state, std::vector<TimerId> pending_restarts,
                             const ClosureOptions& options) {
    std::size_t steps = 0;
    return closure_impl(network, std::move(state), std::move(pending_restarts), options, steps);
}

// ---------------------------------------------------------------------------
// Validation

std::vector<Diagnostic> validate(const Network& network) {
    std::vector<Diagnostic> out;
    auto error = [&out](std::string message) { out.push_back({Diagnostic::Severity::error, std::move(message)}); };
    auto warning = [&out](std::string message) { out.push_back({Diagnostic::Severity::warning, std::move(message)}); };

    const auto& comps = network.components();
    std::map<std::string, std::set<std::size_t>> producers;
    std::map<std::string, std::set<std::size_t>> listeners;
    for (std::size_t c = 0; c < comps.size(); ++c) {
        for (const auto& t : comps[c].timed) {
            producers[t.action].insert(c);
        }
        for (const auto& u : comps[c].urgent) {
            producers[u.action].insert(c);
        }
        for (const auto& i : comps[c].inputs) {
            listeners[i.action].insert(c);
        }
    }

    for (std::size_t c = 0; c < comps.size(); ++c) {
        const auto& comp = comps[c];
        for (const auto& v : comp.variables) {
            if (v.lower > v.upper) {
                error(comp.name + "." + v.name + ": empty variable range");
            } else if (v.initial < v.lower || v.initial > v.upper) {
                error(comp.name + "." + v.name + ": initial value outside its range");
            }
        }
        for (const auto& t : comp.timers) {
            const auto& d = t.distribution;
            const std::string name = comp.name + "." + t.name;
            if (d.kind == Distribution::Kind::uniform) {
                if (d.low == d.high) {
                    error(name + ": Dirac not allowed (" + d.to_string() + ")");
                } else if (d.low > d.high) {
                    error(name + ": uniform bounds out of order (" + d.to_string() + ")");
                } else if (d.low < 0) {
                    error(name + ": negative support (" + d.to_string() + ")");
                }
            } else if (d.rate <= 0) {
                error(name + ": exponential rate must be positive");
            } else if (!(d.clip_quantile >= 0.0 && d.clip_quantile < 1.0)) {
                error(name + ": clip quantile must lie in [0, 1)");
            }
        }
        auto check_restarts = [&](const std::vector<std::size_t>& restarts, const std::string& action) {
            for (std::size_t r : restarts) {
                if (r >= comp.timers.size()) {
                    error(comp.name + ": action '" + action + "' restarts an undeclared timer");
                }
            }
        };
        for (const auto& t : comp.timed) {
            if (t.timer >= comp.timers.size()) {
                error(comp.name + ": timed output '" + t.action + "' waits on an undeclared timer");
            }
            check_restarts(t.restarts, t.action);
        }
        for (const auto& u : comp.urgent) {
            check_restarts(u.restarts, u.action);
            auto it = listeners.find(u.action);
            if (it == listeners.end() || (it->second.size() == 1 && it->second.count(c) == 1)) {
                warning(comp.name + ": urgent output '" + u.action + "' has no listener");
            }
        }
        for (const auto& i : comp.inputs) {
            check_restarts(i.restarts, i.action);
            auto it = producers.find(i.action);
            bool matched = false;
            if (it != producers.end()) {
                matched = std::any_of(it->second.begin(), it->second.end(), [c](std::size_t p) { return p != c; });
            }
            if (!matched) {
                error("model not closed: input '" + i.action + "' of " + comp.name + " has no matching output");
            }
        }
    }
    if (!network.has_target()) {
        error("no target predicate");
    }
    return out;
}

bool has_errors(const std::vector<Diagnostic>& diagnostics) {
    return std::any_of(diagnostics.begin(), diagnostics.end(),
                       [](const Diagnostic& d) { return d.severity == Diagnostic::Severity::error; });
}

// ---------------------------------------------------------------------------
// FlatModel

FlatModel::FlatModel(std::vector<TimerDef> timers, std::vector<Location> locations, std::vector<Edge> edges,
                     std::vector<std::string> location_labels, std::string target_description)
    : timers_(std::move(timers)),
      locations_(std::move(locations)),
      edges_(std::move(edges)),
      outgoing_(locations_.size()),
      incoming_(locations_.size()),
      labels_(std::move(location_labels)),
      target_description_(std::move(target_description)) {
    if (locations_.empty()) {
        throw ModelError("flat model without locations");
    }
    labels_.resize(locations_.size());
    for (EdgeId e = 0; e < edges_.size(); ++e) {
        const auto& edge = edges_[e];
        if (edge.source >= locations_.size() || edge.target >= locations_.size()) {
            throw ModelError("edge refers to an unknown location");
        }
        outgoing_[edge.source].push_back(e);
        incoming_[edge.target].push_back(e);
    }
}

bool FlatModel::has_target() const {
    return std::any_of(locations_.begin(), locations_.end(), [](const Location& l) { return l.target; });
}

std::optional<EdgeId> FlatModel::edge_for(LocationId l, TimerId timer) const {
    for (EdgeId e : outgoing_.at(l)) {
        if (edges_[e].timer == timer) {
            return e;
        }
    }
    return std::nullopt;
}

nlohmann::json FlatModel::to_json() const {
    using nlohmann::json;
    json timers = json::array();
    for (TimerId t = 0; t < timers_.size(); ++t) {
        const auto& d = timers_[t].distribution;
        timers.push_back({{"id", t},
                          {"name", timers_[t].name},
                          {"distribution", d.to_string()},
                          {"sc_lower", to_string(d.sc_lower_bound())},
                          {"sc_upper", d.sc_upper_bound().to_string()}});
    }
    json locations = json::array();
    for (LocationId l = 0; l < locations_.size(); ++l) {
        json active = json::array();
        for (TimerId t : locations_[l].active) {
            active.push_back(timers_[t].name);
        }
        locations.push_back({{"id", l},
                             {"label", labels_[l]},
                             {"state", locations_[l].state},
                             {"active", std::move(active)},
                             {"target", locations_[l].target}});
    }
    json edges = json::array();
    for (const auto& e : edges_) {
        json restarts = json::array();
        for (TimerId t : e.restarts) {
            restarts.push_back(timers_[t].name);
        }
        edges.push_back(
            {{"source", e.source}, {"timer", timers_[e.timer].name}, {"restarts", std::move(restarts)}, {"target", e.target}});
    }
    return {{"initial", initial_location()},
            {"target", target_description_},
            {"timers", std::move(timers)},
            {"locations", std::move(locations)},
            {"edges", std::move(edges)}};
}

std::string FlatModel::to_dot() const {
    std::ostringstream out;
    out << "digraph locations {\n  rankdir=LR;\n";
    for (LocationId l = 0; l < locations_.size(); ++l) {
        out << "  L" << l << " [label=\"L" << l << "\\n" << labels_[l] << "\""
            << (locations_[l].target ? ", shape=doublecircle" : ", shape=circle") << "];\n";
    }
    for (const auto& e : edges_) {
        out << "  L" << e.source << " -> L" << e.target << " [label=\"" << timers_[e.timer].name << "\"];\n";
    }
    out << "}\n";
    return out.str();
}

// ---------------------------------------------------------------------------
// Flattening

namespace {

std::string location_label(const Network& net, const DiscreteState& state) {
    std::string label;
    std::size_t k = 0;
    for (const auto& c : net.components()) {
        for (const auto& v : c.variables) {
            if (state[k] != v.initial) {
                label += (label.empty() ? "" : " ") + c.name + "." + v.name + "=" + std::to_string(state[k]);
            }
            ++k;
        }
    }
    return label.empty() ? "init" : label;
}

}  // namespace

FlatModel flatten(const Network& network, const FlattenOptions& options) {
    std::vector<TimerDef> timers;
    for (TimerId t = 0; t < network.num_timers(); ++t) {
        timers.push_back({network.timer_name(t), network.timer(t).distribution});
    }

    std::vector<Location> locations;
    std::vector<std::string> labels;
    std::vector<Edge> edges;
    std::map<DiscreteState, LocationId> index;
    std::deque<LocationId> queue;

    auto intern = [&](ClosureResult stable, const std::vector<TimerId>& expected_active,
                      const std::string& context) -> LocationId {
        auto enabled = network.enabled_timers(stable.state);
        if (enabled != expected_active) {
            std::vector<TimerId> lost;
            std::vector<TimerId> gained;
            std::set_difference(expected_active.begin(), expected_active.end(), enabled.begin(), enabled.end(),
                                std::back_inserter(lost));
            std::set_difference(enabled.begin(), enabled.end(), expected_active.begin(), expected_active.end(),
                                std::back_inserter(gained));
            std::string message = context + ": ";
            if (!lost.empty()) {
                message += "timers " + describe(network, lost) + " deactivated without expiring (unsupported)";
            }
            if (!gained.empty()) {
                message += std::string(lost.empty() ? "" : "; ") + "timers " + describe(network, gained) +
                           " became active without being started";
            }
            throw ModelError(message);
        }
        auto [it, inserted] = index.try_emplace(stable.state, static_cast<LocationId>(locations.size()));
        if (inserted) {
            if (locations.size() >= options.location_cap) {
                throw ModelError("state-space cap of " + std::to_string(options.location_cap) + " locations exceeded");
            }
            const bool target = network.is_target(stable.state);
            labels.push_back(location_label(network, stable.state));
            locations.push_back({std::move(stable.state), std::move(enabled), target});
            queue.push_back(it->second);
        }
        return it->second;
    };

    {
        auto initial_timers = network.initial_timers();
        auto stable = urgent_closure(network, network.initial_state(), initial_timers, options.closure);
        intern(stable, stable.restarts, "initial location");
    }

    while (!queue.empty()) {
        const LocationId source = queue.front();
        queue.pop_front();
        if (locations[source].target) {
            continue;
        }
        const std::vector<TimerId> active = locations[source].active;
        for (TimerId t : active) {
            DiscreteState state = locations[source].state;
            auto restarted = fire_timed(network, state, t);
            auto stable = urgent_closure(network, std::move(state), std::move(restarted), options.closure);

            std::vector<TimerId> expected;
            std::set_union(active.begin(), active.end(), stable.restarts.begin(), stable.restarts.end(),
                           std::back_inserter(expected));
            if (!std::binary_search(stable.restarts.begin(), stable.restarts.end(), t)) {
                expected.erase(std::find(expected.begin(), expected.end(), t));
            }
            auto restarts = stable.restarts;
            const LocationId target =
                intern(std::move(stable), expected, "expiry of " + network.timer_name(t) + " in L" + std::to_string(source));
            edges.push_back({source, t, std::move(restarts), target});
        }
    }

    return FlatModel(std::move(timers), std::move(locations), std::move(edges), std::move(labels),
                     network.target_description());
}

}  // namespace timesplit::model
