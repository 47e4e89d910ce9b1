#include "timesplit/scg.hpp"

#include <algorithm>
#include <sstream>

#include "timesplit/error.hpp"

namespace timesplit::scg {

namespace {

dbm::Dbm box(const FlatModel& model, const std::vector<model::TimerId>& timers, bool use_lower) {
    std::vector<dbm::Constraint> constraints;
    for (auto t : timers) {
        const auto& d = model.timer(t).distribution;
        constraints.push_back(dbm::upper_bound(t, d.sc_upper_bound()));
        if (use_lower) {
            constraints.push_back(dbm::lower_bound(t, d.sc_lower_bound()));
        }
    }
    return dbm::Dbm::unconstrained(timers).intersect(constraints);
}

bool pins_continuous_timer(const FlatModel& model, const dbm::Dbm& domain) {
    for (auto t : domain.timers()) {
        const auto& d = model.timer(t).distribution;
        if (dbm::Bound(d.sc_lower_bound()) < d.sc_upper_bound() && domain.is_point_constrained(t)) {
            return true;
        }
    }
    return false;
}

}  // namespace

StateClass initial_class(const FlatModel& model) {
    const auto l0 = model.initial_location();
    return {l0, box(model, model.location(l0).active, true), 0};
}

std::optional<StateClass> successor(const FlatModel& model, const StateClass& sc, EdgeId edge_id) {
    const auto& edge = model.edge(edge_id);
    if (edge.source != sc.location) {
        throw ModelError("successor: edge does not leave the class location");
    }
    const auto t1 = edge.timer;
    std::vector<dbm::Constraint> first;
    for (auto t : sc.domain.timers()) {
        if (t != t1) {
            first.push_back({t1, t, dbm::Bound(0)});
        }
    }
    auto d = sc.domain.intersect(first);
    if (d.is_empty()) {
        return std::nullopt;
    }
    d = d.advance(t1);
    for (auto t : edge.restarts) {
        if (d.has_timer(t)) {
            d = d.project_out(t);
        }
    }
    for (auto t : edge.restarts) {
        const auto& dist = model.timer(t).distribution;
        d = d.add_timer(t, dist.sc_lower_bound(), dist.sc_upper_bound());
    }
    if (d.is_empty()) {
        return std::nullopt;
    }
    return StateClass{edge.target, std::move(d), sc.omega + 1};
}

std::vector<StateClass> target_classes(const FlatModel& model) {
    std::vector<StateClass> result;
    for (LocationId l = 0; l < model.num_locations(); ++l) {
        if (model.is_target(l)) {
            result.push_back({l, box(model, model.location(l).active, false), 0});
        }
    }
    return result;
}

std::optional<StateClass> predecessor(const FlatModel& model, const StateClass& sc, EdgeId edge_id) {
    const auto& edge = model.edge(edge_id);
    if (edge.target != sc.location) {
        throw ModelError("predecessor: edge does not enter the class location");
    }
    const auto& source_active = model.location(edge.source).active;
    const auto t1 = edge.timer;

    // Inverse of starting the restarted timers.
    std::vector<dbm::Constraint> lower;
    for (auto t : edge.restarts) {
        lower.push_back(dbm::lower_bound(t, model.timer(t).distribution.sc_lower_bound()));
    }
    auto d = sc.domain.intersect(lower);
    if (d.is_empty()) {
        return std::nullopt;
    }
    for (auto t : edge.restarts) {
        d = d.project_out(t);
    }

    // Inverse of time advancement. Restarted timers that were already running
    // held some value no smaller than t1.
    d = d.unshift(t1);
    for (auto t : edge.restarts) {
        if (t != t1 && std::binary_search(source_active.begin(), source_active.end(), t)) {
            d = d.add_timer(t, Rational(0), dbm::Bound::infinity());
            const dbm::Constraint after{t1, t, dbm::Bound(0)};
            d = d.intersect({&after, 1});
        }
    }
    if (d.timers() != source_active) {
        throw ModelError("predecessor: active timers of L" + std::to_string(edge.source) +
                         " do not match the edge");
    }

    std::vector<dbm::Constraint> upper;
    for (auto t : source_active) {
        upper.push_back(dbm::upper_bound(t, model.timer(t).distribution.sc_upper_bound()));
    }
    d = d.intersect(upper);
    if (d.is_empty()) {
        return std::nullopt;
    }
    return StateClass{edge.source, std::move(d), sc.omega + 1};
}

ScIndex::ScIndex(std::uint32_t depth, std::vector<StateClass> classes, std::vector<ClassEdge> edges,
                 std::size_t num_locations)
    : depth_(depth), classes_(std::move(classes)), edges_(std::move(edges)), by_location_(num_locations) {
    for (ClassId id = 0; id < classes_.size(); ++id) {
        by_location_.at(classes_[id].location).push_back(id);
    }
    for (auto& ids : by_location_) {
        std::stable_sort(ids.begin(), ids.end(),
                         [&](ClassId a, ClassId b) { return classes_[a].omega < classes_[b].omega; });
    }
    compiled_.reserve(classes_.size());
    for (const auto& c : classes_) {
        Compiled k;
        k.timers = c.domain.timers();
        const std::size_t n = c.domain.dimension();
        k.bounds.resize(n * n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                k.bounds[i * n + j] = c.domain.at(i, j).to_double();
            }
        }
        compiled_.push_back(std::move(k));
    }
}

bool ScIndex::contains(ClassId id, const sim::SimState& state) const {
    constexpr double tolerance = 1e-9;
    const auto& k = compiled_.at(id);
    const std::size_t n = k.timers.size() + 1;
    auto value = [&](std::size_t i) { return i == 0 ? 0.0 : state.tau[k.timers[i - 1]]; };
    for (std::size_t i = 0; i < n; ++i) {
        const double vi = value(i);
        for (std::size_t j = 0; j < n; ++j) {
            if (i != j && vi - value(j) > k.bounds[i * n + j] + tolerance) {
                return false;
            }
        }
    }
    return true;
}

std::uint32_t ScIndex::timed_distance(const sim::SimState& state) const {
    for (ClassId id : by_location_.at(state.location)) {
        if (contains(id, state)) {
            return classes_[id].omega;
        }
    }
    return d_cap();
}

std::vector<std::size_t> ScIndex::class_counts() const {
    std::vector<std::size_t> counts;
    counts.reserve(by_location_.size());
    for (const auto& ids : by_location_) {
        counts.push_back(ids.size());
    }
    return counts;
}

nlohmann::json ScIndex::to_json(const FlatModel& model) const {
    using nlohmann::json;
    auto names = [&](model::TimerId t) { return model.timer(t).name; };
    json classes = json::array();
    for (ClassId id = 0; id < classes_.size(); ++id) {
        const auto& c = classes_[id];
        classes.push_back({{"id", id},
                           {"location", c.location},
                           {"label", model.location_label(c.location)},
                           {"omega", c.omega},
                           {"domain", c.domain.to_json(names)},
                           {"constraints", c.domain.to_string(names)}});
    }
    json edges = json::array();
    for (const auto& e : edges_) {
        edges.push_back({{"from", e.from}, {"to", e.to}, {"timer", names(model.edge(e.edge).timer)}});
    }
    return {{"depth", depth_}, {"d_cap", d_cap()}, {"classes", std::move(classes)}, {"edges", std::move(edges)}};
}

std::string ScIndex::to_dot(const FlatModel& model) const {
    std::ostringstream out;
    out << "digraph scg {\n";
    for (ClassId id = 0; id < classes_.size(); ++id) {
        const auto& c = classes_[id];
        out << "  C" << id << " [label=\"L" << c.location << "\\nomega=" << c.omega << "\""
            << (c.omega == 0 ? ", shape=doublecircle" : "") << "];\n";
    }
    for (const auto& e : edges_) {
        out << "  C" << e.from << " -> C" << e.to << " [label=\"" << model.timer(model.edge(e.edge).timer).name
            << "\"];\n";
    }
    out << "}\n";
    return out.str();
}

ScIndex backward_expand(const FlatModel& model, std::uint32_t depth, const ExpandOptions& options) {
    std::vector<StateClass> classes;
    std::vector<bool> alive;
    std::vector<ClassEdge> edges;
    std::vector<std::vector<ClassId>> at(model.num_locations());

    // Returns the new id, or nullopt when an existing class subsumes it.
    auto insert = [&](StateClass sc) -> std::optional<ClassId> {
        auto& ids = at[sc.location];
        for (ClassId c : ids) {
            if (alive[c] && classes[c].omega <= sc.omega && classes[c].domain.includes(sc.domain)) {
                return std::nullopt;
            }
        }
        for (ClassId c : ids) {
            if (alive[c] && classes[c].omega == sc.omega && sc.domain.includes(classes[c].domain)) {
                alive[c] = false;
            }
        }
        if (classes.size() >= options.class_cap) {
            throw Error("state-class cap of " + std::to_string(options.class_cap) + " exceeded at depth " +
                        std::to_string(sc.omega));
        }
        const auto id = static_cast<ClassId>(classes.size());
        ids.push_back(id);
        classes.push_back(std::move(sc));
        alive.push_back(true);
        return id;
    };

    std::vector<ClassId> frontier;
    for (auto& sc : target_classes(model)) {
        if (auto id = insert(std::move(sc))) {
            frontier.push_back(*id);
        }
    }
    for (std::uint32_t w = 0; w < depth && !frontier.empty(); ++w) {
        std::vector<ClassId> next;
        for (ClassId id : frontier) {
            if (!alive[id]) {
                continue;
            }
            const LocationId l = classes[id].location;
            for (EdgeId e : model.incoming(l)) {
                auto pred = predecessor(model, classes[id], e);
                if (!pred || pins_continuous_timer(model, pred->domain)) {
                    continue;
                }
                if (auto nid = insert(std::move(*pred))) {
                    next.push_back(*nid);
                    edges.push_back({*nid, e, id});
                }
            }
        }
        frontier = std::move(next);
    }

    std::vector<ClassId> remap(classes.size(), 0);
    std::vector<StateClass> kept;
    for (ClassId id = 0; id < classes.size(); ++id) {
        if (alive[id]) {
            remap[id] = static_cast<ClassId>(kept.size());
            kept.push_back(std::move(classes[id]));
        }
    }
    std::vector<ClassEdge> kept_edges;
    for (const auto& e : edges) {
        if (alive[e.from] && alive[e.to]) {
            kept_edges.push_back({remap[e.from], e.edge, remap[e.to]});
        }
    }
    return ScIndex(depth, std::move(kept), std::move(kept_edges), model.num_locations());
}

}  // namespace timesplit::scg
