#pragma once

// State classes over a flat model: forward successors from the initial
// class and backward predecessors (weakest preconditions) from the target
// classes. The backward expansion labels each class with the number of
// timer expirations needed to reach the target from it.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "timesplit/dbm.hpp"
#include "timesplit/model.hpp"
#include "timesplit/state.hpp"

namespace timesplit::scg {

using model::EdgeId;
using model::FlatModel;
using model::LocationId;
using ClassId = std::uint32_t;

/// The domain ranges over exactly the active timers of `location`.
struct StateClass {
    LocationId location = 0;
    dbm::Dbm domain;
    /// Distance to the target (backward) or depth from the initial class.
    std::uint32_t omega = 0;
};

/// Box of [sc_lower, sc_upper] over the initial location's timers.
StateClass initial_class(const FlatModel& model);

/// Condition on `edge.timer` expiring first, advance time, start the
/// restarted timers. nullopt if the edge cannot fire from `sc`.
std::optional<StateClass> successor(const FlatModel& model, const StateClass& sc, EdgeId edge);

/// One class per target location, every timer in [0, sc_upper].
std::vector<StateClass> target_classes(const FlatModel& model);

/// All valuations of the edge's source location from which firing the edge
/// lands in `sc`, restricted to the timers' supports from above. nullopt if
/// empty. Throws ModelError if the edge does not lead to sc.location.
std::optional<StateClass> predecessor(const FlatModel& model, const StateClass& sc, EdgeId edge);

struct ExpandOptions {
    std::size_t class_cap = 100'000;
};

/// `from` reaches `to` by firing `edge`; from.omega == to.omega + 1.
struct ClassEdge {
    ClassId from;
    EdgeId edge;
    ClassId to;
};

class ScIndex {
 public:
    ScIndex(std::uint32_t depth, std::vector<StateClass> classes, std::vector<ClassEdge> edges,
            std::size_t num_locations);

    std::uint32_t depth() const noexcept { return depth_; }
    /// Distance assigned to states outside every class.
    std::uint32_t d_cap() const noexcept { return depth_ + 1; }

    const std::vector<StateClass>& classes() const noexcept { return classes_; }
    const StateClass& state_class(ClassId id) const { return classes_.at(id); }
    /// Class ids at a location, omega ascending.
    std::span<const ClassId> classes_at(LocationId l) const { return by_location_.at(l); }
    const std::vector<ClassEdge>& edges() const noexcept { return edges_; }

    /// Membership of the state's active timer values, tolerance 1e-9.
    bool contains(ClassId id, const sim::SimState& state) const;

    /// Smallest omega of a class containing the state, else d_cap().
    std::uint32_t timed_distance(const sim::SimState& state) const;

    std::vector<std::size_t> class_counts() const;

    nlohmann::json to_json(const FlatModel& model) const;
    std::string to_dot(const FlatModel& model) const;

 private:
    struct Compiled {
        std::vector<model::TimerId> timers;
        /// Row-major doubles, +inf for unbounded.
        std::vector<double> bounds;
    };

    std::uint32_t depth_;
    std::vector<StateClass> classes_;
    std::vector<ClassEdge> edges_;
    std::vector<std::vector<ClassId>> by_location_;
    std::vector<Compiled> compiled_;
};

/// Breadth-first backward expansion from the target classes up to omega =
/// depth. A new class is dropped when a same-location class with omega no
/// larger includes it, or when it pins a timer with non-degenerate support to
/// a single value; same-omega classes it includes are dropped in its favour.
/// Throws Error when more than class_cap classes are produced.
ScIndex backward_expand(const FlatModel& model, std::uint32_t depth, const ExpandOptions& options = {});

}  // namespace timesplit::scg
