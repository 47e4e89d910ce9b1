#pragma once

// Importance functions for splitting. Values are integers in
// [0, max_importance]; every target state has importance max_importance.

#include <cstdint>
#include <memory>
#include <vector>

#include "timesplit/model.hpp"
#include "timesplit/scg.hpp"
#include "timesplit/state.hpp"

namespace timesplit::importance {

class ImportanceFunction {
 public:
    enum class Kind { agnostic, time_sensitive, target_only };

    /// d_max - d(l) where d is the number of edges from l to a target
    /// location, clamped at 0; locations that cannot reach a target get 0.
    static ImportanceFunction agnostic(const model::FlatModel& model);

    /// d_cap - timed_distance(s) over a backward expansion of the given depth.
    static ImportanceFunction time_sensitive(const model::FlatModel& model, std::uint32_t depth,
                                             const scg::ExpandOptions& options = {});

    /// 1 on target locations, 0 elsewhere.
    static ImportanceFunction target_only(const model::FlatModel& model);

    Kind kind() const noexcept { return kind_; }
    int max_importance() const noexcept { return max_importance_; }

    int operator()(const sim::SimState& state) const;

    /// Agnostic only: edge distance per location, -1 if no target is reachable.
    const std::vector<int>& location_distance() const noexcept { return distance_; }
    /// Time-sensitive only.
    const scg::ScIndex* index() const noexcept { return index_.get(); }

 private:
    ImportanceFunction() = default;

    Kind kind_ = Kind::target_only;
    int max_importance_ = 1;
    std::vector<bool> target_;
    std::vector<int> distance_;
    std::vector<int> location_value_;
    std::shared_ptr<const scg::ScIndex> index_;
};

}  // namespace timesplit::importance
