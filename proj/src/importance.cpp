#include "timesplit/importance.hpp"

#include <algorithm>
#include <deque>

namespace timesplit::importance {

namespace {

std::vector<bool> target_flags(const model::FlatModel& model) {
    std::vector<bool> flags(model.num_locations());
    for (model::LocationId l = 0; l < model.num_locations(); ++l) {
        flags[l] = model.is_target(l);
    }
    return flags;
}

}  // namespace

ImportanceFunction ImportanceFunction::agnostic(const model::FlatModel& model) {
    ImportanceFunction f;
    f.kind_ = Kind::agnostic;
    f.target_ = target_flags(model);
    const std::size_t n = model.num_locations();
    f.distance_.assign(n, -1);
    std::deque<model::LocationId> queue;
    for (model::LocationId l = 0; l < n; ++l) {
        if (f.target_[l]) {
            f.distance_[l] = 0;
            queue.push_back(l);
        }
    }
    while (!queue.empty()) {
        const auto l = queue.front();
        queue.pop_front();
        for (auto e : model.incoming(l)) {
            const auto src = model.edge(e).source;
            if (f.distance_[src] < 0) {
                f.distance_[src] = f.distance_[l] + 1;
                queue.push_back(src);
            }
        }
    }
    const int d_max = std::max(0, *std::max_element(f.distance_.begin(), f.distance_.end()));
    f.max_importance_ = d_max;
    f.location_value_.resize(n);
    for (std::size_t l = 0; l < n; ++l) {
        f.location_value_[l] = f.distance_[l] < 0 ? 0 : d_max - f.distance_[l];
    }
    return f;
}

ImportanceFunction ImportanceFunction::time_sensitive(const model::FlatModel& model, std::uint32_t depth,
                                                      const scg::ExpandOptions& options) {
    ImportanceFunction f;
    f.kind_ = Kind::time_sensitive;
    f.target_ = target_flags(model);
    f.index_ = std::make_shared<const scg::ScIndex>(scg::backward_expand(model, depth, options));
    f.max_importance_ = static_cast<int>(f.index_->d_cap());
    return f;
}

ImportanceFunction ImportanceFunction::target_only(const model::FlatModel& model) {
    ImportanceFunction f;
    f.kind_ = Kind::target_only;
    f.target_ = target_flags(model);
    f.max_importance_ = 1;
    return f;
}

int ImportanceFunction::operator()(const sim::SimState& state) const {
    if (target_[state.location]) {
        return max_importance_;
    }
    switch (kind_) {
        case Kind::agnostic:
            return location_value_[state.location];
        case Kind::time_sensitive:
            return max_importance_ - static_cast<int>(index_->timed_distance(state));
        case Kind::target_only:
            break;
    }
    return 0;
}

}  // namespace timesplit::importance
