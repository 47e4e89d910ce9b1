#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "timesplit/model.hpp"

namespace timesplit::sim {

/// Simulation state: a location, the remaining time of every timer (NaN
/// when inactive) and the global elapsed time.
struct SimState {
    model::LocationId location = 0;
    std::vector<double> tau;
    double age = 0.0;

    static constexpr double inactive() { return std::numeric_limits<double>::quiet_NaN(); }
    bool is_active(model::TimerId t) const { return !std::isnan(tau[t]); }

    friend bool operator==(const SimState& a, const SimState& b) {
        if (a.location != b.location || a.age != b.age || a.tau.size() != b.tau.size()) {
            return false;
        }
        for (std::size_t i = 0; i < a.tau.size(); ++i) {
            const bool na = std::isnan(a.tau[i]);
            if (na != std::isnan(b.tau[i]) || (!na && a.tau[i] != b.tau[i])) {
                return false;
            }
        }
        return true;
    }
};

}  // namespace timesplit::sim
