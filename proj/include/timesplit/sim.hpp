#pragma once

// Discrete-event simulation over a flat model. The smallest remaining timer
// expires (ties go to the smaller timer id), all timers decrease by its
// value, and the restarted timers of the taken edge are sampled afresh.

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "timesplit/importance.hpp"
#include "timesplit/model.hpp"
#include "timesplit/rng.hpp"
#include "timesplit/state.hpp"

namespace timesplit::sim {

SimState sample_initial(const model::FlatModel& model, Rng& rng);

/// Fires the next timer in place and returns it; nullopt (state unchanged)
/// when no timer is active.
std::optional<model::TimerId> step(const model::FlatModel& model, SimState& state, Rng& rng);

struct Stop {
    enum class Kind { at_target, at_level, at_end };
    Kind kind = Kind::at_target;
    /// For at_level: stop once importance >= level.
    int level = 0;

    static Stop target() { return {Kind::at_target, 0}; }
    static Stop at_level(int level) { return {Kind::at_level, level}; }
    static Stop at_end() { return {Kind::at_end, 0}; }
};

enum class EndReason { target, level, time_bound, deadlock };

struct Crossing {
    int level;
    SimState state;
};

struct RunOutcome {
    bool hit_target = false;
    SimState final_state;
    /// First state at each new maximum importance, levels increasing.
    std::vector<Crossing> crossings;
    std::uint64_t steps = 0;
    EndReason reason = EndReason::time_bound;
};

struct TraceEvent {
    std::uint64_t step;
    double age;
    model::TimerId fired;
    model::LocationId location;
    int importance;
};

struct RunOptions {
    std::uint64_t step_limit = 10'000'000;
    bool record_crossings = true;
    std::function<void(const TraceEvent&)> trace;
};

/// Simulates from `start` until the stop condition holds, the next expiry
/// would happen after `time_bound`, or no timer is active. Target locations
/// end every run. Throws Error when step_limit is reached.
RunOutcome run(const model::FlatModel& model, SimState start, const importance::ImportanceFunction& fn,
               double time_bound, Stop stop, Rng& rng, const RunOptions& options = {});

}  // namespace timesplit::sim
