#include "timesplit/sim.hpp"

#include "timesplit/error.hpp"

namespace timesplit::sim {

SimState sample_initial(const model::FlatModel& model, Rng& rng) {
    SimState s;
    s.location = model.initial_location();
    s.tau.assign(model.num_timers(), SimState::inactive());
    for (auto t : model.location(s.location).active) {
        s.tau[t] = model.timer(t).distribution.sample(rng);
    }
    return s;
}

namespace {

std::optional<model::TimerId> next_timer(const model::FlatModel& model, const SimState& state) {
    std::optional<model::TimerId> best;
    for (auto t : model.location(state.location).active) {
        if (!best || state.tau[t] < state.tau[*best]) {
            best = t;
        }
    }
    return best;
}

void fire(const model::FlatModel& model, SimState& state, model::TimerId t, Rng& rng) {
    const double elapsed = state.tau[t];
    for (auto u : model.location(state.location).active) {
        state.tau[u] -= elapsed;
    }
    state.tau[t] = SimState::inactive();
    state.age += elapsed;
    const auto edge = model.edge_for(state.location, t);
    if (!edge) {
        throw Error("no edge for " + model.timer(t).name + " in L" + std::to_string(state.location));
    }
    const auto& e = model.edge(*edge);
    for (auto r : e.restarts) {
        state.tau[r] = model.timer(r).distribution.sample(rng);
    }
    state.location = e.target;
}

}  // namespace

std::optional<model::TimerId> step(const model::FlatModel& model, SimState& state, Rng& rng) {
    const auto t = next_timer(model, state);
    if (t) {
        fire(model, state, *t, rng);
    }
    return t;
}

RunOutcome run(const model::FlatModel& model, SimState start, const importance::ImportanceFunction& fn,
               double time_bound, Stop stop, Rng& rng, const RunOptions& options) {
    RunOutcome out;
    out.final_state = std::move(start);
    SimState& s = out.final_state;
    int best = fn(s);
    if (options.record_crossings) {
        out.crossings.push_back({best, s});
    }
    while (true) {
        if (model.is_target(s.location)) {
            out.hit_target = true;
            out.reason = EndReason::target;
            return out;
        }
        if (stop.kind == Stop::Kind::at_level && best >= stop.level) {
            out.reason = EndReason::level;
            return out;
        }
        const auto t = next_timer(model, s);
        if (!t) {
            out.reason = EndReason::deadlock;
            return out;
        }
        if (s.age + s.tau[*t] > time_bound) {
            out.reason = EndReason::time_bound;
            return out;
        }
        if (out.steps >= options.step_limit) {
            throw Error("step limit of " + std::to_string(options.step_limit) + " reached (livelock?)");
        }
        fire(model, s, *t, rng);
        ++out.steps;
        const int level = fn(s);
        if (options.trace) {
            options.trace({out.steps, s.age, *t, s.location, level});
        }
        if (level > best) {
            best = level;
            if (options.record_crossings) {
                out.crossings.push_back({level, s});
            }
        }
    }
}

}  // namespace timesplit::sim
