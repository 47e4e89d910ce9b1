#pragma once

// Crude Monte Carlo and Fixed Effort splitting estimators of time-bounded
// reachability: P(a target location is reached at age <= bound).
//
// Work is split into numbered units (one CMC path or one FE replication),
// each with its own RNG stream, and results are taken as an index-ordered
// prefix. A runs budget therefore gives the same estimate for any number
// of workers.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "timesplit/importance.hpp"
#include "timesplit/model.hpp"
#include "timesplit/rng.hpp"

namespace timesplit::res {

/// Exactly one of runs / seconds is set.
struct Budget {
    std::optional<std::uint64_t> runs;
    std::optional<double> seconds;

    static Budget of_runs(std::uint64_t n) { return {n, std::nullopt}; }
    static Budget of_seconds(double s) { return {std::nullopt, s}; }
};

struct Options {
    std::uint64_t seed = 0;
    /// Confidence level 1 - delta of the reported interval.
    double confidence = 0.95;
    /// 0 means hardware concurrency.
    unsigned workers = 0;
};

struct Estimate {
    std::string method;
    double value = 0.0;
    /// Infinite when fewer than two replications completed.
    double half_width = 0.0;
    double confidence = 0.95;
    /// Simulated paths.
    std::uint64_t runs = 0;
    /// FE replications; equals runs for CMC.
    std::uint64_t replications = 0;
    double wall_time_s = 0.0;
    std::uint64_t seed = 0;
    /// Set when the budget did not allow a confidence interval.
    std::optional<std::string> diagnostic;
};

/// Two-sided standard normal quantile z_{1-(1-confidence)/2}.
double z_value(double confidence);

Estimate cmc(const model::FlatModel& model, double time_bound, const Budget& budget, const Options& options = {});

struct FeResult {
    double estimate = 0.0;
    std::uint64_t runs = 0;
    /// Conditional passage frequency per attempted level.
    std::vector<double> level_probabilities;
};

/// One Fixed Effort pass with `effort` runs per level. Level 0 starts from
/// `effort` fresh initial states; level i > 0 resamples its entry pool
/// uniformly with replacement. A run at level i succeeds once its importance
/// reaches i + 1 (possibly at once, when its entry state is already there).
FeResult fixed_effort_once(const model::FlatModel& model, const importance::ImportanceFunction& fn,
                           std::uint32_t effort, double time_bound, Rng& rng);

/// Mean of independent FE replications with a normal interval across them.
Estimate res_estimate(const model::FlatModel& model, const importance::ImportanceFunction& fn,
                      std::uint32_t effort, double time_bound, const Budget& budget, const Options& options = {});

}  // namespace timesplit::res
