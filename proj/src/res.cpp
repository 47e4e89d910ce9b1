#include "timesplit/res.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <thread>

#include <boost/math/distributions/normal.hpp>

#include "timesplit/sim.hpp"

namespace timesplit::res {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

unsigned worker_count(unsigned requested) {
    if (requested != 0) {
        return requested;
    }
    return std::max(1U, std::thread::hardware_concurrency());
}

void check_budget(const Budget& budget) {
    if (budget.runs.has_value() == budget.seconds.has_value()) {
        throw std::invalid_argument("budget needs exactly one of runs or seconds");
    }
    if ((budget.runs && *budget.runs == 0) || (budget.seconds && !(*budget.seconds > 0.0))) {
        throw std::invalid_argument("budget must be positive");
    }
}

/// Calls body(worker, index) for every index in [begin, end); indices are
/// handed out in chunks through a shared counter.
template <class Body>
void parallel_for(std::uint64_t begin, std::uint64_t end, unsigned workers, std::uint64_t chunk, Body body) {
    const std::uint64_t count = end - begin;
    const unsigned threads = static_cast<unsigned>(std::min<std::uint64_t>(workers, (count + chunk - 1) / chunk));
    if (threads <= 1) {
        for (std::uint64_t i = begin; i < end; ++i) {
            body(0U, i);
        }
        return;
    }
    std::atomic<std::uint64_t> next{begin};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    auto work = [&](unsigned w) {
        try {
            while (!failed.load(std::memory_order_relaxed)) {
                const std::uint64_t lo = next.fetch_add(chunk);
                if (lo >= end) {
                    return;
                }
                const std::uint64_t hi = std::min(end, lo + chunk);
                for (std::uint64_t i = lo; i < hi; ++i) {
                    body(w, i);
                }
            }
        } catch (...) {
            if (!failed.exchange(true)) {
                failure = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < threads; ++w) {
        pool.emplace_back(work, w);
    }
    for (auto& t : pool) {
        t.join();
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
}

}  // namespace

double z_value(double confidence) {
    if (!(confidence > 0.0 && confidence < 1.0)) {
        throw std::invalid_argument("confidence must lie in (0, 1)");
    }
    return boost::math::quantile(boost::math::normal(), 1.0 - (1.0 - confidence) / 2.0);
}

Estimate cmc(const model::FlatModel& model, double time_bound, const Budget& budget, const Options& options) {
    check_budget(budget);
    const auto start = Clock::now();
    const unsigned workers = worker_count(options.workers);
    const auto fn = importance::ImportanceFunction::target_only(model);
    sim::RunOptions run_options;
    run_options.record_crossings = false;

    std::uint64_t hits = 0;
    std::uint64_t runs = 0;
    const std::uint64_t batch = budget.runs ? *budget.runs : 10'000;
    while (true) {
        std::vector<std::uint64_t> worker_hits(workers, 0);
        parallel_for(runs, runs + batch, workers, 256, [&](unsigned w, std::uint64_t i) {
            Rng rng(options.seed, i);
            auto s = sim::sample_initial(model, rng);
            if (sim::run(model, std::move(s), fn, time_bound, sim::Stop::target(), rng, run_options).hit_target) {
                ++worker_hits[w];
            }
        });
        for (auto h : worker_hits) {
            hits += h;
        }
        runs += batch;
        if (budget.runs || seconds_since(start) >= *budget.seconds) {
            break;
        }
    }

    Estimate e;
    e.method = "cmc";
    e.confidence = options.confidence;
    e.seed = options.seed;
    e.runs = runs;
    e.replications = runs;
    const double n = static_cast<double>(runs);
    e.value = static_cast<double>(hits) / n;
    e.half_width = z_value(options.confidence) * std::sqrt(e.value * (1.0 - e.value) / n);
    e.wall_time_s = seconds_since(start);
    return e;
}

FeResult fixed_effort_once(const model::FlatModel& model, const importance::ImportanceFunction& fn,
                           std::uint32_t effort, double time_bound, Rng& rng) {
    if (effort < 1) {
        throw std::invalid_argument("effort must be positive");
    }
    sim::RunOptions run_options;
    run_options.record_crossings = false;

    FeResult result;
    std::vector<sim::SimState> pool;
    pool.reserve(effort);
    for (std::uint32_t j = 0; j < effort; ++j) {
        pool.push_back(sim::sample_initial(model, rng));
    }
    const int levels = std::max(1, fn.max_importance());
    double estimate = 1.0;
    std::vector<sim::SimState> next;
    for (int i = 0; i < levels; ++i) {
        next.clear();
        std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
        for (std::uint32_t j = 0; j < effort; ++j) {
            const auto& entry = i == 0 ? pool[j] : pool[pick(rng)];
            auto out = sim::run(model, entry, fn, time_bound, sim::Stop::at_level(i + 1), rng, run_options);
            ++result.runs;
            if (out.reason == sim::EndReason::target || out.reason == sim::EndReason::level) {
                next.push_back(std::move(out.final_state));
            }
        }
        const double p = static_cast<double>(next.size()) / effort;
        result.level_probabilities.push_back(p);
        estimate *= p;
        if (next.empty()) {
            break;
        }
        std::swap(pool, next);
    }
    result.estimate = estimate;
    return result;
}

Estimate res_estimate(const model::FlatModel& model, const importance::ImportanceFunction& fn,
                      std::uint32_t effort, double time_bound, const Budget& budget, const Options& options) {
    check_budget(budget);
    const auto start = Clock::now();
    const unsigned workers = worker_count(options.workers);
    const std::uint64_t batch = std::max<std::uint64_t>(8, 4ULL * workers);

    std::vector<double> values;
    std::uint64_t runs = 0;
    bool done = false;
    std::uint64_t next_index = 0;
    while (!done) {
        std::vector<FeResult> results(batch);
        parallel_for(next_index, next_index + batch, workers, 1, [&](unsigned, std::uint64_t i) {
            Rng rng(options.seed, i);
            results[i - next_index] = fixed_effort_once(model, fn, effort, time_bound, rng);
        });
        next_index += batch;
        for (const auto& r : results) {
            if (budget.runs && runs + r.runs > *budget.runs) {
                done = true;
                break;
            }
            runs += r.runs;
            values.push_back(r.estimate);
        }
        if (budget.seconds && seconds_since(start) >= *budget.seconds) {
            done = true;
        }
    }

    Estimate e;
    e.method = fn.kind() == importance::ImportanceFunction::Kind::time_sensitive ? "res-time" : "res-notime";
    e.confidence = options.confidence;
    e.seed = options.seed;
    e.runs = runs;
    e.replications = values.size();
    const double r = static_cast<double>(values.size());
    double mean = 0.0;
    for (double v : values) {
        mean += v;
    }
    mean = values.empty() ? 0.0 : mean / r;
    e.value = mean;
    if (values.size() < 2) {
        e.half_width = std::numeric_limits<double>::infinity();
        e.diagnostic = "only " + std::to_string(values.size()) +
                       " replication(s) fit in the budget; no confidence interval";
    } else {
        double ss = 0.0;
        for (double v : values) {
            ss += (v - mean) * (v - mean);
        }
        e.half_width = z_value(options.confidence) * std::sqrt(ss / (r - 1.0)) / std::sqrt(r);
    }
    e.wall_time_s = seconds_since(start);
    return e;
}

}  // namespace timesplit::res
