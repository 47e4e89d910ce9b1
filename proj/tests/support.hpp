#pragma once

#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <string>

#include "timesplit/dbm.hpp"
#include "timesplit/kepler.hpp"
#include "timesplit/model.hpp"
#include "timesplit/state.hpp"

namespace testing {

using timesplit::Rational;
using timesplit::dbm::Bound;
using timesplit::dbm::Dbm;
using timesplit::dbm::TimerId;

inline std::string models_dir() { return TIMESPLIT_MODELS_DIR; }

inline std::string read_file(const std::string& path) {
    std::ifstream in(path);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

inline timesplit::model::FlatModel flat_from_text(const std::string& text) {
    return timesplit::model::flatten(timesplit::kepler::compile(timesplit::kepler::parse(text)));
}

inline timesplit::model::FlatModel load_model(const std::string& file) {
    return flat_from_text(read_file(models_dir() + "/" + file));
}

inline TimerId timer_by_name(const timesplit::model::FlatModel& m, const std::string& name) {
    for (TimerId t = 0; t < m.num_timers(); ++t) {
        if (m.timer(t).name == name) {
            return t;
        }
    }
    throw std::invalid_argument("no timer " + name);
}

/// Simulation state at `l` with the given timer values, others inactive.
inline timesplit::sim::SimState state_at(const timesplit::model::FlatModel& m, timesplit::model::LocationId l,
                                         const std::map<TimerId, double>& values) {
    timesplit::sim::SimState s;
    s.location = l;
    s.tau.assign(m.num_timers(), timesplit::sim::SimState::inactive());
    for (const auto& [t, v] : values) {
        s.tau[t] = v;
    }
    return s;
}

/// Index of "Component.variable" in the global discrete state.
inline std::size_t var(const timesplit::model::Network& net, const std::string& component, const std::string& name) {
    const auto& comps = net.components();
    for (std::size_t c = 0; c < comps.size(); ++c) {
        if (comps[c].name != component) {
            continue;
        }
        for (std::size_t v = 0; v < comps[c].variables.size(); ++v) {
            if (comps[c].variables[v].name == name) {
                return net.variable_offset(c) + v;
            }
        }
    }
    throw std::invalid_argument("no variable " + component + "." + name);
}

/// P(X < Y) for independent X ~ U(a, b), Y ~ U(c, d) by midpoint
/// integration of F_X(y) f_Y(y).
inline double uniform_race(double a, double b, double c, double d, int steps = 200'000) {
    double sum = 0.0;
    const double h = (d - c) / steps;
    for (int i = 0; i < steps; ++i) {
        const double y = c + (i + 0.5) * h;
        const double fx = y <= a ? 0.0 : y >= b ? 1.0 : (y - a) / (b - a);
        sum += fx * h / (d - c);
    }
    return sum;
}

inline Rational q(std::int64_t n, std::int64_t d = 1) { return Rational(n, d); }

/// Exact membership of a rational point in the constraint system as stored
/// (no closure needed).
inline bool satisfies(const Dbm& d, const std::map<TimerId, Rational>& point) {
    const std::size_t n = d.dimension();
    auto value = [&](std::size_t i) { return i == 0 ? Rational(0) : point.at(d.timers()[i - 1]); };
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const Bound& b = d.at(i, j);
            if (b.is_finite() && value(i) - value(j) > b.value()) {
                return false;
            }
        }
    }
    return true;
}

inline std::map<TimerId, double> to_doubles(const std::map<TimerId, Rational>& point) {
    std::map<TimerId, double> out;
    for (const auto& [t, v] : point) {
        out[t] = timesplit::to_double(v);
    }
    return out;
}

/// Random small DBM: timers drawn from [0, 6), entries are multiples of 1/2
/// in [-8, 8] or infinite, diagonal 0. Not closed, possibly empty.
inline Dbm random_dbm(std::mt19937_64& rng, std::size_t max_timers = 4) {
    std::uniform_int_distribution<std::size_t> count(1, max_timers);
    std::vector<TimerId> pool{0, 1, 2, 3, 4, 5};
    std::shuffle(pool.begin(), pool.end(), rng);
    std::vector<TimerId> timers(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(count(rng)));
    std::sort(timers.begin(), timers.end());
    const std::size_t n = timers.size() + 1;
    std::uniform_int_distribution<int> value(-16, 16);
    std::bernoulli_distribution infinite(0.35);
    std::vector<Bound> coeffs(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) {
                coeffs[i * n + j] = Bound(0);
            } else if (j == 0 && infinite(rng)) {
                coeffs[i * n + j] = Bound::infinity();
            } else if (i == 0) {
                // Lower bounds keep timers non-negative most of the time.
                coeffs[i * n + j] = Bound(Rational(-std::abs(value(rng)), 2));
            } else if (infinite(rng)) {
                coeffs[i * n + j] = Bound::infinity();
            } else {
                coeffs[i * n + j] = Bound(Rational(value(rng), 2));
            }
        }
    }
    return Dbm::from_coefficients(std::move(timers), std::move(coeffs));
}

/// Point with coordinates k/4 for k in [-4, 40].
inline std::map<TimerId, Rational> random_point(std::mt19937_64& rng, const std::vector<TimerId>& timers) {
    std::uniform_int_distribution<int> value(-4, 40);
    std::map<TimerId, Rational> p;
    for (auto t : timers) {
        p[t] = Rational(value(rng), 4);
    }
    return p;
}

}  // namespace testing
