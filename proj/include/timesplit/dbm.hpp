#pragma once

// Difference bound matrices over decreasing timers.
//
// A Dbm over active timers t_1..t_n stores the coefficients b_ij of the
// constraint system  tau(t_i) - tau(t_j) <= b_ij  for all i, j in
// {ref, t_1, ..., t_n}, where the reference timer `ref` has value 0 and so
// row/column 0 carry the absolute bounds: b_i0 is the upper bound of t_i and
// -b_0i its lower bound. All constraints are non-strict.
//
// Timers are kept sorted by id, so two canonical domains over the same
// timer set are equal iff their coefficient matrices are equal.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "timesplit/rational.hpp"

namespace timesplit::dbm {

using TimerId = std::uint32_t;

/// Pseudo timer id naming the reference row/column in constraints.
inline constexpr TimerId kReference = std::numeric_limits<TimerId>::max();

/// Upper bound on a difference: a rational or +infinity.
class Bound {
 public:
    /// Zero.
    Bound() = default;
    Bound(std::int64_t value) : value_(value) {}  // NOLINT(google-explicit-constructor)
    Bound(Rational value) : value_(value) {}      // NOLINT(google-explicit-constructor)

    static Bound infinity() {
        Bound b;
        b.infinite_ = true;
        return b;
    }

    bool is_infinite() const noexcept { return infinite_; }
    bool is_finite() const noexcept { return !infinite_; }
    /// Precondition: finite.
    const Rational& value() const noexcept { return value_; }

    /// +inf maps to std::numeric_limits<double>::infinity().
    double to_double() const;
    /// "inf" or "p/q".
    std::string to_string() const;
    static Bound parse(std::string_view text);

    friend Bound operator+(const Bound& a, const Bound& b) {
        if (a.infinite_ || b.infinite_) {
            return infinity();
        }
        return Bound(a.value_ + b.value_);
    }
    /// Precondition: finite.
    Bound operator-() const { return Bound(-value_); }

    friend bool operator==(const Bound& a, const Bound& b) {
        if (a.infinite_ || b.infinite_) {
            return a.infinite_ == b.infinite_;
        }
        return a.value_ == b.value_;
    }
    friend bool operator<(const Bound& a, const Bound& b) {
        if (a.infinite_) {
            return false;
        }
        if (b.infinite_) {
            return true;
        }
        return compare(a.value_, b.value_) < 0;
    }
    friend bool operator<=(const Bound& a, const Bound& b) { return !(b < a); }
    friend bool operator>(const Bound& a, const Bound& b) { return b < a; }
    friend bool operator>=(const Bound& a, const Bound& b) { return !(a < b); }

 private:
    Rational value_{0};
    bool infinite_ = false;
};

/// tau(lhs) - tau(rhs) <= bound. Either side may be kReference.
struct Constraint {
    TimerId lhs;
    TimerId rhs;
    Bound bound;
};

inline Constraint upper_bound(TimerId t, Bound b) { return {t, kReference, b}; }
inline Constraint lower_bound(TimerId t, const Rational& a) { return {kReference, t, Bound(-a)}; }

class Dbm {
 public:
    /// Domain where every timer lies in [0, inf) with no pairwise links.
    /// Throws std::invalid_argument on duplicate ids.
    static Dbm unconstrained(std::vector<TimerId> timers);

    /// Builds a (possibly non-canonical) matrix from explicit coefficients,
    /// row-major over {ref} + sorted timers. Used by tests and JSON import.
    static Dbm from_coefficients(std::vector<TimerId> timers, std::vector<Bound> coeffs);

    const std::vector<TimerId>& timers() const noexcept { return timers_; }
    /// Matrix dimension: number of timers + 1.
    std::size_t dimension() const noexcept { return timers_.size() + 1; }
    bool has_timer(TimerId t) const;
    /// Row/column index of a timer (0 for kReference). Throws if unknown.
    std::size_t index_of(TimerId t) const;

    const Bound& at(std::size_t row, std::size_t col) const { return coeffs_[row * dimension() + col]; }
    /// Loosening or tightening a single entry drops the canonical flag.
    void set(std::size_t row, std::size_t col, Bound b);

    Bound bound(TimerId lhs, TimerId rhs) const { return at(index_of(lhs), index_of(rhs)); }
    Bound upper(TimerId t) const { return at(index_of(t), 0); }
    /// Lower bound as a (finite) value: -b_{ref,t}.
    Rational lower(TimerId t) const { return -at(0, index_of(t)).value(); }

    bool is_empty() const noexcept { return empty_; }
    bool is_canonical() const noexcept { return canonical_; }

    /// Floyd-Warshall closure in place. Sets the empty flag when a negative
    /// cycle shows up on the diagonal.
    Dbm& normalize();

    /// Element-wise min with the given constraints, then closure.
    Dbm intersect(std::span<const Constraint> constraints) const;

    /// Existential elimination of t. Exact because the input is closed first.
    Dbm project_out(TimerId t) const;

    /// Inverse time advancement: every timer grows by a fresh non-negative
    /// timer `elapsing`. Old absolute bounds become bounds relative to it.
    Dbm unshift(TimerId elapsing) const;

    /// Forward time advancement: `expiring` becomes the new reference (all
    /// timers decrease by its value) and is dropped.
    Dbm advance(TimerId expiring) const;

    /// Adds an independent timer ranging over [lower, upper].
    Dbm add_timer(TimerId t, const Rational& lower, Bound upper) const;

    /// Canonical-form containment: this ⊇ other. Both must be canonical,
    /// non-empty and over the same timers (throws otherwise).
    bool includes(const Dbm& other) const;

    /// Membership of a valuation defined exactly on timers().
    bool contains_point(const std::map<TimerId, double>& valuation, double tolerance = 1e-9) const;

    /// Lower and upper bound of t coincide.
    bool is_point_constrained(TimerId t) const;

    std::size_t hash() const noexcept;

    friend bool operator==(const Dbm& a, const Dbm& b) {
        return a.empty_ == b.empty_ && a.timers_ == b.timers_ && a.coeffs_ == b.coeffs_;
    }

    /// {"timers": [...], "coeffs": [["0","inf",...],...], "empty": bool}.
    /// `names` maps timer ids to labels; ids are written when omitted.
    nlohmann::json to_json(const std::function<std::string(TimerId)>& names = {}) const;

    /// Human readable constraint list, e.g. "{0 <= ur <= 1/10}".
    std::string to_string(const std::function<std::string(TimerId)>& names = {}) const;

 private:
    Dbm() = default;
    Bound& ref(std::size_t row, std::size_t col) { return coeffs_[row * dimension() + col]; }
    /// Incremental closure after tightening one entry of a canonical matrix.
    void tighten(std::size_t row, std::size_t col, const Bound& b);

    std::vector<TimerId> timers_;
    std::vector<Bound> coeffs_;
    bool canonical_ = false;
    bool empty_ = false;
};

}  // namespace timesplit::dbm

template <>
struct std::hash<timesplit::dbm::Dbm> {
    std::size_t operator()(const timesplit::dbm::Dbm& d) const noexcept { return d.hash(); }
};
