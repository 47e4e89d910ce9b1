#include "timesplit/dbm.hpp"

#include <algorithm>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace timesplit::dbm {

double Bound::to_double() const {
    return infinite_ ? std::numeric_limits<double>::infinity() : timesplit::to_double(value_);
}

std::string Bound::to_string() const { return infinite_ ? "inf" : timesplit::to_string(value_); }

Bound Bound::parse(std::string_view text) {
    if (text == "inf") {
        return infinity();
    }
    return Bound(parse_rational(text));
}

Dbm Dbm::unconstrained(std::vector<TimerId> timers) {
    std::sort(timers.begin(), timers.end());
    if (std::adjacent_find(timers.begin(), timers.end()) != timers.end()) {
        throw std::invalid_argument("duplicate timer id in domain");
    }
    if (!timers.empty() && timers.back() == kReference) {
        throw std::invalid_argument("reserved timer id");
    }
    Dbm d;
    d.timers_ = std::move(timers);
    const std::size_t n = d.dimension();
    d.coeffs_.assign(n * n, Bound::infinity());
    for (std::size_t i = 0; i < n; ++i) {
        d.ref(i, i) = Bound(0);
        d.ref(0, i) = Bound(0);
    }
    d.canonical_ = true;
    return d;
}

Dbm Dbm::from_coefficients(std::vector<TimerId> timers, std::vector<Bound> coeffs) {
    if (!std::is_sorted(timers.begin(), timers.end()) ||
        std::adjacent_find(timers.begin(), timers.end()) != timers.end()) {
        throw std::invalid_argument("timers must be sorted and distinct");
    }
    const std::size_t n = timers.size() + 1;
    if (coeffs.size() != n * n) {
        throw std::invalid_argument("coefficient matrix has wrong size");
    }
    Dbm d;
    d.timers_ = std::move(timers);
    d.coeffs_ = std::move(coeffs);
    d.canonical_ = false;
    return d;
}

bool Dbm::has_timer(TimerId t) const { return std::binary_search(timers_.begin(), timers_.end(), t); }

std::size_t Dbm::index_of(TimerId t) const {
    if (t == kReference) {
        return 0;
    }
    auto it = std::lower_bound(timers_.begin(), timers_.end(), t);
    if (it == timers_.end() || *it != t) {
        throw std::invalid_argument("timer " + std::to_string(t) + " is not part of the domain");
    }
    return static_cast<std::size_t>(it - timers_.begin()) + 1;
}

void Dbm::set(std::size_t row, std::size_t col, Bound b) {
    ref(row, col) = std::move(b);
    canonical_ = false;
    empty_ = false;
}

Dbm& Dbm::normalize() {
    if (canonical_ || empty_) {
        return *this;
    }
    const std::size_t n = dimension();
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t i = 0; i < n; ++i) {
            const Bound& b_ik = at(i, k);
            if (b_ik.is_infinite()) {
                continue;
            }
            for (std::size_t j = 0; j < n; ++j) {
                const Bound& b_kj = at(k, j);
                if (b_kj.is_infinite()) {
                    continue;
                }
                Bound candidate = b_ik + b_kj;
                if (candidate < at(i, j)) {
                    ref(i, j) = std::move(candidate);
                }
            }
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (at(i, i) < Bound(0)) {
                empty_ = true;
                return *this;
            }
        }
    }
    canonical_ = true;
    return *this;
}

void Dbm::tighten(std::size_t row, std::size_t col, const Bound& b) {
    if (!(b < at(row, col))) {
        return;
    }
    if (b + at(col, row) < Bound(0)) {
        empty_ = true;
        canonical_ = false;
        return;
    }
    ref(row, col) = b;
    const std::size_t n = dimension();
    for (std::size_t x = 0; x < n; ++x) {
        const Bound& b_xr = at(x, row);
        if (b_xr.is_infinite()) {
            continue;
        }
        const Bound through = b_xr + b;
        for (std::size_t y = 0; y < n; ++y) {
            const Bound& b_cy = at(col, y);
            if (b_cy.is_infinite()) {
                continue;
            }
            Bound candidate = through + b_cy;
            if (candidate < at(x, y)) {
                ref(x, y) = std::move(candidate);
            }
        }
    }
}

Dbm Dbm::intersect(std::span<const Constraint> constraints) const {
    Dbm result = *this;
    result.normalize();
    for (const auto& c : constraints) {
        const std::size_t row = index_of(c.lhs);
        const std::size_t col = index_of(c.rhs);
        if (result.empty_) {
            continue;
        }
        result.tighten(row, col, c.bound);
    }
    return result;
}

Dbm Dbm::project_out(TimerId t) const {
    const std::size_t gone = index_of(t);
    if (gone == 0) {
        throw std::invalid_argument("cannot project out the reference timer");
    }
    Dbm closed = *this;
    closed.normalize();

    Dbm result;
    result.timers_ = timers_;
    result.timers_.erase(result.timers_.begin() + static_cast<std::ptrdiff_t>(gone - 1));
    result.empty_ = closed.empty_;
    result.canonical_ = !closed.empty_;
    const std::size_t n = closed.dimension();
    result.coeffs_.reserve((n - 1) * (n - 1));
    for (std::size_t i = 0; i < n; ++i) {
        if (i == gone) {
            continue;
        }
        for (std::size_t j = 0; j < n; ++j) {
            if (j != gone) {
                result.coeffs_.push_back(closed.at(i, j));
            }
        }
    }
    return result;
}

Dbm Dbm::unshift(TimerId elapsing) const {
    if (elapsing == kReference || has_timer(elapsing)) {
        throw std::invalid_argument("unshift: timer " + std::to_string(elapsing) + " already in domain");
    }
    Dbm closed = *this;
    closed.normalize();

    Dbm result;
    result.timers_ = timers_;
    result.timers_.insert(std::lower_bound(result.timers_.begin(), result.timers_.end(), elapsing), elapsing);
    const std::size_t n = result.dimension();
    result.coeffs_.assign(n * n, Bound::infinity());
    if (closed.empty_) {
        result.empty_ = true;
        return result;
    }

    // Old index -> new index; the old reference becomes `elapsing`.
    std::vector<std::size_t> map(closed.dimension());
    map[0] = result.index_of(elapsing);
    for (std::size_t i = 0; i < timers_.size(); ++i) {
        map[i + 1] = result.index_of(timers_[i]);
    }
    for (std::size_t i = 0; i < closed.dimension(); ++i) {
        for (std::size_t j = 0; j < closed.dimension(); ++j) {
            result.ref(map[i], map[j]) = closed.at(i, j);
        }
    }
    // Fresh reference with ref - elapsing <= 0. Column 0 stays infinite; the
    // only finite path out of the new reference runs through `elapsing`.
    result.ref(0, 0) = Bound(0);
    const std::size_t e = map[0];
    for (std::size_t j = 1; j < n; ++j) {
        result.ref(0, j) = result.at(e, j);
    }
    result.canonical_ = true;
    return result;
}

Dbm Dbm::advance(TimerId expiring) const {
    const std::size_t e = index_of(expiring);
    if (e == 0) {
        throw std::invalid_argument("cannot advance by the reference timer");
    }
    Dbm closed = *this;
    closed.normalize();

    Dbm result;
    result.timers_ = timers_;
    result.timers_.erase(result.timers_.begin() + static_cast<std::ptrdiff_t>(e - 1));
    const std::size_t n = result.dimension();
    if (closed.empty_) {
        result.coeffs_.assign(n * n, Bound::infinity());
        result.empty_ = true;
        return result;
    }
    // New index -> old index; `expiring` plays the new reference and the old
    // reference is eliminated (exact since the matrix is closed).
    std::vector<std::size_t> map(n);
    map[0] = e;
    for (std::size_t i = 1; i < n; ++i) {
        map[i] = closed.index_of(result.timers_[i - 1]);
    }
    result.coeffs_.reserve(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            result.coeffs_.push_back(closed.at(map[i], map[j]));
        }
    }
    result.canonical_ = true;
    return result;
}

Dbm Dbm::add_timer(TimerId t, const Rational& lower, Bound upper) const {
    if (t == kReference || has_timer(t)) {
        throw std::invalid_argument("add_timer: timer " + std::to_string(t) + " already in domain");
    }
    Dbm closed = *this;
    closed.normalize();

    Dbm result;
    result.timers_ = timers_;
    result.timers_.insert(std::lower_bound(result.timers_.begin(), result.timers_.end(), t), t);
    const std::size_t n = result.dimension();
    result.coeffs_.assign(n * n, Bound::infinity());
    if (closed.empty_) {
        result.empty_ = true;
        return result;
    }
    const std::size_t fresh = result.index_of(t);
    std::vector<std::size_t> map(closed.dimension());
    map[0] = 0;
    for (std::size_t i = 0; i < timers_.size(); ++i) {
        map[i + 1] = result.index_of(timers_[i]);
    }
    for (std::size_t i = 0; i < closed.dimension(); ++i) {
        for (std::size_t j = 0; j < closed.dimension(); ++j) {
            result.ref(map[i], map[j]) = closed.at(i, j);
        }
    }
    result.ref(fresh, fresh) = Bound(0);
    result.ref(fresh, 0) = upper;
    result.ref(0, fresh) = Bound(-lower);
    if (upper < Bound(lower)) {
        result.empty_ = true;
        return result;
    }
    // The new timer is only linked through the reference.
    for (std::size_t x = 1; x < n; ++x) {
        if (x == fresh) {
            continue;
        }
        result.ref(fresh, x) = upper + result.at(0, x);
        result.ref(x, fresh) = result.at(x, 0) + Bound(-lower);
    }
    result.canonical_ = true;
    return result;
}

bool Dbm::includes(const Dbm& other) const {
    if (timers_ != other.timers_) {
        throw std::invalid_argument("includes: domains range over different timers");
    }
    Dbm a = *this;
    Dbm b = other;
    a.normalize();
    b.normalize();
    if (b.empty_) {
        return true;
    }
    if (a.empty_) {
        return false;
    }
    for (std::size_t k = 0; k < a.coeffs_.size(); ++k) {
        if (a.coeffs_[k] < b.coeffs_[k]) {
            return false;
        }
    }
    return true;
}

bool Dbm::contains_point(const std::map<TimerId, double>& valuation, double tolerance) const {
    if (valuation.size() != timers_.size()) {
        throw std::invalid_argument("valuation must assign exactly the domain's timers");
    }
    std::vector<double> values(dimension(), 0.0);
    for (std::size_t i = 0; i < timers_.size(); ++i) {
        auto it = valuation.find(timers_[i]);
        if (it == valuation.end()) {
            throw std::invalid_argument("valuation misses timer " + std::to_string(timers_[i]));
        }
        values[i + 1] = it->second;
    }
    if (empty_) {
        return false;
    }
    const std::size_t n = dimension();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const Bound& b = at(i, j);
            if (b.is_finite() && values[i] - values[j] > b.to_double() + tolerance) {
                return false;
            }
        }
    }
    return true;
}

bool Dbm::is_point_constrained(TimerId t) const {
    const std::size_t i = index_of(t);
    if (i == 0) {
        throw std::invalid_argument("reference timer has no bounds");
    }
    const Bound& up = at(i, 0);
    return up.is_finite() && up.value() == -at(0, i).value();
}

std::size_t Dbm::hash() const noexcept {
    std::size_t h = timers_.size() * 0x9e3779b97f4a7c15ULL;
    auto mix = [&h](std::size_t v) { h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2); };
    for (TimerId t : timers_) {
        mix(t);
    }
    for (const Bound& b : coeffs_) {
        if (b.is_infinite()) {
            mix(0x5bd1e995);
        } else {
            mix(static_cast<std::size_t>(b.value().numerator()));
            mix(static_cast<std::size_t>(b.value().denominator()));
        }
    }
    mix(empty_ ? 1 : 0);
    return h;
}

nlohmann::json Dbm::to_json(const std::function<std::string(TimerId)>& names) const {
    nlohmann::json timers = nlohmann::json::array();
    for (TimerId t : timers_) {
        if (names) {
            timers.push_back(names(t));
        } else {
            timers.push_back(t);
        }
    }
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t i = 0; i < dimension(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (std::size_t j = 0; j < dimension(); ++j) {
            row.push_back(at(i, j).to_string());
        }
        rows.push_back(std::move(row));
    }
    return {{"timers", std::move(timers)}, {"coeffs", std::move(rows)}, {"empty", empty_}};
}

std::string Dbm::to_string(const std::function<std::string(TimerId)>& names) const {
    if (empty_) {
        return "{empty}";
    }
    auto name = [&](std::size_t i) { return names ? names(timers_[i - 1]) : "t" + std::to_string(timers_[i - 1]); };
    auto text = [](const Bound& b) { return b.is_infinite() ? std::string("inf") : to_decimal_string(b.value()); };
    std::ostringstream out;
    out << "{";
    bool first = true;
    auto sep = [&] {
        if (!first) {
            out << ", ";
        }
        first = false;
    };
    const std::size_t n = dimension();
    for (std::size_t i = 1; i < n; ++i) {
        sep();
        out << to_decimal_string(-at(0, i).value()) << " <= " << name(i) << " <= " << text(at(i, 0));
    }
    for (std::size_t i = 1; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (at(i, j).is_infinite() && at(j, i).is_infinite()) {
                continue;
            }
            sep();
            out << (at(j, i).is_infinite() ? std::string("-inf") : to_decimal_string(-at(j, i).value())) << " <= "
                << name(i) << " - " << name(j) << " <= " << text(at(i, j));
        }
    }
    out << "}";
    return out.str();
}

}  // namespace timesplit::dbm
