#pragma once

#include <string>

#include "timesplit/dbm.hpp"
#include "timesplit/rational.hpp"
#include "timesplit/rng.hpp"

namespace timesplit::model {

/// Timer distribution. Uniform timers have exact support [low, high];
/// exponential timers are clipped at the (1 - q)-quantile for state-class
/// analysis only, simulation samples the true distribution.
struct Distribution {
    enum class Kind { uniform, exponential };

    static constexpr double kDefaultClipQuantile = 1e-5;

    Kind kind = Kind::uniform;
    Rational low{0};
    Rational high{1};
    Rational rate{1};
    double clip_quantile = kDefaultClipQuantile;

    static Distribution uniform(Rational a, Rational b) {
        Distribution d;
        d.kind = Kind::uniform;
        d.low = a;
        d.high = b;
        return d;
    }

    static Distribution exponential(Rational rate, double clip_quantile = kDefaultClipQuantile) {
        Distribution d;
        d.kind = Kind::exponential;
        d.low = 0;
        d.high = 0;
        d.rate = rate;
        d.clip_quantile = clip_quantile;
        return d;
    }

    Rational sc_lower_bound() const { return kind == Kind::uniform ? low : Rational(0); }

    /// b for uniform; -ln(q)/rate rounded up to a multiple of 1e-6 for
    /// exponential (infinite when q == 0).
    dbm::Bound sc_upper_bound() const;

    double sample(Rng& rng) const {
        if (kind == Kind::uniform) {
            return rng.uniform(to_double(low), to_double(high));
        }
        return rng.exponential(to_double(rate));
    }

    /// Kepler spelling: "uniform(1198,1218)", "exponential(0.5)".
    std::string to_string() const;

    friend bool operator==(const Distribution& a, const Distribution& b) {
        if (a.kind != b.kind) {
            return false;
        }
        if (a.kind == Kind::uniform) {
            return a.low == b.low && a.high == b.high;
        }
        return a.rate == b.rate && a.clip_quantile == b.clip_quantile;
    }
};

}  // namespace timesplit::model
