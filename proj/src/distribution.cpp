#include "timesplit/distribution.hpp"

#include <cmath>

namespace timesplit::model {

dbm::Bound Distribution::sc_upper_bound() const {
    if (kind == Kind::uniform) {
        return dbm::Bound(high);
    }
    if (clip_quantile <= 0.0) {
        return dbm::Bound::infinity();
    }
    const double quantile = -std::log(clip_quantile) / to_double(rate);
    return dbm::Bound(round_up(quantile, 1'000'000));
}

std::string Distribution::to_string() const {
    if (kind == Kind::uniform) {
        return "uniform(" + to_decimal_string(low) + "," + to_decimal_string(high) + ")";
    }
    return "exponential(" + to_decimal_string(rate) + ")";
}

}  // namespace timesplit::model
