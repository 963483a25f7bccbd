#pragma once

#include <cmath>

#include "cbmr/types.hpp"

namespace cbmr {

// Deterministic thresholds gating the training / exploration / exploitation
// phases. All comparisons against counters use "counter <= threshold".
// Exploration thresholds grow as t^z * log t with z = 2*alpha/(3*alpha + d);
// training thresholds carry an additional subset-count factor supplied by
// the caller (it depends on the action or arm).
struct ControlFunctions {
    double z = 0.0;

    static ControlFunctions from_model(double alpha, int dimension) {
        ControlFunctions c;
        c.z = 2.0 * alpha / (3.0 * alpha + static_cast<double>(dimension));
        return c;
    }

    double base(Time t) const {
        const double td = static_cast<double>(t);
        return std::pow(td, z) * std::log(td);
    }

    double explore_threshold(Time t) const { return base(t); }

    double training_threshold(double subset_count, Time t) const {
        return subset_count * base(t);
    }
};

}  // namespace cbmr
