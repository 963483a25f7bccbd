#include "cbmr/context_space.hpp"

#include <cmath>
#include <stdexcept>

namespace cbmr {

Partition Partition::hypercube(int dimension, int cells_per_axis) {
    if (dimension < 1) throw std::invalid_argument("partition dimension must be positive");
    if (cells_per_axis < 1) throw std::invalid_argument("cells per axis must be positive");
    Partition p;
    p.discrete_ = false;
    p.dimension_ = dimension;
    p.cells_per_axis_ = cells_per_axis;
    long long count = 1;
    for (int k = 0; k < dimension; ++k) {
        count *= cells_per_axis;
        if (count > 1'000'000'000LL) throw std::invalid_argument("partition too fine");
    }
    p.cell_count_ = static_cast<int>(count);
    return p;
}

Partition Partition::discrete(int query_count) {
    if (query_count < 1) throw std::invalid_argument("query count must be positive");
    Partition p;
    p.discrete_ = true;
    p.dimension_ = 1;
    p.cells_per_axis_ = query_count;
    p.cell_count_ = query_count;
    return p;
}

CellId Partition::cell_of(const Context& x) const {
    if (discrete_) {
        if (!x.is_discrete() || x.query >= cell_count_)
            throw std::domain_error("context is not a known query id");
        return x.query + 1;
    }
    if (static_cast<int>(x.coords.size()) != dimension_)
        throw std::domain_error("context dimension mismatch");
    long long id = 0;
    long long stride = 1;
    for (int k = 0; k < dimension_; ++k) {
        const double v = x.coords[k];
        if (v < 0.0 || v > 1.0) throw std::domain_error("context coordinate outside [0,1]");
        // Half-open cells; coordinate 1.0 falls into the last cell.
        int idx = static_cast<int>(v * cells_per_axis_);
        if (idx >= cells_per_axis_) idx = cells_per_axis_ - 1;
        id += stride * idx;
        stride *= cells_per_axis_;
    }
    return static_cast<CellId>(id + 1);
}

Context Partition::cell_center(CellId l) const {
    if (l < 1 || l > cell_count_) throw std::domain_error("invalid cell id");
    if (discrete_) return Context::make_query(l - 1);
    std::vector<double> center(dimension_);
    long long rest = l - 1;
    for (int k = 0; k < dimension_; ++k) {
        const long long idx = rest % cells_per_axis_;
        rest /= cells_per_axis_;
        center[k] = (static_cast<double>(idx) + 0.5) / cells_per_axis_;
    }
    return Context::make_point(std::move(center));
}

int cells_per_axis_for_horizon(Time horizon, double alpha, int dimension) {
    if (horizon < 1) throw std::invalid_argument("horizon must be positive");
    if (alpha <= 0.0) throw std::invalid_argument("alpha must be positive");
    if (dimension < 1) throw std::invalid_argument("dimension must be positive");
    const double exponent = 1.0 / (3.0 * alpha + static_cast<double>(dimension));
    const double estimate = std::pow(static_cast<double>(horizon), exponent);
    // Smallest integer m with m^(1/exponent) >= T; probing neighbors of the
    // floating point estimate avoids ceil() misfires on exact powers.
    long long m = std::max(1LL, static_cast<long long>(std::floor(estimate)) - 1);
    const double target = static_cast<double>(horizon) * (1.0 - 1e-12);
    while (std::pow(static_cast<double>(m), 1.0 / exponent) < target) ++m;
    if (m > 1'000'000'000LL) throw std::invalid_argument("horizon implies an impractical partition");
    return static_cast<int>(m);
}

}  // namespace cbmr
