#pragma once

#include <vector>

#include "cbmr/types.hpp"

namespace cbmr {

// Uniform partition of the context space into congruent hypercubes, or the
// identity partition over a discrete query set.
//
// Hypercube cells are half-open along each axis except the last cell, which
// is closed so that boundary coordinate 1.0 maps inside. Cell ids are 1-based
// and linearized row-major with axis 0 least significant.
class Partition {
   public:
    static Partition hypercube(int dimension, int cells_per_axis);
    static Partition discrete(int query_count);

    int cell_count() const { return cell_count_; }
    bool is_discrete() const { return discrete_; }
    int dimension() const { return dimension_; }
    int cells_per_axis() const { return cells_per_axis_; }

    CellId cell_of(const Context& x) const;

    // Geometric center of a hypercube cell; for a discrete partition the
    // cell's query context. Per-cell optimal actions are defined here.
    Context cell_center(CellId l) const;

   private:
    Partition() = default;

    bool discrete_ = false;
    int dimension_ = 0;
    int cells_per_axis_ = 0;
    int cell_count_ = 0;
};

// Cells per axis for a horizon T: ceil(T^(1/(3*alpha+d))). Exact integer
// powers are resolved without floating point boundary surprises.
int cells_per_axis_for_horizon(Time horizon, double alpha, int dimension);

}  // namespace cbmr
