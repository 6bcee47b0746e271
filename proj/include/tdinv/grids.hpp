#pragma once

#include <utility>
#include <vector>

#include "tdinv/types.hpp"

namespace tdinv {

/// Uniform grid t_n = n * step on [0, horizon], n = 0..steps.
class TimeGrid {
public:
    TimeGrid() = default;

    double horizon() const noexcept { return horizon_; }
    int steps() const noexcept { return steps_; }
    double step() const noexcept { return step_; }
    int node_count() const noexcept { return steps_ + 1; }
    double node(int n) const noexcept { return n == steps_ ? horizon_ : n * step_; }

    friend bool operator==(const TimeGrid&, const TimeGrid&) = default;

private:
    friend TimeGrid make_time_grid(double horizon, int steps);
    double horizon_ = 1.0;
    int steps_ = 1;
    double step_ = 1.0;
};

/// Throws ValidationError for horizon <= 0 or steps < 1.
TimeGrid make_time_grid(double horizon, int steps);

/// Uniform split of the horizon into slabs whose breakpoints are grid nodes.
///
/// Slab j covers the nodes [j*N/m, (j+1)*N/m]. Time integrals use the
/// right-endpoint rule, so the quadrature slots owned by slab j are
/// j*N/m + 1 .. (j+1)*N/m; every slot 1..N belongs to exactly one slab.
class KaczmarzPartition {
public:
    KaczmarzPartition() = default;

    int slab_count() const noexcept { return slabs_; }
    const TimeGrid& grid() const noexcept { return grid_; }

    /// Breakpoint times tau_0 = 0 < ... < tau_m = T.
    std::vector<double> breakpoints() const;

    /// First and last grid node of slab j (inclusive).
    std::pair<int, int> node_range(int slab) const;

    /// Quadrature slots [first, last] owned by slab j.
    std::pair<int, int> slot_range(int slab) const;

    /// Slab visited at iteration k: k mod m.
    int slab_of_iteration(long long k) const noexcept { return static_cast<int>(k % slabs_); }

private:
    friend KaczmarzPartition make_partition(const TimeGrid& grid, int slabs);
    TimeGrid grid_;
    int slabs_ = 1;
    int nodes_per_slab_ = 1;
};

/// Throws ValidationError unless slabs >= 1 and slabs divides the step count.
KaczmarzPartition make_partition(const TimeGrid& grid, int slabs);

}  // namespace tdinv
