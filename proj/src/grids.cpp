#include "tdinv/grids.hpp"

#include <string>

#include "tdinv/errors.hpp"

namespace tdinv {

TimeGrid make_time_grid(double horizon, int steps) {
    if (!(horizon > 0.0)) throw ValidationError("time horizon must be positive");
    if (steps < 1) throw ValidationError("time grid needs at least one step");
    TimeGrid grid;
    grid.horizon_ = horizon;
    grid.steps_ = steps;
    grid.step_ = horizon / steps;
    return grid;
}

KaczmarzPartition make_partition(const TimeGrid& grid, int slabs) {
    if (slabs < 1) throw ValidationError("slab count must be positive");
    if (grid.steps() % slabs != 0) {
        throw ValidationError("slab count " + std::to_string(slabs) + " does not divide step count " +
                              std::to_string(grid.steps()));
    }
    KaczmarzPartition p;
    p.grid_ = grid;
    p.slabs_ = slabs;
    p.nodes_per_slab_ = grid.steps() / slabs;
    return p;
}

std::vector<double> KaczmarzPartition::breakpoints() const {
    std::vector<double> out(slabs_ + 1);
    for (int j = 0; j <= slabs_; ++j) out[j] = grid_.node(j * nodes_per_slab_);
    return out;
}

std::pair<int, int> KaczmarzPartition::node_range(int slab) const {
    if (slab < 0 || slab >= slabs_) throw ValidationError("slab index out of range");
    return {slab * nodes_per_slab_, (slab + 1) * nodes_per_slab_};
}

std::pair<int, int> KaczmarzPartition::slot_range(int slab) const {
    auto [first, last] = node_range(slab);
    return {first + 1, last};
}

}  // namespace tdinv
