#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace sitnikov {

/// Uniform grid over [t_start, t_end] with M nodes per unit interval.
/// Every integer time is a node; the sign constraints live there.
struct Grid {
    int nodes_per_unit = 64;
    long t_start = 0;
    long t_end = 0;

    void validate() const {
        if (nodes_per_unit < 8) throw std::invalid_argument("Grid: nodes_per_unit must be >= 8");
        if (t_end <= t_start) throw std::invalid_argument("Grid: t_end must exceed t_start");
    }

    double step() const { return 1.0 / nodes_per_unit; }
    long span() const { return t_end - t_start; }
    std::size_t node_count() const { return static_cast<std::size_t>(span()) * nodes_per_unit + 1; }

    double time_at(std::size_t i) const {
        const long whole = static_cast<long>(i) / nodes_per_unit;
        const long rem = static_cast<long>(i) % nodes_per_unit;
        return static_cast<double>(t_start + whole) + static_cast<double>(rem) * step();
    }

    bool is_integer_node(std::size_t i) const { return static_cast<long>(i) % nodes_per_unit == 0; }
    long integer_at(std::size_t i) const { return t_start + static_cast<long>(i) / nodes_per_unit; }

    /// Node index of integer time n (must lie in [t_start, t_end]).
    std::size_t node_at(long n) const {
        if (n < t_start || n > t_end) throw std::out_of_range("Grid: integer time outside grid");
        return static_cast<std::size_t>(n - t_start) * nodes_per_unit;
    }

    bool operator==(const Grid&) const = default;
};

enum class BoundaryKind { periodic, fixed_ends, free_ends };

/// Piecewise-linear candidate trajectory: one value per node. For periodic
/// boundary conditions the value at t_end is identified with the one at
/// t_start (both stored, kept equal).
struct Trajectory {
    Grid grid;
    BoundaryKind bc = BoundaryKind::free_ends;
    std::vector<double> values;

    void validate() const {
        grid.validate();
        if (values.size() != grid.node_count())
            throw std::invalid_argument("Trajectory: value count does not match grid");
        if (bc == BoundaryKind::periodic && values.front() != values.back())
            throw std::invalid_argument("Trajectory: periodic bc requires equal end values");
    }
};

}  // namespace sitnikov
