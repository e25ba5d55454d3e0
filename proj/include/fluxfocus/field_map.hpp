#pragma once

#include <string>
#include <vector>

#include "fluxfocus/grid.hpp"

namespace fluxfocus {

// one scalar per grid point, SI units
struct FieldMap {
    GridPtr grid;
    std::vector<double> values;
    std::string quantity;  // "H_z", "g", ...
    std::string unit;      // "A/m", "A", "T"

    FieldMap() = default;
    // throws ConfigError on size mismatch or non-finite values
    FieldMap(GridPtr grid, std::vector<double> values, std::string quantity, std::string unit);

    static FieldMap zeros(GridPtr grid, std::string quantity, std::string unit);

    std::size_t size() const { return values.size(); }
    double operator[](std::size_t k) const { return values[k]; }
};

}  // namespace fluxfocus
