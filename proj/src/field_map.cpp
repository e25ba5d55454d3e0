#include "fluxfocus/field_map.hpp"

#include <cmath>

#include "fluxfocus/errors.hpp"

namespace fluxfocus {

FieldMap::FieldMap(GridPtr g, std::vector<double> v, std::string q, std::string u)
    : grid(std::move(g)), values(std::move(v)), quantity(std::move(q)), unit(std::move(u)) {
    if (!grid) throw ConfigError("field map without grid");
    if (values.size() != grid->size())
        throw ConfigError("field map value count does not match grid point count");
    for (double x : values)
        if (!std::isfinite(x)) throw ConfigError("field map '" + quantity + "' has non-finite values");
}

FieldMap FieldMap::zeros(GridPtr g, std::string q, std::string u) {
    const std::size_t n = g ? g->size() : 0;
    return FieldMap(std::move(g), std::vector<double>(n, 0.0), std::move(q), std::move(u));
}

}  // namespace fluxfocus
