#include "oam/grid.hpp"

#include <cmath>
#include <string>

#include "oam/errors.hpp"

namespace oam {

GridSpec make_grid(int n, double extent) {
    require(n >= 8, "grid: n must be >= 8, got " + std::to_string(n));
    require(std::isfinite(extent) && extent > 0.0,
            "grid: extent must be a positive length in meters");
    return GridSpec{n, extent};
}

GridSpec default_grid() { return make_grid(kDefaultGridN, kDefaultExtent); }

}  // namespace oam
