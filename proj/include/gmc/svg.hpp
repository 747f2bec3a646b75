#pragma once

#include <string>

#include "gmc/surface.hpp"

namespace gmc {

// Static heatmap of the correlation surface: one rect per grid cell, fixed
// diverging color scale over [-1, 1], axis extent labels.
std::string surface_to_svg(const CorrelationSurface& surface, const std::string& title);

} // namespace gmc
