#pragma once

#include <string>

#include "vft/geometry.hpp"
#include "vft/ray.hpp"

namespace vft {

enum class PlotStyle { Magnitude, Quiver, Both };

PlotStyle parse_plot_style(const std::string& name);

/// Render a nodal field as a self-contained SVG string: triangles filled by
/// a linear magnitude color scale and/or a unit-length arrow per node.
/// Byte-deterministic for fixed inputs; min/max magnitudes are annotated.
std::string render_field_svg(const TriMesh& mesh, const NodalField& field,
                             PlotStyle style);

}  // namespace vft
