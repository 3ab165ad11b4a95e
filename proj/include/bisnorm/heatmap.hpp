#pragma once

#include <string>
#include <string_view>

#include "bisnorm/confusion_matrix.hpp"

namespace bisnorm {

// SVG heatmap of `m`: cell shade runs linearly from white at 0 to full
// saturation at the largest entry. Rows are true classes, columns
// predictions; each cell is annotated with its value.
std::string render_heatmap_svg(const ConfusionMatrix& m, std::string_view title);

}  // namespace bisnorm
