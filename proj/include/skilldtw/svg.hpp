#pragma once

#include "skilldtw/cluster.hpp"
#include "skilldtw/distance.hpp"
#include "skilldtw/envelope.hpp"

#include <string>
#include <vector>

namespace skilldtw {

// Static SVG plots. Output depends only on the inputs.
std::string dendrogram_svg(const std::vector<Merge>& dendrogram, std::size_t n, const std::vector<std::string>& labels);

// One panel per variable: envelope band plus overlaid series (already at the
// envelope length).
std::string envelope_svg(const Envelope& env, const std::vector<Series>& overlays,
                         const std::vector<std::string>& variables);

// Cumulative cost matrix heatmap (downsampled to at most 200 x 200 cells) with
// the warping path on top.
std::string heatmap_svg(const Eigen::MatrixXd& cost, const WarpPath& path);

// Stacked skill-share bars per cluster.
std::string composition_svg(const std::vector<ClusterComposition>& report);

}  // namespace skilldtw
