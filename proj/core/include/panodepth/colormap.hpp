#pragma once

// Depth/disparity visualization: normalize to [0, 1] (linear or inverse-depth)
// and map through a colormap. Invalid pixels render black.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "panodepth/raster.hpp"

namespace panodepth {

enum class Colormap : uint8_t { gray, viridis };

Colormap colormap_from_name(const std::string& name);  // throws on unknown names

std::array<uint8_t, 3> colormap_rgb(Colormap map, double t);  // t clamped to [0, 1]

struct ColorizeOptions {
    Colormap map = Colormap::viridis;
    double min_value = 0.0;
    double max_value = 1.0;
    bool inverse = false;  // normalize 1/value instead of value (depth emphasis up close)
};

/// Interleaved RGB8, row-major, invalid pixels black. Throws when
/// min_value == max_value.
std::vector<uint8_t> colorize(const DepthMap& map, const ColorizeOptions& opts);

}  // namespace panodepth
