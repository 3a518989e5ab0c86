#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "panodepth/geometry.hpp"

namespace panodepth {

enum class MapKind : uint8_t { depth, disparity };

/// Raster of optional per-pixel values (depth in meters or disparity in
/// degrees) with an explicit validity mask.
struct DepthMap {
    int width = 0, height = 0;
    std::vector<double> values;   // undefined where !valid
    std::vector<uint8_t> valid;   // 0/1
    MapKind kind = MapKind::depth;

    DepthMap() = default;
    DepthMap(int w, int h, MapKind k = MapKind::depth)
        : width(w), height(h), values(size_t(w) * h, 0.0), valid(size_t(w) * h, 0), kind(k) {}

    size_t index(int x, int y) const { return size_t(y) * width + x; }
    bool is_valid(int x, int y) const { return valid[index(x, y)] != 0; }
    double at(int x, int y) const { return values[index(x, y)]; }
    void set(int x, int y, double v) {
        values[index(x, y)] = v;
        valid[index(x, y)] = 1;
    }
    void clear(int x, int y) { valid[index(x, y)] = 0; }

    size_t label_count() const {
        size_t n = 0;
        for (uint8_t v : valid) n += v;
        return n;
    }
    bool same_shape(const DepthMap& o) const { return width == o.width && height == o.height; }
};

using DisparityMap = DepthMap;

/// Wrap-around padding of values and mask together.
inline DepthMap circular_pad(const DepthMap& map, int pad) {
    if (pad < 0 || pad > map.width)
        throw std::invalid_argument("circular_pad: padding must lie in [0, width]");
    DepthMap out(map.width + 2 * pad, map.height, map.kind);
    for (int y = 0; y < map.height; ++y)
        for (int j = 0; j < out.width; ++j) {
            const int sx = (j + map.width - pad) % map.width;
            out.values[out.index(j, y)] = map.values[map.index(sx, y)];
            out.valid[out.index(j, y)] = map.valid[map.index(sx, y)];
        }
    return out;
}

}  // namespace panodepth
