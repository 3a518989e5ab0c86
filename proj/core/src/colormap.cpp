#include "panodepth/colormap.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace panodepth {

namespace {

// viridis decile stops, linearly interpolated between
constexpr uint8_t kViridis[11][3] = {
    {68, 1, 84},    {72, 40, 120},  {62, 74, 137}, {49, 104, 142}, {38, 130, 142},
    {33, 145, 140}, {31, 158, 137}, {53, 183, 121}, {110, 206, 88}, {181, 222, 43},
    {253, 231, 37}};

}  // namespace

Colormap colormap_from_name(const std::string& name) {
    if (name == "gray" || name == "grey") return Colormap::gray;
    if (name == "viridis") return Colormap::viridis;
    throw std::invalid_argument("unknown colormap: " + name);
}

std::array<uint8_t, 3> colormap_rgb(Colormap map, double t) {
    t = std::clamp(t, 0.0, 1.0);
    if (map == Colormap::gray) {
        const uint8_t v = uint8_t(std::lround(t * 255.0));
        return {v, v, v};
    }
    const double pos = t * 10.0;
    const int lo = std::min(int(pos), 9);
    const double f = pos - lo;
    std::array<uint8_t, 3> rgb{};
    for (int c = 0; c < 3; ++c) {
        const double v = kViridis[lo][c] + f * (double(kViridis[lo + 1][c]) - kViridis[lo][c]);
        rgb[c] = uint8_t(std::lround(std::clamp(v, 0.0, 255.0)));
    }
    return rgb;
}

std::vector<uint8_t> colorize(const DepthMap& map, const ColorizeOptions& opts) {
    if (opts.min_value == opts.max_value)
        throw std::invalid_argument("colorize: min and max must differ");
    if (opts.inverse && (opts.min_value <= 0.0 || opts.max_value <= 0.0))
        throw std::invalid_argument("colorize: inverse normalization needs positive min/max");
    const double lo = opts.inverse ? 1.0 / opts.max_value : opts.min_value;
    const double hi = opts.inverse ? 1.0 / opts.min_value : opts.max_value;

    std::vector<uint8_t> out(size_t(map.width) * map.height * 3, 0);
    for (int y = 0; y < map.height; ++y)
        for (int x = 0; x < map.width; ++x) {
            if (!map.is_valid(x, y)) continue;
            const double v = opts.inverse ? 1.0 / map.at(x, y) : map.at(x, y);
            const double t = (v - lo) / (hi - lo);
            const auto rgb = colormap_rgb(opts.map, opts.inverse ? 1.0 - t : t);
            const size_t i = (size_t(y) * map.width + x) * 3;
            out[i] = rgb[0];
            out[i + 1] = rgb[1];
            out[i + 2] = rgb[2];
        }
    return out;
}

}  // namespace panodepth
