// Minimal PNG read/write for 16-bit grayscale and 8-bit RGB via zlib.
// Reading supports non-interlaced images with all five scanline filters,
// which covers everything this toolkit and KITTI-style exporters emit.

#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <vector>

#include "panodepth/io.hpp"

namespace panodepth {

namespace {

void put_u32(std::string& s, uint32_t v) {
    s.push_back(char(v >> 24));
    s.push_back(char(v >> 16));
    s.push_back(char(v >> 8));
    s.push_back(char(v));
}

uint32_t get_u32(const uint8_t* p) {
    return uint32_t(p[0]) << 24 | uint32_t(p[1]) << 16 | uint32_t(p[2]) << 8 | uint32_t(p[3]);
}

void append_chunk(std::string& out, const char type[4], const std::string& payload) {
    put_u32(out, uint32_t(payload.size()));
    const size_t crc_begin = out.size();
    out.append(type, 4);
    out.append(payload);
    const uLong crc =
        crc32(0, reinterpret_cast<const Bytef*>(out.data() + crc_begin), uInt(out.size() - crc_begin));
    put_u32(out, uint32_t(crc));
}

std::string zlib_deflate(const std::string& raw) {
    uLongf bound = compressBound(uLong(raw.size()));
    std::string out(bound, '\0');
    if (compress2(reinterpret_cast<Bytef*>(out.data()), &bound,
                  reinterpret_cast<const Bytef*>(raw.data()), uLong(raw.size()),
                  Z_DEFAULT_COMPRESSION) != Z_OK)
        throw io_error("png: deflate failed");
    out.resize(bound);
    return out;
}

std::string encode_png(int width, int height, int bit_depth, int color_type,
                       const std::string& raw_scanlines) {
    std::string out("\x89PNG\r\n\x1a\n", 8);
    std::string ihdr;
    put_u32(ihdr, uint32_t(width));
    put_u32(ihdr, uint32_t(height));
    ihdr.push_back(char(bit_depth));
    ihdr.push_back(char(color_type));
    ihdr.push_back(0);  // compression
    ihdr.push_back(0);  // filter method
    ihdr.push_back(0);  // no interlace
    append_chunk(out, "IHDR", ihdr);
    append_chunk(out, "IDAT", zlib_deflate(raw_scanlines));
    append_chunk(out, "IEND", "");
    return out;
}

void unfilter_scanlines(std::string& raw, int height, size_t stride, int bpp) {
    // stride excludes the filter byte; rows are filter-byte + stride
    std::vector<uint8_t> prev(stride, 0);
    for (int y = 0; y < height; ++y) {
        uint8_t* row = reinterpret_cast<uint8_t*>(raw.data()) + size_t(y) * (stride + 1);
        const int filter = row[0];
        uint8_t* cur = row + 1;
        for (size_t i = 0; i < stride; ++i) {
            const int a = i >= size_t(bpp) ? cur[i - bpp] : 0;
            const int b = prev[i];
            const int c = i >= size_t(bpp) ? prev[i - bpp] : 0;
            int x = cur[i];
            switch (filter) {
                case 0: break;
                case 1: x += a; break;
                case 2: x += b; break;
                case 3: x += (a + b) / 2; break;
                case 4: {
                    const int p = a + b - c;
                    const int pa = std::abs(p - a), pb = std::abs(p - b), pc = std::abs(p - c);
                    x += (pa <= pb && pa <= pc) ? a : (pb <= pc ? b : c);
                    break;
                }
                default: throw io_error("png: unknown scanline filter");
            }
            cur[i] = uint8_t(x);
        }
        std::memcpy(prev.data(), cur, stride);
    }
}

struct DecodedPng {
    int width = 0, height = 0, bit_depth = 0, color_type = 0;
    std::string pixels;  // unfiltered, filter bytes stripped
};

DecodedPng decode_png(const std::filesystem::path& path, int want_bpp) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open " + path.string());
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (bytes.size() < 8 || std::memcmp(bytes.data(), "\x89PNG\r\n\x1a\n", 8) != 0)
        throw io_error(path.string() + ": not a PNG file");

    DecodedPng png;
    std::string idat;
    size_t pos = 8;
    bool saw_ihdr = false;
    while (pos + 8 <= bytes.size()) {
        const uint32_t len = get_u32(reinterpret_cast<const uint8_t*>(bytes.data() + pos));
        const std::string type = bytes.substr(pos + 4, 4);
        if (pos + 12 + len > bytes.size()) throw io_error(path.string() + ": truncated PNG chunk");
        const char* payload = bytes.data() + pos + 8;
        if (type == "IHDR") {
            const uint8_t* p = reinterpret_cast<const uint8_t*>(payload);
            png.width = int(get_u32(p));
            png.height = int(get_u32(p + 4));
            png.bit_depth = p[8];
            png.color_type = p[9];
            if (p[12] != 0) throw io_error(path.string() + ": interlaced PNG is not supported");
            saw_ihdr = true;
        } else if (type == "IDAT") {
            idat.append(payload, len);
        } else if (type == "IEND") {
            break;
        }
        pos += 12 + len;
    }
    if (!saw_ihdr || png.width <= 0 || png.height <= 0)
        throw io_error(path.string() + ": missing or bad IHDR");
    const int have_bpp = (png.color_type == 2 ? 3 : 1) * (png.bit_depth / 8);
    if (have_bpp != want_bpp)
        throw io_error(path.string() + ": unexpected PNG pixel layout");

    const size_t stride = size_t(png.width) * want_bpp;
    const size_t raw_size = size_t(png.height) * (stride + 1);
    std::string raw(raw_size, '\0');
    uLongf out_len = uLongf(raw_size);
    if (uncompress(reinterpret_cast<Bytef*>(raw.data()), &out_len,
                   reinterpret_cast<const Bytef*>(idat.data()), uLong(idat.size())) != Z_OK ||
        out_len != raw_size)
        throw io_error(path.string() + ": PNG inflate failed");

    unfilter_scanlines(raw, png.height, stride, want_bpp);
    png.pixels.reserve(size_t(png.height) * stride);
    for (int y = 0; y < png.height; ++y)
        png.pixels.append(raw, size_t(y) * (stride + 1) + 1, stride);
    return png;
}

}  // namespace

void write_depth_png16(const std::filesystem::path& path, const DepthMap& map) {
    std::string raw;
    raw.reserve(size_t(map.height) * (size_t(map.width) * 2 + 1));
    for (int y = 0; y < map.height; ++y) {
        raw.push_back('\0');  // filter 0
        for (int x = 0; x < map.width; ++x) {
            uint16_t q = 0;
            if (map.is_valid(x, y)) {
                const double scaled = std::round(map.at(x, y) * 256.0);
                q = uint16_t(std::clamp(scaled, 1.0, 65535.0));
            }
            raw.push_back(char(q >> 8));  // PNG samples are big-endian
            raw.push_back(char(q & 0xff));
        }
    }
    atomic_write(path, encode_png(map.width, map.height, 16, 0, raw));
}

DepthMap read_depth_png16(const std::filesystem::path& path) {
    const DecodedPng png = decode_png(path, 2);
    if (png.bit_depth != 16 || png.color_type != 0)
        throw io_error(path.string() + ": expected 16-bit grayscale PNG");
    DepthMap map(png.width, png.height, MapKind::depth);
    const uint8_t* p = reinterpret_cast<const uint8_t*>(png.pixels.data());
    for (int y = 0; y < png.height; ++y)
        for (int x = 0; x < png.width; ++x) {
            const uint16_t q = uint16_t(p[0]) << 8 | p[1];
            p += 2;
            if (q != 0) map.set(x, y, double(q) / 256.0);
        }
    return map;
}

void write_png_rgb8(const std::filesystem::path& path, int width, int height,
                    const std::vector<uint8_t>& rgb) {
    if (rgb.size() != size_t(width) * height * 3)
        throw std::invalid_argument("write_png_rgb8: buffer size mismatch");
    std::string raw;
    raw.reserve(size_t(height) * (size_t(width) * 3 + 1));
    for (int y = 0; y < height; ++y) {
        raw.push_back('\0');
        raw.append(reinterpret_cast<const char*>(rgb.data()) + size_t(y) * width * 3,
                   size_t(width) * 3);
    }
    atomic_write(path, encode_png(width, height, 8, 2, raw));
}

}  // namespace panodepth
