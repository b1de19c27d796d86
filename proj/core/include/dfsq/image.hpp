// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace dfsq {

/// 8-bit image, interleaved row-major; 1 channel (gray) or 3 (RGB).
struct Image {
    std::uint32_t width = 0;
    std::uint32_t height = 0;
    int channels = 1;
    std::vector<std::uint8_t> pixels;

    static Image make(std::uint32_t w, std::uint32_t h, int channels, std::uint8_t fill = 0) {
        Image img;
        img.width = w;
        img.height = h;
        img.channels = channels;
        img.pixels.assign(static_cast<std::size_t>(w) * h * static_cast<std::size_t>(channels),
                          fill);
        return img;
    }

    std::size_t pixel_count() const { return static_cast<std::size_t>(width) * height; }

    std::uint8_t at(std::uint32_t x, std::uint32_t y, int c = 0) const {
        return pixels[(static_cast<std::size_t>(y) * width + x) * static_cast<std::size_t>(channels) +
                      static_cast<std::size_t>(c)];
    }
    std::uint8_t& at(std::uint32_t x, std::uint32_t y, int c = 0) {
        return pixels[(static_cast<std::size_t>(y) * width + x) * static_cast<std::size_t>(channels) +
                      static_cast<std::size_t>(c)];
    }
};

/// Reads binary PGM (P5) or PPM (P6) with maxval 255. Header whitespace and
/// '#' comments are accepted.
Image read_image(const std::filesystem::path& path);

/// Writes P5 for 1-channel images, P6 for 3-channel.
void write_image(const Image& img, const std::filesystem::path& path);

/// Crops `border` pixels from every side.
Image crop_border(const Image& img, std::uint32_t border);

} // namespace dfsq
