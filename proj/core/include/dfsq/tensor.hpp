// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace dfsq {

/// Dense (B, C, H, W) single-precision tensor, row-major.
struct Tensor {
    std::array<std::uint64_t, 4> shape{0, 0, 0, 0};
    std::vector<float> data;

    static Tensor zeros(std::uint64_t b, std::uint64_t c, std::uint64_t h, std::uint64_t w) {
        Tensor t;
        t.shape = {b, c, h, w};
        t.data.assign(static_cast<std::size_t>(b * c * h * w), 0.0f);
        return t;
    }

    std::uint64_t batch() const { return shape[0]; }
    std::uint64_t channels() const { return shape[1]; }
    std::uint64_t height() const { return shape[2]; }
    std::uint64_t width() const { return shape[3]; }
    std::size_t size() const { return data.size(); }
    std::size_t channel_size() const { return static_cast<std::size_t>(shape[2] * shape[3]); }
    std::size_t sample_size() const { return channel_size() * static_cast<std::size_t>(shape[1]); }

    std::span<float> channel(std::uint64_t i, std::uint64_t c) {
        return {data.data() + i * sample_size() + c * channel_size(), channel_size()};
    }
    std::span<const float> channel(std::uint64_t i, std::uint64_t c) const {
        return {data.data() + i * sample_size() + c * channel_size(), channel_size()};
    }
    std::span<float> sample(std::uint64_t i) {
        return {data.data() + i * sample_size(), sample_size()};
    }
    std::span<const float> sample(std::uint64_t i) const {
        return {data.data() + i * sample_size(), sample_size()};
    }
};

} // namespace dfsq
