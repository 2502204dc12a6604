#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

#include "hrl/error.hpp"

namespace hrl::embed {

/// Steering angles for a horizontally flipped frame.
inline std::vector<double> hflip_negate(const std::vector<double>& angles) {
    std::vector<double> out(angles.size());
    for (std::size_t i = 0; i < angles.size(); ++i) out[i] = -angles[i];
    return out;
}

/// Single-channel image, row-major.
struct Image {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> pixels;

    Image() = default;
    Image(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), pixels(r * c, fill) {}

    double& at(std::size_t r, std::size_t c) { return pixels[r * cols + c]; }
    double at(std::size_t r, std::size_t c) const { return pixels[r * cols + c]; }
};

enum class Axis { Horizontal, Vertical };

/// Valid-region correlation with [1, 0, -1] along `axis`: out_i = x_{i-1} - x_{i+1}.
inline Image gradient_filter(const Image& img, Axis axis) {
    require(img.pixels.size() == img.rows * img.cols, "image shape does not match its pixel count");
    if (axis == Axis::Horizontal) {
        if (img.cols < 3) throw InvalidArgument("gradient_filter: need at least 3 columns");
        Image out(img.rows, img.cols - 2);
        for (std::size_t r = 0; r < img.rows; ++r)
            for (std::size_t c = 0; c < out.cols; ++c) out.at(r, c) = img.at(r, c) - img.at(r, c + 2);
        return out;
    }
    if (img.rows < 3) throw InvalidArgument("gradient_filter: need at least 3 rows");
    Image out(img.rows - 2, img.cols);
    for (std::size_t r = 0; r < out.rows; ++r)
        for (std::size_t c = 0; c < img.cols; ++c) out.at(r, c) = img.at(r, c) - img.at(r + 2, c);
    return out;
}

/// Affine map of [min, max] onto [-1, 1]; a constant image becomes zeros.
inline Image normalize_image(const Image& img) {
    require(!img.pixels.empty(), "normalize_image: empty image");
    auto [lo_it, hi_it] = std::minmax_element(img.pixels.begin(), img.pixels.end());
    const double lo = *lo_it, hi = *hi_it;
    Image out(img.rows, img.cols);
    if (hi == lo) return out;
    for (std::size_t i = 0; i < img.pixels.size(); ++i) out.pixels[i] = 2.0 * (img.pixels[i] - lo) / (hi - lo) - 1.0;
    return out;
}

} // namespace hrl::embed
