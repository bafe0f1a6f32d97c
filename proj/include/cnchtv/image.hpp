#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "cnchtv/errors.hpp"

namespace cnchtv {

// A single-channel image in gray-level units (nominal range [0,255], values
// may leave it inside the solver). rows() is the height, cols() the width,
// (i,j) indexes (row, column) with the origin at the top-left pixel.
using Image = Eigen::ArrayXXd;

using Index = Eigen::Index;

inline Index width(const Image& img) { return img.cols(); }
inline Index height(const Image& img) { return img.rows(); }

// Throws ArgumentError unless the image is at least 3x3 with finite values.
// Second-order periodic stencils need three samples per axis.
void require_valid(const Image& img, const std::string& what);

// Pixelwise projection onto [lo, hi]. Idempotent; lo > hi is an error.
Image clamp(const Image& img, double lo, double hi);

// 1 or 3 planes of identical dimensions; channels are processed
// independently everywhere in this toolkit.
struct ColorImage {
    std::vector<Image> planes;

    ColorImage() = default;
    explicit ColorImage(Image plane) { planes.push_back(std::move(plane)); }

    Index width() const { return planes.empty() ? 0 : planes.front().cols(); }
    Index height() const { return planes.empty() ? 0 : planes.front().rows(); }
    bool gray() const { return planes.size() == 1; }
};

void require_valid(const ColorImage& img, const std::string& what);

} // namespace cnchtv
