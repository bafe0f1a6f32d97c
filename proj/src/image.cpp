#include "cnchtv/image.hpp"

namespace cnchtv {

void require_valid(const Image& img, const std::string& what) {
    if (img.rows() < 3 || img.cols() < 3) {
        throw ArgumentError(what + ": image must be at least 3x3, got " +
                            std::to_string(img.cols()) + "x" + std::to_string(img.rows()));
    }
    if (!img.allFinite()) {
        throw ArgumentError(what + ": image contains non-finite values");
    }
}

void require_valid(const ColorImage& img, const std::string& what) {
    if (img.planes.size() != 1 && img.planes.size() != 3) {
        throw ArgumentError(what + ": expected 1 or 3 planes, got " +
                            std::to_string(img.planes.size()));
    }
    for (const Image& plane : img.planes) {
        require_valid(plane, what);
        if (plane.rows() != img.height() || plane.cols() != img.width()) {
            throw ArgumentError(what + ": planes differ in size");
        }
    }
}

Image clamp(const Image& img, double lo, double hi) {
    if (lo > hi) {
        throw ArgumentError("clamp: lo " + std::to_string(lo) + " exceeds hi " +
                            std::to_string(hi));
    }
    return img.max(lo).min(hi);
}

} // namespace cnchtv
