#pragma once

#include <string>

#include "cnchtv/image.hpp"

namespace cnchtv {

// PGM/PPM with maxval 255, binary (P5/P6) or ASCII (P2/P3). PGM loads as one
// plane, PPM as three. Values come back as reals in [0,255], row-major from
// the top-left pixel. Anything else in the header is a FormatError naming
// the offending field.
ColorImage load_pnm(const std::string& path);

// Convenience for the single-plane case; rejects 3-plane files.
Image load_pgm(const std::string& path);

// Values are rounded half-away-from-zero, clamped to [0,255] and written as
// P5 (1 plane) or P6 (3 planes). load_pnm(save_pnm(x)) reproduces
// clamp(round(x)) bit-exactly.
void save_pnm(const ColorImage& img, const std::string& path);
void save_pnm(const Image& img, const std::string& path);

} // namespace cnchtv
