#pragma once

#include <cstdint>
#include <string>

#include "cnchtv/image.hpp"
#include "cnchtv/operators.hpp"

namespace cnchtv {

// Additive Gaussian noise level as a percentage of the 255 dynamic range:
// n% means std = n/100 * 255 gray levels.
struct NoiseSpec {
    double level_percent = 0.0;
    std::uint64_t seed = 0;

    double stddev() const { return level_percent / 100.0 * 255.0; }
};

// Name of the generator recorded in manifests; the stream is fully
// determined by the seed (Box-Muller on top of mt19937_64).
inline constexpr const char* kNoiseGenerator = "mt19937_64+box-muller";

// Sampled isotropic Gaussian, unit mass.
Psf make_psf_gaussian(int size, double std);

// Line segment of the given length through the center at angle_deg (CCW
// from +x, y pointing down), anti-aliased by coverage, unit mass.
Psf make_psf_motion(int size, double length, double angle_deg);

// Coverage-weighted circular indicator, unit mass.
Psf make_psf_disk(int size, double radius);

// rows x cols of i.i.d. N(0, stddev^2) draws, row-major fill order.
Image gaussian_noise(Index rows, Index cols, double stddev, std::uint64_t seed);

// g = H f + eps. Pure blur at level 0; the result is NOT clamped.
Image degrade(const Image& f, const Psf& psf, const NoiseSpec& noise);

// Per-plane application; plane p draws from seed + p.
ColorImage degrade(const ColorImage& f, const Psf& psf, const NoiseSpec& noise);

} // namespace cnchtv
