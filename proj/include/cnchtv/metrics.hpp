#pragma once

#include <string_view>

#include "cnchtv/image.hpp"

namespace cnchtv {

struct SsimConfig {
    int window_size = 11;
    double window_sigma = 1.5;
    double k1 = 0.01;
    double k2 = 0.03;
    double dynamic_range = 255.0;

    void validate() const;
};

// Per-pixel structural similarity with a Gaussian-weighted window, "valid"
// windowing (no padding): the map is (m-w+1) x (n-w+1), values in [-1,1].
Image ssim_map(const Image& ref, const Image& test, const SsimConfig& cfg = {});

// Arithmetic mean of ssim_map; 1 exactly for identical images.
double mssim(const Image& ref, const Image& test, const SsimConfig& cfg = {});

// Color images score the mean of the per-plane MSSIM values.
double mssim(const ColorImage& ref, const ColorImage& test, const SsimConfig& cfg = {});

// 10*log10(peak^2 / MSE); +infinity when the images coincide.
double psnr(const Image& ref, const Image& test, double peak = 255.0);
double psnr(const ColorImage& ref, const ColorImage& test, double peak = 255.0);

// Row schema shared by the evaluate/sweep reporting.
inline constexpr std::string_view kBenchmarkCsvHeader =
    "image_id,psf_id,noise_percent,method,mssim,psnr,iterations,wall_time_s";

} // namespace cnchtv
