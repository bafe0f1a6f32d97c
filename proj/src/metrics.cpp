#include "cnchtv/metrics.hpp"

#include <cmath>
#include <limits>

namespace cnchtv {

void SsimConfig::validate() const {
    if (window_size < 3 || window_size % 2 == 0) {
        throw ArgumentError("SsimConfig: window_size must be odd and >= 3");
    }
    if (window_sigma <= 0.0) throw ArgumentError("SsimConfig: window_sigma must be positive");
    if (k1 <= 0.0 || k2 <= 0.0) throw ArgumentError("SsimConfig: k1/k2 must be positive");
    if (dynamic_range <= 0.0) throw ArgumentError("SsimConfig: dynamic_range must be positive");
}

namespace {

Eigen::ArrayXd ssim_window(int size, double sigma) {
    const int c = (size - 1) / 2;
    Eigen::ArrayXd taps(size);
    for (int t = 0; t < size; ++t) {
        const double d = t - c;
        taps(t) = std::exp(-0.5 * d * d / (sigma * sigma));
    }
    taps /= taps.sum();
    return taps;
}

// Valid-mode separable filtering: rows first, then columns.
Image valid_filter(const Image& f, const Eigen::ArrayXd& taps) {
    const Index w = taps.size();
    Image cols_done = Image::Zero(f.rows(), f.cols() - w + 1);
    for (Index t = 0; t < w; ++t) {
        cols_done += taps(t) * f.middleCols(t, cols_done.cols());
    }
    Image out = Image::Zero(f.rows() - w + 1, cols_done.cols());
    for (Index t = 0; t < w; ++t) {
        out += taps(t) * cols_done.middleRows(t, out.rows());
    }
    return out;
}

} // namespace

Image ssim_map(const Image& ref, const Image& test, const SsimConfig& cfg) {
    cfg.validate();
    if (ref.rows() != test.rows() || ref.cols() != test.cols()) {
        throw ArgumentError("ssim_map: image dimensions differ");
    }
    if (ref.rows() < cfg.window_size || ref.cols() < cfg.window_size) {
        throw ArgumentError("ssim_map: images smaller than the window");
    }

    const Eigen::ArrayXd win = ssim_window(cfg.window_size, cfg.window_sigma);
    const double c1 = (cfg.k1 * cfg.dynamic_range) * (cfg.k1 * cfg.dynamic_range);
    const double c2 = (cfg.k2 * cfg.dynamic_range) * (cfg.k2 * cfg.dynamic_range);

    const Image mu1 = valid_filter(ref, win);
    const Image mu2 = valid_filter(test, win);
    const Image sigma1 = valid_filter(ref.square(), win) - mu1.square();
    const Image sigma2 = valid_filter(test.square(), win) - mu2.square();
    const Image sigma12 = valid_filter(ref * test, win) - mu1 * mu2;

    return (2.0 * mu1 * mu2 + c1) * (2.0 * sigma12 + c2) /
           ((mu1.square() + mu2.square() + c1) * (sigma1 + sigma2 + c2));
}

double mssim(const Image& ref, const Image& test, const SsimConfig& cfg) {
    return ssim_map(ref, test, cfg).mean();
}

double mssim(const ColorImage& ref, const ColorImage& test, const SsimConfig& cfg) {
    if (ref.planes.size() != test.planes.size()) {
        throw ArgumentError("mssim: plane counts differ");
    }
    double sum = 0.0;
    for (size_t p = 0; p < ref.planes.size(); ++p) {
        sum += mssim(ref.planes[p], test.planes[p], cfg);
    }
    return sum / double(ref.planes.size());
}

double psnr(const Image& ref, const Image& test, double peak) {
    if (ref.rows() != test.rows() || ref.cols() != test.cols()) {
        throw ArgumentError("psnr: image dimensions differ");
    }
    const double mse = (ref - test).square().mean();
    if (mse == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(peak * peak / mse);
}

double psnr(const ColorImage& ref, const ColorImage& test, double peak) {
    if (ref.planes.size() != test.planes.size()) {
        throw ArgumentError("psnr: plane counts differ");
    }
    double mse = 0.0;
    for (size_t p = 0; p < ref.planes.size(); ++p) {
        const Image& a = ref.planes[p];
        const Image& b = test.planes[p];
        if (a.rows() != b.rows() || a.cols() != b.cols()) {
            throw ArgumentError("psnr: image dimensions differ");
        }
        mse += (a - b).square().mean();
    }
    mse /= double(ref.planes.size());
    if (mse == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(peak * peak / mse);
}

} // namespace cnchtv
