#include "cnchtv/degrade.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace cnchtv {

namespace {

void check_kernel_size(int size) {
    if (size < 1 || size % 2 == 0) {
        throw ArgumentError("make_psf: size must be odd and positive, got " +
                            std::to_string(size));
    }
}

} // namespace

Psf make_psf_gaussian(int size, double std) {
    check_kernel_size(size);
    if (std <= 0.0) throw ArgumentError("make_psf_gaussian: std must be positive");
    const int c = (size - 1) / 2;
    Eigen::ArrayXXd taps(size, size);
    for (int i = 0; i < size; ++i) {
        for (int j = 0; j < size; ++j) {
            const double dy = i - c;
            const double dx = j - c;
            taps(i, j) = std::exp(-0.5 * (dx * dx + dy * dy) / (std * std));
        }
    }
    return Psf(taps);
}

Psf make_psf_motion(int size, double length, double angle_deg) {
    check_kernel_size(size);
    if (length < 1.0) throw ArgumentError("make_psf_motion: length must be >= 1");
    const double theta = angle_deg * std::numbers::pi / 180.0;
    const double ux = std::cos(theta);
    const double uy = -std::sin(theta); // y axis points down
    const double half = 0.5 * (length - 1.0);
    const double c = (size - 1) / 2;
    if (half * std::max(std::abs(ux), std::abs(uy)) > c + 0.5) {
        throw ArgumentError("make_psf_motion: length exceeds kernel size");
    }

    // Dense samples along the segment, splat bilinearly for coverage.
    Eigen::ArrayXXd taps = Eigen::ArrayXXd::Zero(size, size);
    const int steps = std::max(2, static_cast<int>(std::ceil(length * 64)));
    for (int s = 0; s < steps; ++s) {
        const double t = steps == 1 ? 0.0 : -half + 2.0 * half * s / (steps - 1);
        const double x = c + t * ux;
        const double y = c + t * uy;
        const int j0 = static_cast<int>(std::floor(x));
        const int i0 = static_cast<int>(std::floor(y));
        const double fx = x - j0;
        const double fy = y - i0;
        auto splat = [&](int i, int j, double wgt) {
            if (i >= 0 && i < size && j >= 0 && j < size && wgt > 0.0) taps(i, j) += wgt;
        };
        splat(i0, j0, (1.0 - fx) * (1.0 - fy));
        splat(i0, j0 + 1, fx * (1.0 - fy));
        splat(i0 + 1, j0, (1.0 - fx) * fy);
        splat(i0 + 1, j0 + 1, fx * fy);
    }
    return Psf(taps);
}

Psf make_psf_disk(int size, double radius) {
    check_kernel_size(size);
    if (radius <= 0.0) throw ArgumentError("make_psf_disk: radius must be positive");
    const int c = (size - 1) / 2;
    const int sub = 32; // subsamples per cell side for the coverage estimate
    Eigen::ArrayXXd taps(size, size);
    for (int i = 0; i < size; ++i) {
        for (int j = 0; j < size; ++j) {
            int inside = 0;
            for (int a = 0; a < sub; ++a) {
                for (int b = 0; b < sub; ++b) {
                    const double dy = i - c + (a + 0.5) / sub - 0.5;
                    const double dx = j - c + (b + 0.5) / sub - 0.5;
                    if (dx * dx + dy * dy <= radius * radius) ++inside;
                }
            }
            taps(i, j) = static_cast<double>(inside) / (sub * sub);
        }
    }
    return Psf(taps);
}

Image gaussian_noise(Index rows, Index cols, double stddev, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    // Uniform draw in (0,1], safe under log.
    auto uniform = [&gen] { return (double(gen() >> 11) + 1.0) * 0x1.0p-53; };

    Image out(rows, cols);
    double spare = 0.0;
    bool has_spare = false;
    for (Index i = 0; i < rows; ++i) {
        for (Index j = 0; j < cols; ++j) {
            if (has_spare) {
                out(i, j) = stddev * spare;
                has_spare = false;
                continue;
            }
            const double u1 = uniform();
            const double u2 = uniform();
            const double r = std::sqrt(-2.0 * std::log(u1));
            out(i, j) = stddev * r * std::cos(2.0 * std::numbers::pi * u2);
            spare = r * std::sin(2.0 * std::numbers::pi * u2);
            has_spare = true;
        }
    }
    return out;
}

Image degrade(const Image& f, const Psf& psf, const NoiseSpec& noise) {
    require_valid(f, "degrade");
    if (noise.level_percent < 0.0) {
        throw ArgumentError("degrade: noise level must be non-negative");
    }
    Image g = convolve_periodic(f, psf);
    if (noise.level_percent > 0.0) {
        g += gaussian_noise(f.rows(), f.cols(), noise.stddev(), noise.seed);
    }
    return g;
}

ColorImage degrade(const ColorImage& f, const Psf& psf, const NoiseSpec& noise) {
    require_valid(f, "degrade");
    ColorImage g;
    for (size_t p = 0; p < f.planes.size(); ++p) {
        NoiseSpec plane_noise = noise;
        plane_noise.seed = noise.seed + p;
        g.planes.push_back(degrade(f.planes[p], psf, plane_noise));
    }
    return g;
}

} // namespace cnchtv
