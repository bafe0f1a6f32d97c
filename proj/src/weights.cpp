#include "cnchtv/weights.hpp"

#include <cmath>

namespace cnchtv {

void WeightConfig::validate() const {
    if (kappa <= 0.0) throw ArgumentError("WeightConfig: kappa must be positive");
    if (sigma <= 0.0) throw ArgumentError("WeightConfig: sigma must be positive");
    if (window < 3 || window % 2 == 0) {
        throw ArgumentError("WeightConfig: window must be odd and >= 3, got " +
                            std::to_string(window));
    }
    if (nu1 <= 0.0 || nu1 > 1.0 || nu2 <= 0.0 || nu2 > 1.0) {
        throw ArgumentError("WeightConfig: exponents must lie in (0,1]");
    }
    if (eps <= 0.0) throw ArgumentError("WeightConfig: eps must be positive");
}

namespace {

Eigen::ArrayXd gaussian_taps(double sigma) {
    const Index radius = static_cast<Index>(std::ceil(3.0 * sigma));
    Eigen::ArrayXd taps(2 * radius + 1);
    for (Index t = -radius; t <= radius; ++t) {
        taps(t + radius) = std::exp(-0.5 * double(t * t) / (sigma * sigma));
    }
    taps /= taps.sum();
    return taps;
}

// Separable periodic convolution with a symmetric odd-length 1D kernel.
Image separable_periodic(const Image& f, const Eigen::ArrayXd& taps) {
    const Index radius = (taps.size() - 1) / 2;
    Image rows_done = Image::Zero(f.rows(), f.cols());
    for (Index t = -radius; t <= radius; ++t) {
        rows_done += taps(t + radius) * shifted(f, 0, t);
    }
    Image out = Image::Zero(f.rows(), f.cols());
    for (Index t = -radius; t <= radius; ++t) {
        out += taps(t + radius) * shifted(rows_done, t, 0);
    }
    return out;
}

Image periodic_box_mean(const Image& f, int window) {
    const Index radius = (window - 1) / 2;
    Image rows_done = Image::Zero(f.rows(), f.cols());
    for (Index t = -radius; t <= radius; ++t) {
        rows_done += shifted(f, 0, t);
    }
    Image out = Image::Zero(f.rows(), f.cols());
    for (Index t = -radius; t <= radius; ++t) {
        out += shifted(rows_done, t, 0);
    }
    return out / double(window * window);
}

} // namespace

Image gaussian_smooth(const Image& f, double sigma) {
    if (sigma <= 0.0) throw ArgumentError("gaussian_smooth: sigma must be positive");
    return separable_periodic(f, gaussian_taps(sigma));
}

std::pair<Image, Image> hessian_eigenvalues(const Image& f, double sigma) {
    const TensorField h = hessian(gaussian_smooth(f, sigma));
    const Image a = h.dxx;
    const Image d = h.dyy;
    const Image b = 0.5 * (h.dxy + h.dyx);
    const Image mean = 0.5 * (a + d);
    const Image r = ((0.5 * (a - d)).square() + b.square()).sqrt();
    return {mean + r, mean - r};
}

Image local_variance(const Image& f, int window) {
    if (window < 3 || window % 2 == 0) {
        throw ArgumentError("local_variance: window must be odd and >= 3");
    }
    if (window > f.rows() || window > f.cols()) {
        throw ArgumentError("local_variance: window exceeds image");
    }
    // mean over the window of (f_nb - f_c)^2, expanded around the center.
    const Image box_f = periodic_box_mean(f, window);
    const Image box_f2 = periodic_box_mean(f.square(), window);
    return (box_f2 - 2.0 * f * box_f + f.square()).max(0.0);
}

Image zeta(const Image& f, const WeightConfig& cfg) {
    cfg.validate();
    const auto [l1, l2] = hessian_eigenvalues(f, cfg.sigma);
    const Image rho = local_variance(f, cfg.window);
    const double lo = rho.minCoeff();
    const double hi = rho.maxCoeff();
    Image rho_hat = hi > lo ? Image((rho - lo) / (hi - lo)) : Image(Image::Zero(f.rows(), f.cols()));
    return 1.0 - (1.0 + cfg.kappa * (l1 - l2) * rho_hat).inverse();
}

std::pair<Image, Image> irls_weights(const Image& f, const WeightConfig& cfg) {
    cfg.validate();
    const VectorField g = grad(f);
    const TensorField h = hessian(f);
    const Image mag1 = (g.dx.square() + g.dy.square()).sqrt();
    const Image mag2 =
        (h.dxx.square() + h.dxy.square() + h.dyx.square() + h.dyy.square()).sqrt();
    if (cfg.scalar_psi) {
        const double n1 = g.dx.abs().sum() + g.dy.abs().sum();
        const double n2 =
            h.dxx.abs().sum() + h.dxy.abs().sum() + h.dyx.abs().sum() + h.dyy.abs().sum();
        return {Image::Constant(f.rows(), f.cols(), std::pow(n1 + cfg.eps, cfg.nu1 - 1.0)),
                Image::Constant(f.rows(), f.cols(), std::pow(n2 + cfg.eps, cfg.nu2 - 1.0))};
    }
    return {(mag1 + cfg.eps).pow(cfg.nu1 - 1.0), (mag2 + cfg.eps).pow(cfg.nu2 - 1.0)};
}

} // namespace cnchtv
