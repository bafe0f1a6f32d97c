#pragma once

#include <utility>

#include "cnchtv/image.hpp"
#include "cnchtv/operators.hpp"

namespace cnchtv {

// Tunables of the adaptive structure weight and the reweighting scheme.
struct WeightConfig {
    double kappa = 1.0 / 255.0; // contrast constant on the eigenvalue spread
    double sigma = 1.0;         // Gaussian std (pixels) smoothing the Hessian
    int window = 5;             // odd side of the local-variance window
    double nu1 = 0.55;          // first-order exponent, in (0,1]
    double nu2 = 0.55;          // second-order exponent, in (0,1]
    double eps = 1e-3;          // floor inside |.|^(nu-1), keeps weights finite
    bool scalar_psi = false;    // literal global-1-norm reading of the weights

    void validate() const; // throws ArgumentError
};

// Circular convolution with a normalized truncated Gaussian of radius
// ceil(3*sigma); preserves the image mean.
Image gaussian_smooth(const Image& f, double sigma);

// Per-pixel eigenvalues of the Gaussian-smoothed Hessian, first >= second.
std::pair<Image, Image> hessian_eigenvalues(const Image& f, double sigma);

// Mean squared deviation from the center pixel over the window x window
// periodic neighborhood (deviation from f(x,y), not from the window mean).
Image local_variance(const Image& f, int window);

// Adaptive weight in [0,1): 1 - 1/(1 + kappa*(l1-l2)*rho_hat) with rho_hat
// the min-max normalized local variance (identically 0 when the variance
// is constant over the image).
Image zeta(const Image& f, const WeightConfig& cfg);

// Reweighting factors (psi1, psi2): (|Df| + eps)^(nu1-1) with the isotropic
// gradient magnitude, and (|D^2 f| + eps)^(nu2-1) with the Frobenius
// magnitude over the four Hessian planes. With scalar_psi the magnitudes
// are replaced by the global componentwise 1-norms, broadcast as constants.
std::pair<Image, Image> irls_weights(const Image& f, const WeightConfig& cfg);

} // namespace cnchtv
