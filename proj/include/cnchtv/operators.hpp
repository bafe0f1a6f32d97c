#pragma once

#include <complex>
#include <string>

#include "cnchtv/image.hpp"

namespace cnchtv {

// Complex transfer function / frequency-domain image. Same layout as Image.
using Spectrum = Eigen::ArrayXXcd;

// Per-pixel 2-vector field (first differences, v, omega).
struct VectorField {
    Image dx, dy;

    Index rows() const { return dx.rows(); }
    Index cols() const { return dx.cols(); }

    static VectorField Zero(Index rows, Index cols) {
        return {Image::Zero(rows, cols), Image::Zero(rows, cols)};
    }
};

// Per-pixel 4-vector field (second differences, w, lambda). dxy and dyx
// coincide for the discretization below but both planes are carried.
struct TensorField {
    Image dxx, dxy, dyx, dyy;

    Index rows() const { return dxx.rows(); }
    Index cols() const { return dxx.cols(); }

    static TensorField Zero(Index rows, Index cols) {
        return {Image::Zero(rows, cols), Image::Zero(rows, cols),
                Image::Zero(rows, cols), Image::Zero(rows, cols)};
    }
};

// out(i,j) = img((i+di) mod m, (j+dj) mod n); any integer offsets.
Image shifted(const Image& img, Index di, Index dj);

// Forward differences with periodic wrap:
//   dx(i,j) = f(i, j+1) - f(i,j),  dy(i,j) = f(i+1, j) - f(i,j).
VectorField grad(const Image& f);

// Exact adjoint of grad under the Euclidean inner product (negative
// periodic divergence built from backward differences).
Image grad_adjoint(const VectorField& v);

// Second-order periodic differences. dxx/dyy are backward-of-forward
// composites (3-point stencils), the mixed planes are forward-of-forward.
TensorField hessian(const Image& f);

// Exact adjoint of hessian.
Image hessian_adjoint(const TensorField& w);

// Small normalized blur kernel with odd side and unit mass. Construction
// normalizes; negative taps, even side or zero mass are argument errors.
class Psf {
public:
    explicit Psf(Eigen::ArrayXXd taps);

    static Psf delta(Index size);

    Index size() const { return taps_.rows(); }
    const Eigen::ArrayXXd& taps() const { return taps_; }

private:
    Eigen::ArrayXXd taps_;
};

// Text format: first line the side length, then size rows of size reals.
// The loader renormalizes to unit mass; pre_normalization_sum (when
// non-null) receives the raw tap sum for diagnostics.
Psf load_psf(const std::string& path, double* pre_normalization_sum = nullptr);
void save_psf(const Psf& psf, const std::string& path);

// Unnormalized forward 2D DFT; the inverse is scaled by 1/(rows*cols).
Spectrum fft2(const Spectrum& in);
Spectrum fft2(const Image& in);
Spectrum ifft2(const Spectrum& in);
Image ifft2_real(const Spectrum& in);

// Transfer function of the blur: kernel embedded with its center tap at
// index (0,0) (circular shift), zero-padded, forward DFT. Satisfies
// convolve_periodic(f, psf) = ifft2(spectrum * fft2(f)).
Spectrum psf_to_spectrum(const Psf& psf, Index rows, Index cols);

// Circular convolution with the kernel; linear, mean-preserving.
Image convolve_periodic(const Image& f, const Psf& psf);

// Adjoint of convolve_periodic (correlation; conjugate transfer function).
Image convolve_periodic_adjoint(const Image& f, const Psf& psf);

// Arbitrary small stencil with a designated center tap, for building
// operator transfer functions the same way psf_to_spectrum does. No
// normalization or sign requirements.
struct Stencil {
    Eigen::ArrayXXd taps;
    Index center_row = 0;
    Index center_col = 0;
};

Spectrum operator_spectrum(const Stencil& stencil, Index rows, Index cols);

// Stencils realizing exactly the grad/hessian component operators above
// (multiplying fft2(f) by their spectrum reproduces the spatial result).
Stencil forward_diff_x_stencil();
Stencil forward_diff_y_stencil();
Stencil second_diff_xx_stencil();
Stencil second_diff_yy_stencil();
Stencil mixed_diff_stencil();

// Eigenvalues of D^T D, i.e. |Dx|^2 + |Dy|^2 on the DFT grid (real).
Image grad_gram_spectrum(Index rows, Index cols);

// Eigenvalues of (D^2)^T D^2: |Dxx|^2 + |Dxy|^2 + |Dyx|^2 + |Dyy|^2.
Image hessian_gram_spectrum(Index rows, Index cols);

} // namespace cnchtv
