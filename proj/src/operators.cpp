#include "cnchtv/operators.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <fstream>
#include <sstream>

namespace cnchtv {

Image shifted(const Image& img, Index di, Index dj) {
    const Index m = img.rows();
    const Index n = img.cols();
    const Index si = ((di % m) + m) % m;
    const Index sj = ((dj % n) + n) % n;
    if (si == 0 && sj == 0) return img;

    // out(i,j) = img(i+si, j+sj) assembled from four wrapped blocks.
    Image out(m, n);
    const Index mt = m - si; // rows taken without wrapping
    const Index nt = n - sj;
    out.block(0, 0, mt, nt) = img.block(si, sj, mt, nt);
    if (si > 0) out.block(mt, 0, si, nt) = img.block(0, sj, si, nt);
    if (sj > 0) out.block(0, nt, mt, sj) = img.block(si, 0, mt, sj);
    if (si > 0 && sj > 0) out.block(mt, nt, si, sj) = img.block(0, 0, si, sj);
    return out;
}

VectorField grad(const Image& f) {
    return {shifted(f, 0, 1) - f, shifted(f, 1, 0) - f};
}

Image grad_adjoint(const VectorField& v) {
    // Adjoint of the forward difference is the negated backward difference.
    return (shifted(v.dx, 0, -1) - v.dx) + (shifted(v.dy, -1, 0) - v.dy);
}

TensorField hessian(const Image& f) {
    TensorField w;
    w.dxx = shifted(f, 0, 1) - 2.0 * f + shifted(f, 0, -1);
    w.dyy = shifted(f, 1, 0) - 2.0 * f + shifted(f, -1, 0);
    w.dxy = shifted(f, 1, 1) - shifted(f, 1, 0) - shifted(f, 0, 1) + f;
    w.dyx = w.dxy; // shift composites commute
    return w;
}

Image hessian_adjoint(const TensorField& w) {
    // dxx/dyy stencils are self-adjoint; the mixed composite adjoint is
    // the backward-of-backward composite.
    Image out = shifted(w.dxx, 0, 1) - 2.0 * w.dxx + shifted(w.dxx, 0, -1);
    out += shifted(w.dyy, 1, 0) - 2.0 * w.dyy + shifted(w.dyy, -1, 0);
    const Image mixed = w.dxy + w.dyx;
    out += shifted(mixed, -1, -1) - shifted(mixed, -1, 0) - shifted(mixed, 0, -1) + mixed;
    return out;
}

Psf::Psf(Eigen::ArrayXXd taps) : taps_(std::move(taps)) {
    if (taps_.rows() != taps_.cols()) {
        throw ArgumentError("Psf: kernel must be square, got " + std::to_string(taps_.rows()) +
                            "x" + std::to_string(taps_.cols()));
    }
    if (taps_.rows() < 1 || taps_.rows() % 2 == 0) {
        throw ArgumentError("Psf: kernel side must be odd and positive, got " +
                            std::to_string(taps_.rows()));
    }
    if (!taps_.allFinite() || (taps_ < 0.0).any()) {
        throw ArgumentError("Psf: taps must be finite and non-negative");
    }
    const double mass = taps_.sum();
    if (mass <= 0.0) {
        throw ArgumentError("Psf: kernel mass must be positive");
    }
    taps_ /= mass;
}

Psf Psf::delta(Index size) {
    Eigen::ArrayXXd taps = Eigen::ArrayXXd::Zero(size, size);
    taps((size - 1) / 2, (size - 1) / 2) = 1.0;
    return Psf(taps);
}

Psf load_psf(const std::string& path, double* pre_normalization_sum) {
    std::ifstream in(path);
    if (!in) {
        throw IoError(path + ": cannot open for reading");
    }
    long size = 0;
    if (!(in >> size) || size <= 0 || size % 2 == 0) {
        throw FormatError(path + ": first line must be an odd positive kernel side");
    }
    Eigen::ArrayXXd taps(size, size);
    for (long i = 0; i < size; ++i) {
        for (long j = 0; j < size; ++j) {
            if (!(in >> taps(i, j))) {
                throw FormatError(path + ": truncated kernel, expected " +
                                  std::to_string(size * size) + " taps");
            }
        }
    }
    if (pre_normalization_sum) *pre_normalization_sum = taps.sum();
    return Psf(taps);
}

void save_psf(const Psf& psf, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw IoError(path + ": cannot open for writing");
    }
    out << psf.size() << "\n";
    out.precision(17);
    for (Index i = 0; i < psf.size(); ++i) {
        for (Index j = 0; j < psf.size(); ++j) {
            out << psf.taps()(i, j) << (j + 1 < psf.size() ? ' ' : '\n');
        }
    }
    if (!out) {
        throw IoError(path + ": write failed");
    }
}

Spectrum fft2(const Spectrum& in) {
    const Index m = in.rows();
    const Index n = in.cols();
    Eigen::FFT<double> fft;
    Spectrum out(m, n);
    Eigen::VectorXcd src(m), dst(m);
    for (Index j = 0; j < n; ++j) {
        src = in.col(j).matrix();
        fft.fwd(dst, src);
        out.col(j) = dst.array();
    }
    Eigen::VectorXcd rsrc(n), rdst(n);
    for (Index i = 0; i < m; ++i) {
        rsrc = out.row(i).matrix().transpose();
        fft.fwd(rdst, rsrc);
        out.row(i) = rdst.array().transpose();
    }
    return out;
}

Spectrum fft2(const Image& in) {
    return fft2(Spectrum(in.cast<std::complex<double>>()));
}

Spectrum ifft2(const Spectrum& in) {
    const Index m = in.rows();
    const Index n = in.cols();
    Eigen::FFT<double> fft;
    Spectrum out(m, n);
    Eigen::VectorXcd src(m), dst(m);
    for (Index j = 0; j < n; ++j) {
        src = in.col(j).matrix();
        fft.inv(dst, src); // scaled by 1/m
        out.col(j) = dst.array();
    }
    Eigen::VectorXcd rsrc(n), rdst(n);
    for (Index i = 0; i < m; ++i) {
        rsrc = out.row(i).matrix().transpose();
        fft.inv(rdst, rsrc); // scaled by 1/n
        out.row(i) = rdst.array().transpose();
    }
    return out;
}

Image ifft2_real(const Spectrum& in) {
    return ifft2(in).real();
}

namespace {

// Embeds taps with the center at grid index (0,0), wrapping negative
// offsets; shared by the PSF and stencil transfer functions.
Spectrum embedded_spectrum(const Eigen::ArrayXXd& taps, Index center_row, Index center_col,
                           Index rows, Index cols) {
    Image grid = Image::Zero(rows, cols);
    for (Index a = 0; a < taps.rows(); ++a) {
        for (Index b = 0; b < taps.cols(); ++b) {
            const Index i = (((a - center_row) % rows) + rows) % rows;
            const Index j = (((b - center_col) % cols) + cols) % cols;
            grid(i, j) += taps(a, b);
        }
    }
    return fft2(grid);
}

} // namespace

Spectrum psf_to_spectrum(const Psf& psf, Index rows, Index cols) {
    if (psf.size() > rows || psf.size() > cols) {
        throw ArgumentError("psf_to_spectrum: kernel side " + std::to_string(psf.size()) +
                            " exceeds grid " + std::to_string(cols) + "x" + std::to_string(rows));
    }
    const Index c = (psf.size() - 1) / 2;
    return embedded_spectrum(psf.taps(), c, c, rows, cols);
}

Image convolve_periodic(const Image& f, const Psf& psf) {
    return ifft2_real(psf_to_spectrum(psf, f.rows(), f.cols()) * fft2(f));
}

Image convolve_periodic_adjoint(const Image& f, const Psf& psf) {
    return ifft2_real(psf_to_spectrum(psf, f.rows(), f.cols()).conjugate() * fft2(f));
}

Spectrum operator_spectrum(const Stencil& stencil, Index rows, Index cols) {
    if (stencil.taps.rows() > rows || stencil.taps.cols() > cols) {
        throw ArgumentError("operator_spectrum: stencil exceeds grid");
    }
    return embedded_spectrum(stencil.taps, stencil.center_row, stencil.center_col, rows, cols);
}

// The embedding convention realizes A f = ifft2(spectrum * fft2(f)) with
// taps acting at negative offsets, so the forward difference f(j+1)-f(j)
// carries its +1 tap one cell before the center.
Stencil forward_diff_x_stencil() {
    Eigen::ArrayXXd taps(1, 2);
    taps << 1.0, -1.0;
    return {taps, 0, 1};
}

Stencil forward_diff_y_stencil() {
    Eigen::ArrayXXd taps(2, 1);
    taps << 1.0, -1.0;
    return {taps, 1, 0};
}

Stencil second_diff_xx_stencil() {
    Eigen::ArrayXXd taps(1, 3);
    taps << 1.0, -2.0, 1.0;
    return {taps, 0, 1};
}

Stencil second_diff_yy_stencil() {
    Eigen::ArrayXXd taps(3, 1);
    taps << 1.0, -2.0, 1.0;
    return {taps, 1, 0};
}

Stencil mixed_diff_stencil() {
    Eigen::ArrayXXd taps(2, 2);
    taps << 1.0, -1.0,
            -1.0, 1.0;
    return {taps, 1, 1};
}

Image grad_gram_spectrum(Index rows, Index cols) {
    return operator_spectrum(forward_diff_x_stencil(), rows, cols).abs2() +
           operator_spectrum(forward_diff_y_stencil(), rows, cols).abs2();
}

Image hessian_gram_spectrum(Index rows, Index cols) {
    // dxy and dyx planes coincide, hence the factor 2 on the mixed term.
    return operator_spectrum(second_diff_xx_stencil(), rows, cols).abs2() +
           operator_spectrum(second_diff_yy_stencil(), rows, cols).abs2() +
           2.0 * operator_spectrum(mixed_diff_stencil(), rows, cols).abs2();
}

} // namespace cnchtv
