#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <numbers>

#include "cnchtv/operators.hpp"
#include "support/oracles.hpp"
#include "support/synthetic.hpp"

using namespace cnchtv;
using namespace cnchtv::testsupport;

TEST_CASE("grad of a constant image vanishes exactly") {
    const Image c = Image::Constant(8, 8, 42.0);
    const VectorField g = grad(c);
    CHECK((g.dx == 0.0).all());
    CHECK((g.dy == 0.0).all());
    CHECK((grad_adjoint(g) == 0.0).all());
}

TEST_CASE("forward difference of a ramp is 1 with the periodic wrap at the end") {
    const Index n = 8;
    Image ramp(3, n);
    for (Index i = 0; i < 3; ++i) {
        for (Index j = 0; j < n; ++j) ramp(i, j) = double(j);
    }
    const VectorField g = grad(ramp);
    for (Index j = 0; j + 1 < n; ++j) CHECK(g.dx(1, j) == 1.0);
    CHECK(g.dx(1, n - 1) == 1.0 - double(n));
}

TEST_CASE("periodic differences telescope to zero") {
    const Image f = random_image(8, 8, 11);
    CHECK(std::abs(grad(f).dx.sum()) < 1e-9);
    CHECK(std::abs(grad(f).dy.sum()) < 1e-9);
}

TEST_CASE("grad/hessian adjoint identities hold to 1e-10 across grid sizes") {
    int seed = 100;
    for (const Index size : {4, 5, 8, 16, 33, 64}) {
        const Image f = random_image(size, size, seed++, -1.0, 1.0);
        const VectorField y{random_image(size, size, seed++, -1.0, 1.0),
                            random_image(size, size, seed++, -1.0, 1.0)};
        const double lhs = dot(grad(f), y);
        const double rhs = dot(f, grad_adjoint(y));
        CHECK(std::abs(lhs - rhs) / (norm(grad(f)) * norm(y) + 1e-30) < 1e-10);

        const TensorField t{random_image(size, size, seed++, -1.0, 1.0),
                            random_image(size, size, seed++, -1.0, 1.0),
                            random_image(size, size, seed++, -1.0, 1.0),
                            random_image(size, size, seed++, -1.0, 1.0)};
        const double lhs2 = dot(hessian(f), t);
        const double rhs2 = dot(f, hessian_adjoint(t));
        CHECK(std::abs(lhs2 - rhs2) / (norm(hessian(f)) * norm(t) + 1e-30) < 1e-10);
    }
}

TEST_CASE("hessian annihilates constants and interior of affine ramps") {
    const TensorField z = hessian(Image::Constant(6, 6, 3.0));
    CHECK((z.dxx == 0.0).all());
    CHECK((z.dyy == 0.0).all());
    CHECK((z.dxy == 0.0).all());

    Image affine(10, 10);
    for (Index i = 0; i < 10; ++i) {
        for (Index j = 0; j < 10; ++j) affine(i, j) = 2.0 * i + 3.0 * j + 1.0;
    }
    const TensorField h = hessian(affine);
    // wrap rows/columns touch the discontinuity; interior must be exactly 0
    for (Index i = 1; i < 8; ++i) {
        for (Index j = 1; j < 8; ++j) {
            CHECK(h.dxx(i, j) == 0.0);
            CHECK(h.dyy(i, j) == 0.0);
            CHECK(h.dxy(i, j) == 0.0);
        }
    }
}

TEST_CASE("mixed partial planes coincide exactly for any input") {
    const Image f = random_image(12, 9, 5);
    const TensorField h = hessian(f);
    CHECK((h.dxy == h.dyx).all());
}

TEST_CASE("operators are linear to machine precision") {
    const Image f = random_image(8, 8, 21, -1.0, 1.0);
    const Image g = random_image(8, 8, 22, -1.0, 1.0);
    const double a = 2.75, b = -0.5;
    const VectorField lhs = grad(a * f + b * g);
    const VectorField rhs{a * grad(f).dx + b * grad(g).dx, a * grad(f).dy + b * grad(g).dy};
    CHECK(norm(Image(lhs.dx - rhs.dx)) + norm(Image(lhs.dy - rhs.dy)) < 1e-12);

    const Psf psf = Psf::delta(3);
    Eigen::ArrayXXd taps(3, 3);
    taps << 1, 2, 1, 2, 4, 2, 1, 2, 1;
    const Psf blur{taps};
    const Image cl = convolve_periodic(a * f + b * g, blur);
    const Image cr = a * convolve_periodic(f, blur) + b * convolve_periodic(g, blur);
    CHECK(norm(Image(cl - cr)) / norm(cr) < 1e-12);
}

TEST_CASE("Psf validates and normalizes") {
    Eigen::ArrayXXd taps = Eigen::ArrayXXd::Constant(5, 5, 2.0);
    const Psf psf{taps};
    CHECK(std::abs(psf.taps().sum() - 1.0) < 1e-12);

    CHECK_THROWS_AS(Psf{Eigen::ArrayXXd::Constant(4, 4, 1.0)}, ArgumentError); // even
    CHECK_THROWS_AS(Psf{Eigen::ArrayXXd::Constant(3, 5, 1.0)}, ArgumentError); // non-square
    CHECK_THROWS_AS(Psf{Eigen::ArrayXXd::Zero(3, 3)}, ArgumentError);          // zero mass
    Eigen::ArrayXXd neg = Eigen::ArrayXXd::Constant(3, 3, 1.0);
    neg(0, 0) = -0.1;
    CHECK_THROWS_AS(Psf{neg}, ArgumentError);
}

TEST_CASE("psf text format round-trips and reports the raw sum") {
    namespace fs = std::filesystem;
    const std::string path =
        (fs::temp_directory_path() / "cnchtv-psf-roundtrip.txt").string();
    Eigen::ArrayXXd taps(3, 3);
    taps << 0, 1, 0, 1, 4, 1, 0, 1, 0;
    const Psf psf{taps};
    save_psf(psf, path);

    double raw_sum = 0.0;
    const Psf back = load_psf(path, &raw_sum);
    CHECK(raw_sum == doctest::Approx(1.0).epsilon(1e-12)); // saved normalized
    CHECK(norm(Image(back.taps() - psf.taps())) < 1e-15);
    fs::remove(path);

    CHECK_THROWS_AS(load_psf("/nonexistent/psf.txt"), IoError);
}

TEST_CASE("delta kernel gives a flat unit spectrum and identity convolution") {
    const Psf delta = Psf::delta(5);
    const Spectrum s = psf_to_spectrum(delta, 8, 8);
    CHECK(((s - 1.0).abs() < 1e-12).all());

    const Image f = random_image(8, 8, 31);
    CHECK(norm(Image(convolve_periodic(f, delta) - f)) / norm(f) < 1e-12);
}

TEST_CASE("normalized kernels have unit zero-frequency gain and preserve means") {
    const Psf psf{Eigen::ArrayXXd::Constant(5, 5, 0.3)};
    const Spectrum s = psf_to_spectrum(psf, 16, 16);
    CHECK(std::abs(s(0, 0) - 1.0) < 1e-12);

    const Image f = random_image(16, 16, 32);
    CHECK(convolve_periodic(f, psf).mean() == doctest::Approx(f.mean()).epsilon(1e-12));

    const Image c = Image::Constant(8, 8, 9.5);
    CHECK(norm(Image(convolve_periodic(c, psf) - 9.5)) < 1e-10);
}

TEST_CASE("spectral convolution matches the direct spatial oracle") {
    int seed = 300;
    for (const Index size : {8, 16, 24}) {
        const Image f = random_image(size, size, seed++);
        Eigen::ArrayXXd taps = random_image(5, 5, seed++, 0.0, 1.0);
        const Psf psf{taps};
        const Image fast = convolve_periodic(f, psf);
        const Image slow = convolve_direct(f, psf);
        CHECK(norm(Image(fast - slow)) / norm(slow) < 1e-10);

        const Image fast_adj = convolve_periodic_adjoint(f, psf);
        const Image slow_adj = correlate_direct(f, psf);
        CHECK(norm(Image(fast_adj - slow_adj)) / norm(slow_adj) < 1e-10);
    }
}

TEST_CASE("convolution adjoint identity") {
    const Image f = random_image(16, 16, 41, -1.0, 1.0);
    const Image y = random_image(16, 16, 42, -1.0, 1.0);
    Eigen::ArrayXXd taps = random_image(7, 7, 43, 0.0, 1.0);
    const Psf psf{taps};
    const double lhs = dot(convolve_periodic(f, psf), y);
    const double rhs = dot(f, convolve_periodic_adjoint(y, psf));
    CHECK(std::abs(lhs - rhs) / (norm(convolve_periodic(f, psf)) * norm(y)) < 1e-10);
}

TEST_CASE("kernel larger than the grid is rejected") {
    const Psf big = Psf::delta(9);
    CHECK_THROWS_AS(psf_to_spectrum(big, 8, 8), ArgumentError);
    CHECK_THROWS_AS(convolve_periodic(Image::Zero(8, 8), big), ArgumentError);
}

TEST_CASE("difference stencils kill constants and obey the closed-form magnitude") {
    // the [-1, 1] stencil of the x difference
    Eigen::ArrayXXd taps(1, 2);
    taps << -1.0, 1.0;
    const Stencil stencil{taps, 0, 0};
    const Index n = 16;
    const Spectrum s = operator_spectrum(stencil, 8, n);
    CHECK(std::abs(s(0, 0)) < 1e-14);

    for (Index k = 0; k < n; ++k) {
        const double expect = 4.0 * std::pow(std::sin(std::numbers::pi * k / double(n)), 2);
        CHECK(std::abs(std::abs(s(0, k)) * std::abs(s(0, k)) - expect) < 1e-12);
    }
}

TEST_CASE("adjoint stencil pairs have conjugate spectra") {
    // forward x-difference and its adjoint (negated backward difference)
    Eigen::ArrayXXd fwd_taps(1, 2), adj_taps(1, 2);
    fwd_taps << 1.0, -1.0; // center at index 1
    adj_taps << -1.0, 1.0; // center at index 0
    const Spectrum fwd = operator_spectrum({fwd_taps, 0, 1}, 8, 12);
    const Spectrum adj = operator_spectrum({adj_taps, 0, 0}, 8, 12);
    CHECK(((fwd - adj.conjugate()).abs() < 1e-12).all());
}

TEST_CASE("named stencils realize the spatial operators through the DFT") {
    const Image f = random_image(12, 16, 55);
    const Spectrum fhat = fft2(f);
    auto apply = [&](const Stencil& st) {
        return ifft2_real(operator_spectrum(st, f.rows(), f.cols()) * fhat);
    };
    CHECK(norm(Image(apply(forward_diff_x_stencil()) - grad(f).dx)) / norm(grad(f).dx) < 1e-10);
    CHECK(norm(Image(apply(forward_diff_y_stencil()) - grad(f).dy)) / norm(grad(f).dy) < 1e-10);
    const TensorField h = hessian(f);
    CHECK(norm(Image(apply(second_diff_xx_stencil()) - h.dxx)) / norm(h.dxx) < 1e-10);
    CHECK(norm(Image(apply(second_diff_yy_stencil()) - h.dyy)) / norm(h.dyy) < 1e-10);
    CHECK(norm(Image(apply(mixed_diff_stencil()) - h.dxy)) / norm(h.dxy) < 1e-10);
}

TEST_CASE("gram spectra are the closed-form difference magnitudes") {
    const Index m = 10, n = 14;
    const Image gg = grad_gram_spectrum(m, n);
    for (Index i = 0; i < m; ++i) {
        for (Index j = 0; j < n; ++j) {
            const double sx = 4.0 * std::pow(std::sin(std::numbers::pi * j / double(n)), 2);
            const double sy = 4.0 * std::pow(std::sin(std::numbers::pi * i / double(m)), 2);
            CHECK(gg(i, j) == doctest::Approx(sx + sy).epsilon(1e-12));
        }
    }
    // (D^2)^T D^2 eigenvalues collapse to (sx + sy)^2 for these stencils
    const Image hg = hessian_gram_spectrum(m, n);
    for (Index i = 0; i < m; ++i) {
        for (Index j = 0; j < n; ++j) {
            const double sx = 4.0 * std::pow(std::sin(std::numbers::pi * j / double(n)), 2);
            const double sy = 4.0 * std::pow(std::sin(std::numbers::pi * i / double(m)), 2);
            CHECK(hg(i, j) == doctest::Approx((sx + sy) * (sx + sy)).epsilon(1e-10));
        }
    }
}

TEST_CASE("fft2/ifft2 invert each other under the stated normalization") {
    const Image f = random_image(9, 13, 71);
    const Image back = ifft2_real(fft2(f));
    CHECK(norm(Image(back - f)) / norm(f) < 1e-12);
    // forward is unnormalized: zero frequency carries the plain sum
    CHECK(std::abs(fft2(f)(0, 0).real() - f.sum()) < 1e-9);
}

TEST_CASE("shifted wraps in both directions") {
    Image f(3, 4);
    f << 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12;
    const Image s = shifted(f, 1, -1);
    CHECK(s(0, 0) == f(1, 3));
    CHECK(s(2, 3) == f(0, 2));
    CHECK((shifted(shifted(f, 1, 2), -1, -2) == f).all());
    CHECK((shifted(f, 3, 4) == f).all()); // full wrap
}
