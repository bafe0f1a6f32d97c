#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "cnchtv/weights.hpp"
#include "support/oracles.hpp"
#include "support/synthetic.hpp"

using namespace cnchtv;
using namespace cnchtv::testsupport;

TEST_CASE("gaussian smoothing keeps constants and the image mean") {
    const Image c = Image::Constant(8, 8, 33.0);
    CHECK(norm(Image(gaussian_smooth(c, 1.5) - c)) < 1e-10);

    const Image f = random_image(16, 16, 3);
    CHECK(gaussian_smooth(f, 2.0).mean() == doctest::Approx(f.mean()).epsilon(1e-12));

    CHECK_THROWS_AS(gaussian_smooth(f, 0.0), ArgumentError);
}

TEST_CASE("smoothing does not increase total variation") {
    const Image f = random_image(16, 16, 4);
    auto tv = [](const Image& img) {
        const VectorField g = grad(img);
        return (g.dx.square() + g.dy.square()).sqrt().sum();
    };
    CHECK(tv(gaussian_smooth(f, 1.0)) <= tv(f) + 1e-9);
    CHECK(tv(gaussian_smooth(f, 3.0)) <= tv(gaussian_smooth(f, 1.0)) + 1e-9);
}

TEST_CASE("tiny sigma leaves the image nearly unchanged") {
    const Image f = random_image(12, 12, 5);
    CHECK((gaussian_smooth(f, 0.1) - f).abs().maxCoeff() < 1e-6);
}

TEST_CASE("hessian eigenvalues: order, trace and determinant identities") {
    const Image f = random_image(8, 8, 6);
    const double sigma = 1.0;
    const auto [l1, l2] = hessian_eigenvalues(f, sigma);
    CHECK((l1 >= l2).all());

    const TensorField h = hessian(gaussian_smooth(f, sigma));
    const Image a = h.dxx, d = h.dyy, b = 0.5 * (h.dxy + h.dyx);
    CHECK(((l1 + l2) - (a + d)).abs().maxCoeff() < 1e-10);
    CHECK(((l1 * l2) - (a * d - b * b)).abs().maxCoeff() < 1e-10);

    // constant image: all zero
    const auto [c1, c2] = hessian_eigenvalues(Image::Constant(8, 8, 7.0), 1.0);
    CHECK((c1.abs() < 1e-12).all());
    CHECK((c2.abs() < 1e-12).all());
}

TEST_CASE("hessian eigenvalues match the characteristic-polynomial oracle") {
    const Image f = random_image(8, 8, 7);
    const double sigma = 1.3;
    const auto [l1, l2] = hessian_eigenvalues(f, sigma);
    const TensorField h = hessian(gaussian_smooth(f, sigma));
    for (Index i = 0; i < 8; ++i) {
        for (Index j = 0; j < 8; ++j) {
            // roots of x^2 - tr x + det for the symmetrized 2x2 block
            const double a = h.dxx(i, j), d = h.dyy(i, j);
            const double b = 0.5 * (h.dxy(i, j) + h.dyx(i, j));
            const double tr = a + d, det = a * d - b * b;
            const double disc = std::sqrt(std::max(0.0, tr * tr - 4.0 * det));
            CHECK(l1(i, j) == doctest::Approx(0.5 * (tr + disc)).epsilon(1e-10));
            CHECK(l2(i, j) == doctest::Approx(0.5 * (tr - disc)).epsilon(1e-10));
        }
    }
}

TEST_CASE("local variance: constant image, hand case and brute-force oracle") {
    CHECK((local_variance(Image::Constant(8, 8, 5.0), 5) == 0.0).all());

    // 5x5 image, single center spike of 25, window 5: (24 * 25^2) / 25 = 600
    Image spike = Image::Zero(5, 5);
    spike(2, 2) = 25.0;
    CHECK(local_variance(spike, 5)(2, 2) == doctest::Approx(600.0).epsilon(1e-12));

    const Image f = random_image(16, 16, 8);
    for (const int window : {3, 5, 7}) {
        const Image fast = local_variance(f, window);
        const Image slow = local_variance_direct(f, window);
        CHECK((fast - slow).abs().maxCoeff() < 1e-10);
        CHECK((fast >= 0.0).all());
    }

    CHECK_THROWS_AS(local_variance(f, 4), ArgumentError);
    CHECK_THROWS_AS(local_variance(f, 1), ArgumentError);
    CHECK_THROWS_AS(local_variance(Image::Zero(4, 4), 5), ArgumentError);
}

TEST_CASE("zeta lies in [0,1), vanishes on constants and at the variance minimum") {
    WeightConfig cfg;
    const Image c = Image::Constant(12, 12, 50.0);
    CHECK((zeta(c, cfg) == 0.0).all());

    const Image f = random_image(16, 16, 9);
    const Image z = zeta(f, cfg);
    CHECK((z >= 0.0).all());
    CHECK((z < 1.0).all());

    // at the argmin of the local variance the normalized variance is 0
    const Image rho = local_variance(f, cfg.window);
    Index bi = 0, bj = 0;
    rho.minCoeff(&bi, &bj);
    CHECK(z(bi, bj) == 0.0);
}

TEST_CASE("zeta is invariant under adding a constant") {
    // shift-invariant in exact arithmetic; the +100 rounds differently
    // through the smoothing/variance sums, so pin a tight tolerance instead
    WeightConfig cfg;
    const Image f = random_image(12, 12, 10);
    const Image z1 = zeta(f, cfg);
    const Image z2 = zeta(Image(f + 100.0), cfg);
    CHECK((z1 - z2).abs().maxCoeff() < 1e-9);
}

TEST_CASE("zeta marks a step edge against flat regions") {
    WeightConfig cfg;
    cfg.kappa = 0.05;
    cfg.sigma = 2.0;
    const Index n = 64;
    const Image step = step_edge(n, n);
    const Image z = zeta(step, cfg);

    double edge_sum = 0.0, flat_sum = 0.0;
    int edge_cnt = 0, flat_cnt = 0;
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < n; ++j) {
            // edges sit between columns 31|32 and at the periodic seam 63|0
            const double d_mid = std::min(std::abs(j - 31.5), std::abs(j - 32.5));
            const double d_seam = std::min(std::abs(j + 0.5), std::abs(j - 63.5));
            if (std::min(d_mid, d_seam) <= 2.0) {
                edge_sum += z(i, j);
                ++edge_cnt;
            } else if (std::min(d_mid, d_seam) > 9.0) {
                flat_sum += z(i, j);
                ++flat_cnt;
            }
        }
    }
    const double edge_mean = edge_sum / edge_cnt;
    const double flat_mean = flat_sum / flat_cnt;
    CHECK(edge_mean > 0.0);
    CHECK(edge_mean > 5.0 * flat_mean);
}

TEST_CASE("irls weights: exponent 1 gives unit weights for any image") {
    WeightConfig cfg;
    cfg.nu1 = cfg.nu2 = 1.0;
    const Image f = random_image(10, 10, 11);
    const auto [p1, p2] = irls_weights(f, cfg);
    CHECK((p1 == 1.0).all());
    CHECK((p2 == 1.0).all());
}

TEST_CASE("irls weights on a flat image equal the eps power") {
    WeightConfig cfg; // nu = 0.55, eps = 1e-3
    const auto [p1, p2] = irls_weights(Image::Constant(8, 8, 100.0), cfg);
    const double expect = std::pow(1e-3, 0.55 - 1.0); // about 22.39
    CHECK(p1(4, 4) == doctest::Approx(expect).epsilon(1e-12));
    CHECK(p2(4, 4) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("irls weights decrease where the gradient is larger, stay positive") {
    WeightConfig cfg;
    const Image f = step_edge(16, 16);
    const auto [p1, p2] = irls_weights(f, cfg);
    CHECK((p1 > 0.0).all());
    CHECK((p2 > 0.0).all());
    CHECK(p1.allFinite());

    const VectorField g = grad(f);
    const Image mag = (g.dx.square() + g.dy.square()).sqrt();
    Index hi_i, hi_j, lo_i, lo_j;
    mag.maxCoeff(&hi_i, &hi_j);
    mag.minCoeff(&lo_i, &lo_j);
    CHECK(p1(hi_i, hi_j) < p1(lo_i, lo_j));
}

TEST_CASE("scalar psi variant broadcasts the global norm power") {
    WeightConfig cfg;
    cfg.scalar_psi = true;
    const Image f = random_image(8, 8, 12);
    const auto [p1, p2] = irls_weights(f, cfg);
    CHECK((p1 == p1(0, 0)).all());
    CHECK((p2 == p2(0, 0)).all());

    const VectorField g = grad(f);
    const double n1 = g.dx.abs().sum() + g.dy.abs().sum();
    CHECK(p1(0, 0) == doctest::Approx(std::pow(n1 + cfg.eps, cfg.nu1 - 1.0)).epsilon(1e-12));
}

TEST_CASE("weight config validation") {
    WeightConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    cfg.window = 4;
    CHECK_THROWS_AS(cfg.validate(), ArgumentError);
    cfg.window = 5;
    cfg.nu1 = 0.0;
    CHECK_THROWS_AS(cfg.validate(), ArgumentError);
    cfg.nu1 = 1.5;
    CHECK_THROWS_AS(cfg.validate(), ArgumentError);
    cfg.nu1 = 0.5;
    cfg.eps = 0.0;
    CHECK_THROWS_AS(cfg.validate(), ArgumentError);
    cfg.eps = 1e-3;
    cfg.kappa = -1.0;
    CHECK_THROWS_AS(cfg.validate(), ArgumentError);
}
