#include <doctest.h>

#include "core/losses.hpp"
#include "core/rng.hpp"

using namespace s3lda;

TEST_CASE("squared loss") {
    CHECK(squared_loss(2.5, 2.5) == 0.0);
    CHECK(squared_loss(2.0, 1.0) == 1.0);
    CHECK(squared_loss(-10.0 / 6, 0.0) == doctest::Approx(100.0 / 36));
}

TEST_CASE("modified hinge") {
    CHECK(modified_hinge(0.0) == 1.0);
    CHECK(modified_hinge(1.0) == 0.0);
    CHECK(modified_hinge(-1.0) == 0.0);
    CHECK(modified_hinge(-0.5) == 0.5);
}

TEST_CASE("convex split values") {
    CHECK(u1(0.0) == 0.0);
    CHECK(u2(0.0) == -1.0);
    CHECK(u1(2.0) == 1.0);
    CHECK(u2(2.0) == 1.0);
    CHECK(u1(-3.0) == 2.0);
    CHECK(u2(-3.0) == 2.0);
}

TEST_CASE("split difference equals the modified hinge everywhere") {
    Rng rng(21, 0);
    for (int i = 0; i < 100000; ++i) {
        const double z = -5.0 + 10.0 * rng.uniform01();
        CHECK(u1(z) - u2(z) == modified_hinge(z));
    }
}

TEST_CASE("u2 subgradient") {
    CHECK(u2_subgradient(3.0) == 1.0);
    CHECK(u2_subgradient(-0.1) == -1.0);
    CHECK(u2_subgradient(0.0) == 0.0);
}

TEST_CASE("smoothed u1 values") {
    const SmoothingParams p{1e-3};
    CHECK(u1_smoothed(5.0, p) == doctest::Approx(4.0).epsilon(5e-4));
    CHECK(u1_smoothed(0.0, p) == 0.0);
    CHECK(u1_smoothed_derivative(2.0, p) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(u1_smoothed_derivative(-2.0, p) == doctest::Approx(-1.0).epsilon(1e-9));
}

TEST_CASE("smoothed u1 stays within mu/2 of u1") {
    const SmoothingParams p{1e-2};
    Rng rng(22, 0);
    for (int i = 0; i < 100000; ++i) {
        const double z = -4.0 + 8.0 * rng.uniform01();
        const double gap = u1_smoothed(z, p) - u1(z);
        CHECK(gap >= -1e-15);
        CHECK(gap <= p.mu_s / 2);
    }
}

TEST_CASE("smoothed u1 derivative matches central finite differences") {
    const SmoothingParams p{1e-2};
    Rng rng(23, 0);
    const double h = 1e-6;
    int checked = 0;
    for (int i = 0; i < 20000 || checked < 1000; ++i) {
        const double z = -4.0 + 8.0 * rng.uniform01();
        // skip the band edges where curvature jumps
        const double t = std::abs(z) - 1.0;
        if (std::abs(std::abs(t) - p.mu_s) < 10 * h || std::abs(z) < 10 * h) continue;
        const double fd = (u1_smoothed(z + h, p) - u1_smoothed(z - h, p)) / (2 * h);
        CHECK(std::abs(u1_smoothed_derivative(z, p) - fd) <= 1e-5);
        ++checked;
        if (i >= 20000) break;
    }
    CHECK(checked >= 1000);
}

TEST_CASE("loss signs") {
    Rng rng(24, 0);
    for (int i = 0; i < 10000; ++i) {
        const double z = -6.0 + 12.0 * rng.uniform01();
        CHECK(modified_hinge(z) >= 0.0);
        CHECK(u1(z) >= 0.0);
        CHECK(u1_smoothed(z, SmoothingParams{1e-3}) >= 0.0);
        CHECK(u2(z) >= -1.0);
    }
}
