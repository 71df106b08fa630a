#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "doctest.h"
#include "mch2/stochastics.hpp"
#include "support.hpp"

using namespace mch2;
using testing_support::max_coeff;
using testing_support::max_coeff_diff;
using testing_support::sample;

TEST_CASE("philox known-answer vectors") {
    using A4 = std::array<std::uint32_t, 4>;
    CHECK(philox4x32({0, 0, 0, 0}, {0, 0}) == A4{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
    CHECK(philox4x32({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu}) ==
          A4{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
    CHECK(philox4x32({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u}) ==
          A4{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("W(1) moments over 10^4 paths") {
    const int paths = 10000, steps = 16;
    double sum = 0.0, sq = 0.0;
    for (int p = 0; p < paths; ++p) {
        const WienerPath w = sample_path(1000 + p, 1.0 / steps, steps, 1);
        const double x = w.cumulative(0, steps);
        sum += x;
        sq += x * x;
    }
    const double mean = sum / paths, var = sq / paths - mean * mean;
    MESSAGE("mean " << mean << " variance " << var);
    CHECK(std::abs(mean) <= 0.05);
    CHECK(var >= 0.95);
    CHECK(var <= 1.05);
}

TEST_CASE("path structure and determinism") {
    const WienerPath a = sample_path(42, 0.01, 200, 3), b = sample_path(42, 0.01, 200, 3);
    const WienerPath c = sample_path(43, 0.01, 200, 3);
    bool same = true, differ = false;
    for (int d = 0; d < 3; ++d) {
        CHECK(a.cumulative(d, 0) == 0.0);
        double run = 0.0;
        for (int k = 0; k < 200; ++k) {
            run += a.increment(d, k);
            CHECK(a.cumulative(d, k + 1) == run);
            same = same && a.increment(d, k) == b.increment(d, k);
            differ = differ || a.increment(d, k) != c.increment(d, k);
        }
    }
    CHECK(same);
    CHECK(differ);
    // a longer path from the same seed extends the shorter one
    const WienerPath longer = sample_path(42, 0.01, 400, 3);
    CHECK(longer.cumulative(1, 200) == a.cumulative(1, 200));
    CHECK_THROWS(sample_path(1, 0.0, 10, 1));
}

TEST_CASE("drivers are uncorrelated") {
    const int steps = 10000;
    const WienerPath w = sample_path(7, 1e-3, steps, 2);
    double xy = 0.0, xx = 0.0, yy = 0.0;
    for (int k = 0; k < steps; ++k) {
        const double x = w.increment(0, k), y = w.increment(1, k);
        xy += x * y;
        xx += x * x;
        yy += y * y;
    }
    const double corr = xy / std::sqrt(xx * yy);
    MESSAGE("cross-correlation " << corr);
    CHECK(std::abs(corr) <= 5.0 / std::sqrt(double(steps)));
}

TEST_CASE("bridge refinement") {
    const WienerPath w = sample_path(5, 0.1, 20, 2);
    for (int k = 0; k <= 20; ++k) {
        CHECK(w.at(0, 0, k) == w.cumulative(0, k));
        CHECK(w.at(1, 3, 8 * k) == w.cumulative(1, k));
    }
    // nested consistency: a level-2 point read directly or through level 3
    CHECK(w.at(0, 2, 7) == w.at(0, 3, 14));
    CHECK(w.at(0, 5, 3) == w.at(0, 5, 3));
    CHECK_THROWS(w.at(0, 1, 41));
    CHECK_THROWS(w.at(0, 0, 21));

    // fine increments have variance dt / 2^L and are uncorrelated across paths
    const int paths = 4000, level = 3;
    const double dt = 0.2, h = dt / (1 << level);
    double s1 = 0.0, s2 = 0.0, cross = 0.0;
    for (int p = 0; p < paths; ++p) {
        const WienerPath q = sample_path(9000 + p, dt, 2, 1);
        const double i1 = q.at(0, level, 3) - q.at(0, level, 2);
        const double i2 = q.at(0, level, 4) - q.at(0, level, 3);
        s1 += i1 * i1;
        s2 += i2 * i2;
        cross += i1 * i2;
    }
    MESSAGE("fine variances " << s1 / paths / h << " " << s2 / paths / h << " cross " << cross / paths / h);
    CHECK(s1 / paths / h == doctest::Approx(1.0).epsilon(0.1));
    CHECK(s2 / paths / h == doctest::Approx(1.0).epsilon(0.1));
    CHECK(std::abs(cross / paths / h) < 0.1);
}

TEST_CASE("linear interpolation of the path") {
    const WienerPath w = sample_path(3, 0.5, 4, 1);
    CHECK(w.value(0, 0.0) == 0.0);
    CHECK(w.value(0, 1.0) == w.cumulative(0, 2));
    CHECK(w.value(0, 1.25) == doctest::Approx(0.5 * (w.cumulative(0, 2) + w.cumulative(0, 3))));
    CHECK(w.value(0, 9.0) == w.cumulative(0, 4));
}

TEST_CASE("diffusion models") {
    Grid g(1, 32);
    const SpectralField c = sample(g, [](double x, double) { return std::cos(x); });
    const State y{{c}, c};

    NoiseModel zero;
    CHECK(diffusion(0.0, y, zero).empty());

    NoiseModel lin;
    lin.kind = NoiseModel::Kind::linear;
    lin.c1 = 2.0;
    lin.c2 = -0.5;
    const auto gl = diffusion(0.0, y, lin);
    REQUIRE(gl.size() == 1);
    CHECK(max_coeff_diff(gl[0].du[0], sample(g, [](double x, double) { return 2 * std::cos(x); })) < 1e-16);
    CHECK(max_coeff_diff(gl[0].dgamma, sample(g, [](double x, double) { return -0.5 * std::cos(x); })) < 1e-16);

    NoiseModel poly = lin;
    poly.kind = NoiseModel::Kind::polynomial;
    poly.delta1 = 1.0;
    poly.s_norm = 1.0;
    const auto gp = diffusion(0.0, y, poly);
    CHECK(max_coeff_diff(gp[0].du[0], sample(g, [](double x, double) { return 2 * std::cos(x); })) < 1e-15);
    CHECK_THROWS(poly.validate(1));
    poly.s_norm = 1.6;
    CHECK_NOTHROW(poly.validate(1));
    CHECK_THROWS(poly.validate(2));
    poly.delta2 = -1.0;
    poly.s_norm = 3.0;
    CHECK_THROWS(poly.validate(2));

    // linear is polynomial with zero exponents
    std::mt19937_64 rng(11);
    const State r = testing_support::random_state(g, rng, 8, 0.02);
    NoiseModel p0 = lin;
    p0.kind = NoiseModel::Kind::polynomial;
    p0.s_norm = 3.0;
    const auto a = diffusion(0.0, r, lin), b = diffusion(0.0, r, p0);
    CHECK(max_coeff_diff(a[0].du[0], b[0].du[0]) == 0.0);
    CHECK(max_coeff_diff(a[0].dgamma, b[0].dgamma) == 0.0);
}

TEST_CASE("finite-mode diffusion") {
    NoiseModel m;
    m.kind = NoiseModel::Kind::finite_mode;
    CHECK_THROWS(m.validate(1));
    m.modes = {{0, 0, 0.3}, {2, 0, 0.5}, {1, 1, -0.2}};
    CHECK_THROWS(m.validate(1));
    CHECK_NOTHROW(m.validate(2));
    CHECK(m.drivers() == 3);

    // the constant mode is a plain Lambda^{-2} multiple
    Grid g1(1, 32);
    const SpectralField c = sample(g1, [](double x, double) { return std::cos(x); });
    NoiseModel m1;
    m1.kind = NoiseModel::Kind::finite_mode;
    m1.modes = {{0, 0, 0.3}, {1, 0, 1.0}};
    const auto g = diffusion(0.0, State{{c}, c}, m1);
    REQUIRE(g.size() == 2);
    CHECK(max_coeff_diff(g[0].du[0], sample(g1, [](double x, double) { return 0.15 * std::cos(x); })) < 1e-16);
    // cos(x) cos(x) = (1 + cos 2x) / 2, then Lambda^{-2}
    CHECK(max_coeff_diff(g[1].dgamma, sample(g1, [](double x, double) { return 0.5 + 0.1 * std::cos(2 * x); })) < 1e-15);

    Grid g2(2, 32);
    std::mt19937_64 rng(17);
    for (double s : {1.5, 2.5, 4.0}) {
        for (int trial = 0; trial < 20; ++trial) {
            const State y = testing_support::random_state(g2, rng, 2 + trial % 6, 0.01);
            const auto gs = diffusion(0.0, y, m);
            for (std::size_t k = 0; k < m.modes.size(); ++k) {
                const double lhs = std::hypot(sobolev_norm(gs[k].du, s), sobolev_norm(gs[k].dgamma, s));
                CHECK(lhs <= finite_mode_constant(m.modes[k], s) * sobolev_norm(y, s) * (1 + 1e-12));
            }
        }
    }
}

TEST_CASE("mu and the exponential transformation") {
    CHECK(mu(0.0, 0.0, 1.7) == 1.0);
    CHECK(mu(1.0, 0.5, 2.0) == doctest::Approx(std::numbers::e).epsilon(1e-15));
    CHECK(mu(2.0, 0.4, 0.0) == 1.0);

    Grid g(2, 16);
    std::mt19937_64 rng(23);
    const State y = testing_support::random_state(g, rng, 5, 0.02);
    const State same = transform_state(y, 1.0);
    CHECK(max_coeff_diff(same.gamma, y.gamma) == 0.0);
    const double m = mu(0.8, -0.6, 1.3);
    const State t = transform_state(y, m);
    const State back = untransform_state(t, m);
    for (int i = 0; i < 2; ++i) CHECK(max_coeff_diff(back.u[i], y.u[i]) <= 1e-14 * max_coeff(y.u[i]));
    CHECK(sobolev_norm(t, 2.5) == doctest::Approx(m * sobolev_norm(y, 2.5)).epsilon(1e-14));
    CHECK_THROWS(transform_state(y, 0.0));
    CHECK_THROWS(untransform_state(y, -1.0));
}
