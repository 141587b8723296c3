#include "doctest.h"

#include "mnls/spectral.hpp"
#include "test_support.hpp"

#include <cmath>
#include <numbers>

using namespace mnls;
using mnls::testing::max_abs_diff;
using mnls::testing::random_field;
using mnls::testing::random_values;

TEST_CASE("make_grid sizes and wavenumbers") {
    const auto grid = make_grid(1, 128);
    CHECK(grid.points_per_axis() == 256);
    CHECK(grid.spacing() == doctest::Approx(2.0 * std::numbers::pi / 256));
    CHECK(grid.spacing() == doctest::Approx(0.0245).epsilon(0.01));
    // The half-grid convention quoted alongside K = 2^7.
    CHECK(grid.spacing_per_mode() == doctest::Approx(0.049).epsilon(0.01));

    const auto tiny = make_grid(1, 1);
    CHECK(tiny.points_per_axis() == 2);
    CHECK(tiny.wavenumber(0) == 0);
    CHECK(tiny.wavenumber(1) == -1);

    const auto small = make_grid(1, 4);
    CHECK(small.node(3) == doctest::Approx(3.0 * std::numbers::pi / 4.0));
    CHECK(small.wavenumber(4) == -4);
    CHECK(small.wavenumber(3) == 3);
    CHECK(small.index_of(-1) == 7);

    CHECK_THROWS_AS(make_grid(1, 0), std::invalid_argument);
    CHECK_THROWS_AS(make_grid(0, 4), std::invalid_argument);
    CHECK_THROWS_AS(Grid(1, 7), std::invalid_argument);
}

TEST_CASE("transform_forward normalization") {
    const auto grid = make_grid(1, 4);
    std::vector<Complex> ones(grid.size(), 1.0);
    const auto f = transform_forward(ones, grid);
    CHECK(std::abs(f.coefficient(0) - 1.0) < 1e-15);
    for (int k = -3; k < 4; ++k)
        if (k != 0) CHECK(std::abs(f.coefficient(k)) < 1e-15);

    const auto mode = sample_field(grid, [](double x) { return std::polar(1.0, x); });
    CHECK(std::abs(mode.coefficient(1) - 1.0) < 1e-15);
    for (int k = -4; k < 4; ++k)
        if (k != 1) CHECK(std::abs(mode.coefficient(k)) < 1e-15);

    CHECK_THROWS_AS(transform_forward(std::vector<Complex>(7), grid), std::invalid_argument);
}

TEST_CASE("transform_inverse of single modes") {
    const auto grid = make_grid(1, 4);
    std::vector<Complex> c(grid.size());
    c[grid.index_of(0)] = 1.0;
    for (auto v : transform_inverse(SpectralField(grid, c))) CHECK(std::abs(v - 1.0) < 1e-15);

    c.assign(grid.size(), 0.0);
    c[grid.index_of(1)] = 1.0;
    const auto values = transform_inverse(SpectralField(grid, c));
    for (int j = 0; j < grid.points_per_axis(); ++j)
        CHECK(std::abs(values[j] - std::polar(1.0, grid.node(j))) < 1e-14);
}

TEST_CASE("round trip is the identity") {
    for (int d : {1, 2}) {
        const auto grid = make_grid(d, d == 1 ? 128 : 8);
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            const auto values = random_values(grid.size(), seed);
            const auto back = transform_inverse(transform_forward(values, grid));
            double scale = 0.0;
            for (auto v : values) scale = std::max(scale, std::abs(v));
            CHECK(max_abs_diff(values, back) <= 1e-12 * scale);
        }
    }
}

TEST_CASE("h_sigma_norm") {
    const auto grid = make_grid(1, 16);
    const auto one = sample_field(grid, [](double) { return Complex(1.0); });
    for (double sigma : {0.0, 0.5, 1.0, 3.0}) CHECK(h_sigma_norm(one, sigma) == doctest::Approx(1.0));

    const auto mode = sample_field(grid, [](double x) { return std::polar(1.0, x); });
    CHECK(h_sigma_norm(mode, 1.0) == doctest::Approx(std::sqrt(2.0)));
    CHECK_THROWS_AS(h_sigma_norm(mode, -1.0), std::invalid_argument);

    SUBCASE("matches brute-force summation over signed wavenumbers") {
        const auto big = make_grid(1, 128);
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
            const auto f = random_field(big, seed);
            for (double sigma : {0.0, 1.0, 2.5}) {
                double sum = 0.0;
                for (int k = -128; k < 128; ++k)
                    sum += std::pow(1.0 + double(k) * double(k), sigma) * std::norm(f.coefficient(k));
                CHECK(std::abs(h_sigma_norm(f, sigma) - std::sqrt(sum)) <= 1e-13 * std::sqrt(sum));
            }
        }
    }

    SUBCASE("Parseval") {
        const auto big = make_grid(1, 128);
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
            const auto values = random_values(big.size(), seed + 100);
            double l2 = 0.0;
            for (auto v : values) l2 += std::norm(v);
            const double expected = std::sqrt(l2) / std::sqrt(double(big.size()));
            CHECK(std::abs(h_sigma_norm(transform_forward(values, big), 0.0) - expected) <= 1e-12 * expected);
        }
    }

    SUBCASE("monotone in sigma") {
        const auto big = make_grid(1, 64);
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            const auto f = random_field(big, seed, 30.0);
            double previous = 0.0;
            for (double sigma = 0.0; sigma <= 3.0; sigma += 0.25) {
                const double n = h_sigma_norm(f, sigma);
                CHECK(n >= previous);
                previous = n;
            }
        }
    }
}

TEST_CASE("cubic_nonlinearity") {
    const auto grid = make_grid(1, 8);
    const auto zero = cubic_nonlinearity(SpectralField::zero(grid));
    CHECK(h_sigma_norm(zero, 0.0) == 0.0);

    const Complex c(0.3, -1.2);
    const auto constant = sample_field(grid, [&](double) { return c; });
    const auto cubed = cubic_nonlinearity(constant);
    CHECK(std::abs(cubed.coefficient(0) - std::norm(c) * c) < 1e-14);
    CHECK(h_sigma_norm(cubed - SpectralField(grid, std::vector<Complex>(cubed.coefficients().begin(),
                                                                          cubed.coefficients().end())),
                       0.0) == 0.0);

    const auto mode = sample_field(grid, [](double x) { return std::polar(1.0, x); });
    CHECK(mnls::testing::distance(cubic_nonlinearity(mode), mode) < 1e-14);

    SUBCASE("real input stays real") {
        const auto big = make_grid(1, 64);
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
            const auto values = random_values(big.size(), seed);
            std::vector<Complex> real(values.size());
            for (std::size_t i = 0; i < values.size(); ++i) real[i] = values[i].real();
            const auto f = transform_forward(real, big);
            CHECK(f.is_hermitian(1e-14));
            CHECK(cubic_nonlinearity(f).is_hermitian(1e-13));
            CHECK(cubic_nonlinearity(f, true).is_hermitian(1e-13));
        }
    }

    SUBCASE("dealiasing truncates the top third") {
        const auto big = make_grid(1, 32);
        const auto f = random_field(big, 3, 1e9);
        const auto product = cubic_nonlinearity(f, true);
        for (int k = -32; k < 32; ++k) {
            if (std::abs(k) > 64 / 3) CHECK(product.coefficient(k) == Complex(0.0));
        }
        // Low modes only: the 2/3 rule reproduces the unaliased product exactly.
        std::vector<Complex> low(big.size());
        low[big.index_of(1)] = 0.5;
        low[big.index_of(-2)] = Complex(0.0, 0.25);
        const SpectralField g(big, low);
        CHECK(mnls::testing::distance(cubic_nonlinearity(g, true), cubic_nonlinearity(g, false)) < 1e-15);
    }
}

TEST_CASE("nonlinear_phase preserves the discrete L2 norm") {
    const auto grid = make_grid(1, 64);
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto f = random_field(grid, seed);
        const auto g = nonlinear_phase(f, 0.7);
        CHECK(std::abs(h_sigma_norm(g, 0.0) - h_sigma_norm(f, 0.0)) < 1e-13 * h_sigma_norm(f, 0.0));
    }
}
