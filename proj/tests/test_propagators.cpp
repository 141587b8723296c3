#include "doctest.h"

#include "mnls/propagators.hpp"
#include "test_support.hpp"

#include <cmath>
#include <numbers>

using namespace mnls;
using mnls::testing::distance;
using mnls::testing::random_field;

namespace {

const auto kGrid = make_grid(1, 128);

double relative_gap(const SpectralField& a, const SpectralField& b) {
    return distance(a, b) / std::max(h_sigma_norm(b, 0.0), 1e-300);
}

} // namespace

TEST_CASE("PhaseMultiplier entries have unit modulus") {
    for (double theta : {0.0, 0.3, -2.0, 1e3})
        for (double k2 : {0.0, 1.0, 49.0, 16384.0})
            CHECK(std::abs(std::abs(PhaseMultiplier{theta}.entry(k2)) - 1.0) < 1e-15);
}

TEST_CASE("apply_free_propagator") {
    const auto f = random_field(kGrid, 1);
    CHECK(distance(apply_free_propagator(f, 0.0), f) == 0.0);

    const auto grid = make_grid(1, 4);
    const auto mode = sample_field(grid, [](double x) { return std::polar(1.0, x); });
    const auto rotated = apply_free_propagator(mode, std::numbers::pi);
    CHECK(std::abs(rotated.coefficient(1) - Complex(-1.0, 0.0)) < 1e-15);

    SUBCASE("isometry in H^sigma") {
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            const auto field = random_field(kGrid, seed);
            for (double theta : {-3.0, 0.1, 1.7, 250.0}) {
                const auto moved = apply_free_propagator(field, theta);
                for (double sigma : {0.0, 1.0, 2.0}) {
                    const double n = h_sigma_norm(field, sigma);
                    CHECK(std::abs(h_sigma_norm(moved, sigma) - n) <= 1e-12 * n);
                }
            }
        }
    }

    SUBCASE("group law") {
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
            const auto field = random_field(kGrid, seed);
            const auto twice = apply_free_propagator(apply_free_propagator(field, 0.4), 1.3);
            CHECK(relative_gap(twice, apply_free_propagator(field, 1.7)) < 1e-13);
        }
    }
}

TEST_CASE("apply_evolution") {
    const auto sine = make_smooth_path(SmoothKind::sine);
    const auto field = random_field(kGrid, 7);
    CHECK(distance(apply_evolution(field, sine, 0.4, 0.4), field) == 0.0);

    SUBCASE("flow property") {
        const auto rough = make_rough_path(0.5, 1024, 3);
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
            const auto f = random_field(kGrid, seed);
            for (const auto* g : {&sine, &rough}) {
                const auto composed = apply_evolution(apply_evolution(f, *g, 0.2, 0.7), *g, 0.9, 0.2);
                CHECK(relative_gap(composed, apply_evolution(f, *g, 0.9, 0.7)) < 1e-12);
            }
        }
    }

    SUBCASE("classical NLS after a full period is the identity") {
        const auto linear = make_smooth_path(SmoothKind::affine, {.slope = 1.0, .intercept = 0.0});
        const auto f = random_field(kGrid, 11);
        const auto back = apply_evolution(f, linear, 2.0 * std::numbers::pi + 0.5, 0.5);
        CHECK(relative_gap(back, f) < 1e-12);
    }

    CHECK_THROWS_AS(apply_evolution(field, make_rough_path(0.5, 64, 1), 1.5, 0.0), DomainError);
}

TEST_CASE("twisted variables") {
    const auto sine = make_smooth_path(SmoothKind::sine);
    const auto f = random_field(kGrid, 5);
    CHECK(distance(to_twisted(f, sine, 0.0), f) == 0.0);
    CHECK(distance(from_twisted(f, sine, 0.0), f) == 0.0);

    const auto rough = make_rough_path(0.25, 2048, 9);
    for (double t : {0.0, 0.3, 0.999}) {
        const auto v = to_twisted(f, rough, t);
        CHECK(relative_gap(from_twisted(v, rough, t), f) < 1e-12);
        CHECK(relative_gap(to_twisted(from_twisted(f, rough, t), rough, t), f) < 1e-12);
        for (double sigma : {0.0, 1.0, 2.0}) {
            const double n = h_sigma_norm(f, sigma);
            CHECK(std::abs(h_sigma_norm(v, sigma) - n) <= 1e-12 * n);
        }
    }
}
