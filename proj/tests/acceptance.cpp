// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include "mnls/config.hpp"
#include "mnls/experiments.hpp"
#include "mnls/io.hpp"
#include "mnls/propagators.hpp"

#include <fmt/format.h>
#include <tbb/global_control.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

using namespace mnls;

namespace {

struct Verdict {
    bool pass = false;
    std::string detail;
};

SpectralField random_field(const Grid& grid, std::mt19937_64& engine) {
    std::normal_distribution<double> normal;
    std::vector<Complex> c(grid.size());
    for (std::size_t i = 0; i < c.size(); ++i) {
        const double k = std::abs(grid.wavenumber(static_cast<int>(i)));
        c[i] = std::exp(-k / 8.0) * Complex(normal(engine), normal(engine));
    }
    return SpectralField(grid, std::move(c));
}

std::string slope_text(const SchemeSweep& s) {
    return s.fit ? fmt::format("{:.4f}", s.fit->slope) : std::string("n/a");
}

bool slope_in(const SchemeSweep& s, double lo, double hi) { return s.fit && s.fit->slope >= lo && s.fit->slope <= hi; }

const SchemeSweep& find(const SweepResult& r, Scheme scheme) {
    for (const auto& s : r.schemes)
        if (s.scheme == scheme) return s;
    throw std::logic_error("scheme missing from sweep");
}

Verdict isometry() {
    const auto grid = make_grid(1, 128);
    std::mt19937_64 engine(1);
    double worst = 0.0;
    for (int f = 0; f < 100; ++f) {
        const auto field = random_field(grid, engine);
        for (int j = 0; j < 20; ++j) {
            const double theta = -10.0 + 20.0 * j / 19.0;
            const auto moved = apply_free_propagator(field, theta);
            for (double sigma : {0.0, 1.0, 2.0}) {
                const double n = h_sigma_norm(field, sigma);
                worst = std::max(worst, std::abs(h_sigma_norm(moved, sigma) - n) / n);
            }
        }
    }
    return {worst <= 1e-12, fmt::format("max relative deviation {:.3e} (tol 1e-12)", worst)};
}

Verdict identities() {
    const auto grid = make_grid(1, 128);
    std::mt19937_64 engine(2);
    std::uniform_real_distribution<double> unit;
    const auto sine = make_smooth_path(SmoothKind::sine);
    const auto rough = make_rough_path(0.5, 1 << 14, 7);
    double worst_identity = 0.0, worst_twisted = 0.0;
    for (int c = 0; c < 50; ++c) {
        const auto u = random_field(grid, engine);
        const double t = 0.5 * unit(engine);
        const double tau = std::ldexp(1.0, -4 - static_cast<int>(7 * unit(engine)));
        const double xi = unit(engine);
        const auto& g = c % 2 == 0 ? sine : rough;
        const double scale = h_sigma_norm(u, 0.0);

        const auto r0 = step_randomized(u, g, t, tau, 0.0);
        const auto classical = step_classical_exponential(u, g, t, tau);
        worst_identity = std::max(worst_identity, h_sigma_norm(r0 - classical, 0.0) / scale);

        const auto direct = step_randomized(u, g, t, tau, xi);
        const auto twisted =
            from_twisted(step_randomized_twisted(to_twisted(u, g, t), g, t, tau, xi), g, t + tau);
        worst_twisted = std::max(worst_twisted, h_sigma_norm(direct - twisted, 0.0) / scale);
    }
    return {worst_identity <= 1e-13 && worst_twisted <= 1e-12,
            fmt::format("xi=0 gap {:.3e} (tol 1e-13), twisted gap {:.3e} (tol 1e-12)", worst_identity,
                        worst_twisted)};
}

Verdict frozen_flow_order() {
    const auto grid = make_grid(1, 128);
    const auto u0 = paper_initial_datum(grid);
    const auto g = make_smooth_path(SmoothKind::sine);
    std::vector<std::pair<double, double>> pairs;
    for (int e = 6; e <= 12; ++e) {
        const double tau = std::ldexp(1.0, -e);
        const auto frozen = compute_frozen_flow_reference(u0, g, 0.0, tau, default_quad_points(g, tau));
        SpectralField proxy = u0;
        for (int j = 0; j < 256; ++j) proxy = step_strang(proxy, g, j * tau / 256, tau / 256);
        pairs.emplace_back(tau, h_sigma_norm(frozen - proxy, 1.0));
    }
    const auto fit = fit_slope(pairs);
    return {std::abs(fit.slope - 2.0) <= 0.2, fmt::format("slope {:.4f} (target 2.0 +- 0.2)", fit.slope)};
}

Verdict unbiasedness() {
    const auto g = make_smooth_path(SmoothKind::affine);
    const int m = 10000;
    const auto d = martingale_diagnostic(g, 1.0, 0.0, 1.0, m, 2024);
    const Complex exact(std::sin(1.0), 1.0 - std::cos(1.0));
    const Complex diff = d.sample_mean - exact;
    const double band_re = 3.0 * d.stddev_real / std::sqrt(double(m));
    const double band_im = 3.0 * d.stddev_imag / std::sqrt(double(m));
    return {std::abs(diff.real()) <= band_re && std::abs(diff.imag()) <= band_im,
            fmt::format("mean {:.5f}{:+.5f}i vs {:.5f}{:+.5f}i, |diff| ({:.2e}, {:.2e}) band ({:.2e}, {:.2e})",
                        d.sample_mean.real(), d.sample_mean.imag(), exact.real(), exact.imag(),
                        std::abs(diff.real()), std::abs(diff.imag()), band_re, band_im)};
}

SweepResult sweep(RunConfig config) {
    const auto u0 = paper_initial_datum(make_grid(config.dimension, config.largest_mode));
    const auto g = build_modulation(config.modulation, config.horizon);
    return convergence_sweep(config, u0, g);
}

Verdict smooth_convergence() {
    RunConfig config;
    config.sequences = 20;
    const auto r = sweep(config);
    const auto& rand = find(r, Scheme::randomized_exponential);
    const auto& cls = find(r, Scheme::classical_exponential);
    const auto& str = find(r, Scheme::strang);
    const bool pass = r.valid && slope_in(rand, 0.85, 1.15) && slope_in(cls, 0.85, 1.15) && slope_in(str, 1.8, 2.2);
    return {pass, fmt::format("randomized {} [0.85,1.15], classical {} [0.85,1.15], strang {} [1.8,2.2]{}",
                              slope_text(rand), slope_text(cls), slope_text(str), r.valid ? "" : ", sweep invalid")};
}

RunConfig rough_config(double alpha, std::vector<Scheme> schemes) {
    RunConfig config;
    config.sequences = 50;
    config.schemes = std::move(schemes);
    config.modulation.kind = PathKind::rough_fourier;
    config.modulation.alpha = alpha;
    return config;
}

Verdict rough_convergence(double alpha, const SweepResult& r) {
    const auto& rand = find(r, Scheme::randomized_exponential);
    const double target = std::min(1.0, alpha + 0.5);
    return {r.valid && slope_in(rand, target - 0.2, target + 0.2),
            fmt::format("alpha {}: randomized slope {} (target {} +- 0.2), reference gap {:.2e}{}", alpha,
                        slope_text(rand), target, rand.check.gap, r.valid ? "" : ", sweep invalid")};
}

Verdict classical_degradation(const SweepResult& r) {
    const auto& rand = find(r, Scheme::randomized_exponential);
    const auto& cls = find(r, Scheme::classical_exponential);
    bool pass = rand.fit && cls.fit && cls.fit->slope < rand.fit->slope;
    std::string errors;
    const std::size_t n = cls.records.size();
    for (std::size_t i = n - 3; i < n; ++i) {
        const bool exceeds = cls.records[i].rms > rand.records[i].rms;
        pass = pass && exceeds;
        errors += fmt::format(" N={}: {:.3e} vs {:.3e}{}", cls.records[i].steps, cls.records[i].rms,
                              rand.records[i].rms, exceeds ? "" : " (not exceeded)");
    }
    return {pass, fmt::format("slopes classical {} < randomized {};{}", slope_text(cls), slope_text(rand), errors)};
}

Verdict strang_conservation() {
    const auto grid = make_grid(1, 128);
    const auto u0 = paper_initial_datum(grid);
    const auto g = make_smooth_path(SmoothKind::sine);
    const auto r = run_trajectory(u0, g, {Scheme::strang, true}, 1.0, 1000, std::nullopt, {.record_norms = true});
    const double initial = r.norms.front().h0;
    double drift = 0.0;
    for (const auto& n : r.norms) drift = std::max(drift, std::abs(n.h0 - initial) / initial);
    return {drift <= 1e-10, fmt::format("max relative L2 drift {:.3e} (tol 1e-10)", drift)};
}

Verdict w_norm() {
    const auto g = make_smooth_path(SmoothKind::affine, {.horizon = 1.0});
    bool pass = true;
    std::string detail;
    for (double alpha : {0.25, 0.5}) {
        const double exact = std::sqrt(1.0 / 3.0 + 2.0 / ((2.0 - 2.0 * alpha) * (3.0 - 2.0 * alpha)));
        const double estimate = estimate_w_norm(g, alpha, 2000);
        const double rel = std::abs(estimate - exact) / exact;
        pass = pass && rel <= 0.02;
        detail += fmt::format("alpha {}: {:.5f} vs {:.5f} ({:.2f}%); ", alpha, estimate, exact, 100 * rel);
    }
    detail += "tol 2%";
    return {pass, detail};
}

Verdict reproducibility() {
    auto config = rough_config(0.5, {Scheme::randomized_exponential, Scheme::classical_exponential});
    config.modulation.modes = 1 << 12;
    config.steps = {16, 32, 64, 128};
    config.sequences = 12;
    config.refinement = 16;
    config.check_reference = false;
    std::vector<std::string> outputs;
    for (int threads : {1, 4, 1, 4}) {
        config.threads = threads;
        const auto r = sweep(config);
        std::ostringstream csv;
        write_sweep_csv(csv, r);
        write_plot_csv(csv, r);
        outputs.push_back(csv.str());
    }
    bool identical = true;
    for (const auto& o : outputs) identical = identical && o == outputs.front();
    return {identical, fmt::format("{} runs at parallelism 1/4, {} bytes each, {}", outputs.size(),
                                   outputs.front().size(), identical ? "identical" : "differ")};
}

} // namespace

int main() {
    int failures = 0;
    auto report = [&](int id, const std::string& name, const std::function<Verdict()>& check) {
        const auto start = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = check();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (!v.pass) ++failures;
        std::printf("%s  %2d %-28s %s [%.1fs]\n", v.pass ? "PASS" : "FAIL", id, name.c_str(), v.detail.c_str(),
                    seconds);
        std::fflush(stdout);
    };

    report(1, "isometry", isometry);
    report(2, "scheme identities", identities);
    report(3, "frozen-flow local order", frozen_flow_order);
    report(4, "stratified MC unbiasedness", unbiasedness);
    report(5, "smooth-g convergence", smooth_convergence);

    std::optional<SweepResult> tenth;
    for (double alpha : {0.5, 0.25, 0.1}) {
        report(6, fmt::format("rough-g convergence a={}", alpha), [&] {
            std::vector<Scheme> schemes = {Scheme::randomized_exponential};
            if (alpha == 0.1) schemes.push_back(Scheme::classical_exponential);
            auto r = sweep(rough_config(alpha, schemes));
            if (alpha == 0.1) tenth = r;
            return rough_convergence(alpha, r);
        });
    }
    report(7, "classical degradation", [&] {
        if (!tenth) return Verdict{false, "alpha = 1/10 sweep did not complete"};
        return classical_degradation(*tenth);
    });
    report(8, "Strang L2 conservation", strang_conservation);
    report(9, "W-norm estimator", w_norm);
    report(10, "reproducibility", reproducibility);

    std::printf("%d criterion check(s) failed\n", failures);
    return failures == 0 ? 0 : 1;
}
