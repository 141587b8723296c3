#include "mnls/modulation.hpp"

#include "mnls/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

namespace mnls {

namespace {

constexpr int kReseedBlock = 64;

double unit_uniform(std::mt19937_64& engine) {
    // 53 random bits; fixed mapping so paths do not depend on the library's
    // distribution implementation.
    return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

// Re sum_k c_k exp(i k theta), with exact exp() reseeding every block so the
// rotation recurrence does not accumulate error over thousands of modes.
double trig_sum(std::span<const std::complex<double>> coefficients, double theta) {
    const std::complex<double> rotation = std::polar(1.0, theta);
    double sum = 0.0;
    for (std::size_t start = 0; start < coefficients.size(); start += kReseedBlock) {
        std::complex<double> phase = std::polar(1.0, static_cast<double>(start) * theta);
        const std::size_t end = std::min(coefficients.size(), start + kReseedBlock);
        for (std::size_t k = start; k < end; ++k) {
            const auto& c = coefficients[k];
            sum += c.real() * phase.real() - c.imag() * phase.imag();
            phase *= rotation;
        }
    }
    return sum;
}

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

} // namespace

std::string_view to_string(PathKind kind) {
    switch (kind) {
    case PathKind::affine: return "affine";
    case PathKind::sine: return "sine";
    case PathKind::rough_fourier: return "rough";
    case PathKind::brownian: return "brownian";
    }
    return "unknown";
}

PathKind parse_path_kind(std::string_view name) {
    if (name == "affine") return PathKind::affine;
    if (name == "sine") return PathKind::sine;
    if (name == "rough" || name == "rough_fourier") return PathKind::rough_fourier;
    if (name == "brownian") return PathKind::brownian;
    throw std::invalid_argument("unknown modulation kind '" + std::string(name) + "'");
}

ModulationPath::ModulationPath(Representation representation, double horizon)
    : representation_(std::move(representation)), horizon_(horizon) {
    if (!(horizon > 0.0)) throw std::invalid_argument("modulation horizon must be positive");
}

PathKind ModulationPath::kind() const {
    return std::visit(Overloaded{
                          [](const Affine&) { return PathKind::affine; },
                          [](const Sine&) { return PathKind::sine; },
                          [](const RoughFourier&) { return PathKind::rough_fourier; },
                          [](const Brownian&) { return PathKind::brownian; },
                      },
                      representation_);
}

double ModulationPath::operator()(double t) const {
    const double slack = 1e-12 * std::max(1.0, std::isfinite(horizon_) ? horizon_ : 1.0);
    if (!(t >= -slack && t <= horizon_ + slack))
        throw DomainError("modulation evaluated at t = " + std::to_string(t) + " outside [0, " +
                          std::to_string(horizon_) + "]");
    t = std::clamp(t, 0.0, horizon_);

    return std::visit(
        Overloaded{
            [&](const Affine& a) { return a.slope * t + a.intercept; },
            [&](const Sine& s) { return s.amplitude * std::sin(s.frequency * t); },
            [&](const RoughFourier& r) {
                return trig_sum(*r.coefficients, 2.0 * std::numbers::pi * t / horizon_);
            },
            [&](const Brownian& b) {
                const auto& knots = *b.knots;
                const int steps = static_cast<int>(knots.size()) - 1;
                const double s = t / horizon_ * steps;
                const int j = std::min(static_cast<int>(s), steps - 1);
                const double w = s - j;
                return (1.0 - w) * knots[j] + w * knots[j + 1];
            },
        },
        representation_);
}

ModulationPath ModulationPath::scaled(double c) const {
    auto rep = std::visit(
        Overloaded{
            [&](const Affine& a) -> Representation { return Affine{c * a.slope, c * a.intercept}; },
            [&](const Sine& s) -> Representation { return Sine{c * s.amplitude, s.frequency}; },
            [&](const RoughFourier& r) -> Representation {
                auto coefficients = *r.coefficients;
                for (auto& x : coefficients) x *= c;
                auto samples = *r.samples;
                for (auto& x : samples) x *= c;
                return RoughFourier{r.alpha, r.seed, c * r.normalization,
                                    std::make_shared<const std::vector<std::complex<double>>>(
                                        std::move(coefficients)),
                                    std::make_shared<const std::vector<double>>(std::move(samples))};
            },
            [&](const Brownian& b) -> Representation {
                auto knots = *b.knots;
                for (auto& x : knots) x *= c;
                return Brownian{b.seed, std::make_shared<const std::vector<double>>(std::move(knots))};
            },
        },
        representation_);
    return ModulationPath(std::move(rep), horizon_);
}

std::optional<double> ModulationPath::alpha() const {
    if (auto* r = std::get_if<RoughFourier>(&representation_)) return r->alpha;
    return std::nullopt;
}

std::optional<std::uint64_t> ModulationPath::seed() const {
    if (auto* r = std::get_if<RoughFourier>(&representation_)) return r->seed;
    if (auto* b = std::get_if<Brownian>(&representation_)) return b->seed;
    return std::nullopt;
}

std::optional<double> ModulationPath::normalization() const {
    if (auto* r = std::get_if<RoughFourier>(&representation_)) return r->normalization;
    return std::nullopt;
}

std::span<const double> ModulationPath::samples() const {
    if (auto* r = std::get_if<RoughFourier>(&representation_)) return *r->samples;
    if (auto* b = std::get_if<Brownian>(&representation_)) return *b->knots;
    return {};
}

ModulationPath make_smooth_path(SmoothKind kind, const SmoothParams& params) {
    if (kind == SmoothKind::affine)
        return ModulationPath(ModulationPath::Affine{params.slope, params.intercept}, params.horizon);
    return ModulationPath(ModulationPath::Sine{params.amplitude, params.frequency}, params.horizon);
}

ModulationPath make_rough_path(double alpha, int n_modes, std::uint64_t seed, double horizon) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("rough path alpha must lie in (0, 1), got " + std::to_string(alpha));
    if (n_modes < 2 || n_modes % 2 != 0)
        throw std::invalid_argument("rough path mode count must be even and >= 2");

    const Grid grid(1, n_modes);
    std::mt19937_64 engine(seed);
    std::vector<Complex> noise(n_modes);
    for (auto& x : noise) x = 2.0 * unit_uniform(engine) - 1.0;

    auto spectrum = transform_forward(noise, grid);
    std::vector<Complex> damped(spectrum.coefficients().begin(), spectrum.coefficients().end());
    for (int i = 0; i < n_modes; ++i) {
        damped[i] /= std::pow(1.0 + std::abs(grid.wavenumber(i)), alpha + 0.5);
    }
    const SpectralField damped_field(grid, damped);

    auto values = transform_inverse(damped_field);
    std::vector<double> samples(n_modes);
    double peak = 0.0;
    for (int j = 0; j < n_modes; ++j) {
        samples[j] = values[j].real();
        peak = std::max(peak, std::abs(samples[j]));
    }
    const double normalization = 1.0 / peak;
    for (auto& s : samples) s *= normalization;

    // One-sided Hermitian-symmetrized coefficients, weights folded in.
    const int half = n_modes / 2;
    std::vector<std::complex<double>> coefficients(half + 1);
    coefficients[0] = damped_field.coefficient(0).real();
    for (int k = 1; k < half; ++k) {
        coefficients[k] = damped_field.coefficient(k) + std::conj(damped_field.coefficient(-k));
    }
    coefficients[half] = damped_field.coefficient(-half).real();
    for (auto& c : coefficients) c *= normalization;

    return ModulationPath(
        ModulationPath::RoughFourier{
            alpha, seed, normalization,
            std::make_shared<const std::vector<std::complex<double>>>(std::move(coefficients)),
            std::make_shared<const std::vector<double>>(std::move(samples))},
        horizon);
}

ModulationPath make_brownian_path(int n_steps, double horizon, std::uint64_t seed) {
    if (n_steps < 1) throw std::invalid_argument("brownian path needs at least one step");
    if (!(horizon > 0.0) || !std::isfinite(horizon))
        throw std::invalid_argument("brownian horizon must be positive and finite");
    std::mt19937_64 engine(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    const double scale = std::sqrt(horizon / n_steps);
    std::vector<double> knots(n_steps + 1, 0.0);
    for (int j = 0; j < n_steps; ++j) knots[j + 1] = knots[j] + scale * normal(engine);
    return ModulationPath(
        ModulationPath::Brownian{seed, std::make_shared<const std::vector<double>>(std::move(knots))},
        horizon);
}

double estimate_w_norm(const ModulationPath& g, double alpha, int resolution) {
    if (resolution < 2) throw std::invalid_argument("w-norm resolution must be >= 2");
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("w-norm alpha must lie in (0, 1)");
    if (!std::isfinite(g.horizon()))
        throw std::invalid_argument("w-norm needs a path with a finite horizon");

    const double h = g.horizon() / resolution;
    std::vector<double> values(resolution);
    for (int i = 0; i < resolution; ++i) values[i] = g((i + 0.5) * h);

    double l2 = 0.0;
    for (double v : values) l2 += v * v;
    l2 *= h;

    // Kernel weight depends only on the index gap.
    std::vector<double> weight(resolution, 0.0);
    for (int gap = 1; gap < resolution; ++gap) weight[gap] = std::pow(gap * h, -(2.0 * alpha + 1.0));

    double gagliardo = 0.0;
    for (int i = 0; i < resolution; ++i) {
        double row = 0.0;
        for (int j = i + 1; j < resolution; ++j) {
            const double diff = values[i] - values[j];
            row += diff * diff * weight[j - i];
        }
        gagliardo += row;
    }
    gagliardo *= 2.0 * h * h;

    return std::sqrt(l2 + gagliardo);
}

} // namespace mnls
