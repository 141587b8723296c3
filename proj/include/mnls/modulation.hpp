#pragma once

#include <complex>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string_view>
#include <variant>
#include <vector>

namespace mnls {

enum class PathKind { affine, sine, rough_fourier, brownian };

std::string_view to_string(PathKind kind);
PathKind parse_path_kind(std::string_view name);

/// Thrown when a path is evaluated outside [0, horizon].
class DomainError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

/// The dispersion modulation g on [0, horizon].
///
/// Paths are immutable; copies share their sample data.
class ModulationPath {
public:
    struct Affine {
        double slope = 1.0;
        double intercept = 0.0;
    };
    struct Sine {
        double amplitude = 1.0;
        double frequency = 1.0;
    };
    /// Real trigonometric polynomial g(t) = Re sum_{k=0}^{N/2} w_k c_k exp(2 pi i k t / T),
    /// w_0 = w_{N/2} = 1, w_k = 2 otherwise.
    struct RoughFourier {
        double alpha = 0.5;
        std::uint64_t seed = 0;
        double normalization = 1.0;
        std::shared_ptr<const std::vector<std::complex<double>>> coefficients;
        std::shared_ptr<const std::vector<double>> samples;
    };
    struct Brownian {
        std::uint64_t seed = 0;
        std::shared_ptr<const std::vector<double>> knots;
    };
    using Representation = std::variant<Affine, Sine, RoughFourier, Brownian>;

    ModulationPath(Representation representation, double horizon);

    PathKind kind() const;
    double horizon() const { return horizon_; }
    const Representation& representation() const { return representation_; }

    /// Throws DomainError outside [0, horizon]; t may exceed the horizon by
    /// a relative 1e-12 to absorb rounding in t_n + tau.
    double operator()(double t) const;

    /// c * g.
    ModulationPath scaled(double c) const;

    /// Rough paths: alpha of the synthesis. Empty otherwise.
    std::optional<double> alpha() const;
    std::optional<std::uint64_t> seed() const;
    /// Rough paths: the factor applied to reach sup-norm 1 on the synthesis grid.
    std::optional<double> normalization() const;
    /// Rough paths: values on the synthesis grid t_j = j T / N. Brownian: the knots.
    std::span<const double> samples() const;

private:
    Representation representation_;
    double horizon_;
};

enum class SmoothKind { affine, sine };

struct SmoothParams {
    double slope = 1.0;
    double intercept = 0.0;
    double amplitude = 1.0;
    double frequency = 1.0;
    double horizon = std::numeric_limits<double>::infinity();
};

/// g(t) = slope t + intercept, or amplitude sin(frequency t).
ModulationPath make_smooth_path(SmoothKind kind, const SmoothParams& params = {});

/// Random trigonometric polynomial of fractional Sobolev regularity alpha-:
/// uniform noise on [-1, 1], DFT, mode k divided by (1 + |k|)^(alpha + 1/2),
/// inverse DFT, real part, scaled to sup-norm 1 on the n_modes synthesis grid.
/// The period of the polynomial is the horizon.
ModulationPath make_rough_path(double alpha, int n_modes, std::uint64_t seed, double horizon = 1.0);

/// Brownian motion from g(0) = 0 with n_steps Gaussian increments on
/// [0, horizon], linearly interpolated.
ModulationPath make_brownian_path(int n_steps, double horizon, std::uint64_t seed);

inline double evaluate(const ModulationPath& g, double t) { return g(t); }

/// Midpoint-rule estimate of the W^{alpha,2}(0, T) norm on a resolution x
/// resolution grid, skipping the diagonal cells.
double estimate_w_norm(const ModulationPath& g, double alpha, int resolution);

} // namespace mnls
