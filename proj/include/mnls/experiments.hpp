#pragma once

#include "mnls/config.hpp"
#include "mnls/integrators.hpp"
#include "mnls/modulation.hpp"
#include "mnls/spectral.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace mnls {

/// Raised when a reference solution fails its consistency check.
class ReferenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// u0(x) = cos(x) / (2 - sin(x)) on a 1-d grid.
SpectralField paper_initial_datum(const Grid& grid);

/// Seed of Monte Carlo sequence `index`: base XOR mix64(index).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

/// Smooth modulations are referenced by Strang splitting, rough ones by the
/// scheme under test.
Scheme reference_scheme(PathKind kind, Scheme under_test);

struct ReferenceSolution {
    Scheme scheme = Scheme::strang;
    double tau = 0.0;
    int steps = 0;
    int refinement = 0;
    SpectralField final_state;
    /// States at multiples of the finest sweep step, if requested.
    int checkpoint_steps = 0;
    std::vector<SpectralField> checkpoints;
};

/// Runs the reference at tau_ref = min(tau) / refinement. The randomized
/// scheme uses config.reference_seed.
ReferenceSolution compute_reference(const SpectralField& u0, const ModulationPath& g, const RunConfig& config,
                                    Scheme under_test, int refinement, bool keep_checkpoints = false);

struct ErrorRecord {
    Scheme scheme = Scheme::randomized_exponential;
    double tau = 0.0;
    int steps = 0;
    int sequences = 0;
    /// Final-time H^sigma errors of the sequences that completed, in index order.
    std::vector<double> errors;
    /// Max over steps of the error, same order (if requested).
    std::vector<double> max_errors;
    double rms = 0.0;
    double stddev = 0.0;
    std::optional<double> rms_max;
    int excluded = 0;
    bool valid = true;
};

/// Root mean square and sample standard deviation.
std::pair<double, double> rms_and_stddev(std::span<const double> values);

/// RMS error over Monte Carlo sequences `indices` (seeds derived from
/// base_seed). Deterministic schemes run a single trajectory.
ErrorRecord mc_error(const SpectralField& u0, const ModulationPath& g, const SchemeSpec& spec, int steps,
                     std::span<const std::uint64_t> indices, std::uint64_t base_seed,
                     const ReferenceSolution& reference, const RunConfig& config);

/// Same with indices 0..m-1.
ErrorRecord mc_error(const SpectralField& u0, const ModulationPath& g, const SchemeSpec& spec, int steps, int m,
                     std::uint64_t base_seed, const ReferenceSolution& reference, const RunConfig& config);

struct SlopeFit {
    std::vector<std::pair<double, double>> points;
    double slope = 0.0;
    double intercept = 0.0;
    /// Root mean square of the log-residuals.
    double residual = 0.0;
};

/// Least-squares line through (log x, log y). Needs >= 3 positive pairs.
SlopeFit fit_slope(std::vector<std::pair<double, double>> pairs);

struct ReferenceCheck {
    bool performed = false;
    double gap = 0.0;
    double coarsest_error = 0.0;
    bool consistent = true;
};

struct SchemeSweep {
    Scheme scheme = Scheme::randomized_exponential;
    Scheme reference_scheme = Scheme::strang;
    double reference_tau = 0.0;
    std::vector<ErrorRecord> records;
    std::optional<SlopeFit> fit;
    std::optional<SlopeFit> fit_max;
    ReferenceCheck check;
};

struct SweepResult {
    std::vector<SchemeSweep> schemes;
    bool valid = true;
};

/// mc_error over config.steps for every scheme, with log-log slope fits.
/// Honors config.threads; output does not depend on it.
SweepResult convergence_sweep(const RunConfig& config, const SpectralField& u0, const ModulationPath& g);

/// u_*: U(t+tau, t) u - i int_0^tau U(t+tau, t+r) f(U(t+r, t) u) dr with the
/// integral by the composite midpoint rule on quad_points nodes.
SpectralField compute_frozen_flow_reference(const SpectralField& u, const ModulationPath& g, double t_n,
                                            double tau, int quad_points, bool dealias = false);

struct MartingaleDiagnostic {
    double t_n = 0.0;
    double tau = 0.0;
    double resonance = 0.0;
    int samples = 0;
    /// Sample mean of tau exp(i g(t_n + tau xi) K).
    Complex sample_mean;
    /// int_0^tau exp(i g(t_n + r) K) dr.
    Complex integral;
    Complex difference;
    /// Component-wise sample standard deviations of the single-sample values.
    double stddev_real = 0.0;
    double stddev_imag = 0.0;
    /// RMS over sequences of |E^M| for M = 1..partial_steps (entry M - 1).
    std::vector<double> partial_rms;
    std::optional<SlopeFit> growth;
};

/// Quadrature nodes needed per step to resolve g.
int default_quad_points(const ModulationPath& g, double tau);

/// Probes the stratified Monte Carlo estimate of int exp(i g K) dr and the
/// running error sums E^M over `partial_steps` consecutive steps.
MartingaleDiagnostic martingale_diagnostic(const ModulationPath& g, double resonance, double t_n, double tau,
                                           int m, std::uint64_t seed, int partial_steps = 0,
                                           int quad_points = 0);

} // namespace mnls
