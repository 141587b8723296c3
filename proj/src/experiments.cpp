#include "mnls/experiments.hpp"

#include "mnls/propagators.hpp"

#include <tbb/blocked_range.h>
#include <tbb/global_control.h>
#include <tbb/parallel_for.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <numeric>
#include <string>

namespace mnls {

namespace {

const Complex kMinusI{0.0, -1.0};

struct Outcome {
    bool completed = false;
    double final_error = 0.0;
    double max_error = 0.0;
};

Complex oscillatory_integral(const ModulationPath& g, double resonance, double t, double tau, int nodes) {
    const double h = tau / nodes;
    Complex sum = 0.0;
    for (int q = 0; q < nodes; ++q) sum += std::polar(1.0, resonance * g(t + (q + 0.5) * h));
    return h * sum;
}

} // namespace

SpectralField paper_initial_datum(const Grid& grid) {
    if (grid.dimension() != 1) throw std::invalid_argument("the initial datum is defined for d = 1");
    return sample_field(grid, [](double x) { return Complex(std::cos(x) / (2.0 - std::sin(x))); });
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) { return base ^ mix64(index); }

Scheme reference_scheme(PathKind kind, Scheme under_test) {
    if (kind == PathKind::affine || kind == PathKind::sine) return Scheme::strang;
    return under_test;
}

ReferenceSolution compute_reference(const SpectralField& u0, const ModulationPath& g, const RunConfig& config,
                                    Scheme under_test, int refinement, bool keep_checkpoints) {
    if (refinement < 16) throw std::invalid_argument("reference refinement must be >= 16");
    const int finest = *std::max_element(config.steps.begin(), config.steps.end());
    const int steps = finest * refinement;
    const Scheme scheme = reference_scheme(g.kind(), under_test);

    std::optional<RandomSequence> xi;
    if (is_randomized(scheme)) xi.emplace(config.reference_seed);
    TrajectoryOptions options;
    options.record_states = keep_checkpoints;
    options.record_every = refinement;
    auto run = run_trajectory(u0, g, {scheme, config.dealias}, config.horizon, steps, xi, options);

    return ReferenceSolution{
        .scheme = scheme,
        .tau = config.horizon / steps,
        .steps = steps,
        .refinement = refinement,
        .final_state = std::move(run.final_state),
        .checkpoint_steps = keep_checkpoints ? finest : 0,
        .checkpoints = std::move(run.states),
    };
}

std::pair<double, double> rms_and_stddev(std::span<const double> values) {
    if (values.empty()) return {std::nan(""), std::nan("")};
    double sum_sq = 0.0;
    double sum = 0.0;
    for (double v : values) {
        sum_sq += v * v;
        sum += v;
    }
    const double n = static_cast<double>(values.size());
    const double rms = std::sqrt(sum_sq / n);
    if (values.size() < 2) return {rms, 0.0};
    const double mean = sum / n;
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    return {rms, std::sqrt(var / (n - 1.0))};
}

ErrorRecord mc_error(const SpectralField& u0, const ModulationPath& g, const SchemeSpec& spec, int steps,
                     std::span<const std::uint64_t> indices, std::uint64_t base_seed,
                     const ReferenceSolution& reference, const RunConfig& config) {
    if (indices.empty()) throw std::invalid_argument("mc_error needs at least one sequence");
    if (!(reference.final_state.grid() == u0.grid()))
        throw std::invalid_argument("reference grid does not match the initial datum");

    const bool track_max = config.max_over_steps;
    int stride = 0;
    if (track_max) {
        if (reference.checkpoints.empty() || reference.checkpoint_steps % steps != 0)
            throw std::invalid_argument("max-over-steps errors need reference checkpoints on a grid containing "
                                        "t_n = n T / " + std::to_string(steps));
        stride = reference.checkpoint_steps / steps;
    }

    const bool randomized = is_randomized(spec.scheme);
    const std::size_t count = randomized ? indices.size() : 1;
    const auto nodes = sample_nodes(g, config.horizon, steps);

    std::vector<Outcome> outcomes(count);
    tbb::parallel_for(tbb::blocked_range<std::size_t>(0, count, 1), [&](const auto& range) {
        for (std::size_t i = range.begin(); i != range.end(); ++i) {
            std::optional<RandomSequence> xi;
            if (randomized) xi.emplace(derive_seed(base_seed, indices[i]));
            TrajectoryOptions options;
            options.node_values = nodes;
            options.record_states = track_max;
            try {
                auto run = run_trajectory(u0, g, spec, config.horizon, steps, xi, options);
                Outcome out;
                out.completed = true;
                out.final_error = h_sigma_norm(reference.final_state - run.final_state, config.sigma);
                if (track_max) {
                    for (int n = 0; n <= steps; ++n) {
                        const double e =
                            h_sigma_norm(reference.checkpoints[n * stride] - run.states[n], config.sigma);
                        out.max_error = std::max(out.max_error, e);
                    }
                }
                outcomes[i] = out;
            } catch (const BlowUpError&) {
                outcomes[i] = Outcome{};
            }
        }
    });

    ErrorRecord record;
    record.scheme = spec.scheme;
    record.steps = steps;
    record.tau = config.horizon / steps;
    record.sequences = static_cast<int>(count);
    for (const auto& out : outcomes) {
        if (!out.completed) {
            ++record.excluded;
            continue;
        }
        record.errors.push_back(out.final_error);
        if (track_max) record.max_errors.push_back(out.max_error);
    }
    std::tie(record.rms, record.stddev) = rms_and_stddev(record.errors);
    if (track_max) record.rms_max = rms_and_stddev(record.max_errors).first;
    record.valid = !record.errors.empty() && 10 * record.excluded <= static_cast<int>(count);
    return record;
}

ErrorRecord mc_error(const SpectralField& u0, const ModulationPath& g, const SchemeSpec& spec, int steps, int m,
                     std::uint64_t base_seed, const ReferenceSolution& reference, const RunConfig& config) {
    if (m < 1) throw std::invalid_argument("mc_error needs m >= 1");
    std::vector<std::uint64_t> indices(m);
    std::iota(indices.begin(), indices.end(), std::uint64_t{0});
    return mc_error(u0, g, spec, steps, indices, base_seed, reference, config);
}

SlopeFit fit_slope(std::vector<std::pair<double, double>> pairs) {
    if (pairs.size() < 3) throw std::invalid_argument("slope fit needs at least 3 points");
    for (const auto& [x, y] : pairs) {
        if (!(x > 0.0) || !(y > 0.0)) throw std::invalid_argument("slope fit needs positive values");
    }
    std::sort(pairs.begin(), pairs.end());

    const double n = static_cast<double>(pairs.size());
    double mean_x = 0.0, mean_y = 0.0;
    for (const auto& [x, y] : pairs) {
        mean_x += std::log(x);
        mean_y += std::log(y);
    }
    mean_x /= n;
    mean_y /= n;
    double sxx = 0.0, sxy = 0.0;
    for (const auto& [x, y] : pairs) {
        const double dx = std::log(x) - mean_x;
        sxx += dx * dx;
        sxy += dx * (std::log(y) - mean_y);
    }
    if (sxx == 0.0) throw std::invalid_argument("slope fit needs distinct abscissae");

    SlopeFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = mean_y - fit.slope * mean_x;
    double ss = 0.0;
    for (const auto& [x, y] : pairs) {
        const double r = std::log(y) - (fit.intercept + fit.slope * std::log(x));
        ss += r * r;
    }
    fit.residual = std::sqrt(ss / n);
    fit.points = std::move(pairs);
    return fit;
}

SweepResult convergence_sweep(const RunConfig& config, const SpectralField& u0, const ModulationPath& g) {
    validate(config);
    std::unique_ptr<tbb::global_control> control;
    if (config.threads > 0)
        control = std::make_unique<tbb::global_control>(tbb::global_control::max_allowed_parallelism,
                                                        static_cast<std::size_t>(config.threads));

    std::map<std::pair<Scheme, int>, ReferenceSolution> references;
    auto reference_for = [&](Scheme scheme, int refinement) -> const ReferenceSolution& {
        const auto key = std::make_pair(reference_scheme(g.kind(), scheme), refinement);
        auto it = references.find(key);
        if (it == references.end()) {
            it = references
                     .emplace(key, compute_reference(u0, g, config, scheme, refinement,
                                                     config.max_over_steps && refinement == config.refinement))
                     .first;
        }
        return it->second;
    };

    SweepResult result;
    for (Scheme scheme : config.schemes) {
        const SchemeSpec spec{scheme, config.dealias};
        const auto& reference = reference_for(scheme, config.refinement);

        SchemeSweep sweep;
        sweep.scheme = scheme;
        sweep.reference_scheme = reference.scheme;
        sweep.reference_tau = reference.tau;
        for (int steps : config.steps) {
            sweep.records.push_back(mc_error(u0, g, spec, steps, config.sequences,
                                             derive_seed(config.seed, static_cast<std::uint64_t>(scheme)),
                                             reference, config));
        }

        std::vector<std::pair<double, double>> pairs, pairs_max;
        for (const auto& r : sweep.records) {
            if (!r.valid || !(r.rms > 0.0)) continue;
            pairs.emplace_back(r.tau, r.rms);
            if (r.rms_max && *r.rms_max > 0.0) pairs_max.emplace_back(r.tau, *r.rms_max);
        }
        if (pairs.size() >= 3) sweep.fit = fit_slope(pairs);
        if (pairs_max.size() >= 3) sweep.fit_max = fit_slope(pairs_max);

        if (config.check_reference) {
            const auto& finer = reference_for(scheme, 2 * config.refinement);
            sweep.check.performed = true;
            sweep.check.gap = h_sigma_norm(reference.final_state - finer.final_state, config.sigma);
            for (const auto& r : sweep.records)
                if (r.valid) sweep.check.coarsest_error = std::max(sweep.check.coarsest_error, r.rms);
            sweep.check.consistent = sweep.check.gap < 0.01 * sweep.check.coarsest_error;
        }

        for (const auto& r : sweep.records) result.valid = result.valid && r.valid;
        result.valid = result.valid && sweep.check.consistent;
        result.schemes.push_back(std::move(sweep));
    }
    return result;
}

SpectralField compute_frozen_flow_reference(const SpectralField& u, const ModulationPath& g, double t_n,
                                            double tau, int quad_points, bool dealias) {
    if (quad_points < 2) throw std::invalid_argument("quadrature needs at least 2 points");
    if (!(tau > 0.0)) throw std::invalid_argument("step size must be positive");
    const double g_start = g(t_n);
    const double g_end = g(t_n + tau);
    const double h = tau / quad_points;

    auto integral = SpectralField::zero(u.grid());
    for (int q = 0; q < quad_points; ++q) {
        const double g_node = g(t_n + (q + 0.5) * h);
        integral += apply_free_propagator(cubic_nonlinearity(apply_free_propagator(u, g_node - g_start), dealias),
                                          g_end - g_node);
    }
    auto result = apply_free_propagator(u, g_end - g_start);
    result += (kMinusI * h) * integral;
    return result;
}

int default_quad_points(const ModulationPath& g, double tau) {
    const auto samples = g.samples();
    if (samples.empty()) return 4096;
    const double per_step = 8.0 * static_cast<double>(samples.size()) * tau / g.horizon();
    return std::max(256, static_cast<int>(std::ceil(per_step)));
}

MartingaleDiagnostic martingale_diagnostic(const ModulationPath& g, double resonance, double t_n, double tau,
                                           int m, std::uint64_t seed, int partial_steps, int quad_points) {
    if (m < 1) throw std::invalid_argument("martingale diagnostic needs m >= 1");
    if (!(tau > 0.0)) throw std::invalid_argument("step size must be positive");
    if (partial_steps < 0) throw std::invalid_argument("partial step count must be >= 0");
    if (quad_points == 0) quad_points = default_quad_points(g, tau);

    MartingaleDiagnostic d;
    d.t_n = t_n;
    d.tau = tau;
    d.resonance = resonance;
    d.samples = m;

    const RandomSequence xi(seed);
    std::vector<Complex> values(m);
    for (int j = 0; j < m; ++j)
        values[j] = tau * std::polar(1.0, resonance * g(t_n + tau * xi[static_cast<std::uint64_t>(j)]));
    Complex sum = 0.0;
    for (const auto& v : values) sum += v;
    d.sample_mean = sum / static_cast<double>(m);
    if (m > 1) {
        double var_re = 0.0, var_im = 0.0;
        for (const auto& v : values) {
            var_re += (v.real() - d.sample_mean.real()) * (v.real() - d.sample_mean.real());
            var_im += (v.imag() - d.sample_mean.imag()) * (v.imag() - d.sample_mean.imag());
        }
        d.stddev_real = std::sqrt(var_re / (m - 1));
        d.stddev_imag = std::sqrt(var_im / (m - 1));
    }
    d.integral = oscillatory_integral(g, resonance, t_n, tau, quad_points);
    d.difference = d.sample_mean - d.integral;

    if (partial_steps == 0) return d;

    std::vector<Complex> integrals(partial_steps);
    tbb::parallel_for(0, partial_steps, [&](int n) {
        integrals[n] = oscillatory_integral(g, resonance, t_n + n * tau, tau, quad_points);
    });

    // Squared |E^M| per sequence, reduced in sequence order afterwards.
    std::vector<std::vector<double>> squared(m, std::vector<double>(partial_steps));
    tbb::parallel_for(0, m, [&](int k) {
        const RandomSequence stream(derive_seed(seed, static_cast<std::uint64_t>(k)));
        Complex error = 0.0;
        for (int n = 0; n < partial_steps; ++n) {
            const double t = t_n + n * tau + tau * stream[static_cast<std::uint64_t>(n)];
            error += integrals[n] - tau * std::polar(1.0, resonance * g(t));
            squared[k][n] = std::norm(error);
        }
    });
    d.partial_rms.assign(partial_steps, 0.0);
    for (int n = 0; n < partial_steps; ++n) {
        double total = 0.0;
        for (int k = 0; k < m; ++k) total += squared[k][n];
        d.partial_rms[n] = std::sqrt(total / m);
    }

    std::vector<std::pair<double, double>> growth;
    for (int count = 16; count <= partial_steps; count *= 2)
        if (d.partial_rms[count - 1] > 0.0) growth.emplace_back(count, d.partial_rms[count - 1]);
    if (growth.size() >= 3) d.growth = fit_slope(growth);
    return d;
}

} // namespace mnls
