#pragma once

#include "mnls/modulation.hpp"
#include "mnls/spectral.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

namespace mnls {

enum class Scheme { randomized_exponential, classical_exponential, strang };

std::string_view to_string(Scheme scheme);
Scheme parse_scheme(std::string_view name);
inline bool is_randomized(Scheme scheme) { return scheme == Scheme::randomized_exponential; }

struct SchemeSpec {
    Scheme scheme = Scheme::randomized_exponential;
    bool dealias = false;
};

/// 64-bit finalizer of SplitMix64.
std::uint64_t mix64(std::uint64_t x);

/// Counter-addressed stream of uniform draws in [0, 1): draw n depends only
/// on (seed, n).
class RandomSequence {
public:
    explicit RandomSequence(std::uint64_t seed) : seed_(seed) {}

    std::uint64_t seed() const { return seed_; }
    double operator[](std::uint64_t n) const;

private:
    std::uint64_t seed_;
};

/// Raised when a trajectory produces non-finite values.
class BlowUpError : public std::runtime_error {
public:
    BlowUpError(int step, const std::string& what) : std::runtime_error(what), step_(step) {}
    int step() const { return step_; }

private:
    int step_;
};

/// u^{n+1} = U(t_n + tau, t_n) u - i tau U(t_n + tau, t_n + tau xi)[ f(U(t_n + tau xi, t_n) u) ].
SpectralField step_randomized(const SpectralField& u, const ModulationPath& g, double t_n, double tau,
                              double xi, bool dealias = false);

/// u^{n+1} = U(t_n + tau, t_n) (u - i tau f(u)).
SpectralField step_classical_exponential(const SpectralField& u, const ModulationPath& g, double t_n,
                                         double tau, bool dealias = false);

/// Half nonlinear phase, full linear flow over [t_n, t_n + tau], half nonlinear phase.
SpectralField step_strang(const SpectralField& u, const ModulationPath& g, double t_n, double tau,
                          bool dealias = false);

/// The randomized step in the twisted variable v = S(t)^{-1} u:
/// v - i tau S(s)^{-1}[ f(S(s) v) ] with s = t_n + tau xi.
SpectralField step_randomized_twisted(const SpectralField& v, const ModulationPath& g, double t_n,
                                      double tau, double xi, bool dealias = false);

struct StepNorms {
    double h0 = 0.0;
    double h1 = 0.0;
};

struct TrajectoryOptions {
    bool record_states = false;
    bool record_norms = false;
    /// Record states and norms only at steps that are multiples of this.
    int record_every = 1;
    /// g(t_n) for n = 0..N, if the caller already has them.
    std::span<const double> node_values = {};
};

struct TrajectoryResult {
    SpectralField final_state;
    std::vector<double> times;
    std::vector<SpectralField> states;
    std::vector<StepNorms> norms;
    /// Draw n was consumed by step n (randomized scheme only).
    std::vector<double> xi;
};

/// g at the equidistant nodes t_n = n T / N, n = 0..N.
std::vector<double> sample_nodes(const ModulationPath& g, double T, int N);

/// Iterates the selected step map over N equal steps of [0, T]. The
/// randomized scheme requires `xi`. Throws BlowUpError on non-finite output.
TrajectoryResult run_trajectory(const SpectralField& u0, const ModulationPath& g, const SchemeSpec& spec,
                                double T, int N, const std::optional<RandomSequence>& xi,
                                const TrajectoryOptions& options = {});

} // namespace mnls
