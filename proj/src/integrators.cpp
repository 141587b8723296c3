#include "mnls/integrators.hpp"

#include "mnls/propagators.hpp"

#include <string>

namespace mnls {

namespace {

const Complex kMinusI{0.0, -1.0};

// The step maps written in terms of the modulation values they need, so the
// trajectory driver can reuse node values across steps.
SpectralField randomized(const SpectralField& u, double g_n, double g_mid, double g_next, double tau,
                         bool dealias) {
    auto nonlinear = cubic_nonlinearity(apply_free_propagator(u, g_mid - g_n), dealias);
    auto result = apply_free_propagator(u, g_next - g_n);
    result += (kMinusI * tau) * apply_free_propagator(nonlinear, g_next - g_mid);
    return result;
}

SpectralField classical(const SpectralField& u, double g_n, double g_next, double tau, bool dealias) {
    auto result = apply_free_propagator(u, g_next - g_n);
    result += (kMinusI * tau) * apply_free_propagator(cubic_nonlinearity(u, dealias), g_next - g_n);
    return result;
}

SpectralField strang(const SpectralField& u, double g_n, double g_next, double tau, bool dealias) {
    auto half = nonlinear_phase(u, 0.5 * tau, dealias);
    auto linear = apply_free_propagator(half, g_next - g_n);
    return nonlinear_phase(linear, 0.5 * tau, dealias);
}

void check_step(double tau, double xi) {
    if (!(tau > 0.0)) throw std::invalid_argument("step size must be positive");
    if (!(xi >= 0.0 && xi <= 1.0)) throw std::invalid_argument("xi must lie in [0, 1]");
}

} // namespace

std::string_view to_string(Scheme scheme) {
    switch (scheme) {
    case Scheme::randomized_exponential: return "randomized_exponential";
    case Scheme::classical_exponential: return "classical_exponential";
    case Scheme::strang: return "strang";
    }
    return "unknown";
}

Scheme parse_scheme(std::string_view name) {
    if (name == "randomized_exponential" || name == "randomized") return Scheme::randomized_exponential;
    if (name == "classical_exponential" || name == "classical") return Scheme::classical_exponential;
    if (name == "strang") return Scheme::strang;
    throw std::invalid_argument("unknown scheme '" + std::string(name) + "'");
}

std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

double RandomSequence::operator[](std::uint64_t n) const {
    const std::uint64_t bits = mix64(mix64(seed_) ^ (n * 0xd1342543de82ef95ULL + 0x632be59bd9b4e019ULL));
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

SpectralField step_randomized(const SpectralField& u, const ModulationPath& g, double t_n, double tau,
                              double xi, bool dealias) {
    check_step(tau, xi);
    return randomized(u, g(t_n), g(t_n + tau * xi), g(t_n + tau), tau, dealias);
}

SpectralField step_classical_exponential(const SpectralField& u, const ModulationPath& g, double t_n,
                                         double tau, bool dealias) {
    check_step(tau, 0.0);
    return classical(u, g(t_n), g(t_n + tau), tau, dealias);
}

SpectralField step_strang(const SpectralField& u, const ModulationPath& g, double t_n, double tau,
                          bool dealias) {
    check_step(tau, 0.0);
    return strang(u, g(t_n), g(t_n + tau), tau, dealias);
}

SpectralField step_randomized_twisted(const SpectralField& v, const ModulationPath& g, double t_n,
                                      double tau, double xi, bool dealias) {
    check_step(tau, xi);
    const double g_mid = g(t_n + tau * xi);
    auto nonlinear = cubic_nonlinearity(apply_free_propagator(v, g_mid), dealias);
    return v + (kMinusI * tau) * apply_free_propagator(nonlinear, -g_mid);
}

std::vector<double> sample_nodes(const ModulationPath& g, double T, int N) {
    std::vector<double> values(N + 1);
    for (int n = 0; n <= N; ++n) values[n] = g(n * T / N);
    return values;
}

TrajectoryResult run_trajectory(const SpectralField& u0, const ModulationPath& g, const SchemeSpec& spec,
                                double T, int N, const std::optional<RandomSequence>& xi,
                                const TrajectoryOptions& options) {
    if (N < 1) throw std::invalid_argument("step count must be >= 1");
    if (!(T > 0.0)) throw std::invalid_argument("time horizon must be positive");
    if (options.record_every < 1) throw std::invalid_argument("record_every must be >= 1");
    if (is_randomized(spec.scheme) && !xi)
        throw std::invalid_argument("the randomized scheme needs a random sequence");

    std::vector<double> owned_nodes;
    std::span<const double> nodes = options.node_values;
    if (nodes.empty()) {
        owned_nodes = sample_nodes(g, T, N);
        nodes = owned_nodes;
    } else if (nodes.size() != static_cast<std::size_t>(N) + 1) {
        throw std::invalid_argument("node value count does not match N + 1");
    }

    const double tau = T / N;
    TrajectoryResult result{u0, {}, {}, {}, {}};
    result.times.reserve(N + 1);
    result.times.push_back(0.0);
    if (options.record_states) result.states.push_back(u0);
    if (options.record_norms) result.norms.push_back({h_sigma_norm(u0, 0.0), h_sigma_norm(u0, 1.0)});

    SpectralField u = u0;
    for (int n = 0; n < N; ++n) {
        const double t_n = n * T / N;
        switch (spec.scheme) {
        case Scheme::randomized_exponential: {
            const double draw = (*xi)[static_cast<std::uint64_t>(n)];
            result.xi.push_back(draw);
            u = randomized(u, nodes[n], g(t_n + tau * draw), nodes[n + 1], tau, spec.dealias);
            break;
        }
        case Scheme::classical_exponential:
            u = classical(u, nodes[n], nodes[n + 1], tau, spec.dealias);
            break;
        case Scheme::strang:
            u = strang(u, nodes[n], nodes[n + 1], tau, spec.dealias);
            break;
        }
        if (!u.is_finite())
            throw BlowUpError(n, "non-finite state after step " + std::to_string(n) + " of " +
                                     std::string(to_string(spec.scheme)));
        result.times.push_back((n + 1) * T / N);
        if ((n + 1) % options.record_every != 0) continue;
        if (options.record_states) result.states.push_back(u);
        if (options.record_norms) result.norms.push_back({h_sigma_norm(u, 0.0), h_sigma_norm(u, 1.0)});
    }
    result.final_state = std::move(u);
    return result;
}

} // namespace mnls
