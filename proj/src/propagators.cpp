#include "mnls/propagators.hpp"

namespace mnls {

SpectralField apply_free_propagator(const SpectralField& field, double theta) {
    const PhaseMultiplier multiplier{theta};
    const auto norm_sq = field.grid().wavenumber_norm_sq();
    const auto in = field.coefficients();
    std::vector<Complex> out(in.size());
    for (std::size_t i = 0; i < in.size(); ++i) out[i] = multiplier.entry(norm_sq[i]) * in[i];
    return SpectralField(field.grid(), std::move(out));
}

SpectralField apply_evolution(const SpectralField& field, const ModulationPath& g, double t, double r) {
    return apply_free_propagator(field, g(t) - g(r));
}

SpectralField to_twisted(const SpectralField& field, const ModulationPath& g, double t) {
    return apply_free_propagator(field, -g(t));
}

SpectralField from_twisted(const SpectralField& field, const ModulationPath& g, double t) {
    return apply_free_propagator(field, g(t));
}

} // namespace mnls
