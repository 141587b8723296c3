#pragma once

#include "mnls/modulation.hpp"
#include "mnls/spectral.hpp"

namespace mnls {

/// The Fourier multiplier exp(i theta d_x^2): mode k is multiplied by
/// exp(-i theta |k|^2).
struct PhaseMultiplier {
    double theta = 0.0;

    Complex entry(double k_norm_sq) const { return std::polar(1.0, -theta * k_norm_sq); }
};

SpectralField apply_free_propagator(const SpectralField& field, double theta);

/// U(t, r) f = exp(i [g(t) - g(r)] d_x^2) f.
SpectralField apply_evolution(const SpectralField& field, const ModulationPath& g, double t, double r);

/// v = S(t)^{-1} u with S(t) = exp(i g(t) d_x^2).
SpectralField to_twisted(const SpectralField& field, const ModulationPath& g, double t);

/// u = S(t) v.
SpectralField from_twisted(const SpectralField& field, const ModulationPath& g, double t);

} // namespace mnls
