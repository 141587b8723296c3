#pragma once

#include "mnls/experiments.hpp"
#include "mnls/integrators.hpp"
#include "mnls/modulation.hpp"
#include "mnls/spectral.hpp"

#include "json.hpp"

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>

namespace mnls {

/// Fixed 15-significant-digit rendering used by every CSV writer.
std::string format_number(double value);

/// index, x, Re u, Im u on the physical grid (d = 1).
void write_snapshot_csv(std::ostream& out, const SpectralField& field);
nlohmann::json snapshot_metadata(const SpectralField& field, double time, std::string_view scheme);

/// step, t, H^0 norm, H^1 norm, consumed xi (empty for deterministic schemes).
void write_norm_log_csv(std::ostream& out, const TrajectoryResult& result);

/// scheme, tau, N, m, rms_error, stddev, excluded_count.
void write_sweep_csv(std::ostream& out, const SweepResult& sweep);
/// scheme, log_tau, log_error.
void write_plot_csv(std::ostream& out, const SweepResult& sweep);
nlohmann::json sweep_summary(const SweepResult& sweep);

/// t, g(t) at `points` equispaced times of [0, horizon].
void write_path_csv(std::ostream& out, const ModulationPath& g, int points, double horizon);

nlohmann::json to_json(const MartingaleDiagnostic& diagnostic);

void write_json(const std::filesystem::path& path, const nlohmann::json& value);
void write_text(const std::filesystem::path& path, const std::string& text);

} // namespace mnls
