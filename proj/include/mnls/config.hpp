#pragma once

#include "mnls/integrators.hpp"
#include "mnls/modulation.hpp"

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mnls {

/// Validation failure tied to a configuration key.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string key, const std::string& message)
        : std::runtime_error(key.empty() ? message : key + ": " + message), key_(std::move(key)) {}
    const std::string& key() const { return key_; }

private:
    std::string key_;
};

struct ModulationSpec {
    PathKind kind = PathKind::sine;
    double alpha = 0.5;
    int modes = 1 << 14;
    std::uint64_t seed = 7;
    double slope = 1.0;
    double intercept = 0.0;
    double amplitude = 1.0;
    double frequency = 1.0;
    int brownian_steps = 1 << 14;
    /// Defaults to the run horizon.
    std::optional<double> horizon;
};

ModulationPath build_modulation(const ModulationSpec& spec, double run_horizon);

/// Parameters of a convergence experiment. Defaults follow the published
/// protocol: K = 2^7, T = 1, H^1 errors, 100 sequences.
struct RunConfig {
    int dimension = 1;
    int largest_mode = 128;
    double sigma = 1.0;
    double horizon = 1.0;
    std::vector<int> steps = {16, 32, 64, 128, 256, 512, 1024};
    int sequences = 100;
    std::vector<Scheme> schemes = {Scheme::randomized_exponential, Scheme::classical_exponential,
                                   Scheme::strang};
    bool dealias = false;
    ModulationSpec modulation;
    std::uint64_t seed = 1;
    std::uint64_t reference_seed = 0x5eed;
    int refinement = 64;
    bool max_over_steps = false;
    bool check_reference = true;
    int quad_points = 4096;
    /// 0 = all available cores.
    int threads = 0;
};

/// Throws ConfigError naming the first offending key.
void validate(const RunConfig& config);

/// Reads an INI-style file (optional) and applies `overrides` on top. Keys
/// use dotted section names, e.g. "run.m" or "modulation.alpha"; keys in the
/// [run] section may also be given without the prefix.
RunConfig parse_config(const std::optional<std::filesystem::path>& file,
                       const std::map<std::string, std::string>& overrides = {});

nlohmann::json to_json(const RunConfig& config);
nlohmann::json to_json(const ModulationSpec& spec);

} // namespace mnls
