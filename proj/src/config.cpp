#include "mnls/config.hpp"

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <cmath>
#include <set>

namespace mnls {

namespace pt = boost::property_tree;

namespace {

const std::set<std::string> kRunKeys = {
    "dimension", "largest_mode", "sigma", "T", "steps", "m", "dealias", "seed", "reference_seed",
    "refinement", "max_over_steps", "check_reference", "quad_points", "threads"};
const std::set<std::string> kSchemeKeys = {"list", "dealias"};
const std::set<std::string> kModulationKeys = {"kind", "alpha", "modes", "seed", "slope", "intercept",
                                               "amplitude", "frequency", "brownian_steps", "horizon"};

std::string qualify(const std::string& key) {
    if (key.find('.') != std::string::npos) return key;
    if (kRunKeys.count(key)) return "run." + key;
    return key;
}

void check_known(const std::string& qualified) {
    const auto dot = qualified.find('.');
    const std::string section = dot == std::string::npos ? "" : qualified.substr(0, dot);
    const std::string name = dot == std::string::npos ? qualified : qualified.substr(dot + 1);
    const bool known = (section == "run" && kRunKeys.count(name)) ||
                       (section == "scheme" && kSchemeKeys.count(name)) ||
                       (section == "modulation" && kModulationKeys.count(name));
    if (!known) throw ConfigError(qualified, "unknown configuration key");
}

template <class T>
T parse_number(const std::string& key, std::string text) {
    boost::trim(text);
    T value{};
    const char* first = text.data();
    const char* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last || text.empty())
        throw ConfigError(key, "cannot parse '" + text + "' as a number");
    return value;
}

bool parse_bool(const std::string& key, std::string text) {
    boost::trim(text);
    boost::to_lower(text);
    if (text == "true" || text == "1" || text == "on" || text == "yes") return true;
    if (text == "false" || text == "0" || text == "off" || text == "no") return false;
    throw ConfigError(key, "cannot parse '" + text + "' as a boolean");
}

std::vector<std::string> split_list(std::string text) {
    std::vector<std::string> items;
    boost::split(items, text, boost::is_any_of(",; "), boost::token_compress_on);
    std::erase_if(items, [](const std::string& s) { return s.empty(); });
    return items;
}

class Reader {
public:
    explicit Reader(const pt::ptree& tree) : tree_(tree) {}

    template <class F>
    void with(const std::string& key, F&& apply) const {
        if (auto value = tree_.get_optional<std::string>(pt::ptree::path_type(key, '.'))) {
            try {
                apply(key, *value);
            } catch (const ConfigError&) {
                throw;
            } catch (const std::exception& e) {
                throw ConfigError(key, e.what());
            }
        }
    }

private:
    const pt::ptree& tree_;
};

} // namespace

ModulationPath build_modulation(const ModulationSpec& spec, double run_horizon) {
    const double horizon = spec.horizon.value_or(run_horizon);
    switch (spec.kind) {
    case PathKind::affine:
        return make_smooth_path(SmoothKind::affine,
                                {.slope = spec.slope, .intercept = spec.intercept, .horizon = horizon});
    case PathKind::sine:
        return make_smooth_path(SmoothKind::sine,
                                {.amplitude = spec.amplitude, .frequency = spec.frequency, .horizon = horizon});
    case PathKind::rough_fourier: {
        auto path = make_rough_path(spec.alpha, spec.modes, spec.seed, horizon);
        return spec.amplitude == 1.0 ? path : path.scaled(spec.amplitude);
    }
    case PathKind::brownian: {
        auto path = make_brownian_path(spec.brownian_steps, horizon, spec.seed);
        return spec.amplitude == 1.0 ? path : path.scaled(spec.amplitude);
    }
    }
    throw std::logic_error("unhandled modulation kind");
}

void validate(const RunConfig& c) {
    if (c.dimension < 1) throw ConfigError("run.dimension", "must be >= 1");
    if (c.largest_mode < 1) throw ConfigError("run.largest_mode", "must be >= 1");
    if (!(c.sigma >= 0.0)) throw ConfigError("run.sigma", "must be >= 0");
    if (!(c.horizon > 0.0) || !std::isfinite(c.horizon)) throw ConfigError("run.T", "must be positive");
    if (c.steps.empty()) throw ConfigError("run.steps", "needs at least one step count");
    for (int n : c.steps)
        if (n < 1) throw ConfigError("run.steps", "step counts must be >= 1");
    if (c.sequences < 1) throw ConfigError("run.m", "must be >= 1");
    if (c.schemes.empty()) throw ConfigError("scheme.list", "needs at least one scheme");
    if (c.refinement < 16) throw ConfigError("run.refinement", "must be >= 16");
    if (c.quad_points < 2) throw ConfigError("run.quad_points", "must be >= 2");
    if (c.threads < 0) throw ConfigError("run.threads", "must be >= 0");

    const auto& mod = c.modulation;
    if (mod.kind == PathKind::rough_fourier) {
        if (!(mod.alpha > 0.0 && mod.alpha < 1.0)) throw ConfigError("modulation.alpha", "must lie in (0, 1)");
        if (mod.modes < 2 || mod.modes % 2 != 0) throw ConfigError("modulation.modes", "must be even and >= 2");
    }
    if (mod.kind == PathKind::brownian && mod.brownian_steps < 1)
        throw ConfigError("modulation.brownian_steps", "must be >= 1");
    if (mod.horizon && !(*mod.horizon >= c.horizon))
        throw ConfigError("modulation.horizon", "must cover the run horizon T");
}

RunConfig parse_config(const std::optional<std::filesystem::path>& file,
                       const std::map<std::string, std::string>& overrides) {
    pt::ptree tree;
    if (file) {
        if (!std::filesystem::exists(*file))
            throw ConfigError("", "configuration file not found: " + file->string());
        try {
            pt::read_ini(file->string(), tree);
        } catch (const pt::ini_parser_error& e) {
            throw ConfigError("", "cannot parse " + file->string() + ": " + e.message());
        }
        for (const auto& [section, children] : tree) {
            if (children.empty()) {
                check_known(qualify(section));
                continue;
            }
            for (const auto& [name, value] : children) check_known(section + "." + name);
        }
        // Top-level keys belong to [run].
        pt::ptree normalized;
        for (const auto& [section, children] : tree) {
            if (children.empty())
                normalized.put(pt::ptree::path_type(qualify(section), '.'), children.data());
            else
                for (const auto& [name, value] : children)
                    normalized.put(pt::ptree::path_type(section + "." + name, '.'), value.data());
        }
        tree = std::move(normalized);
    }
    for (const auto& [key, value] : overrides) {
        const auto qualified = qualify(key);
        check_known(qualified);
        tree.put(pt::ptree::path_type(qualified, '.'), value);
    }

    RunConfig c;
    const Reader r(tree);
    r.with("run.dimension", [&](auto& k, auto& v) { c.dimension = parse_number<int>(k, v); });
    r.with("run.largest_mode", [&](auto& k, auto& v) { c.largest_mode = parse_number<int>(k, v); });
    r.with("run.sigma", [&](auto& k, auto& v) { c.sigma = parse_number<double>(k, v); });
    r.with("run.T", [&](auto& k, auto& v) { c.horizon = parse_number<double>(k, v); });
    r.with("run.steps", [&](auto& k, auto& v) {
        c.steps.clear();
        for (auto& item : split_list(v)) c.steps.push_back(parse_number<int>(k, item));
    });
    r.with("run.m", [&](auto& k, auto& v) { c.sequences = parse_number<int>(k, v); });
    r.with("run.dealias", [&](auto& k, auto& v) { c.dealias = parse_bool(k, v); });
    r.with("scheme.dealias", [&](auto& k, auto& v) { c.dealias = parse_bool(k, v); });
    r.with("run.seed", [&](auto& k, auto& v) { c.seed = parse_number<std::uint64_t>(k, v); });
    r.with("run.reference_seed", [&](auto& k, auto& v) { c.reference_seed = parse_number<std::uint64_t>(k, v); });
    r.with("run.refinement", [&](auto& k, auto& v) { c.refinement = parse_number<int>(k, v); });
    r.with("run.max_over_steps", [&](auto& k, auto& v) { c.max_over_steps = parse_bool(k, v); });
    r.with("run.check_reference", [&](auto& k, auto& v) { c.check_reference = parse_bool(k, v); });
    r.with("run.quad_points", [&](auto& k, auto& v) { c.quad_points = parse_number<int>(k, v); });
    r.with("run.threads", [&](auto& k, auto& v) { c.threads = parse_number<int>(k, v); });
    r.with("scheme.list", [&](auto&, auto& v) {
        c.schemes.clear();
        for (auto& item : split_list(v)) c.schemes.push_back(parse_scheme(item));
    });

    auto& mod = c.modulation;
    r.with("modulation.kind", [&](auto&, auto& v) { mod.kind = parse_path_kind(boost::trim_copy(v)); });
    r.with("modulation.alpha", [&](auto& k, auto& v) { mod.alpha = parse_number<double>(k, v); });
    r.with("modulation.modes", [&](auto& k, auto& v) { mod.modes = parse_number<int>(k, v); });
    r.with("modulation.seed", [&](auto& k, auto& v) { mod.seed = parse_number<std::uint64_t>(k, v); });
    r.with("modulation.slope", [&](auto& k, auto& v) { mod.slope = parse_number<double>(k, v); });
    r.with("modulation.intercept", [&](auto& k, auto& v) { mod.intercept = parse_number<double>(k, v); });
    r.with("modulation.amplitude", [&](auto& k, auto& v) { mod.amplitude = parse_number<double>(k, v); });
    r.with("modulation.frequency", [&](auto& k, auto& v) { mod.frequency = parse_number<double>(k, v); });
    r.with("modulation.brownian_steps", [&](auto& k, auto& v) { mod.brownian_steps = parse_number<int>(k, v); });
    r.with("modulation.horizon", [&](auto& k, auto& v) { mod.horizon = parse_number<double>(k, v); });

    validate(c);
    return c;
}

nlohmann::json to_json(const ModulationSpec& spec) {
    nlohmann::json j{{"kind", std::string(to_string(spec.kind))}};
    switch (spec.kind) {
    case PathKind::affine:
        j["slope"] = spec.slope;
        j["intercept"] = spec.intercept;
        break;
    case PathKind::sine:
        j["amplitude"] = spec.amplitude;
        j["frequency"] = spec.frequency;
        break;
    case PathKind::rough_fourier:
        j["alpha"] = spec.alpha;
        j["modes"] = spec.modes;
        j["seed"] = spec.seed;
        j["amplitude"] = spec.amplitude;
        break;
    case PathKind::brownian:
        j["brownian_steps"] = spec.brownian_steps;
        j["seed"] = spec.seed;
        j["amplitude"] = spec.amplitude;
        break;
    }
    j["horizon"] = spec.horizon ? nlohmann::json(*spec.horizon) : nlohmann::json(nullptr);
    return j;
}

nlohmann::json to_json(const RunConfig& c) {
    std::vector<std::string> schemes;
    for (auto s : c.schemes) schemes.emplace_back(to_string(s));
    return {
        {"run",
         {{"dimension", c.dimension},
          {"largest_mode", c.largest_mode},
          {"sigma", c.sigma},
          {"T", c.horizon},
          {"steps", c.steps},
          {"m", c.sequences},
          {"dealias", c.dealias},
          {"seed", c.seed},
          {"reference_seed", c.reference_seed},
          {"refinement", c.refinement},
          {"max_over_steps", c.max_over_steps},
          {"check_reference", c.check_reference},
          {"quad_points", c.quad_points},
          {"threads", c.threads}}},
        {"scheme", {{"list", schemes}}},
        {"modulation", to_json(c.modulation)},
        {"initial_datum", "cos(x)/(2-sin(x))"},
    };
}

} // namespace mnls
