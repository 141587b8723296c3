// Command-line driver: simulate, convergence, genmod, diagnose.

#include "mnls/config.hpp"
#include "mnls/experiments.hpp"
#include "mnls/io.hpp"

#include "CLI11.hpp"

#include <chrono>
#include <filesystem>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace mnls;

namespace {

enum ExitCode { kSuccess = 0, kValidationFailure = 1, kNumericalFailure = 2 };

struct CommonOptions {
    std::string config_file;
    std::string output_dir = ".";
    std::vector<std::string> sets;
    std::map<std::string, std::string> overrides;
};

void add_common(CLI::App* app, CommonOptions& common) {
    app->add_option("-c,--config", common.config_file, "INI configuration file");
    app->add_option("-o,--out", common.output_dir, "output directory");
    app->add_option("--set", common.sets, "override any key, e.g. --set modulation.modes=4096");

    auto flag = [&](const std::string& name, const std::string& key, const std::string& help) {
        app->add_option_function<std::string>(
            name, [&common, key](const std::string& v) { common.overrides[key] = v; }, help);
    };
    flag("--seed", "run.seed", "base seed of the Monte Carlo sequences");
    flag("--reference-seed", "run.reference_seed", "seed of the randomized reference run");
    flag("--m", "run.m", "number of Monte Carlo sequences");
    flag("--N", "run.steps", "step counts, comma separated");
    flag("--T", "run.T", "time horizon");
    flag("--K", "run.largest_mode", "largest Fourier mode");
    flag("--refinement", "run.refinement", "reference refinement factor");
    flag("--threads", "run.threads", "parallelism degree (0 = all cores)");
    flag("--schemes", "scheme.list", "schemes, comma separated");
    flag("--kind", "modulation.kind", "modulation kind: affine, sine, rough, brownian");
    flag("--alpha", "modulation.alpha", "regularity of the rough modulation");
    flag("--modulation-seed", "modulation.seed", "seed of the rough or brownian modulation");
}

RunConfig load(CommonOptions& common) {
    for (const auto& item : common.sets) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw ConfigError(item, "--set expects key=value");
        common.overrides[item.substr(0, eq)] = item.substr(eq + 1);
    }
    std::optional<fs::path> file;
    if (!common.config_file.empty()) file = common.config_file;
    return parse_config(file, common.overrides);
}

fs::path prepare_output(const CommonOptions& common) {
    fs::path dir(common.output_dir);
    fs::create_directories(dir);
    return dir;
}

nlohmann::json manifest_base(const std::string& command, const RunConfig& config) {
    return {{"command", command}, {"config", to_json(config)}};
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

int run_simulate(CommonOptions& common, const std::string& scheme_name, int steps, int record_every) {
    const auto start = std::chrono::steady_clock::now();
    const RunConfig config = load(common);
    const auto dir = prepare_output(common);

    const Scheme scheme = scheme_name.empty() ? config.schemes.front() : parse_scheme(scheme_name);
    const int n = steps > 0 ? steps : config.steps.front();
    const auto grid = make_grid(config.dimension, config.largest_mode);
    const auto u0 = paper_initial_datum(grid);
    const auto g = build_modulation(config.modulation, config.horizon);

    std::optional<RandomSequence> xi;
    if (is_randomized(scheme)) xi.emplace(config.seed);
    TrajectoryOptions options;
    options.record_norms = true;
    options.record_every = record_every;

    auto manifest = manifest_base("simulate", config);
    manifest["scheme"] = std::string(to_string(scheme));
    manifest["N"] = n;
    manifest["sequence_seed"] = config.seed;
    try {
        const auto result = run_trajectory(u0, g, {scheme, config.dealias}, config.horizon, n, xi, options);
        std::ostringstream snapshot, norms;
        write_snapshot_csv(snapshot, result.final_state);
        write_norm_log_csv(norms, result);
        write_text(dir / "snapshot.csv", snapshot.str());
        write_json(dir / "snapshot.json", snapshot_metadata(result.final_state, config.horizon, to_string(scheme)));
        write_text(dir / "norms.csv", norms.str());
        manifest["outputs"] = {"snapshot.csv", "snapshot.json", "norms.csv"};
        manifest["valid"] = true;
    } catch (const BlowUpError& e) {
        manifest["valid"] = false;
        manifest["partial"] = true;
        manifest["blow_up_step"] = e.step();
        manifest["wall_clock_seconds"] = seconds_since(start);
        write_json(dir / "manifest.json", manifest);
        std::cerr << "error: " << e.what() << '\n';
        return kNumericalFailure;
    }
    manifest["wall_clock_seconds"] = seconds_since(start);
    write_json(dir / "manifest.json", manifest);
    return kSuccess;
}

int run_convergence(CommonOptions& common) {
    const auto start = std::chrono::steady_clock::now();
    const RunConfig config = load(common);
    const auto dir = prepare_output(common);

    const auto grid = make_grid(config.dimension, config.largest_mode);
    const auto u0 = paper_initial_datum(grid);
    const auto g = build_modulation(config.modulation, config.horizon);

    auto manifest = manifest_base("convergence", config);
    if (auto n = g.normalization()) manifest["modulation_normalization"] = *n;
    std::ostringstream csv, plot;
    try {
        const auto sweep = convergence_sweep(config, u0, g);
        write_sweep_csv(csv, sweep);
        write_plot_csv(plot, sweep);
        write_text(dir / "sweep.csv", csv.str());
        write_text(dir / "plot.csv", plot.str());
        manifest["summary"] = sweep_summary(sweep);
        manifest["valid"] = sweep.valid;
        manifest["outputs"] = {"sweep.csv", "plot.csv"};
        manifest["wall_clock_seconds"] = seconds_since(start);
        write_json(dir / "manifest.json", manifest);
        for (const auto& s : sweep.schemes) {
            std::cout << to_string(s.scheme) << ": slope ";
            if (s.fit)
                std::cout << format_number(s.fit->slope);
            else
                std::cout << "n/a";
            if (s.check.performed && !s.check.consistent) std::cout << " (reference inconsistent)";
            std::cout << '\n';
        }
        return sweep.valid ? kSuccess : kNumericalFailure;
    } catch (const BlowUpError& e) {
        manifest["valid"] = false;
        manifest["partial"] = true;
        manifest["error"] = e.what();
        manifest["wall_clock_seconds"] = seconds_since(start);
        write_json(dir / "manifest.json", manifest);
        std::cerr << "error: " << e.what() << '\n';
        return kNumericalFailure;
    }
}

int run_genmod(CommonOptions& common, int points, const std::vector<double>& w_alphas, int resolution) {
    const RunConfig config = load(common);
    const auto dir = prepare_output(common);
    const auto g = build_modulation(config.modulation, config.horizon);
    const double horizon = std::isfinite(g.horizon()) ? g.horizon() : config.horizon;

    std::ostringstream csv;
    write_path_csv(csv, g, points, horizon);
    write_text(dir / "path.csv", csv.str());

    nlohmann::json meta{{"modulation", to_json(config.modulation)}, {"horizon", horizon}, {"points", points}};
    if (auto a = g.alpha()) meta["alpha"] = *a;
    if (auto s = g.seed()) meta["seed"] = *s;
    if (auto n = g.normalization()) meta["normalization"] = *n;
    nlohmann::json norms = nlohmann::json::array();
    if (std::isfinite(g.horizon())) {
        for (double a : w_alphas)
            norms.push_back({{"alpha", a}, {"resolution", resolution}, {"estimate", estimate_w_norm(g, a, resolution)}});
    }
    meta["w_norms"] = norms;
    write_json(dir / "path.json", meta);
    return kSuccess;
}

int run_diagnose(CommonOptions& common, double resonance, double t0, double tau, int partial_steps) {
    const RunConfig config = load(common);
    const auto dir = prepare_output(common);
    const auto g = build_modulation(config.modulation, config.horizon);
    const auto d = martingale_diagnostic(g, resonance, t0, tau, config.sequences, config.seed, partial_steps);

    auto report = manifest_base("diagnose", config);
    report["diagnostic"] = to_json(d);
    write_json(dir / "diagnostic.json", report);
    if (!d.partial_rms.empty()) {
        std::ostringstream csv;
        csv << "M,rms_abs_error\n";
        for (std::size_t n = 0; n < d.partial_rms.size(); ++n)
            csv << n + 1 << ',' << format_number(d.partial_rms[n]) << '\n';
        write_text(dir / "partial_sums.csv", csv.str());
    }
    std::cout << "sample mean " << format_number(d.sample_mean.real()) << (d.sample_mean.imag() < 0 ? " - " : " + ")
              << format_number(std::abs(d.sample_mean.imag())) << "i, integral " << format_number(d.integral.real())
              << (d.integral.imag() < 0 ? " - " : " + ") << format_number(std::abs(d.integral.imag())) << "i\n";
    if (d.growth) std::cout << "growth exponent " << format_number(d.growth->slope) << '\n';
    return kSuccess;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Randomized exponential integrators for the modulated cubic NLS"};
    app.require_subcommand(1);

    CommonOptions simulate_opts, convergence_opts, genmod_opts, diagnose_opts;

    auto* simulate = app.add_subcommand("simulate", "run one trajectory");
    add_common(simulate, simulate_opts);
    std::string scheme_name;
    int simulate_steps = 0, record_every = 1;
    simulate->add_option("--scheme", scheme_name, "scheme (default: first of scheme.list)");
    simulate->add_option("--steps", simulate_steps, "step count (default: first of run.steps)");
    simulate->add_option("--record-every", record_every, "log norms every k steps")->check(CLI::PositiveNumber);

    auto* convergence = app.add_subcommand("convergence", "Monte Carlo error sweep with slope fits");
    add_common(convergence, convergence_opts);

    auto* genmod = app.add_subcommand("genmod", "write a modulation path");
    add_common(genmod, genmod_opts);
    int points = 1001, resolution = 1000;
    std::vector<double> w_alphas;
    genmod->add_option("--points", points, "output samples on [0, T]")->check(CLI::Range(2, 100000000));
    genmod->add_option("--w-alphas", w_alphas, "alphas at which to estimate the W^{alpha,2} norm")->delimiter(',');
    genmod->add_option("--w-resolution", resolution, "estimator resolution")->check(CLI::Range(2, 100000));

    auto* diagnose = app.add_subcommand("diagnose", "stratified Monte Carlo martingale diagnostic");
    add_common(diagnose, diagnose_opts);
    double resonance = 1.0, t0 = 0.0, tau = 1.0;
    int partial_steps = 0;
    diagnose->add_option("--resonance", resonance, "frequency K multiplying g");
    diagnose->add_option("--t0", t0, "start time t_n");
    diagnose->add_option("--tau", tau, "step size");
    diagnose->add_option("--partial-steps", partial_steps, "running sums over this many steps");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kSuccess : kValidationFailure;
    }

    try {
        if (*simulate) return run_simulate(simulate_opts, scheme_name, simulate_steps, record_every);
        if (*convergence) return run_convergence(convergence_opts);
        if (*genmod) return run_genmod(genmod_opts, points, w_alphas, resolution);
        if (*diagnose) return run_diagnose(diagnose_opts, resonance, t0, tau, partial_steps);
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return kValidationFailure;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid argument: " << e.what() << '\n';
        return kValidationFailure;
    } catch (const DomainError& e) {
        std::cerr << "invalid argument: " << e.what() << '\n';
        return kValidationFailure;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kNumericalFailure;
    }
    return kSuccess;
}
