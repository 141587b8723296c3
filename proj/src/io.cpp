#include "mnls/io.hpp"

#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <ostream>
#include <stdexcept>

namespace mnls {

std::string format_number(double value) { return fmt::format("{:.15g}", value); }

void write_snapshot_csv(std::ostream& out, const SpectralField& field) {
    if (field.grid().dimension() != 1) throw std::invalid_argument("snapshots are written for d = 1 only");
    const auto values = transform_inverse(field);
    out << "index,x,re_u,im_u\n";
    for (std::size_t j = 0; j < values.size(); ++j) {
        out << j << ',' << format_number(field.grid().node(static_cast<int>(j))) << ','
            << format_number(values[j].real()) << ',' << format_number(values[j].imag()) << '\n';
    }
}

nlohmann::json snapshot_metadata(const SpectralField& field, double time, std::string_view scheme) {
    const auto& grid = field.grid();
    return {
        {"grid",
         {{"dimension", grid.dimension()},
          {"points_per_axis", grid.points_per_axis()},
          {"largest_mode", grid.largest_mode()},
          {"spacing", grid.spacing()},
          {"spacing_per_mode", grid.spacing_per_mode()}}},
        {"time", time},
        {"scheme", std::string(scheme)},
        {"h0_norm", h_sigma_norm(field, 0.0)},
        {"h1_norm", h_sigma_norm(field, 1.0)},
    };
}

void write_norm_log_csv(std::ostream& out, const TrajectoryResult& result) {
    out << "step,t,h0_norm,h1_norm,xi\n";
    for (std::size_t n = 0; n < result.norms.size(); ++n) {
        out << n << ',' << format_number(result.times[n]) << ',' << format_number(result.norms[n].h0) << ','
            << format_number(result.norms[n].h1) << ',';
        // Draw n is consumed by the step leaving t_n.
        if (n < result.xi.size()) out << format_number(result.xi[n]);
        out << '\n';
    }
}

void write_sweep_csv(std::ostream& out, const SweepResult& sweep) {
    out << "scheme,tau,N,m,rms_error,stddev,excluded_count\n";
    for (const auto& s : sweep.schemes) {
        for (const auto& r : s.records) {
            out << to_string(r.scheme) << ',' << format_number(r.tau) << ',' << r.steps << ',' << r.sequences
                << ',' << format_number(r.rms) << ',' << format_number(r.stddev) << ',' << r.excluded << '\n';
        }
    }
}

void write_plot_csv(std::ostream& out, const SweepResult& sweep) {
    out << "scheme,log_tau,log_error\n";
    for (const auto& s : sweep.schemes) {
        for (const auto& r : s.records) {
            if (!r.valid || !(r.rms > 0.0)) continue;
            out << to_string(r.scheme) << ',' << format_number(std::log(r.tau)) << ','
                << format_number(std::log(r.rms)) << '\n';
        }
    }
}

nlohmann::json sweep_summary(const SweepResult& sweep) {
    auto fit_json = [](const std::optional<SlopeFit>& fit) -> nlohmann::json {
        if (!fit) return nullptr;
        return {{"slope", fit->slope}, {"intercept", fit->intercept}, {"residual", fit->residual},
                {"points", fit->points.size()}};
    };
    nlohmann::json schemes = nlohmann::json::array();
    for (const auto& s : sweep.schemes) {
        nlohmann::json records = nlohmann::json::array();
        for (const auto& r : s.records) {
            records.push_back({{"tau", r.tau},
                               {"N", r.steps},
                               {"m", r.sequences},
                               {"rms_error", r.rms},
                               {"stddev", r.stddev},
                               {"rms_max_error", r.rms_max ? nlohmann::json(*r.rms_max) : nlohmann::json(nullptr)},
                               {"excluded_count", r.excluded},
                               {"valid", r.valid}});
        }
        schemes.push_back({
            {"scheme", std::string(to_string(s.scheme))},
            {"reference", {{"scheme", std::string(to_string(s.reference_scheme))}, {"tau", s.reference_tau}}},
            {"reference_check",
             {{"performed", s.check.performed},
              {"gap", s.check.gap},
              {"coarsest_error", s.check.coarsest_error},
              {"consistent", s.check.consistent}}},
            {"fit", fit_json(s.fit)},
            {"fit_max_over_steps", fit_json(s.fit_max)},
            {"records", records},
        });
    }
    return {{"valid", sweep.valid}, {"schemes", schemes}};
}

void write_path_csv(std::ostream& out, const ModulationPath& g, int points, double horizon) {
    if (points < 2) throw std::invalid_argument("path output needs at least 2 points");
    out << "t,g\n";
    for (int j = 0; j < points; ++j) {
        const double t = horizon * j / (points - 1);
        out << format_number(t) << ',' << format_number(g(t)) << '\n';
    }
}

nlohmann::json to_json(const MartingaleDiagnostic& d) {
    auto complex_json = [](Complex z) { return nlohmann::json{{"re", z.real()}, {"im", z.imag()}}; };
    nlohmann::json j{
        {"t_n", d.t_n},
        {"tau", d.tau},
        {"resonance", d.resonance},
        {"samples", d.samples},
        {"sample_mean", complex_json(d.sample_mean)},
        {"integral", complex_json(d.integral)},
        {"difference", complex_json(d.difference)},
        {"stddev", {{"re", d.stddev_real}, {"im", d.stddev_imag}}},
        {"band_3sigma",
         {{"re", 3.0 * d.stddev_real / std::sqrt(d.samples)}, {"im", 3.0 * d.stddev_imag / std::sqrt(d.samples)}}},
    };
    if (d.growth) j["growth_exponent"] = d.growth->slope;
    return j;
}

void write_json(const std::filesystem::path& path, const nlohmann::json& value) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << value.dump(2) << '\n';
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << text;
}

} // namespace mnls
