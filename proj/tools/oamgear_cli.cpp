// oamgear: render gear patterns, sweep the pump HWP, fit the control law.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "oamgear/config.hpp"
#include "oamgear/pipeline.hpp"

namespace {

using namespace oamgear;

constexpr int exit_error = 1;
constexpr int exit_out_of_tolerance = 3;

struct Overrides {
    std::string config_path;
    std::optional<int> l;
    std::optional<double> theta0_deg;
    std::optional<double> theta_deg;
    std::optional<double> beta;
    std::optional<std::string> detect_mode;
};

void add_common(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--config", o.config_path, "JSON configuration file");
    cmd->add_option("--l", o.l, "OAM charge l");
    cmd->add_option("--theta0-deg", o.theta0_deg, "preparation HWP angle from vertical, degrees");
    cmd->add_option("--theta-deg", o.theta_deg, "pump-2 HWP angle from vertical, degrees");
    cmd->add_option("--beta", o.beta, "FWM amplitude ratio beta (> 0)");
    cmd->add_option("--detect-mode", o.detect_mode, "dominant | full");
}

SimulationConfig resolve(const Overrides& o) {
    SimulationConfig cfg;
    if (!o.config_path.empty()) cfg = load_config(o.config_path);
    if (o.l) cfg.l = OamIndex(*o.l);
    if (o.theta0_deg) cfg.theta0 = to_radians(*o.theta0_deg);
    if (o.theta_deg) cfg.theta = to_radians(*o.theta_deg);
    if (o.beta) {
        if (!(*o.beta > 0.0)) throw Error(ErrorCode::config, "--beta must be positive");
        cfg.beta = *o.beta;
    }
    if (o.detect_mode) cfg.detect_mode = parse_detect_mode(*o.detect_mode);
    return cfg;
}

std::filesystem::path prepare_out_dir(const std::string& dir) {
    std::filesystem::path p(dir);
    std::error_code ec;
    std::filesystem::create_directories(p, ec);
    if (ec) throw Error(ErrorCode::io_failure, "cannot create " + dir + ": " + ec.message());
    return p;
}

int cmd_render(const Overrides& o, const std::string& out_dir) {
    const SimulationConfig cfg = resolve(o);
    const auto dir = prepare_out_dir(out_dir);

    const IntensityImage signal = render_signal(cfg);
    write_pgm(signal, (dir / "signal.pgm").string());
    try {
        std::printf("signal petals: %d\n", petal_count(profile_of(cfg, signal)));
    } catch (const Error& e) {
        if (e.code() != ErrorCode::flat_profile) throw;
        std::printf("signal petals: FlatProfile (donut)\n");
    }

    const IntensityImage fwm = render_fwm(cfg, cfg.theta);
    write_pgm(fwm, (dir / "fwm.pgm").string());
    const AngularProfile current = profile_of(cfg, fwm);
    const int petals = petal_count(current);
    std::printf("fwm petals: %d\n", petals);
    const AngularProfile reference = profile_of(cfg, render_fwm(cfg, 0.0));
    std::printf("fwm rotation vs theta=0 (mod %.17g deg): %.17g deg\n", to_degrees(2.0 * pi / petals),
                to_degrees(rotation_between(reference, current, petals)));
    return 0;
}

int report_fit(std::span<const AngleSample> samples_deg, OamIndex l, double tolerance) {
    std::vector<AngleSample> rad;
    for (const auto& s : samples_deg) rad.push_back({to_radians(s.theta), to_radians(s.alpha)});
    const LinearFit fit = fit_alpha_vs_theta(rad, l);
    const double expected = control_law_slope(l);
    std::printf("slope: %.17g\n", fit.slope);
    std::printf("intercept_deg: %.17g\n", to_degrees(fit.intercept));
    std::printf("max_residual_deg: %.17g\n", to_degrees(fit.max_residual));
    std::printf("theory_slope (2/|l|): %.17g\n", expected);
    const bool ok = std::abs(std::abs(fit.slope) - expected) < tolerance;
    std::printf("within_tolerance (%g): %s\n", tolerance, ok ? "yes" : "no");
    return ok ? 0 : exit_out_of_tolerance;
}

int cmd_sweep(const Overrides& o, const std::string& out_dir, double start_deg, double end_deg, int steps,
              double tolerance) {
    const SimulationConfig cfg = resolve(o);
    const auto dir = prepare_out_dir(out_dir);
    const SweepResult sweep = run_sweep(cfg, to_radians(start_deg), to_radians(end_deg), steps);

    std::vector<AngleSample> rows;
    for (const auto& s : sweep.samples) rows.push_back({to_degrees(s.theta), to_degrees(s.alpha)});
    const auto csv_path = (dir / "sweep.csv").string();
    std::ofstream csv(csv_path, std::ios::binary | std::ios::trunc);
    if (!csv) throw Error(ErrorCode::io_failure, "cannot open " + csv_path);
    write_sweep_csv(csv, rows);
    csv.close();
    std::printf("petals: %d\nwrote %s (%zu rows)\n", sweep.petals, csv_path.c_str(), rows.size());
    return report_fit(rows, cfg.l, tolerance);
}

int cmd_fit(const Overrides& o, const std::string& csv_path, double tolerance) {
    if (!o.l && o.config_path.empty()) throw Error(ErrorCode::config, "fit needs the OAM charge: pass --l or --config");
    const SimulationConfig cfg = resolve(o);
    if (cfg.l.magnitude() == 0) throw Error(ErrorCode::config, "fit needs |l| > 0");
    std::ifstream in(csv_path, std::ios::binary);
    if (!in) throw Error(ErrorCode::io_failure, "cannot open " + csv_path);
    const auto rows = read_sweep_csv(in);
    return report_fit(rows, cfg.l, tolerance);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Polarization-controlled gear rotation in four-wave mixing"};
    app.require_subcommand(1);

    Overrides render_o;
    std::string render_out = ".";
    auto* render_cmd = app.add_subcommand("render", "write signal.pgm and fwm.pgm for one configuration");
    add_common(render_cmd, render_o);
    render_cmd->add_option("--out-dir", render_out, "output directory");

    Overrides sweep_o;
    std::string sweep_out = ".";
    double start_deg = 0.0;
    double end_deg = 90.0;
    int steps = 7;
    double sweep_tol = 1e-6;
    auto* sweep_cmd = app.add_subcommand("sweep", "rotate the pump HWP, measure alpha per frame, write sweep.csv");
    add_common(sweep_cmd, sweep_o);
    sweep_cmd->add_option("--out-dir", sweep_out, "output directory");
    sweep_cmd->add_option("--theta-start-deg", start_deg, "first pump angle, degrees");
    sweep_cmd->add_option("--theta-end-deg", end_deg, "last pump angle, degrees");
    sweep_cmd->add_option("--steps", steps, "number of frames (inclusive of both ends)");
    sweep_cmd->add_option("--tolerance", sweep_tol, "allowed | |slope| - 2/|l| |");

    Overrides fit_o;
    std::string csv_path;
    double fit_tol = 1e-6;
    auto* fit_cmd = app.add_subcommand("fit", "fit alpha vs theta from a sweep CSV");
    add_common(fit_cmd, fit_o);
    fit_cmd->add_option("csv", csv_path, "CSV with header theta_deg,alpha_deg")->required();
    fit_cmd->add_option("--tolerance", fit_tol, "allowed | |slope| - 2/|l| |");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*render_cmd) return cmd_render(render_o, render_out);
        if (*sweep_cmd) return cmd_sweep(sweep_o, sweep_out, start_deg, end_deg, steps, sweep_tol);
        if (*fit_cmd) return cmd_fit(fit_o, csv_path, fit_tol);
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_error;
    }
    return exit_error;
}
