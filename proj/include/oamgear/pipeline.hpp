#pragma once

// End-to-end simulation: prepare the signal, mix, render, measure.

#include <cmath>
#include <future>
#include <optional>
#include <vector>

#include "field_render.hpp"
#include "fwm_process.hpp"
#include "pattern_analysis.hpp"
#include "signal_prep.hpp"

namespace oamgear {

/// All angles in radians.
struct SimulationConfig {
    OamIndex l{2};
    double theta0 = 0.0;
    double theta = 0.0;
    double beta = default_beta;
    DetectMode detect_mode = DetectMode::dominant;
    int n = 512;
    double extent = 2.5;
    std::optional<Annulus> annulus;
    int bins = default_bins;

    GridSpec grid() const { return default_grid(l, n, extent); }
    Annulus ring() const { return annulus.value_or(default_annulus(l, grid())); }
    FwmParams fwm(double pump_theta) const { return {beta, pump_theta, detect_mode}; }
};

inline HybridState signal_state(const SimulationConfig& cfg) {
    return prepared_signal({cfg.l, cfg.theta0, cfg.theta});
}

inline HybridState fwm_detected_state(const SimulationConfig& cfg, double pump_theta) {
    return simulate_detected(cfg.l, cfg.theta0, cfg.fwm(pump_theta));
}

inline IntensityImage render_signal(const SimulationConfig& cfg) { return render(signal_state(cfg), cfg.grid()); }

inline IntensityImage render_fwm(const SimulationConfig& cfg, double pump_theta) {
    return render(fwm_detected_state(cfg, pump_theta), cfg.grid());
}

inline AngularProfile profile_of(const SimulationConfig& cfg, const IntensityImage& img) {
    return angular_profile(img, cfg.ring(), cfg.bins);
}

struct SweepResult {
    int petals = 0;
    std::vector<AngleSample> samples;  // theta, unwrapped alpha relative to the first frame
};

/// `steps` evenly spaced pump angles from theta_start to theta_end inclusive.
inline std::vector<double> sweep_angles(double theta_start, double theta_end, int steps) {
    if (steps < 2) throw Error(ErrorCode::insufficient_samples, "a sweep needs at least 2 frames");
    std::vector<double> out(static_cast<std::size_t>(steps));
    for (int i = 0; i < steps; ++i) out[static_cast<std::size_t>(i)] = theta_start + (theta_end - theta_start) * i / (steps - 1);
    return out;
}

/// Renders each frame, measures its rotation against the first frame and
/// unwraps. Frames are independent and evaluated concurrently; output order
/// follows theta.
inline SweepResult run_sweep(const SimulationConfig& cfg, double theta_start, double theta_end, int steps) {
    if (cfg.l.magnitude() == 0) throw Error(ErrorCode::invalid_argument, "a sweep needs |l| > 0");
    const auto thetas = sweep_angles(theta_start, theta_end, steps);
    const double predicted_step = control_law_slope(cfg.l) * std::abs(thetas[1] - thetas[0]);
    if (!(predicted_step < max_unwrap_step(cfg.l)))
        throw Error(ErrorCode::unwrap_ambiguity, "theta step too large to unwrap the gear rotation");

    std::vector<std::future<AngularProfile>> jobs;
    jobs.reserve(thetas.size());
    for (const double t : thetas)
        jobs.push_back(std::async(std::launch::async, [&cfg, t] { return profile_of(cfg, render_fwm(cfg, t)); }));
    std::vector<AngularProfile> profiles;
    profiles.reserve(jobs.size());
    for (auto& j : jobs) profiles.push_back(j.get());

    SweepResult result;
    result.petals = petal_count(profiles.front());
    std::vector<AngleSample> raw;
    raw.reserve(profiles.size());
    for (std::size_t i = 0; i < profiles.size(); ++i)
        raw.push_back({thetas[i], rotation_between(profiles.front(), profiles[i], result.petals)});
    result.samples = unwrap_alpha(raw, cfg.l);
    return result;
}

inline double to_radians(double deg) { return deg * pi / 180.0; }
inline double to_degrees(double rad) { return rad * 180.0 / pi; }

}  // namespace oamgear
