#pragma once

// Polarization-selective four-wave mixing. The signal component parallel to
// the pump-2 polarization is generated with amplitude weight beta and leaves
// H-polarized; the perpendicular component has weight 1 and leaves
// V-polarized. OAM amplitudes pass through unchanged. beta is a single
// phenomenological amplitude ratio standing in for the stronger pi-pi
// transition versus the pi-sigma± one; no sublevel dynamics are modeled.

#include <utility>

#include "hybrid_state.hpp"
#include "signal_prep.hpp"

namespace oamgear {

enum class DetectMode { dominant, full };

// Power ratio beta^2 = 4.41, against the measured factor of 4.5.
inline constexpr double default_beta = 2.1;

struct FwmParams {
    double beta = default_beta;
    double theta = 0.0;  // pump-2 HWP angle, radians from vertical
    DetectMode detect_mode = DetectMode::dominant;
};

inline void validate(const FwmParams& p) {
    if (!(p.beta > 0.0)) throw Error(ErrorCode::invalid_argument, "beta must be positive");
}

/// Generated field, left unnormalized: squared norm (beta^2 + 1)/2 for a unit
/// signal with equal-power pump-basis blocks.
inline HybridState fwm_transfer(const HybridState& signal, const FwmParams& params) {
    validate(params);
    const auto rotated = rotate_pol_basis(signal, pump_polarization_angle(params.theta));
    HybridState::Amplitudes out;
    for (const auto& [key, a] : rotated.state.amplitudes()) {
        if (key.pol == PumpAxis::parallel)
            out[{key.l, PolAxis::H}] += params.beta * a;
        else
            out[{key.l, PolAxis::V}] += a;
    }
    return HybridState::from_amplitudes(std::move(out));
}

/// dominant: renormalized H block. full: the whole generated field, renormalized.
inline HybridState detected_state(const HybridState& fwm, const FwmParams& params) {
    if (params.detect_mode == DetectMode::dominant) return project_pol(fwm, PolAxis::H).state_or_throw();
    return fwm.normalized();
}

/// Squared-norm ratio |H block|^2 / |V block|^2 of a generated field.
inline double hv_power_ratio(const HybridState& fwm) {
    return fwm.block(PolAxis::H).norm_squared() / fwm.block(PolAxis::V).norm_squared();
}

/// Convenience: prepare the signal for (l, theta0), mix at params.theta, detect.
inline HybridState simulate_detected(OamIndex l, double theta0, const FwmParams& params) {
    const PrepConfig cfg{l, theta0, params.theta};
    return detected_state(fwm_transfer(prepared_signal(cfg), params), params);
}

}  // namespace oamgear
