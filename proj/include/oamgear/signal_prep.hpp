#pragma once

// Input signal preparation: the Sagnac loop imprints +l on H and -l on V, then
// a QWP (fast axis pi/4 from vertical) and a HWP (fast axis theta0 from
// vertical) set the polarization structure.

#include <cmath>
#include <utility>

#include "hybrid_state.hpp"
#include "optics_elements.hpp"

namespace oamgear {

struct PrepConfig {
    OamIndex l{2};
    double theta0 = 0.0;  // HWP at A, radians from vertical
    double theta = 0.0;   // pump-2 HWP at C, radians from vertical
};

/// Fast-axis angle reduced to [0, pi); a HWP is pi-periodic in its axis.
inline double reduce_axis_angle(double angle) {
    double r = std::fmod(angle, pi);
    if (r < 0) r += pi;
    return r;
}

/// 1/2 (i e^{i2θ0}|l> + e^{-i2θ0}|-l>)|H> - 1/2 (e^{i2θ0}|l> + i e^{-i2θ0}|-l>)|V>
inline HybridState prepared_signal(const PrepConfig& cfg) {
    const Complex i{0.0, 1.0};
    const Complex up = std::polar(0.5, 2 * cfg.theta0);
    const Complex down = std::polar(0.5, -2 * cfg.theta0);
    const OamIndex l = cfg.l;
    HybridState::Amplitudes amps;
    amps[{l, PolAxis::H}] += i * up;
    amps[{-l, PolAxis::H}] += down;
    amps[{l, PolAxis::V}] += -up;
    amps[{-l, PolAxis::V}] += -i * down;
    return HybridState::from_amplitudes(std::move(amps));
}

/// Equal-magnitude H and V Gaussian entering the loop.
inline HybridState balanced_gaussian_input() {
    const double a = 1.0 / std::sqrt(2.0);
    return HybridState::from_amplitudes({{{OamIndex(0), PolAxis::H}, Complex{a}},
                                         {{OamIndex(0), PolAxis::V}, Complex{a}}});
}

inline ElementOperator preparation_chain(const PrepConfig& cfg) {
    return sagnac(cfg.l).then(qwp(pi / 4)).then(hwp(cfg.theta0));
}

inline HybridState prepared_signal_by_composition(const PrepConfig& cfg, Diagnostics* diag = nullptr) {
    return preparation_chain(cfg).apply(balanced_gaussian_input(), diag);
}

/// Orientation of |P_theta> used for the pump basis: hwp(theta) acting on an
/// H-polarized pump, i.e. linear at 2 theta + pi/2 from vertical. With this
/// orientation the pump-basis expansion matches the closed form below exactly.
inline double pump_polarization_angle(double theta) { return 2 * theta + pi / 2; }

/// Signal of prepared_signal re-expressed in the {|P_theta>, |P_gamma>} basis.
inline PumpBasisState signal_in_pump_basis(const PrepConfig& cfg) {
    return rotate_pol_basis(prepared_signal(cfg), pump_polarization_angle(cfg.theta));
}

/// 1/2 (i e^{-i2Δ}|l> + e^{i2Δ}|-l>)|P_θ> + 1/2 (e^{-i2Δ}|l> + i e^{i2Δ}|-l>)|P_γ>,
/// Δ = θ - θ0, written directly from the coefficients.
inline PumpBasisState pump_basis_closed_form(const PrepConfig& cfg) {
    const Complex i{0.0, 1.0};
    const double delta = cfg.theta - cfg.theta0;
    const Complex down = std::polar(0.5, -2 * delta);
    const Complex up = std::polar(0.5, 2 * delta);
    const OamIndex l = cfg.l;
    BasicState<PumpAxis>::Amplitudes amps;
    amps[{l, PumpAxis::parallel}] += i * down;
    amps[{-l, PumpAxis::parallel}] += up;
    amps[{l, PumpAxis::perpendicular}] += down;
    amps[{-l, PumpAxis::perpendicular}] += i * up;
    return {pump_polarization_angle(cfg.theta), BasicState<PumpAxis>::from_amplitudes(std::move(amps))};
}

}  // namespace oamgear
