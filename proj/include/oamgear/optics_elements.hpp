#pragma once

// Operators for the optical elements of the setup. All fast-axis angles are
// measured from the vertical axis; internally psi = pi/2 - chi is the angle
// from horizontal used by the textbook Jones matrices.

#include <array>
#include <cmath>
#include <string>
#include <utility>

#include "hybrid_state.hpp"

namespace oamgear {

/// 2x2 Jones matrix acting on (H, V) column vectors, row-major.
struct Jones {
    std::array<Complex, 4> m{};

    Complex operator()(int row, int col) const { return m[static_cast<std::size_t>(2 * row + col)]; }

    Jones operator*(const Jones& o) const {
        const auto& a = m;
        const auto& b = o.m;
        return {{a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3],
                 a[2] * b[0] + a[3] * b[2], a[2] * b[1] + a[3] * b[3]}};
    }
};

/// Half-wave plate, psi = pi/2 - chi: [[cos 2psi, sin 2psi], [sin 2psi, -cos 2psi]].
/// Acting on |V> it yields linear polarization at 2 chi from vertical.
inline Jones hwp_matrix(double chi) {
    const double psi = pi / 2 - chi;
    const double c = std::cos(2 * psi);
    const double s = std::sin(2 * psi);
    return {{Complex{c}, Complex{s}, Complex{s}, Complex{-c}}};
}

/// Quarter-wave plate with the fast axis at psi = pi/2 - chi from horizontal.
inline Jones qwp_matrix(double chi) {
    const double psi = pi / 2 - chi;
    const double c = std::cos(psi);
    const double s = std::sin(psi);
    const Complex i{0.0, 1.0};
    const Complex off = (1.0 - i) * s * c;
    return {{c * c + i * s * s, off, off, s * s + i * c * c}};
}

/// Acts on polarization, identity on OAM.
inline ElementOperator polarization_operator(std::string name, const Jones& j) {
    return ElementOperator(std::move(name), OperatorKind::unitary,
                           [j](const LabKey& key) -> std::optional<ElementOperator::Column> {
                               const int col = key.pol == PolAxis::H ? 0 : 1;
                               return ElementOperator::Column{{{key.l, PolAxis::H}, j(0, col)},
                                                              {{key.l, PolAxis::V}, j(1, col)}};
                           });
}

inline ElementOperator hwp(double chi) { return polarization_operator("hwp", hwp_matrix(chi)); }
inline ElementOperator qwp(double chi) { return polarization_operator("qwp", qwp_matrix(chi)); }

/// Diagonal OAM phase e^{i phase(l)}, identity on polarization.
template <class PhaseFn>
ElementOperator oam_phase(PhaseFn phase) {
    return ElementOperator("oam_phase", OperatorKind::unitary,
                           [phase](const LabKey& key) -> std::optional<ElementOperator::Column> {
                               return ElementOperator::Column{{key, std::polar(1.0, phase(key.l))}};
                           });
}

namespace detail {

inline ElementOperator::ColumnFn opposite_charge_column(OamIndex l) {
    return [l](const LabKey& key) -> std::optional<ElementOperator::Column> {
        if (key.l != OamIndex(0)) return std::nullopt;
        const OamIndex out = key.pol == PolAxis::H ? l : -l;
        return ElementOperator::Column{{{out, key.pol}, Complex{1.0}}};
    };
}

}  // namespace detail

/// |0,H> -> |+l,H>, |0,V> -> |-l,V>. Inputs with OAM other than 0 are rejected.
inline ElementOperator phase_plate(OamIndex l) {
    return ElementOperator("phase_plate", OperatorKind::partial_isometry, detail::opposite_charge_column(l));
}

inline constexpr double balance_tolerance = 1e-9;

/// The Sagnac loop with its internal phase plate. Same action as phase_plate;
/// warns (UnbalancedInput) when the H and V input magnitudes differ.
inline ElementOperator sagnac(OamIndex l) {
    auto check = [](const HybridState& s, Diagnostics& diag) {
        const double h = std::abs(s.amplitude(OamIndex(0), PolAxis::H));
        const double v = std::abs(s.amplitude(OamIndex(0), PolAxis::V));
        if (std::abs(h - v) > balance_tolerance)
            diag.warnings.push_back("UnbalancedInput: |H| = " + std::to_string(h) +
                                    ", |V| = " + std::to_string(v));
    };
    return ElementOperator("sagnac", OperatorKind::partial_isometry, detail::opposite_charge_column(l),
                           std::move(check));
}

struct BeamSplitterPorts {
    ElementOperator transmit;  // keeps H
    ElementOperator reflect;   // keeps V
};

inline ElementOperator polarizer_port(std::string name, PolAxis kept) {
    return ElementOperator(std::move(name), OperatorKind::partial_isometry,
                           [kept](const LabKey& key) -> std::optional<ElementOperator::Column> {
                               if (key.pol != kept) return ElementOperator::Column{};
                               return ElementOperator::Column{{key, Complex{1.0}}};
                           });
}

inline BeamSplitterPorts pbs() {
    return {polarizer_port("pbs_transmit", PolAxis::H), polarizer_port("pbs_reflect", PolAxis::V)};
}

/// Fraction of the input power leaving through `port`.
inline double port_probability(const ElementOperator& port, const HybridState& s) {
    const double in = s.norm_squared();
    if (!(in > 0.0)) return 0.0;
    return port.apply(s).norm_squared() / in;
}

}  // namespace oamgear
