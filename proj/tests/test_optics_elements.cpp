#include <gtest/gtest.h>

#include <array>
#include <cmath>

#include "oamgear/optics_elements.hpp"
#include "oamgear/signal_prep.hpp"
#include "test_support.hpp"

using namespace oamgear;

namespace {

const Complex I{0.0, 1.0};

HybridState pol_state(OamIndex l, Complex h, Complex v) {
    return HybridState::from_amplitudes({{{l, PolAxis::H}, h}, {{l, PolAxis::V}, v}});
}

/// Linear polarization at `angle` from vertical, measured toward +H.
HybridState linear_from_vertical(double angle, OamIndex l = OamIndex(0)) {
    return pol_state(l, Complex{std::sin(angle)}, Complex{std::cos(angle)});
}

const std::array<LabKey, 6> kSupport{{{OamIndex(-3), PolAxis::H},
                                      {OamIndex(-3), PolAxis::V},
                                      {OamIndex(0), PolAxis::H},
                                      {OamIndex(0), PolAxis::V},
                                      {OamIndex(7), PolAxis::H},
                                      {OamIndex(7), PolAxis::V}}};

bool is_identity_up_to_phase(const Jones& j, double tol) {
    if (std::abs(j(0, 1)) > tol || std::abs(j(1, 0)) > tol) return false;
    return std::abs(j(0, 0) - j(1, 1)) < tol && std::abs(std::abs(j(0, 0)) - 1.0) < tol;
}

}  // namespace

TEST(Hwp, VerticalAxisLeavesVerticalLight) {
    const auto out = hwp(0.0).apply(basis_state(OamIndex(0), PolAxis::V));
    EXPECT_NEAR(fidelity_overlap(out, basis_state(OamIndex(0), PolAxis::V)), 1.0, 1e-15);
}

TEST(Hwp, DoublesTheAngle) {
    const auto out = hwp(pi / 8).apply(basis_state(OamIndex(0), PolAxis::V));
    EXPECT_NEAR(fidelity_overlap(out, linear_from_vertical(pi / 4)), 1.0, 1e-15);
}

TEST(Hwp, OutputAngleIsTwiceAxisForAllAngles) {
    for (int trial = 0; trial < 1000; ++trial) {
        const double chi = test::uniform(-2 * pi, 2 * pi);
        const OamIndex l(test::uniform_int(-5, 5));
        const auto out = hwp(chi).apply(basis_state(l, PolAxis::V));
        EXPECT_NEAR(fidelity_overlap(out, linear_from_vertical(2 * chi, l)), 1.0, 1e-12);
    }
}

TEST(Hwp, SquaresToIdentityUpToPhase) {
    for (int trial = 0; trial < 100; ++trial) {
        const double chi = test::uniform(-pi, pi);
        EXPECT_TRUE(is_identity_up_to_phase(hwp_matrix(chi) * hwp_matrix(chi), 1e-12));
    }
}

TEST(Qwp, VerticalAxisLeavesVerticalLight) {
    const auto out = qwp(0.0).apply(basis_state(OamIndex(0), PolAxis::V));
    EXPECT_NEAR(fidelity_overlap(out, basis_state(OamIndex(0), PolAxis::V)), 1.0, 1e-15);
}

TEST(Qwp, FortyFiveDegreesMakesHorizontalCircular) {
    const auto out = qwp(pi / 4).apply(basis_state(OamIndex(0), PolAxis::H));
    const Complex h = out.amplitude(OamIndex(0), PolAxis::H);
    const Complex v = out.amplitude(OamIndex(0), PolAxis::V);
    EXPECT_NEAR(std::abs(h), 1.0 / std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(std::abs(v), 1.0 / std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(std::abs(std::arg(v / h)), pi / 2, 1e-15);
}

TEST(Qwp, FourthPowerIsIdentityUpToPhase) {
    for (int trial = 0; trial < 100; ++trial) {
        const Jones q = qwp_matrix(test::uniform(-pi, pi));
        EXPECT_TRUE(is_identity_up_to_phase(q * q * q * q, 1e-12));
    }
}

TEST(WavePlates, UnitaryOnThousandRandomAngles) {
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const double chi = test::uniform(-2 * pi, 2 * pi);
        worst = std::max(worst, hwp(chi).unitarity_defect(kSupport));
        worst = std::max(worst, qwp(chi).unitarity_defect(kSupport));
    }
    EXPECT_LT(worst, 1e-12);
}

TEST(WavePlates, CommuteWithOamPhase) {
    const auto phase = oam_phase([](OamIndex l) { return 0.37 * l.value() * l.value() - 1.1 * l.value(); });
    for (int trial = 0; trial < 200; ++trial) {
        const auto s = test::random_state(6);
        const auto plate = trial % 2 == 0 ? hwp(test::uniform(-pi, pi)) : qwp(test::uniform(-pi, pi));
        const auto ab = phase.apply(plate.apply(s));
        const auto ba = plate.apply(phase.apply(s));
        for (const auto& [key, a] : ab.amplitudes()) EXPECT_LT(std::abs(a - ba.amplitude(key.l, key.pol)), 1e-12);
        EXPECT_EQ(ab.amplitudes().size(), ba.amplitudes().size());
    }
}

TEST(PhasePlate, ImprintsOppositeCharges) {
    const OamIndex l(3);
    const auto h = phase_plate(l).apply(basis_state(OamIndex(0), PolAxis::H));
    const auto v = phase_plate(l).apply(basis_state(OamIndex(0), PolAxis::V));
    EXPECT_EQ(h.amplitude(l, PolAxis::H), Complex(1.0));
    EXPECT_EQ(v.amplitude(-l, PolAxis::V), Complex(1.0));
    EXPECT_EQ(h.amplitudes().size(), 1u);
    EXPECT_EQ(v.amplitudes().size(), 1u);
}

TEST(PhasePlate, BalancedInputGivesSagnacState) {
    const OamIndex l(2);
    const auto out = phase_plate(l).apply(balanced_gaussian_input());
    const double a = 1.0 / std::sqrt(2.0);
    EXPECT_NEAR(std::abs(out.amplitude(l, PolAxis::H) - a), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(out.amplitude(-l, PolAxis::V) - a), 0.0, 1e-15);
    EXPECT_NEAR(out.norm(), 1.0, 1e-15);
    EXPECT_TRUE(out.is_unit());
}

TEST(PhasePlate, PreservesNormOnSupportedSubspace) {
    for (int trial = 0; trial < 200; ++trial) {
        const auto s = pol_state(OamIndex(0), test::random_complex(), test::random_complex());
        EXPECT_NEAR(phase_plate(OamIndex(test::uniform_int(-50, 50))).apply(s).norm(), s.norm(), 1e-14);
    }
}

TEST(PhasePlate, RejectsNonGaussianInput) {
    try {
        phase_plate(OamIndex(2)).apply(basis_state(OamIndex(1), PolAxis::H));
        FAIL() << "expected UnsupportedInput";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::unsupported_input);
    }
}

TEST(Sagnac, BalancedInputIsSilent) {
    Diagnostics diag;
    const auto out = sagnac(OamIndex(2)).apply(balanced_gaussian_input(), &diag);
    EXPECT_TRUE(diag.warnings.empty());
    EXPECT_NEAR(out.norm(), 1.0, 1e-15);
    EXPECT_NEAR(std::abs(out.amplitude(OamIndex(2), PolAxis::H)), 1.0 / std::sqrt(2.0), 1e-15);
}

TEST(Sagnac, SinglePortWarnsUnbalanced) {
    Diagnostics diag;
    const auto out = sagnac(OamIndex(2)).apply(basis_state(OamIndex(0), PolAxis::H), &diag);
    ASSERT_EQ(diag.warnings.size(), 1u);
    EXPECT_NE(diag.warnings[0].find("UnbalancedInput"), std::string::npos);
    EXPECT_EQ(out.amplitude(OamIndex(2), PolAxis::H), Complex(1.0));
}

TEST(Sagnac, ThenHorizontalProjectionHalfProbability) {
    const auto out = sagnac(OamIndex(2)).apply(balanced_gaussian_input());
    const auto p = project_pol(out, PolAxis::H);
    EXPECT_NEAR(p.probability, 0.5, 1e-15);
    EXPECT_NEAR(fidelity_overlap(*p.state, basis_state(OamIndex(2), PolAxis::H)), 1.0, 1e-15);
}

TEST(Sagnac, RejectsNonGaussianInput) {
    EXPECT_THROW(sagnac(OamIndex(1)).apply(basis_state(OamIndex(4), PolAxis::V)), Error);
}

TEST(Pbs, PortsSplitSagnacState) {
    const auto ports = pbs();
    const auto psi1 = sagnac(OamIndex(2)).apply(balanced_gaussian_input());
    const auto t = ports.transmit.apply(psi1);
    EXPECT_NEAR(port_probability(ports.transmit, psi1), 0.5, 1e-15);
    EXPECT_NEAR(fidelity_overlap(t, basis_state(OamIndex(2), PolAxis::H)), 1.0, 1e-15);
    EXPECT_EQ(port_probability(ports.reflect, basis_state(OamIndex(2), PolAxis::H)), 0.0);
}

TEST(Pbs, PortProbabilitiesSumToOne) {
    const auto ports = pbs();
    for (int trial = 0; trial < 200; ++trial) {
        const auto s = test::random_state(4);
        EXPECT_NEAR(port_probability(ports.transmit, s) + port_probability(ports.reflect, s), 1.0, 1e-12);
        EXPECT_NEAR(port_probability(ports.transmit, s), project_pol(s, PolAxis::H).probability, 1e-12);
    }
}

TEST(Compose, AppliesRightToLeftOrder) {
    // qwp then hwp differs from hwp then qwp for generic angles.
    const auto s = basis_state(OamIndex(0), PolAxis::H);
    const auto a = qwp(0.3).then(hwp(1.1)).apply(s);
    const auto b = hwp(1.1).apply(qwp(0.3).apply(s));
    for (const auto& [key, amp] : a.amplitudes()) EXPECT_LT(std::abs(amp - b.amplitude(key.l, key.pol)), 1e-15);
}
