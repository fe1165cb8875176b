#pragma once

// Pure states over the joint (OAM index, linear polarization) basis and the
// linear operators that act on them.

#include <algorithm>
#include <cmath>
#include <complex>
#include <compare>
#include <cstdlib>
#include <functional>
#include <initializer_list>
#include <map>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace oamgear {

using Complex = std::complex<double>;

inline constexpr double pi = std::numbers::pi;

// Amplitudes smaller than this are dropped after every operation.
inline constexpr double prune_threshold = 1e-15;
inline constexpr double unit_tolerance = 1e-12;

/// Topological charge l of a p = 0 Laguerre-Gaussian mode.
class OamIndex {
public:
    constexpr OamIndex() = default;
    constexpr explicit OamIndex(int l) : value_(l) {}

    constexpr int value() const { return value_; }
    constexpr int magnitude() const { return value_ < 0 ? -value_ : value_; }
    constexpr OamIndex operator-() const { return OamIndex(-value_); }

    constexpr auto operator<=>(const OamIndex&) const = default;

private:
    int value_ = 0;
};

/// Fixed laboratory basis.
enum class PolAxis { H, V };

/// Basis aligned with a linear polarization |P> and its orthogonal partner |P_perp>.
enum class PumpAxis { parallel, perpendicular };

template <class Axis>
struct BasisKey {
    OamIndex l;
    Axis pol;

    constexpr auto operator<=>(const BasisKey&) const = default;
};

/// Sparse superposition over BasisKey<Axis>. Immutable once built.
///
/// The unit flag is set whenever the squared norm equals 1 within
/// unit_tolerance. No stored amplitude is exactly zero.
template <class Axis>
class BasicState {
public:
    using Key = BasisKey<Axis>;
    using Amplitudes = std::map<Key, Complex>;

    BasicState() = default;

    /// Builds a state from raw amplitudes, pruning negligible entries.
    static BasicState from_amplitudes(Amplitudes amps) {
        BasicState s;
        for (auto it = amps.begin(); it != amps.end();) {
            if (!(std::abs(it->second) >= prune_threshold)) {
                it = amps.erase(it);
            } else {
                ++it;
            }
        }
        s.amps_ = std::move(amps);
        s.unit_ = std::abs(s.norm_squared() - 1.0) <= unit_tolerance;
        return s;
    }

    const Amplitudes& amplitudes() const { return amps_; }
    bool empty() const { return amps_.empty(); }
    bool is_unit() const { return unit_; }

    Complex amplitude(OamIndex l, Axis p) const {
        auto it = amps_.find(Key{l, p});
        return it == amps_.end() ? Complex{} : it->second;
    }

    double norm_squared() const {
        double sum = 0.0;
        for (const auto& [key, a] : amps_) sum += std::norm(a);
        return sum;
    }

    double norm() const { return std::sqrt(norm_squared()); }

    BasicState normalized() const {
        const double n = norm();
        if (!(n > 0.0)) throw Error(ErrorCode::zero_norm, "cannot normalize a vanishing state");
        return scaled(Complex{1.0 / n, 0.0});
    }

    BasicState scaled(Complex factor) const {
        Amplitudes out;
        for (const auto& [key, a] : amps_) out.emplace(key, a * factor);
        return from_amplitudes(std::move(out));
    }

    /// Unnormalized component with polarization `p`.
    BasicState block(Axis p) const {
        Amplitudes out;
        for (const auto& [key, a] : amps_)
            if (key.pol == p) out.emplace(key, a);
        return from_amplitudes(std::move(out));
    }

    /// Sorted list of the distinct OAM indices present.
    std::vector<OamIndex> oam_indices() const {
        std::vector<OamIndex> out;
        for (const auto& [key, a] : amps_)
            if (out.empty() || out.back() != key.l) out.push_back(key.l);
        return out;
    }

private:
    Amplitudes amps_;
    bool unit_ = false;
};

using HybridState = BasicState<PolAxis>;
using LabKey = BasisKey<PolAxis>;

template <class Axis>
BasicState<Axis> basis_state(OamIndex l, Axis p) {
    return BasicState<Axis>::from_amplitudes({{BasisKey<Axis>{l, p}, Complex{1.0, 0.0}}});
}

template <class Axis>
struct Term {
    Complex coefficient;
    BasicState<Axis> state;
};

/// Linear combination of `terms`, renormalized. Throws ZeroNorm when it vanishes.
template <class Axis>
BasicState<Axis> superpose(std::span<const Term<Axis>> terms) {
    typename BasicState<Axis>::Amplitudes acc;
    for (const auto& t : terms)
        for (const auto& [key, a] : t.state.amplitudes()) acc[key] += t.coefficient * a;
    auto combined = BasicState<Axis>::from_amplitudes(std::move(acc));
    if (combined.empty())
        throw Error(ErrorCode::zero_norm, "superposition vanishes");
    return combined.normalized();
}

template <class Axis>
BasicState<Axis> superpose(std::initializer_list<Term<Axis>> terms) {
    return superpose(std::span<const Term<Axis>>(terms.begin(), terms.size()));
}

/// <a|b>, antilinear in a.
template <class Axis>
Complex inner_product(const BasicState<Axis>& a, const BasicState<Axis>& b) {
    Complex sum{};
    const auto& small = a.amplitudes().size() <= b.amplitudes().size() ? a : b;
    const bool a_is_small = &small == &a;
    for (const auto& [key, amp] : small.amplitudes()) {
        const Complex other = a_is_small ? b.amplitude(key.l, key.pol) : a.amplitude(key.l, key.pol);
        sum += a_is_small ? std::conj(amp) * other : std::conj(other) * amp;
    }
    return sum;
}

/// |<a|b>| / (|a| |b|): equals 1 iff the states agree up to a global phase.
template <class Axis>
double fidelity_overlap(const BasicState<Axis>& a, const BasicState<Axis>& b) {
    const double na = a.norm();
    const double nb = b.norm();
    if (!(na > 0.0) || !(nb > 0.0)) return 0.0;
    return std::abs(inner_product(a, b)) / (na * nb);
}

struct Projection {
    std::optional<HybridState> state;  // empty when the component vanishes
    double probability = 0.0;

    const HybridState& state_or_throw() const {
        if (!state) throw Error(ErrorCode::zero_norm, "projected component vanishes");
        return *state;
    }
};

/// Keeps polarization `p`. The probability is the squared norm of that
/// component relative to the state's squared norm.
inline Projection project_pol(const HybridState& s, PolAxis p) {
    const double total = s.norm_squared();
    auto part = s.block(p);
    if (part.empty() || !(total > 0.0)) return {std::nullopt, 0.0};
    const double prob = part.norm_squared() / total;
    return {part.normalized(), prob};
}

/// A state written in the {|P>, |P_perp>} basis, |P> linear at `chi` radians
/// from vertical (toward +H): |P> = sin(chi)|H> + cos(chi)|V>,
/// |P_perp> = cos(chi)|H> - sin(chi)|V>.
struct PumpBasisState {
    double chi = 0.0;
    BasicState<PumpAxis> state;
};

inline PumpBasisState rotate_pol_basis(const HybridState& s, double chi) {
    const double sn = std::sin(chi);
    const double cs = std::cos(chi);
    BasicState<PumpAxis>::Amplitudes out;
    for (const OamIndex l : s.oam_indices()) {
        const Complex h = s.amplitude(l, PolAxis::H);
        const Complex v = s.amplitude(l, PolAxis::V);
        out[{l, PumpAxis::parallel}] = sn * h + cs * v;
        out[{l, PumpAxis::perpendicular}] = cs * h - sn * v;
    }
    return {chi, BasicState<PumpAxis>::from_amplitudes(std::move(out))};
}

/// Exact inverse of rotate_pol_basis.
inline HybridState to_lab(const PumpBasisState& r) {
    const double sn = std::sin(r.chi);
    const double cs = std::cos(r.chi);
    HybridState::Amplitudes out;
    for (const OamIndex l : r.state.oam_indices()) {
        const Complex par = r.state.amplitude(l, PumpAxis::parallel);
        const Complex perp = r.state.amplitude(l, PumpAxis::perpendicular);
        out[{l, PolAxis::H}] = sn * par + cs * perp;
        out[{l, PolAxis::V}] = cs * par - sn * perp;
    }
    return HybridState::from_amplitudes(std::move(out));
}

/// Reads the rotated coefficients as lab coordinates of a frame turned by chi
/// (|P> in the V slot, |P_perp> in the H slot). Rotating the result by -chi
/// recovers the original state.
inline HybridState as_lab_frame(const PumpBasisState& r) {
    HybridState::Amplitudes out;
    for (const auto& [key, a] : r.state.amplitudes())
        out[{key.l, key.pol == PumpAxis::parallel ? PolAxis::V : PolAxis::H}] = a;
    return HybridState::from_amplitudes(std::move(out));
}

// ---------------------------------------------------------------------------
// ElementOperator

enum class OperatorKind { unitary, partial_isometry };

struct Diagnostics {
    std::vector<std::string> warnings;
};

/// Linear map on HybridState given column by column: `column(key)` returns the
/// image of the basis vector `key`, or nothing when `key` lies outside the
/// operator's input support (applying it then throws UnsupportedInput).
class ElementOperator {
public:
    using Column = std::vector<std::pair<LabKey, Complex>>;
    using ColumnFn = std::function<std::optional<Column>(const LabKey&)>;
    using CheckFn = std::function<void(const HybridState&, Diagnostics&)>;

    ElementOperator(std::string name, OperatorKind kind, ColumnFn column, CheckFn check = {})
        : name_(std::move(name)), kind_(kind), column_(std::move(column)), check_(std::move(check)) {}

    const std::string& name() const { return name_; }
    OperatorKind kind() const { return kind_; }

    std::optional<Column> column(const LabKey& key) const { return column_(key); }

    HybridState apply(const HybridState& s, Diagnostics* diag = nullptr) const {
        if (check_) {
            Diagnostics local;
            check_(s, diag ? *diag : local);
        }
        HybridState::Amplitudes out;
        for (const auto& [key, a] : s.amplitudes()) {
            auto col = column_(key);
            if (!col)
                throw Error(ErrorCode::unsupported_input,
                            name_ + " does not accept OAM index " + std::to_string(key.l.value()));
            for (const auto& [k, c] : *col) out[k] += c * a;
        }
        return HybridState::from_amplitudes(std::move(out));
    }

    /// `next ∘ this`: apply this operator first, then `next`.
    ElementOperator then(const ElementOperator& next) const {
        const OperatorKind kind = (kind_ == OperatorKind::unitary && next.kind_ == OperatorKind::unitary)
                                      ? OperatorKind::unitary
                                      : OperatorKind::partial_isometry;
        ElementOperator first = *this;
        ElementOperator second = next;
        ColumnFn fn = [first, second](const LabKey& key) -> std::optional<Column> {
            auto col = first.column(key);
            if (!col) return std::nullopt;
            std::map<LabKey, Complex> acc;
            for (const auto& [k, c] : *col) {
                auto col2 = second.column(k);
                if (!col2) return std::nullopt;
                for (const auto& [k2, c2] : *col2) acc[k2] += c * c2;
            }
            return Column(acc.begin(), acc.end());
        };
        CheckFn check = first.check_;
        return ElementOperator(next.name_ + "*" + name_, kind, std::move(fn), std::move(check));
    }

    /// Gram matrix G_ij = <O e_i | O e_j> over the given basis vectors; O†O = I
    /// on that support iff G is the identity.
    std::vector<std::vector<Complex>> gram(std::span<const LabKey> support) const {
        std::vector<HybridState> images;
        images.reserve(support.size());
        for (const auto& key : support) images.push_back(apply(basis_state(key.l, key.pol)));
        std::vector<std::vector<Complex>> g(support.size(), std::vector<Complex>(support.size()));
        for (std::size_t i = 0; i < support.size(); ++i)
            for (std::size_t j = 0; j < support.size(); ++j) g[i][j] = inner_product(images[i], images[j]);
        return g;
    }

    /// max |G - I| over `support`.
    double unitarity_defect(std::span<const LabKey> support) const {
        const auto g = gram(support);
        double worst = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i)
            for (std::size_t j = 0; j < g.size(); ++j)
                worst = std::max(worst, std::abs(g[i][j] - Complex(i == j ? 1.0 : 0.0, 0.0)));
        return worst;
    }

private:
    std::string name_;
    OperatorKind kind_;
    ColumnFn column_;
    CheckFn check_;
};

}  // namespace oamgear
