#pragma once

// Transverse fields from p = 0 Laguerre-Gaussian modes at the waist plane, and
// intensity images in a 16-bit binary PGM container.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "hybrid_state.hpp"

namespace oamgear {

/// Square sampling window [-extent, extent]^2 with n pixels per side. `waist`
/// is the LG beam waist in the same length unit as `extent`.
struct GridSpec {
    int n = 512;
    double extent = 2.5;
    double waist = 1.0;

    double pitch() const { return 2.0 * extent / n; }

    /// Pixel centre; x grows to the right, y grows upward, row 0 is the top row.
    double x_at(int col) const { return -extent + (col + 0.5) * pitch(); }
    double y_at(int row) const { return extent - (row + 0.5) * pitch(); }
};

inline void validate(const GridSpec& g) {
    if (g.n < 32) throw Error(ErrorCode::invalid_argument, "grid needs n >= 32");
    if (!(g.extent > 0.0)) throw Error(ErrorCode::invalid_argument, "grid extent must be positive");
    if (!(g.waist > 0.0)) throw Error(ErrorCode::invalid_argument, "beam waist must be positive");
}

/// Radius of maximum |LG_l|^2.
inline double ring_radius(OamIndex l, double waist) { return waist * std::sqrt(l.magnitude() / 2.0); }

inline constexpr double ring_fraction_of_window = 0.6;

/// Grid whose waist puts the |l| ring at 60% of the window half-width.
inline GridSpec default_grid(OamIndex l, int n = 512, double extent = 2.5) {
    GridSpec g{n, extent, 1.0};
    if (l.magnitude() > 0) g.waist = ring_fraction_of_window * extent / std::sqrt(l.magnitude() / 2.0);
    return g;
}

/// Radial factor N_l (sqrt2 r / w)^|l| exp(-r^2 / w^2), unit power over the plane.
inline double lg_radial(int abs_l, double r, double w) {
    if (r <= 0.0) return abs_l == 0 ? std::sqrt(2.0 / (pi * w * w)) : 0.0;
    const double log_amp = 0.5 * std::log(2.0 / (pi * w * w)) - 0.5 * std::lgamma(abs_l + 1.0) +
                           abs_l * std::log(std::sqrt(2.0) * r / w) - r * r / (w * w);
    return std::exp(log_amp);
}

inline Complex lg_amplitude(OamIndex l, double r, double phi, double w) {
    return std::polar(lg_radial(l.magnitude(), r, w), l.value() * phi);
}

/// Incoherent sum over polarizations of the coherent OAM superposition.
inline double intensity_at(const HybridState& s, double x, double y, double w) {
    const double r = std::hypot(x, y);
    const double phi = std::atan2(y, x);
    Complex field_h{};
    Complex field_v{};
    for (const auto& [key, a] : s.amplitudes()) {
        const Complex mode = lg_amplitude(key.l, r, phi, w);
        (key.pol == PolAxis::H ? field_h : field_v) += a * mode;
    }
    return std::norm(field_h) + std::norm(field_v);
}

enum class Normalization { raw, unit_peak };

class IntensityImage {
public:
    IntensityImage() = default;
    IntensityImage(GridSpec grid, std::vector<double> pixels, Normalization tag = Normalization::raw)
        : grid_(grid), pixels_(std::move(pixels)), tag_(tag) {
        if (pixels_.size() != static_cast<std::size_t>(grid_.n) * static_cast<std::size_t>(grid_.n))
            throw Error(ErrorCode::invalid_argument, "pixel count does not match n*n");
        for (const double p : pixels_) {
            if (!(p >= 0.0)) throw Error(ErrorCode::invalid_argument, "intensities must be non-negative");
        }
    }

    int n() const { return grid_.n; }
    const GridSpec& grid() const { return grid_; }
    Normalization normalization() const { return tag_; }
    const std::vector<double>& pixels() const { return pixels_; }

    double at(int row, int col) const {
        return pixels_[static_cast<std::size_t>(row) * static_cast<std::size_t>(grid_.n) +
                       static_cast<std::size_t>(col)];
    }

    double max() const { return pixels_.empty() ? 0.0 : *std::max_element(pixels_.begin(), pixels_.end()); }

    /// Sum of pixels times pixel area.
    double total_power() const {
        double sum = 0.0;
        for (double p : pixels_) sum += p;
        return sum * grid_.pitch() * grid_.pitch();
    }

    IntensityImage unit_peak() const {
        const double peak = max();
        if (!(peak > 0.0)) throw Error(ErrorCode::all_zero_image, "image has no positive pixel");
        std::vector<double> out(pixels_);
        for (double& p : out) p /= peak;
        return IntensityImage(grid_, std::move(out), Normalization::unit_peak);
    }

private:
    GridSpec grid_{};
    std::vector<double> pixels_;
    Normalization tag_ = Normalization::raw;
};

inline IntensityImage render(const HybridState& s, const GridSpec& grid) {
    validate(grid);
    const auto n = static_cast<std::size_t>(grid.n);

    // Per pixel, each distinct |l| needs one radial factor; the azimuthal
    // phase is the only l-dependent part beyond that.
    std::map<int, std::vector<std::pair<const LabKey*, Complex>>> by_charge;
    for (const auto& [key, a] : s.amplitudes()) by_charge[key.l.magnitude()].push_back({&key, a});

    std::vector<double> pixels(n * n);
    for (int row = 0; row < grid.n; ++row) {
        const double y = grid.y_at(row);
        for (int col = 0; col < grid.n; ++col) {
            const double x = grid.x_at(col);
            const double r = std::hypot(x, y);
            const double phi = std::atan2(y, x);
            Complex field_h{};
            Complex field_v{};
            for (const auto& [abs_l, terms] : by_charge) {
                const double radial = lg_radial(abs_l, r, grid.waist);
                if (radial == 0.0) continue;
                for (const auto& [key, a] : terms) {
                    const Complex mode = std::polar(radial, key->l.value() * phi);
                    (key->pol == PolAxis::H ? field_h : field_v) += a * mode;
                }
            }
            pixels[static_cast<std::size_t>(row) * n + static_cast<std::size_t>(col)] =
                std::norm(field_h) + std::norm(field_v);
        }
    }
    return IntensityImage(grid, std::move(pixels));
}

// ---------------------------------------------------------------------------
// PGM (P5, 16-bit big-endian, maxval 65535)

/// Sample value round-half-up(65535 * I / I_max).
inline std::uint16_t quantize(double value, double peak) {
    const double scaled = std::floor(65535.0 * value / peak + 0.5);
    return static_cast<std::uint16_t>(std::clamp(scaled, 0.0, 65535.0));
}

inline std::string encode_pgm(const IntensityImage& img) {
    const double peak = img.max();
    if (!(peak > 0.0)) throw Error(ErrorCode::all_zero_image, "refusing to encode an all-zero image");
    std::string out = "P5\n" + std::to_string(img.n()) + " " + std::to_string(img.n()) + "\n65535\n";
    out.reserve(out.size() + 2 * img.pixels().size());
    for (double p : img.pixels()) {
        const std::uint16_t q = quantize(p, peak);
        out.push_back(static_cast<char>(q >> 8));
        out.push_back(static_cast<char>(q & 0xFF));
    }
    return out;
}

inline void write_pgm(const IntensityImage& img, const std::string& path) {
    const std::string bytes = encode_pgm(img);
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw Error(ErrorCode::io_failure, "cannot open " + path + " for writing");
    f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!f) throw Error(ErrorCode::io_failure, "write failed for " + path);
}

/// Reads a square P5 file written by write_pgm; pixels come back as sample / 65535
/// on a grid with the given spec (n is taken from the file).
inline IntensityImage read_pgm(const std::string& path, GridSpec grid = {}) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorCode::io_failure, "cannot open " + path);
    std::string magic;
    int width = 0;
    int height = 0;
    int maxval = 0;
    f >> magic >> width >> height >> maxval;
    if (!f || magic != "P5" || maxval != 65535 || width != height || width <= 0)
        throw Error(ErrorCode::io_failure, path + " is not a square 16-bit P5 image");
    f.get();  // single whitespace byte after maxval
    const auto count = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    std::vector<unsigned char> raw(2 * count);
    f.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (!f) throw Error(ErrorCode::io_failure, path + " is truncated");
    std::vector<double> pixels(count);
    for (std::size_t i = 0; i < count; ++i) pixels[i] = ((raw[2 * i] << 8) | raw[2 * i + 1]) / 65535.0;
    grid.n = width;
    return IntensityImage(grid, std::move(pixels), Normalization::unit_peak);
}

}  // namespace oamgear
