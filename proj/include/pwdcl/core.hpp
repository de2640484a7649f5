#pragma once

// Domain types shared by the simulator, beamformers, network and metrics.
// Everything here is a plain value type; operations are free functions.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pwdcl/errors.hpp"

namespace pwdcl {

/// Dense row-major 2-D array.
template <typename T>
class Array2D {
public:
    Array2D() = default;
    Array2D(std::size_t rows, std::size_t cols, T fill = T{})
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const T& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<T> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const T> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

    std::vector<T>& data() noexcept { return data_; }
    const std::vector<T>& data() const noexcept { return data_; }

    bool operator==(const Array2D&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<T> data_;
};

/// Linear array, 2-D model (no elevation).
struct ProbeGeometry {
    int n_elements = 128;
    double pitch = 0.3e-3;  // m
    double f0 = 5.0e6;      // Hz
    double fs = 40.0e6;     // Hz
    double c = 1540.0;      // m/s

    /// Lateral element position, symmetric about x = 0.
    double element_x(int i) const {
        return (static_cast<double>(i) - 0.5 * static_cast<double>(n_elements - 1)) * pitch;
    }
    double wavelength() const { return c / f0; }
    double aperture() const { return pitch * static_cast<double>(n_elements - 1); }

    bool operator==(const ProbeGeometry&) const = default;
};

/// Steering angle in radians from the depth axis, positive toward +x.
struct SteeringAngle {
    double theta = 0.0;

    static SteeringAngle from_degrees(double deg) { return {deg * std::numbers::pi / 180.0}; }
    double degrees() const { return theta * 180.0 / std::numbers::pi; }

    auto operator<=>(const SteeringAngle&) const = default;
};

/// Real RF channel data for one plane-wave transmit. samples is [n_elements x n_samples];
/// sample n of a channel is taken at t0 + n / fs.
struct RfFrame {
    ProbeGeometry probe;
    SteeringAngle angle;
    Array2D<double> samples;
    double t0 = 0.0;
    std::vector<std::string> notes;  // non-fatal diagnostics (e.g. truncated echoes)

    std::size_t n_channels() const { return samples.rows(); }
    std::size_t n_samples() const { return samples.cols(); }
};

/// Image sampling grid; (x0, z0) is the center of the top-left pixel.
struct PixelGrid {
    double x0 = 0.0;
    double z0 = 0.0;
    double dx = 1.0;
    double dz = 1.0;
    std::size_t width = 1;
    std::size_t height = 1;

    double x(std::size_t col) const { return x0 + static_cast<double>(col) * dx; }
    double z(std::size_t row) const { return z0 + static_cast<double>(row) * dz; }
    std::size_t pixel_count() const { return width * height; }

    bool operator==(const PixelGrid&) const = default;
};

/// Complex beamformed image held as separate I and Q planes [height x width].
/// angle is empty for compounded images.
struct IqImage {
    PixelGrid grid;
    Array2D<double> i_plane;
    Array2D<double> q_plane;
    std::optional<SteeringAngle> angle;
    double norm_scale = 1.0;

    static IqImage zeros(const PixelGrid& grid, std::optional<SteeringAngle> angle = std::nullopt) {
        return {grid, Array2D<double>(grid.height, grid.width), Array2D<double>(grid.height, grid.width),
                angle, 1.0};
    }
};

/// One IqImage per steering angle on a shared grid; validation_index marks the held-out frame.
struct PwSet {
    std::vector<IqImage> frames;
    std::size_t validation_index = 0;

    std::size_t size() const { return frames.size(); }
};

struct Violation {
    std::string field;
    std::string message;
};

using Violations = std::vector<Violation>;

namespace detail {

inline bool all_finite(std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

} // namespace detail

inline Violations validate(const ProbeGeometry& p) {
    Violations out;
    if (p.n_elements < 2) out.push_back({"n_elements", "must be >= 2"});
    if (!(p.pitch > 0)) out.push_back({"pitch", "must be > 0"});
    if (!(p.fs > 0)) out.push_back({"fs", "must be > 0"});
    if (!(p.f0 > 0 && p.f0 < p.fs / 2)) out.push_back({"f0", "must satisfy 0 < f0 < fs/2"});
    if (!(p.c > 0)) out.push_back({"c", "must be > 0"});
    return out;
}

inline Violations validate(const SteeringAngle& a) {
    if (!(std::abs(a.theta) < std::numbers::pi / 4)) return {{"theta", "|theta| must be < pi/4"}};
    return {};
}

inline Violations validate(const PixelGrid& g) {
    Violations out;
    if (!(g.dx > 0)) out.push_back({"dx", "must be > 0"});
    if (!(g.dz > 0)) out.push_back({"dz", "must be > 0"});
    if (!(g.z0 >= 0)) out.push_back({"z0", "must be >= 0"});
    if (g.width == 0) out.push_back({"width", "must be positive"});
    if (g.height == 0) out.push_back({"height", "must be positive"});
    if (!std::isfinite(g.x0)) out.push_back({"x0", "must be finite"});
    return out;
}

inline Violations validate(const RfFrame& rf) {
    Violations out = validate(rf.probe);
    for (auto& v : validate(rf.angle)) out.push_back(std::move(v));
    if (rf.n_samples() == 0) out.push_back({"n_samples", "must be > 0"});
    if (rf.n_channels() != static_cast<std::size_t>(rf.probe.n_elements))
        out.push_back({"samples", "channel count must equal probe.n_elements"});
    if (!detail::all_finite(rf.samples.data())) out.push_back({"samples", "all samples must be finite"});
    if (!(rf.t0 >= 0)) out.push_back({"t0", "must be >= 0"});
    return out;
}

inline Violations validate(const IqImage& im) {
    Violations out = validate(im.grid);
    const auto shape_ok = [&](const Array2D<double>& a) {
        return a.rows() == im.grid.height && a.cols() == im.grid.width;
    };
    if (!shape_ok(im.i_plane)) out.push_back({"i_plane", "shape must match grid"});
    if (!shape_ok(im.q_plane)) out.push_back({"q_plane", "shape must match grid"});
    if (!detail::all_finite(im.i_plane.data())) out.push_back({"i_plane", "all values must be finite"});
    if (!detail::all_finite(im.q_plane.data())) out.push_back({"q_plane", "all values must be finite"});
    if (im.angle)
        for (auto& v : validate(*im.angle)) out.push_back({"angle", v.message});
    if (!(im.norm_scale > 0) || !std::isfinite(im.norm_scale))
        out.push_back({"norm_scale", "must be positive and finite"});
    return out;
}

inline Violations validate(const PwSet& set) {
    Violations out;
    const std::size_t k = set.frames.size();
    if (k < 3) out.push_back({"frames", "length k >= 3 required"});
    if (set.validation_index >= k) out.push_back({"validation_index", "must satisfy 0 <= v < k"});
    for (std::size_t f = 0; f < k; ++f) {
        const auto& fr = set.frames[f];
        for (auto& v : validate(fr))
            out.push_back({"frames[" + std::to_string(f) + "]." + v.field, v.message});
        if (f > 0 && !(fr.grid == set.frames[0].grid))
            out.push_back({"frames[" + std::to_string(f) + "].grid", "all frames must share one grid"});
        if (!fr.angle) {
            out.push_back({"frames[" + std::to_string(f) + "].angle", "every frame needs a steering angle"});
        } else if (f > 0 && set.frames[f - 1].angle && !(set.frames[f - 1].angle->theta < fr.angle->theta)) {
            out.push_back({"frames[" + std::to_string(f) + "].angle", "angles must be strictly increasing"});
        }
    }
    return out;
}

template <typename T>
void require_valid(const T& value, const char* what) {
    const auto violations = validate(value);
    if (violations.empty()) return;
    std::string msg = std::string(what) + " invalid:";
    for (const auto& v : violations) msg += " [" + v.field + ": " + v.message + "]";
    throw InvalidArgument(msg);
}

// Time-of-flight model shared by simulation and beamforming. The plane wavefront
// crosses the array center at t = 0.

inline double transmit_delay(double x, double z, SteeringAngle angle, double c) {
    return (z * std::cos(angle.theta) + x * std::sin(angle.theta)) / c;
}

inline double receive_delay(double x, double z, double element_x, double c) {
    const double dx = x - element_x;
    return std::sqrt(dx * dx + z * z) / c;
}

namespace detail {

// ceil that ignores representation noise just above an integer.
inline std::size_t ceil_count(double ratio) {
    return static_cast<std::size_t>(std::ceil(ratio - 1e-9));
}

} // namespace detail

/// Grid over [z_min, z_max] axially and the full aperture laterally; dx = dz = wavelength / ppw.
inline PixelGrid make_pixel_grid(const ProbeGeometry& probe, double z_min, double z_max,
                                 double pixels_per_wavelength) {
    require_valid(probe, "probe");
    if (!(z_max > 0) || !(z_min >= 0) || !(z_max > z_min))
        throw InvalidArgument("make_pixel_grid: depth range must satisfy 0 <= z_min < z_max");
    if (!(pixels_per_wavelength >= 2))
        throw InvalidArgument("make_pixel_grid: pixels_per_wavelength must be >= 2");
    PixelGrid g;
    g.dz = probe.wavelength() / pixels_per_wavelength;
    g.dx = g.dz;
    g.x0 = probe.element_x(0);
    g.z0 = z_min;
    g.width = detail::ceil_count(probe.aperture() / g.dx) + 1;
    g.height = detail::ceil_count((z_max - z_min) / g.dz) + 1;
    return g;
}

inline PixelGrid make_pixel_grid(const ProbeGeometry& probe, double depth_max, double pixels_per_wavelength) {
    if (!(depth_max > 0)) throw InvalidArgument("make_pixel_grid: depth_max must be > 0");
    return make_pixel_grid(probe, 0.0, depth_max, pixels_per_wavelength);
}

/// Complex sample at pixel (row, col).
inline std::pair<double, double> iq_at(const IqImage& im, std::size_t r, std::size_t c) {
    return {im.i_plane(r, c), im.q_plane(r, c)};
}

inline Array2D<double> envelope(const IqImage& im) {
    Array2D<double> env(im.grid.height, im.grid.width);
    for (std::size_t k = 0; k < env.size(); ++k)
        env.data()[k] = std::hypot(im.i_plane.data()[k], im.q_plane.data()[k]);
    return env;
}

/// Uniformly spaced fan of k angles over [-max, +max].
inline std::vector<SteeringAngle> angle_fan(std::size_t k, double max_angle_rad) {
    std::vector<SteeringAngle> out;
    if (k == 0) return out;
    if (k == 1) return {SteeringAngle{0.0}};
    out.reserve(k);
    for (std::size_t i = 0; i < k; ++i)
        out.push_back({-max_angle_rad + 2.0 * max_angle_rad * static_cast<double>(i) / static_cast<double>(k - 1)});
    return out;
}

} // namespace pwdcl
