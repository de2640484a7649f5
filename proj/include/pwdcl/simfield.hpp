#pragma once

// Linear single-scattering RF simulator for steered plane-wave transmits.
// No attenuation, no element directivity, no transducer impulse response.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "pwdcl/core.hpp"
#include "pwdcl/random.hpp"

namespace pwdcl {

struct Scatterer {
    double x = 0.0;
    double z = 0.0;
    double amplitude = 1.0;

    bool operator==(const Scatterer&) const = default;
};

struct Bounds {
    double x_min = 0.0;
    double x_max = 0.0;
    double z_min = 0.0;
    double z_max = 0.0;

    bool contains(double x, double z) const { return x >= x_min && x <= x_max && z >= z_min && z <= z_max; }
    double area() const { return (x_max - x_min) * (z_max - z_min); }

    bool operator==(const Bounds&) const = default;
};

struct Cyst {
    double x = 0.0;
    double z = 0.0;
    double radius = 0.0;

    bool contains(double px, double pz) const {
        const double dx = px - x, dz = pz - z;
        return dx * dx + dz * dz < radius * radius;
    }

    bool operator==(const Cyst&) const = default;
};

struct Phantom {
    std::vector<Scatterer> scatterers;
    std::string label;
    Bounds bounds;
    std::vector<Cyst> cysts;  // anechoic regions, kept for region masks
    bool empty_medium = false;
};

inline Bounds bounding_box(const std::vector<Scatterer>& s) {
    if (s.empty()) return {};
    Bounds b{s[0].x, s[0].x, s[0].z, s[0].z};
    for (const auto& p : s) {
        b.x_min = std::min(b.x_min, p.x);
        b.x_max = std::max(b.x_max, p.x);
        b.z_min = std::min(b.z_min, p.z);
        b.z_max = std::max(b.z_max, p.z);
    }
    return b;
}

inline Violations validate(const Phantom& ph) {
    Violations out;
    if (ph.scatterers.empty() && !ph.empty_medium)
        out.push_back({"scatterers", "must be non-empty unless the phantom is an empty medium"});
    for (std::size_t i = 0; i < ph.scatterers.size(); ++i) {
        const auto& s = ph.scatterers[i];
        const std::string f = "scatterers[" + std::to_string(i) + "]";
        if (!(s.z > 0)) out.push_back({f + ".z", "must be > 0"});
        if (!std::isfinite(s.amplitude)) out.push_back({f + ".amplitude", "must be finite"});
        if (!ph.bounds.contains(s.x, s.z)) out.push_back({f, "outside the declared bounding box"});
    }
    return out;
}

/// Gaussian-windowed cosine g(t) = exp(-t^2 / (2 sigma^2)) cos(2 pi f0 t).
struct Pulse {
    double f0 = 5.0e6;
    double fractional_bandwidth = 0.7;

    /// sigma such that the half-amplitude (-6 dB) spectral width is fractional_bandwidth * f0.
    double sigma() const {
        return std::sqrt(2.0 * std::numbers::ln2) / (std::numbers::pi * fractional_bandwidth * f0);
    }
    /// Half-length beyond which the pulse is treated as zero (|g| < 4e-6).
    double support() const { return 5.0 * sigma(); }
    double n_cycles() const { return 2.0 * support() * f0; }

    double operator()(double t) const {
        const double s = sigma();
        return std::exp(-t * t / (2.0 * s * s)) * std::cos(2.0 * std::numbers::pi * f0 * t);
    }
};

inline Violations validate(const Pulse& p) {
    Violations out;
    if (!(p.f0 > 0)) out.push_back({"f0", "must be > 0"});
    if (!(p.fractional_bandwidth > 0 && p.fractional_bandwidth < 2))
        out.push_back({"fractional_bandwidth", "must lie in (0, 2)"});
    return out;
}

struct SimOptions {
    double t0 = 0.0;          // time of first sample
    double noise_std = 0.0;   // additive white Gaussian noise, off by default
};

/// Simulate one plane-wave transmit. Scatterers are accumulated in list order.
inline RfFrame simulate_rf(const Phantom& phantom, const ProbeGeometry& probe, SteeringAngle angle, double duration,
                           const Pulse& pulse, std::uint64_t seed, const SimOptions& opts = {}) {
    require_valid(probe, "probe");
    require_valid(angle, "angle");
    require_valid(pulse, "pulse");
    for (const auto& s : phantom.scatterers)
        if (!std::isfinite(s.amplitude) || !std::isfinite(s.x) || !std::isfinite(s.z))
            throw InvalidArgument("simulate_rf: scatterer with non-finite coordinates or amplitude");
    if (!(duration > 0)) throw InvalidArgument("simulate_rf: duration must be > 0");
    if (!(opts.t0 >= 0)) throw InvalidArgument("simulate_rf: t0 must be >= 0");

    const auto n_samples = detail::ceil_count(duration * probe.fs);
    RfFrame rf{probe, angle, Array2D<double>(static_cast<std::size_t>(probe.n_elements), n_samples), opts.t0, {}};

    const double support = pulse.support();
    const double t_end = opts.t0 + static_cast<double>(n_samples - 1) / probe.fs;
    std::size_t truncated = 0;

    for (int e = 0; e < probe.n_elements; ++e) {
        const double xe = probe.element_x(e);
        auto channel = rf.samples.row(static_cast<std::size_t>(e));
        for (const auto& s : phantom.scatterers) {
            const double tau = transmit_delay(s.x, s.z, angle, probe.c) + receive_delay(s.x, s.z, xe, probe.c);
            if (tau + support > t_end || tau - support < opts.t0) ++truncated;
            const double lo = std::ceil((tau - support - opts.t0) * probe.fs);
            const double hi = std::floor((tau + support - opts.t0) * probe.fs);
            const auto n_lo = static_cast<std::ptrdiff_t>(std::max(lo, 0.0));
            const auto n_hi = static_cast<std::ptrdiff_t>(std::min(hi, static_cast<double>(n_samples) - 1.0));
            for (std::ptrdiff_t n = n_lo; n <= n_hi; ++n) {
                const double t = opts.t0 + static_cast<double>(n) / probe.fs;
                channel[static_cast<std::size_t>(n)] += s.amplitude * pulse(t - tau);
            }
        }
    }

    if (truncated > 0)
        rf.notes.push_back("truncated: " + std::to_string(truncated) +
                           " scatterer-channel echoes fall partly outside the recorded window");

    if (opts.noise_std > 0) {
        Rng rng(seed);
        for (auto& v : rf.samples.data()) v += opts.noise_std * rng.normal();
    }
    return rf;
}

/// Round-trip time to the deepest scatterer plus pulse tail, over all steering angles in the fan.
inline double required_duration(const Phantom& phantom, const ProbeGeometry& probe, double max_angle_rad,
                                const Pulse& pulse) {
    double worst = 0.0;
    const double xe_max = std::abs(probe.element_x(0));
    for (const auto& s : phantom.scatterers) {
        const double tx = (s.z * 1.0 + std::abs(s.x) * std::sin(std::abs(max_angle_rad))) / probe.c;
        const double rx = std::sqrt((std::abs(s.x) + xe_max) * (std::abs(s.x) + xe_max) + s.z * s.z) / probe.c;
        worst = std::max(worst, tx + rx);
    }
    return worst + 2.0 * pulse.support();
}

/// Unit scatterers at every (lateral, depth) combination.
inline Phantom build_point_phantom(const std::vector<double>& depths, const std::vector<double>& lateral_positions) {
    if (depths.empty() || lateral_positions.empty())
        throw InvalidArgument("build_point_phantom: depth and lateral lists must be non-empty");
    Phantom ph;
    ph.label = "points";
    for (double z : depths) {
        if (!(z > 0)) throw InvalidArgument("build_point_phantom: depths must be > 0");
        for (double x : lateral_positions) ph.scatterers.push_back({x, z, 1.0});
    }
    ph.bounds = bounding_box(ph.scatterers);
    return ph;
}

/// Point layout with a center scanline column (5..40 mm every 5 mm) and two lateral rows.
inline Phantom default_point_phantom() {
    Phantom ph = build_point_phantom({5e-3, 10e-3, 15e-3, 20e-3, 25e-3, 30e-3, 35e-3, 40e-3}, {0.0});
    for (double z : {15e-3, 30e-3})
        for (double x : {-10e-3, -5e-3, 5e-3, 10e-3}) ph.scatterers.push_back({x, z, 1.0});
    ph.bounds = bounding_box(ph.scatterers);
    return ph;
}

/// Fully developed speckle background with anechoic disks. Background count is
/// density * box area (at least one), drawn uniformly and rejected inside any cyst.
inline Phantom build_cyst_phantom(const std::vector<std::pair<double, double>>& cyst_centers, double cyst_radius,
                                  double scatterer_density, std::uint64_t seed, const Bounds& box) {
    if (!(cyst_radius > 0)) throw InvalidArgument("build_cyst_phantom: radius must be > 0");
    if (!(scatterer_density > 0)) throw InvalidArgument("build_cyst_phantom: density must be > 0");
    if (!(box.x_max > box.x_min && box.z_max > box.z_min && box.z_min > 0))
        throw InvalidArgument("build_cyst_phantom: bounding box must be non-empty with z_min > 0");

    Phantom ph;
    ph.label = "cysts";
    ph.bounds = box;
    for (const auto& [cx, cz] : cyst_centers) {
        if (cx - cyst_radius < box.x_min || cx + cyst_radius > box.x_max || cz - cyst_radius < box.z_min ||
            cz + cyst_radius > box.z_max)
            throw InvalidArgument("build_cyst_phantom: cyst outside the bounding box");
        ph.cysts.push_back({cx, cz, cyst_radius});
    }

    const auto target = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(scatterer_density * box.area())));
    Rng rng(seed);
    const std::size_t max_draws = 1000 * target + 1000;
    std::size_t draws = 0;
    ph.scatterers.reserve(target);
    while (ph.scatterers.size() < target && draws < max_draws) {
        ++draws;
        const double x = rng.uniform(box.x_min, box.x_max);
        const double z = rng.uniform(box.z_min, box.z_max);
        const double a = rng.normal();
        bool inside = false;
        for (const auto& c : ph.cysts) inside = inside || c.contains(x, z);
        if (!inside) ph.scatterers.push_back({x, z, a});
    }
    if (ph.scatterers.empty()) throw InvalidArgument("build_cyst_phantom: cysts cover the whole box");
    return ph;
}

/// 3x3 cyst grid filling the given box.
inline Phantom default_cyst_phantom(const Bounds& box, double radius, double density, std::uint64_t seed) {
    std::vector<std::pair<double, double>> centers;
    const double w = box.x_max - box.x_min, h = box.z_max - box.z_min;
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c)
            centers.emplace_back(box.x_min + w * (0.5 + c) / 3.0, box.z_min + h * (0.5 + r) / 3.0);
    return build_cyst_phantom(centers, radius, density, seed, box);
}

// Phantom text file:
//   PHANTOM v1 <label>
//   # bounds x_min x_max z_min z_max     (optional)
//   # cyst x z radius                    (optional, repeated)
//   x z amplitude                        (one per scatterer)

inline std::string format_phantom(const Phantom& ph) {
    std::ostringstream os;
    os << std::setprecision(17);
    os << "PHANTOM v1 " << ph.label << '\n';
    os << "# bounds " << ph.bounds.x_min << ' ' << ph.bounds.x_max << ' ' << ph.bounds.z_min << ' '
       << ph.bounds.z_max << '\n';
    for (const auto& c : ph.cysts) os << "# cyst " << c.x << ' ' << c.z << ' ' << c.radius << '\n';
    for (const auto& s : ph.scatterers) os << s.x << ' ' << s.z << ' ' << s.amplitude << '\n';
    return os.str();
}

inline Phantom parse_phantom(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    if (!std::getline(is, line) || line.rfind("PHANTOM v1", 0) != 0)
        throw ParseError("phantom file must start with 'PHANTOM v1 <label>'", 1);
    Phantom ph;
    ph.label = line.size() > 11 ? line.substr(11) : "";
    bool have_bounds = false;
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::istringstream ls(line);
        if (line[0] == '#') {
            std::string hash, kind;
            ls >> hash >> kind;
            if (kind == "bounds") {
                if (!(ls >> ph.bounds.x_min >> ph.bounds.x_max >> ph.bounds.z_min >> ph.bounds.z_max))
                    throw ParseError("malformed bounds line", lineno);
                have_bounds = true;
            } else if (kind == "cyst") {
                Cyst c;
                if (!(ls >> c.x >> c.z >> c.radius)) throw ParseError("malformed cyst line", lineno);
                ph.cysts.push_back(c);
            }
            continue;
        }
        Scatterer s;
        std::string extra;
        if (!(ls >> s.x >> s.z >> s.amplitude) || (ls >> extra))
            throw ParseError("expected 'x z amplitude'", lineno);
        ph.scatterers.push_back(s);
    }
    if (!have_bounds) ph.bounds = bounding_box(ph.scatterers);
    ph.empty_medium = ph.scatterers.empty();
    return ph;
}

inline void write_phantom(const std::string& path, const Phantom& ph) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    f << format_phantom(ph);
    if (!f) throw std::runtime_error("write failed: " + path);
}

inline Phantom read_phantom(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_phantom(ss.str());
}

} // namespace pwdcl
