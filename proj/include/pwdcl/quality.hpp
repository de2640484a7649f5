#pragma once

// Image-quality metrics: profiles, FWHM, peak range axial-lobe level, CNR and gCNR.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "pwdcl/beamform.hpp"
#include "pwdcl/core.hpp"
#include "pwdcl/simfield.hpp"

namespace pwdcl {

enum class RegionLabel { isoechoic, anechoic, hyperechoic, hypoechoic, background };

inline const char* to_string(RegionLabel l) {
    switch (l) {
    case RegionLabel::isoechoic: return "isoechoic";
    case RegionLabel::anechoic: return "anechoic";
    case RegionLabel::hyperechoic: return "hyperechoic";
    case RegionLabel::hypoechoic: return "hypoechoic";
    case RegionLabel::background: return "background";
    }
    return "?";
}

struct RegionMask {
    PixelGrid grid;
    Array2D<unsigned char> membership;
    RegionLabel label = RegionLabel::background;

    std::size_t count() const {
        return static_cast<std::size_t>(std::count(membership.data().begin(), membership.data().end(), 1));
    }
};

inline constexpr std::size_t kMinRegionPixels = 16;

inline Violations validate(const RegionMask& m) {
    Violations out;
    if (m.membership.rows() != m.grid.height || m.membership.cols() != m.grid.width)
        out.push_back({"membership", "shape must match grid"});
    if (m.count() < kMinRegionPixels) out.push_back({"membership", "at least 16 member pixels required"});
    return out;
}

/// Pixels whose centers lie at distance in [r_inner, r_outer) from (cx, cz).
inline RegionMask ring_mask(const PixelGrid& g, double cx, double cz, double r_inner, double r_outer, RegionLabel label) {
    RegionMask m{g, Array2D<unsigned char>(g.height, g.width), label};
    for (std::size_t r = 0; r < g.height; ++r)
        for (std::size_t c = 0; c < g.width; ++c) {
            const double d = std::hypot(g.x(c) - cx, g.z(r) - cz);
            if (d >= r_inner && d < r_outer) m.membership(r, c) = 1;
        }
    return m;
}

inline RegionMask disk_mask(const PixelGrid& g, double cx, double cz, double radius, RegionLabel label) {
    return ring_mask(g, cx, cz, 0.0, radius, label);
}

/// Inner disk shrunk by `margin` and an outer ring of the same area starting `margin` beyond the wall.
struct CystMasks {
    RegionMask inner;
    RegionMask outer;
};

inline CystMasks cyst_masks(const PixelGrid& g, const Cyst& cyst, double margin) {
    const double r_in = cyst.radius - margin;
    if (!(r_in > 0)) throw InvalidArgument("cyst_masks: margin swallows the cyst");
    const double r0 = cyst.radius + margin;
    const double r1 = std::sqrt(r0 * r0 + r_in * r_in);
    return {disk_mask(g, cyst.x, cyst.z, r_in, RegionLabel::anechoic),
            ring_mask(g, cyst.x, cyst.z, r0, r1, RegionLabel::background)};
}

inline std::vector<double> masked_values(const Array2D<double>& img, const RegionMask& m) {
    if (img.rows() != m.membership.rows() || img.cols() != m.membership.cols())
        throw InvalidArgument("region mask shape does not match image");
    std::vector<double> v;
    for (std::size_t k = 0; k < img.size(); ++k)
        if (m.membership.data()[k]) v.push_back(img.data()[k]);
    return v;
}

// ---------------------------------------------------------------------------
// Profiles

enum class ProfileAxis { lateral, axial };

struct Profile {
    ProfileAxis axis = ProfileAxis::lateral;
    std::vector<double> positions;  // m, strictly increasing
    std::vector<double> values_db;  // peak at 0 dB
};

/// Nearest row (lateral) or column (axial) to fixed_coordinate, renormalized to its own peak.
inline Profile extract_profile(const BmodeImage& bmode, ProfileAxis axis, double fixed_coordinate) {
    const auto& g = bmode.grid;
    Profile p;
    p.axis = axis;
    if (axis == ProfileAxis::lateral) {
        const double fr = (fixed_coordinate - g.z0) / g.dz;
        if (!(fr > -0.5 && fr < static_cast<double>(g.height) - 0.5))
            throw InvalidArgument("extract_profile: depth outside the grid");
        const auto row = static_cast<std::size_t>(std::lround(std::max(0.0, fr)));
        for (std::size_t c = 0; c < g.width; ++c) {
            p.positions.push_back(g.x(c));
            p.values_db.push_back(bmode.db_values(row, c));
        }
    } else {
        const double fc = (fixed_coordinate - g.x0) / g.dx;
        if (!(fc > -0.5 && fc < static_cast<double>(g.width) - 0.5))
            throw InvalidArgument("extract_profile: lateral position outside the grid");
        const auto col = static_cast<std::size_t>(std::lround(std::max(0.0, fc)));
        for (std::size_t r = 0; r < g.height; ++r) {
            p.positions.push_back(g.z(r));
            p.values_db.push_back(bmode.db_values(r, col));
        }
    }
    const double peak = *std::max_element(p.values_db.begin(), p.values_db.end());
    for (auto& v : p.values_db) v -= peak;
    return p;
}

/// Samples with position in [lo, hi], renormalized to their own peak.
inline Profile window_profile(const Profile& p, double lo, double hi) {
    Profile out;
    out.axis = p.axis;
    for (std::size_t k = 0; k < p.positions.size(); ++k)
        if (p.positions[k] >= lo && p.positions[k] <= hi) {
            out.positions.push_back(p.positions[k]);
            out.values_db.push_back(p.values_db[k]);
        }
    if (out.positions.empty()) throw InvalidArgument("window_profile: no samples inside the window");
    const double peak = *std::max_element(out.values_db.begin(), out.values_db.end());
    for (auto& v : out.values_db) v -= peak;
    return out;
}

// 20 log10(1/2)
inline constexpr double kHalfAmplitudeDb = -6.020599913279624;

/// Width between the half-amplitude crossings nearest the global peak, interpolated
/// linearly in amplitude between samples.
inline double fwhm(const Profile& p) {
    const std::size_t n = p.values_db.size();
    if (n < 3 || p.positions.size() != n) throw InvalidArgument("fwhm: profile needs at least 3 samples");
    const auto peak_it = std::max_element(p.values_db.begin(), p.values_db.end());
    const auto ipk = static_cast<std::size_t>(peak_it - p.values_db.begin());
    const double peak_db = *peak_it;
    if (ipk == 0 || ipk == n - 1) throw OneSidedPeak("fwhm: peak at profile endpoint");
    const double half = std::pow(10.0, (peak_db + kHalfAmplitudeDb) / 20.0);
    const auto amp = [&](std::size_t k) { return std::pow(10.0, p.values_db[k] / 20.0); };

    const auto crossing = [&](std::size_t inside, std::size_t outside) {
        const double a_in = amp(inside), a_out = amp(outside);
        const double t = (a_in - half) / (a_in - a_out);
        return p.positions[inside] + t * (p.positions[outside] - p.positions[inside]);
    };

    std::size_t l = ipk;
    while (l > 0 && amp(l - 1) > half) --l;
    if (l == 0) throw OneSidedPeak("fwhm: no half-maximum crossing left of the peak");
    std::size_t r = ipk;
    while (r + 1 < n && amp(r + 1) > half) ++r;
    if (r + 1 == n) throw OneSidedPeak("fwhm: no half-maximum crossing right of the peak");
    return crossing(r, r + 1) - crossing(l, l - 1);
}

struct PralOptions {
    double guard = 1.5e-3;
    double window = 5e-3;
};

/// Main-lobe peak (within +-guard of target_depth) minus the maximum inside
/// [target + guard, target + guard + window]; positive dB, larger is better.
inline double pral(const Profile& axial, double target_depth, const PralOptions& opt = {}) {
    const auto& z = axial.positions;
    if (z.empty()) throw InvalidArgument("pral: empty profile");
    const double w_lo = target_depth + opt.guard, w_hi = target_depth + opt.guard + opt.window;
    if (w_lo < z.front() || w_hi > z.back()) throw InvalidArgument("pral: window outside the profile");
    double main_peak = -std::numeric_limits<double>::infinity();
    double lobe = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < z.size(); ++k) {
        if (std::abs(z[k] - target_depth) <= opt.guard) main_peak = std::max(main_peak, axial.values_db[k]);
        if (z[k] >= w_lo && z[k] <= w_hi) lobe = std::max(lobe, axial.values_db[k]);
    }
    if (!std::isfinite(main_peak)) throw InvalidArgument("pral: no samples within the guard of the target");
    if (!std::isfinite(lobe)) throw InvalidArgument("pral: window contains no samples");
    return main_peak - lobe;
}

// ---------------------------------------------------------------------------
// Contrast

struct Moments {
    double mean = 0.0;
    double variance = 0.0;  // population
};

inline Moments moments(const std::vector<double>& v) {
    if (v.empty()) throw InvalidArgument("moments: empty region");
    double s = 0.0;
    for (double x : v) s += x;
    const double mean = s / static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return {mean, ss / static_cast<double>(v.size())};
}

/// 20 log10(|mu_i - mu_o| / sqrt(var_i + var_o)) from summary statistics.
inline double cnr_from_moments(const Moments& in, const Moments& out) {
    const double pooled = in.variance + out.variance;
    if (!(pooled > 0)) throw DegenerateVariance("cnr: zero pooled variance");
    const double diff = std::abs(in.mean - out.mean);
    if (diff == 0.0) return -std::numeric_limits<double>::infinity();
    return 20.0 * std::log10(diff / std::sqrt(pooled));
}

/// CNR on the given image (envelope amplitudes by default; pass dB values for the dB-domain variant).
inline double cnr(const Array2D<double>& image, const RegionMask& inner, const RegionMask& outer) {
    require_valid(inner, "inner mask");
    require_valid(outer, "outer mask");
    return cnr_from_moments(moments(masked_values(image, inner)), moments(masked_values(image, outer)));
}

/// 1 - overlap of the two unit-mass histograms over the pooled [min, max] range.
inline double gcnr_from_samples(const std::vector<double>& a, const std::vector<double>& b, std::size_t bins = 256) {
    if (a.empty() || b.empty()) throw InvalidArgument("gcnr: empty region");
    if (bins < 32) throw InvalidArgument("gcnr: at least 32 bins required");
    const auto [amin, amax] = std::minmax_element(a.begin(), a.end());
    const auto [bmin, bmax] = std::minmax_element(b.begin(), b.end());
    const double lo = std::min(*amin, *bmin), hi = std::max(*amax, *bmax);
    if (!(hi > lo)) return 0.0;
    const auto hist = [&](const std::vector<double>& v) {
        std::vector<double> h(bins, 0.0);
        for (double x : v) {
            auto k = static_cast<std::size_t>((x - lo) / (hi - lo) * static_cast<double>(bins));
            h[std::min(k, bins - 1)] += 1.0;
        }
        for (auto& c : h) c /= static_cast<double>(v.size());
        return h;
    };
    const auto ha = hist(a), hb = hist(b);
    double overlap = 0.0;
    for (std::size_t k = 0; k < bins; ++k) overlap += std::min(ha[k], hb[k]);
    return std::clamp(1.0 - overlap, 0.0, 1.0);
}

inline double gcnr(const Array2D<double>& image, const RegionMask& inner, const RegionMask& outer,
                   std::size_t bins = 256) {
    require_valid(inner, "inner mask");
    require_valid(outer, "outer mask");
    return gcnr_from_samples(masked_values(image, inner), masked_values(image, outer), bins);
}

} // namespace pwdcl
