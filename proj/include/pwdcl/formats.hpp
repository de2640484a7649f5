#pragma once

// Binary RF / I/Q / plane-wave-set files and PGM rendering.
//
// RF   "PWRF" u32 version=1, u32 n_channels, u32 n_samples, f64 fs, f0, c, pitch,
//      angle_rad, t0, then channel-major f32 samples.
// IQ   "PWIQ" u32 version=1, u32 width, u32 height, f64 x0, z0, dx, dz, angle_rad
//      (NaN for compounded images), norm_scale, then row-major interleaved f32 I, Q.
// SET  "PWSQ" u32 k, u32 v, then k embedded IQ records.
// All little-endian. Any file may end with a "META" u32-length text block holding
// the producing configuration.

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <string_view>

#include "pwdcl/beamform.hpp"
#include "pwdcl/binary.hpp"
#include "pwdcl/core.hpp"

namespace pwdcl {

inline constexpr std::uint32_t kFormatVersion = 1;

inline std::string encode_rf(const RfFrame& rf, std::string_view metadata = {}) {
    binary::Writer w;
    w.bytes("PWRF");
    w.u32(kFormatVersion);
    w.u32(static_cast<std::uint32_t>(rf.n_channels()));
    w.u32(static_cast<std::uint32_t>(rf.n_samples()));
    w.f64(rf.probe.fs);
    w.f64(rf.probe.f0);
    w.f64(rf.probe.c);
    w.f64(rf.probe.pitch);
    w.f64(rf.angle.theta);
    w.f64(rf.t0);
    for (double v : rf.samples.data()) w.f32(static_cast<float>(v));
    binary::write_metadata(w, metadata);
    return w.str();
}

struct DecodedRf {
    RfFrame frame;
    std::string metadata;
};

inline DecodedRf decode_rf(std::string_view data) {
    binary::Reader r(data, "RF file");
    r.magic("PWRF");
    r.version(kFormatVersion);
    DecodedRf out;
    auto& rf = out.frame;
    const auto n_ch = r.u32();
    const auto n_s = r.u32();
    rf.probe.n_elements = static_cast<int>(n_ch);
    rf.probe.fs = r.f64();
    rf.probe.f0 = r.f64();
    rf.probe.c = r.f64();
    rf.probe.pitch = r.f64();
    rf.angle.theta = r.f64();
    rf.t0 = r.f64();
    r.need(static_cast<std::size_t>(n_ch) * n_s * 4);
    rf.samples = Array2D<double>(n_ch, n_s);
    for (auto& v : rf.samples.data()) v = static_cast<double>(r.f32());
    out.metadata = binary::read_metadata(r);
    return out;
}

namespace detail {

inline void put_iq(binary::Writer& w, const IqImage& im) {
    w.bytes("PWIQ");
    w.u32(kFormatVersion);
    w.u32(static_cast<std::uint32_t>(im.grid.width));
    w.u32(static_cast<std::uint32_t>(im.grid.height));
    w.f64(im.grid.x0);
    w.f64(im.grid.z0);
    w.f64(im.grid.dx);
    w.f64(im.grid.dz);
    w.f64(im.angle ? im.angle->theta : std::numeric_limits<double>::quiet_NaN());
    w.f64(im.norm_scale);
    for (std::size_t k = 0; k < im.i_plane.size(); ++k) {
        w.f32(static_cast<float>(im.i_plane.data()[k]));
        w.f32(static_cast<float>(im.q_plane.data()[k]));
    }
}

inline IqImage get_iq(binary::Reader& r) {
    r.magic("PWIQ");
    r.version(kFormatVersion);
    IqImage im;
    im.grid.width = r.u32();
    im.grid.height = r.u32();
    im.grid.x0 = r.f64();
    im.grid.z0 = r.f64();
    im.grid.dx = r.f64();
    im.grid.dz = r.f64();
    const double theta = r.f64();
    if (!std::isnan(theta)) im.angle = SteeringAngle{theta};
    im.norm_scale = r.f64();
    r.need(im.grid.width * im.grid.height * 8);
    im.i_plane = Array2D<double>(im.grid.height, im.grid.width);
    im.q_plane = Array2D<double>(im.grid.height, im.grid.width);
    for (std::size_t k = 0; k < im.i_plane.size(); ++k) {
        im.i_plane.data()[k] = static_cast<double>(r.f32());
        im.q_plane.data()[k] = static_cast<double>(r.f32());
    }
    return im;
}

} // namespace detail

inline std::string encode_iq(const IqImage& im, std::string_view metadata = {}) {
    binary::Writer w;
    detail::put_iq(w, im);
    binary::write_metadata(w, metadata);
    return w.str();
}

struct DecodedIq {
    IqImage image;
    std::string metadata;
};

inline DecodedIq decode_iq(std::string_view data) {
    binary::Reader r(data, "IQ file");
    DecodedIq out{detail::get_iq(r), {}};
    out.metadata = binary::read_metadata(r);
    return out;
}

inline std::string encode_set(const PwSet& set, std::string_view metadata = {}) {
    binary::Writer w;
    w.bytes("PWSQ");
    w.u32(static_cast<std::uint32_t>(set.frames.size()));
    w.u32(static_cast<std::uint32_t>(set.validation_index));
    for (const auto& f : set.frames) detail::put_iq(w, f);
    binary::write_metadata(w, metadata);
    return w.str();
}

struct DecodedSet {
    PwSet set;
    std::string metadata;
};

inline DecodedSet decode_set(std::string_view data) {
    binary::Reader r(data, "PW set file");
    r.magic("PWSQ");
    DecodedSet out;
    const auto k = r.u32();
    out.set.validation_index = r.u32();
    for (std::uint32_t f = 0; f < k; ++f) out.set.frames.push_back(detail::get_iq(r));
    out.metadata = binary::read_metadata(r);
    return out;
}

/// Peek at the 4-byte magic of an encoded file.
inline std::string_view file_kind(std::string_view data) { return data.substr(0, std::min<std::size_t>(4, data.size())); }

inline void write_rf(const std::string& path, const RfFrame& rf, std::string_view metadata = {}) {
    binary::write_file(path, encode_rf(rf, metadata));
}
inline DecodedRf read_rf(const std::string& path) { return decode_rf(binary::read_file(path)); }

inline void write_iq(const std::string& path, const IqImage& im, std::string_view metadata = {}) {
    binary::write_file(path, encode_iq(im, metadata));
}
inline DecodedIq read_iq(const std::string& path) { return decode_iq(binary::read_file(path)); }

inline void write_set(const std::string& path, const PwSet& set, std::string_view metadata = {}) {
    binary::write_file(path, encode_set(set, metadata));
}
inline DecodedSet read_set(const std::string& path) { return decode_set(binary::read_file(path)); }

// ---------------------------------------------------------------------------
// PGM

/// gray = round_half_up(255 (db + DR) / DR); 0 dB -> 255, -DR -> 0.
inline unsigned char db_to_gray(double db, double dynamic_range) {
    const double g = std::floor(255.0 * (db + dynamic_range) / dynamic_range + 0.5);
    return static_cast<unsigned char>(std::clamp(g, 0.0, 255.0));
}

/// Binary P5 image; metadata lines are emitted as header comments.
inline std::string encode_pgm(const BmodeImage& b, std::string_view metadata = {}) {
    std::string out = "P5\n";
    std::size_t start = 0;
    while (start < metadata.size()) {
        auto end = metadata.find('\n', start);
        if (end == std::string_view::npos) end = metadata.size();
        out += "# ";
        out += metadata.substr(start, end - start);
        out += '\n';
        start = end + 1;
    }
    out += std::to_string(b.grid.width) + " " + std::to_string(b.grid.height) + "\n255\n";
    out.reserve(out.size() + b.db_values.size());
    for (double v : b.db_values.data()) out.push_back(static_cast<char>(db_to_gray(v, b.dynamic_range)));
    return out;
}

inline void render_pgm(const BmodeImage& b, const std::string& path, std::string_view metadata = {}) {
    binary::write_file(path, encode_pgm(b, metadata));
}

} // namespace pwdcl
