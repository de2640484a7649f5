#pragma once

// Receive beamforming: analytic-signal conversion, delay-and-sum, coherent
// compounding, filtered delay-multiply-and-sum, and B-mode conversion.

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <vector>

#include "pwdcl/core.hpp"

namespace pwdcl {

using cplx = std::complex<double>;

namespace detail {

// Owning FFTW buffer + plan pair for one transform length and direction.
class FftwPlan {
public:
    FftwPlan(std::size_t n, int sign)
        : n_(n),
          buf_(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n))),
          plan_(fftw_plan_dft_1d(static_cast<int>(n), buf_, buf_, sign, FFTW_ESTIMATE)) {}
    ~FftwPlan() {
        fftw_destroy_plan(plan_);
        fftw_free(buf_);
    }
    FftwPlan(const FftwPlan&) = delete;
    FftwPlan& operator=(const FftwPlan&) = delete;

    std::span<cplx> data() { return {reinterpret_cast<cplx*>(buf_), n_}; }
    void execute() { fftw_execute(plan_); }

private:
    std::size_t n_;
    fftw_complex* buf_;
    fftw_plan plan_;
};

} // namespace detail

/// Analytic signal x + j H{x} by one-sided spectrum doubling. Length is preserved;
/// even and odd lengths are both handled.
inline std::vector<cplx> analytic_signal(std::span<const double> x) {
    const std::size_t n = x.size();
    std::vector<cplx> out(n);
    if (n == 0) return out;
    detail::FftwPlan fwd(n, FFTW_FORWARD), inv(n, FFTW_BACKWARD);
    auto a = fwd.data();
    for (std::size_t k = 0; k < n; ++k) a[k] = {x[k], 0.0};
    fwd.execute();
    auto b = inv.data();
    const std::size_t half = n / 2;
    for (std::size_t k = 0; k < n; ++k) {
        double h = 0.0;
        if (k == 0 || (n % 2 == 0 && k == half))
            h = 1.0;
        else if (k < (n + 1) / 2)
            h = 2.0;
        b[k] = a[k] * h;
    }
    inv.execute();
    const double scale = 1.0 / static_cast<double>(n);
    for (std::size_t k = 0; k < n; ++k) out[k] = b[k] * scale;
    return out;
}

/// Per-channel analytic signal of an RF frame, same layout as rf.samples.
struct ChannelIq {
    Array2D<cplx> samples;
};

inline ChannelIq iq_demodulate(const RfFrame& rf) {
    if (rf.n_samples() < 8) throw InvalidArgument("iq_demodulate: at least 8 samples per channel required");
    ChannelIq out{Array2D<cplx>(rf.n_channels(), rf.n_samples())};
    for (std::size_t ch = 0; ch < rf.n_channels(); ++ch) {
        const auto a = analytic_signal(rf.samples.row(ch));
        std::copy(a.begin(), a.end(), out.samples.row(ch).begin());
    }
    return out;
}

enum class ApodizationWindow { rectangular, hann };
enum class Interpolation { nearest, linear };

struct BeamformConfig {
    double f_number = 1.0;
    ApodizationWindow apodization_window = ApodizationWindow::hann;
    Interpolation interpolation = Interpolation::linear;
};

inline Violations validate(const BeamformConfig& cfg) {
    if (!(cfg.f_number > 0)) return {{"f_number", "must be > 0"}};
    return {};
}

/// Side-channel diagnostics from a beamforming pass.
struct BeamformStats {
    std::size_t empty_aperture_pixels = 0;
    bool grid_outside_aperture = false;
};

namespace detail {

/// Active receive elements and their weights for one pixel; elements in ascending order.
struct Aperture {
    int first = 0;
    int last = -1;  // inclusive
};

inline Aperture active_aperture(const ProbeGeometry& p, double x, double z, double f_number) {
    const double half = z / (2.0 * f_number);
    const double lo = (x - half - p.element_x(0)) / p.pitch;
    const double hi = (x + half - p.element_x(0)) / p.pitch;
    Aperture a;
    a.first = std::max(0, static_cast<int>(std::floor(lo)) - 1);
    a.last = std::min(p.n_elements - 1, static_cast<int>(std::ceil(hi)) + 1);
    while (a.first <= a.last && std::abs(x - p.element_x(a.first)) > half) ++a.first;
    while (a.last >= a.first && std::abs(x - p.element_x(a.last)) > half) --a.last;
    return a;
}

inline double apodization(ApodizationWindow w, double offset, double half_width) {
    if (w == ApodizationWindow::rectangular || half_width <= 0) return 1.0;
    return 0.5 * (1.0 + std::cos(std::numbers::pi * offset / half_width));
}

template <typename T>
T sample_at(std::span<const T> ch, double s, Interpolation mode) {
    const double last = static_cast<double>(ch.size()) - 1.0;
    if (!(s >= 0.0) || s > last) return T{};
    if (mode == Interpolation::nearest) return ch[static_cast<std::size_t>(std::lround(s))];
    const auto i0 = static_cast<std::size_t>(s);
    const double frac = s - static_cast<double>(i0);
    if (i0 + 1 >= ch.size()) return ch[i0];
    return ch[i0] * (1.0 - frac) + ch[i0 + 1] * frac;
}

inline void check_grid_coverage(const ProbeGeometry& p, const PixelGrid& g, BeamformStats* stats) {
    if (!stats) return;
    const double tol = 1e-12;
    if (g.x(0) < p.element_x(0) - tol || g.x(g.width - 1) > p.element_x(p.n_elements - 1) + tol)
        stats->grid_outside_aperture = true;
}

} // namespace detail

/// Delay-and-sum over the dynamic receive aperture |x - x_e| <= z / (2 f#), normalized
/// by the active element count. Channels are summed in ascending index order.
inline IqImage das_beamform(const RfFrame& rf, const PixelGrid& grid, const BeamformConfig& cfg,
                            BeamformStats* stats = nullptr) {
    require_valid(rf, "rf");
    require_valid(grid, "grid");
    require_valid(cfg, "beamform config");
    const auto iq = iq_demodulate(rf);
    const auto& p = rf.probe;
    detail::check_grid_coverage(p, grid, stats);

    IqImage out = IqImage::zeros(grid, rf.angle);
    for (std::size_t r = 0; r < grid.height; ++r) {
        const double z = grid.z(r);
        for (std::size_t c = 0; c < grid.width; ++c) {
            const double x = grid.x(c);
            const auto ap = detail::active_aperture(p, x, z, cfg.f_number);
            if (ap.last < ap.first) {
                if (stats) ++stats->empty_aperture_pixels;
                continue;
            }
            const double half = z / (2.0 * cfg.f_number);
            const double tx = transmit_delay(x, z, rf.angle, p.c);
            cplx acc{};
            for (int e = ap.first; e <= ap.last; ++e) {
                const double xe = p.element_x(e);
                const double w = detail::apodization(cfg.apodization_window, x - xe, half);
                const double s = (tx + receive_delay(x, z, xe, p.c) - rf.t0) * p.fs;
                acc += w * detail::sample_at<cplx>(iq.samples.row(static_cast<std::size_t>(e)), s, cfg.interpolation);
            }
            acc /= static_cast<double>(ap.last - ap.first + 1);
            out.i_plane(r, c) = acc.real();
            out.q_plane(r, c) = acc.imag();
        }
    }
    return out;
}

/// Pixel-wise complex mean. The result carries no steering angle.
inline IqImage compound(std::span<const IqImage> frames) {
    if (frames.empty()) throw InvalidArgument("compound: empty frame list");
    IqImage out = IqImage::zeros(frames[0].grid);
    for (const auto& f : frames) {
        if (!(f.grid == frames[0].grid)) throw InvalidArgument("compound: frames must share one grid");
        for (std::size_t k = 0; k < out.i_plane.size(); ++k) {
            out.i_plane.data()[k] += f.i_plane.data()[k];
            out.q_plane.data()[k] += f.q_plane.data()[k];
        }
    }
    if (frames.size() > 1) {
        const double inv = 1.0 / static_cast<double>(frames.size());
        for (auto& v : out.i_plane.data()) v *= inv;
        for (auto& v : out.q_plane.data()) v *= inv;
    }
    return out;
}

/// sum_{i<j} sign(s_i s_j) sqrt(|s_i s_j|), evaluated in O(N) via signed square roots.
inline double pairwise_product_sum(std::span<const double> aligned) {
    double sum = 0.0, sum_sq = 0.0;
    for (double s : aligned) {
        const double r = std::copysign(std::sqrt(std::abs(s)), s);
        sum += r;
        sum_sq += r * r;
    }
    return 0.5 * (sum * sum - sum_sq);
}

/// Blackman-windowed sinc band-pass with unit gain at the band center.
inline std::vector<double> bandpass_kernel(std::size_t taps, double f_lo, double f_hi, double fs) {
    if (taps % 2 == 0) ++taps;
    const auto m = static_cast<std::ptrdiff_t>(taps / 2);
    std::vector<double> h(taps);
    const auto sinc = [](double v) { return v == 0.0 ? 1.0 : std::sin(std::numbers::pi * v) / (std::numbers::pi * v); };
    for (std::ptrdiff_t n = -m; n <= m; ++n) {
        const double t = static_cast<double>(n);
        const double ideal = 2.0 * f_hi / fs * sinc(2.0 * f_hi * t / fs) - 2.0 * f_lo / fs * sinc(2.0 * f_lo * t / fs);
        const double phase = 2.0 * std::numbers::pi * static_cast<double>(n + m) / static_cast<double>(taps - 1);
        const double w = taps == 1 ? 1.0 : 0.42 - 0.5 * std::cos(phase) + 0.08 * std::cos(2.0 * phase);
        h[static_cast<std::size_t>(n + m)] = ideal * w;
    }
    const double fc = 0.5 * (f_lo + f_hi);
    double gain = 0.0;
    for (std::ptrdiff_t n = -m; n <= m; ++n)
        gain += h[static_cast<std::size_t>(n + m)] * std::cos(2.0 * std::numbers::pi * fc * static_cast<double>(n) / fs);
    for (auto& v : h) v /= gain;
    return h;
}

/// Zero-phase forward-backward FIR filtering with a centered kernel and zero-padded edges.
inline std::vector<double> filtfilt(std::span<const double> x, std::span<const double> h) {
    const auto pass = [&](const std::vector<double>& in) {
        const auto n = static_cast<std::ptrdiff_t>(in.size());
        const auto m = static_cast<std::ptrdiff_t>(h.size() / 2);
        std::vector<double> out(in.size(), 0.0);
        for (std::ptrdiff_t i = 0; i < n; ++i) {
            double acc = 0.0;
            for (std::ptrdiff_t k = -m; k <= m; ++k) {
                const std::ptrdiff_t j = i - k;
                if (j >= 0 && j < n) acc += h[static_cast<std::size_t>(k + m)] * in[static_cast<std::size_t>(j)];
            }
            out[static_cast<std::size_t>(i)] = acc;
        }
        return out;
    };
    std::vector<double> y = pass(std::vector<double>(x.begin(), x.end()));
    std::reverse(y.begin(), y.end());
    y = pass(y);
    std::reverse(y.begin(), y.end());
    return y;
}

/// Filtered delay-multiply-and-sum. Each image column is evaluated on a fine axial
/// grid (one RF sample of round-trip time per step), band-passed to [1.5 f0, 2.5 f0],
/// converted to an analytic signal, and resampled onto the output grid.
inline IqImage dmas_beamform(const RfFrame& rf, const PixelGrid& grid, const BeamformConfig& cfg,
                             BeamformStats* stats = nullptr) {
    require_valid(rf, "rf");
    require_valid(grid, "grid");
    require_valid(cfg, "beamform config");
    const auto& p = rf.probe;
    detail::check_grid_coverage(p, grid, stats);

    const double fine_dz = p.c / (2.0 * p.fs);
    const double fs_axial = p.c / (2.0 * fine_dz);
    auto taps = static_cast<std::size_t>(std::lround(4.0 * fs_axial / p.f0));
    if (taps % 2 == 0) ++taps;
    const auto kernel = bandpass_kernel(taps, 1.5 * p.f0, 2.5 * p.f0, fs_axial);
    const auto margin = static_cast<std::ptrdiff_t>(2 * taps);

    const double z_first = grid.z(0);
    const double z_last = grid.z(grid.height - 1);
    const auto n_fine = static_cast<std::size_t>(std::ceil((z_last - z_first) / fine_dz)) + 1 + 2 * static_cast<std::size_t>(margin);
    const double fine_z0 = z_first - static_cast<double>(margin) * fine_dz;

    IqImage out = IqImage::zeros(grid, rf.angle);
    std::vector<double> column(n_fine);
    std::vector<double> aligned;
    aligned.reserve(static_cast<std::size_t>(p.n_elements));

    for (std::size_t c = 0; c < grid.width; ++c) {
        const double x = grid.x(c);
        for (std::size_t k = 0; k < n_fine; ++k) {
            const double z = fine_z0 + static_cast<double>(k) * fine_dz;
            column[k] = 0.0;
            if (z <= 0.0) continue;
            const auto ap = detail::active_aperture(p, x, z, cfg.f_number);
            const int n_active = ap.last - ap.first + 1;
            if (n_active < 2) continue;
            const double half = z / (2.0 * cfg.f_number);
            const double tx = transmit_delay(x, z, rf.angle, p.c);
            aligned.clear();
            for (int e = ap.first; e <= ap.last; ++e) {
                const double xe = p.element_x(e);
                const double w = detail::apodization(cfg.apodization_window, x - xe, half);
                const double s = (tx + receive_delay(x, z, xe, p.c) - rf.t0) * p.fs;
                aligned.push_back(w * detail::sample_at<double>(rf.samples.row(static_cast<std::size_t>(e)), s,
                                                                 cfg.interpolation));
            }
            const double pairs = 0.5 * static_cast<double>(n_active) * static_cast<double>(n_active - 1);
            column[k] = pairwise_product_sum(aligned) / pairs;
        }
        const auto filtered = filtfilt(column, kernel);
        const auto analytic = analytic_signal(filtered);
        for (std::size_t r = 0; r < grid.height; ++r) {
            const double s = (grid.z(r) - fine_z0) / fine_dz;
            const cplx v = detail::sample_at<cplx>(std::span<const cplx>(analytic), s, Interpolation::linear);
            out.i_plane(r, c) = v.real();
            out.q_plane(r, c) = v.imag();
        }
        if (stats) {
            for (std::size_t r = 0; r < grid.height; ++r) {
                const auto ap = detail::active_aperture(p, x, grid.z(r), cfg.f_number);
                if (ap.last - ap.first + 1 < 2) ++stats->empty_aperture_pixels;
            }
        }
    }
    return out;
}

/// Log-compressed envelope in [-dynamic_range, 0] dB, peak at exactly 0 dB.
struct BmodeImage {
    PixelGrid grid;
    Array2D<double> db_values;
    double dynamic_range = 60.0;
};

inline BmodeImage to_bmode(const IqImage& iq, double dynamic_range) {
    if (!(dynamic_range > 0)) throw InvalidArgument("to_bmode: dynamic range must be > 0");
    const auto env = envelope(iq);
    const double peak = env.empty() ? 0.0 : *std::max_element(env.data().begin(), env.data().end());
    if (!(peak > 0)) throw InvalidArgument("to_bmode: image has no nonzero pixel");
    BmodeImage out{iq.grid, Array2D<double>(env.rows(), env.cols()), dynamic_range};
    for (std::size_t k = 0; k < env.size(); ++k) {
        const double a = env.data()[k];
        const double db = a > 0 ? 20.0 * std::log10(a / peak) : -dynamic_range;
        out.db_values.data()[k] = std::clamp(db, -dynamic_range, 0.0);
    }
    return out;
}

} // namespace pwdcl
