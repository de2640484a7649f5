#pragma once

// Small U-Net style encoder-decoder over 2-channel (I, Q) crops with exact
// reverse-mode gradients. Double precision throughout.
//
// Topology for L levels with filters f[0..L-1]:
//   encoder   E_l = block(E_{l-1} pooled, f[l])     l = 0..L-1 (2x2 max-pool between levels)
//   decoder   D_{L-1} = block(E_{L-1}, f[L-1])
//             D_l = block(concat(E_l, up_l(D_{l+1})), f[l])   l = L-2..0
//             up_l = leaky(conv3x3(nearest2x(.)))  f[l+1] -> f[l]
//   output    tanh(conv3x3(D_0))  f[0] -> 2
// where block = two 3x3 convolutions each followed by LeakyReLU.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "pwdcl/binary.hpp"
#include "pwdcl/errors.hpp"
#include "pwdcl/random.hpp"

namespace pwdcl {

struct Tensor {
    std::vector<std::size_t> shape;  // channels x height x width for activations
    std::vector<double> values;

    Tensor() = default;
    Tensor(std::size_t c, std::size_t h, std::size_t w, double fill = 0.0) : shape{c, h, w}, values(c * h * w, fill) {}

    std::size_t channels() const { return shape.at(0); }
    std::size_t height() const { return shape.at(1); }
    std::size_t width() const { return shape.at(2); }
    std::size_t plane() const { return height() * width(); }

    double* channel(std::size_t c) { return values.data() + c * plane(); }
    const double* channel(std::size_t c) const { return values.data() + c * plane(); }

    double& at(std::size_t c, std::size_t y, std::size_t x) { return values[(c * height() + y) * width() + x]; }
    double at(std::size_t c, std::size_t y, std::size_t x) const { return values[(c * height() + y) * width() + x]; }

    bool operator==(const Tensor&) const = default;
};

struct NetworkConfig {
    std::size_t levels = 3;
    std::vector<std::size_t> filters{8, 16, 32};
    std::size_t kernel_size = 3;
    double leaky_slope = 0.01;
    std::size_t crop_size = 64;

    bool operator==(const NetworkConfig&) const = default;
};

inline std::vector<std::string> network_config_errors(const NetworkConfig& cfg) {
    std::vector<std::string> out;
    if (cfg.levels < 1) out.emplace_back("levels must be >= 1");
    if (cfg.filters.size() != cfg.levels) out.emplace_back("filters list length must equal levels");
    if (std::any_of(cfg.filters.begin(), cfg.filters.end(), [](std::size_t f) { return f == 0; }))
        out.emplace_back("filter counts must be positive");
    if (cfg.kernel_size != 3) out.emplace_back("kernel_size must be 3");
    if (!(cfg.leaky_slope > 0 && cfg.leaky_slope < 1)) out.emplace_back("leaky_slope must lie in (0, 1)");
    if (cfg.levels >= 1) {
        const std::size_t div = std::size_t{1} << (cfg.levels - 1);
        if (cfg.crop_size == 0 || cfg.crop_size % div != 0)
            out.emplace_back("crop_size must be a positive multiple of 2^(levels-1)");
    }
    return out;
}

inline void require_valid(const NetworkConfig& cfg) {
    const auto errs = network_config_errors(cfg);
    if (errs.empty()) return;
    std::string msg = "network config invalid:";
    for (const auto& e : errs) msg += " [" + e + "]";
    throw InvalidArgument(msg);
}

/// One 3x3 convolution: kernel is [out][in][3][3], bias is [out].
struct ConvParams {
    std::size_t out_ch = 0;
    std::size_t in_ch = 0;
    std::vector<double> kernel;
    std::vector<double> bias;

    ConvParams() = default;
    ConvParams(std::size_t out, std::size_t in) : out_ch(out), in_ch(in), kernel(out * in * 9, 0.0), bias(out, 0.0) {}

    double& k(std::size_t o, std::size_t i, std::size_t ky, std::size_t kx) { return kernel[((o * in_ch + i) * 3 + ky) * 3 + kx]; }

    bool operator==(const ConvParams&) const = default;
};

/// All learnable weights in layout order: encoder top-down, bottleneck, decoder bottom-up, output.
struct Parameters {
    std::vector<ConvParams> convs;
    std::uint64_t iteration = 0;

    std::size_t count() const {
        std::size_t n = 0;
        for (const auto& c : convs) n += c.kernel.size() + c.bias.size();
        return n;
    }

    template <typename F>
    void for_each_array(F&& f) {
        for (auto& c : convs) {
            f(c.kernel);
            f(c.bias);
        }
    }
    template <typename F>
    void for_each_array(F&& f) const {
        for (const auto& c : convs) {
            f(c.kernel);
            f(c.bias);
        }
    }

    bool operator==(const Parameters&) const = default;
};

/// Index of each layer inside Parameters::convs.
struct LayerMap {
    std::vector<std::size_t> enc_a, enc_b;  // per level
    std::vector<std::size_t> dec_a, dec_b;  // per level
    std::vector<std::size_t> up;            // per level l < L-1, maps f[l+1] -> f[l]
    std::size_t output = 0;
    std::size_t total = 0;
};

inline LayerMap layer_map(const NetworkConfig& cfg) {
    const std::size_t L = cfg.levels;
    LayerMap m;
    m.enc_a.resize(L);
    m.enc_b.resize(L);
    m.dec_a.resize(L);
    m.dec_b.resize(L);
    m.up.resize(L > 0 ? L - 1 : 0);
    std::size_t n = 0;
    for (std::size_t l = 0; l < L; ++l) {
        m.enc_a[l] = n++;
        m.enc_b[l] = n++;
    }
    m.dec_a[L - 1] = n++;
    m.dec_b[L - 1] = n++;
    for (std::size_t l = L - 1; l-- > 0;) {
        m.up[l] = n++;
        m.dec_a[l] = n++;
        m.dec_b[l] = n++;
    }
    m.output = n++;
    m.total = n;
    return m;
}

/// Zero parameters with the shapes implied by cfg.
inline Parameters zero_parameters(const NetworkConfig& cfg) {
    require_valid(cfg);
    const auto m = layer_map(cfg);
    const auto& f = cfg.filters;
    const std::size_t L = cfg.levels;
    Parameters p;
    p.convs.resize(m.total);
    for (std::size_t l = 0; l < L; ++l) {
        p.convs[m.enc_a[l]] = ConvParams(f[l], l == 0 ? 2 : f[l - 1]);
        p.convs[m.enc_b[l]] = ConvParams(f[l], f[l]);
    }
    p.convs[m.dec_a[L - 1]] = ConvParams(f[L - 1], f[L - 1]);
    p.convs[m.dec_b[L - 1]] = ConvParams(f[L - 1], f[L - 1]);
    for (std::size_t l = 0; l + 1 < L; ++l) {
        p.convs[m.up[l]] = ConvParams(f[l], f[l + 1]);
        p.convs[m.dec_a[l]] = ConvParams(f[l], 2 * f[l]);
        p.convs[m.dec_b[l]] = ConvParams(f[l], f[l]);
    }
    p.convs[m.output] = ConvParams(2, f[0]);
    return p;
}

/// Kernels ~ U(-sqrt(3/fan_in), sqrt(3/fan_in)) (unit variance * 1/fan_in), biases zero.
inline Parameters init_parameters(const NetworkConfig& cfg, std::uint64_t seed) {
    Parameters p = zero_parameters(cfg);
    Rng rng(seed);
    for (auto& c : p.convs) {
        const double bound = std::sqrt(3.0 / static_cast<double>(c.in_ch * 9));
        for (auto& w : c.kernel) w = rng.uniform(-bound, bound);
    }
    return p;
}

// ---------------------------------------------------------------------------
// Layer primitives and their adjoints.

/// 3x3 cross-correlation with zero "same" padding.
inline Tensor conv2d(const Tensor& in, const ConvParams& p) {
    if (in.shape.size() != 3 || in.channels() != p.in_ch)
        throw InvalidArgument("conv2d: input channel count does not match kernel");
    const std::size_t H = in.height(), W = in.width();
    Tensor out(p.out_ch, H, W);
    for (std::size_t o = 0; o < p.out_ch; ++o) {
        double* dst = out.channel(o);
        std::fill(dst, dst + H * W, p.bias[o]);
        for (std::size_t i = 0; i < p.in_ch; ++i) {
            const double* src = in.channel(i);
            for (std::size_t ky = 0; ky < 3; ++ky) {
                for (std::size_t kx = 0; kx < 3; ++kx) {
                    const double w = p.kernel[((o * p.in_ch + i) * 3 + ky) * 3 + kx];
                    if (w == 0.0) continue;
                    // out[y][x] += w * in[y + ky - 1][x + kx - 1]
                    const std::size_t y_lo = ky == 0 ? 1 : 0, y_hi = ky == 2 ? H - 1 : H;
                    const std::size_t x_lo = kx == 0 ? 1 : 0, x_hi = kx == 2 ? W - 1 : W;
                    for (std::size_t y = y_lo; y < y_hi; ++y) {
                        double* d = dst + y * W;
                        const double* s = src + (y + ky - 1) * W + kx - 1;
                        for (std::size_t x = x_lo; x < x_hi; ++x) d[x] += w * s[x];
                    }
                }
            }
        }
    }
    return out;
}

/// Adjoint of conv2d: accumulates kernel/bias gradients into grad_p, returns the input gradient.
inline Tensor conv2d_backward(const Tensor& in, const ConvParams& p, const Tensor& grad_out, ConvParams& grad_p) {
    const std::size_t H = in.height(), W = in.width();
    Tensor grad_in(p.in_ch, H, W);
    for (std::size_t o = 0; o < p.out_ch; ++o) {
        const double* g = grad_out.channel(o);
        double bsum = 0.0;
        for (std::size_t k = 0; k < H * W; ++k) bsum += g[k];
        grad_p.bias[o] += bsum;
        for (std::size_t i = 0; i < p.in_ch; ++i) {
            const double* src = in.channel(i);
            double* gin = grad_in.channel(i);
            for (std::size_t ky = 0; ky < 3; ++ky) {
                for (std::size_t kx = 0; kx < 3; ++kx) {
                    const std::size_t idx = ((o * p.in_ch + i) * 3 + ky) * 3 + kx;
                    const double w = p.kernel[idx];
                    const std::size_t y_lo = ky == 0 ? 1 : 0, y_hi = ky == 2 ? H - 1 : H;
                    const std::size_t x_lo = kx == 0 ? 1 : 0, x_hi = kx == 2 ? W - 1 : W;
                    double acc = 0.0;
                    for (std::size_t y = y_lo; y < y_hi; ++y) {
                        const double* gr = g + y * W;
                        const double* s = src + (y + ky - 1) * W + kx - 1;
                        double* gi = gin + (y + ky - 1) * W + kx - 1;
                        for (std::size_t x = x_lo; x < x_hi; ++x) {
                            acc += gr[x] * s[x];
                            gi[x] += w * gr[x];
                        }
                    }
                    grad_p.kernel[idx] += acc;
                }
            }
        }
    }
    return grad_in;
}

inline void leaky_relu_inplace(Tensor& t, double slope) {
    for (auto& v : t.values)
        if (v < 0) v *= slope;
}

/// Gradient through LeakyReLU given the pre-activation values.
inline void leaky_relu_backward_inplace(Tensor& grad, const Tensor& pre, double slope) {
    for (std::size_t k = 0; k < grad.values.size(); ++k)
        if (pre.values[k] < 0) grad.values[k] *= slope;
}

/// 2x2 max-pool; argmax holds the flat input index chosen for each output (first max in row-major order).
inline Tensor maxpool2(const Tensor& in, std::vector<std::size_t>* argmax = nullptr) {
    if (in.height() % 2 != 0 || in.width() % 2 != 0)
        throw InvalidArgument("maxpool2: spatial dimensions must be even");
    const std::size_t C = in.channels(), H = in.height() / 2, W = in.width() / 2;
    Tensor out(C, H, W);
    if (argmax) argmax->assign(out.values.size(), 0);
    for (std::size_t c = 0; c < C; ++c)
        for (std::size_t y = 0; y < H; ++y)
            for (std::size_t x = 0; x < W; ++x) {
                std::size_t best = (c * in.height() + 2 * y) * in.width() + 2 * x;
                for (std::size_t dy = 0; dy < 2; ++dy)
                    for (std::size_t dx = 0; dx < 2; ++dx) {
                        const std::size_t idx = (c * in.height() + 2 * y + dy) * in.width() + 2 * x + dx;
                        if (in.values[idx] > in.values[best]) best = idx;
                    }
                const std::size_t o = (c * H + y) * W + x;
                out.values[o] = in.values[best];
                if (argmax) (*argmax)[o] = best;
            }
    return out;
}

inline Tensor maxpool2_backward(const Tensor& grad_out, const std::vector<std::size_t>& argmax,
                                const std::vector<std::size_t>& in_shape) {
    Tensor grad_in(in_shape[0], in_shape[1], in_shape[2]);
    for (std::size_t o = 0; o < grad_out.values.size(); ++o) grad_in.values[argmax[o]] += grad_out.values[o];
    return grad_in;
}

/// Nearest-neighbour 2x upsampling.
inline Tensor upsample2(const Tensor& in) {
    const std::size_t C = in.channels(), H = in.height(), W = in.width();
    Tensor out(C, 2 * H, 2 * W);
    for (std::size_t c = 0; c < C; ++c)
        for (std::size_t y = 0; y < 2 * H; ++y)
            for (std::size_t x = 0; x < 2 * W; ++x) out.at(c, y, x) = in.at(c, y / 2, x / 2);
    return out;
}

inline Tensor upsample2_backward(const Tensor& grad_out) {
    const std::size_t C = grad_out.channels(), H = grad_out.height() / 2, W = grad_out.width() / 2;
    Tensor grad_in(C, H, W);
    for (std::size_t c = 0; c < C; ++c)
        for (std::size_t y = 0; y < 2 * H; ++y)
            for (std::size_t x = 0; x < 2 * W; ++x) grad_in.at(c, y / 2, x / 2) += grad_out.at(c, y, x);
    return grad_in;
}

inline Tensor concat_channels(const Tensor& a, const Tensor& b) {
    Tensor out(a.channels() + b.channels(), a.height(), a.width());
    std::copy(a.values.begin(), a.values.end(), out.values.begin());
    std::copy(b.values.begin(), b.values.end(), out.values.begin() + static_cast<std::ptrdiff_t>(a.values.size()));
    return out;
}

inline std::pair<Tensor, Tensor> split_channels(const Tensor& t, std::size_t first) {
    Tensor a(first, t.height(), t.width()), b(t.channels() - first, t.height(), t.width());
    std::copy(t.values.begin(), t.values.begin() + static_cast<std::ptrdiff_t>(a.values.size()), a.values.begin());
    std::copy(t.values.begin() + static_cast<std::ptrdiff_t>(a.values.size()), t.values.end(), b.values.begin());
    return {std::move(a), std::move(b)};
}

// ---------------------------------------------------------------------------
// Network forward / backward.

namespace detail {

inline std::uint64_t fingerprint(const Parameters& p) {
    std::uint64_t h = 1469598103934665603ull ^ p.iteration;
    p.for_each_array([&](const std::vector<double>& a) {
        for (double v : a) {
            h ^= std::bit_cast<std::uint64_t>(v);
            h *= 1099511628211ull;
        }
    });
    return h;
}

} // namespace detail

/// Activations saved by forward for the matching backward call.
struct ForwardCache {
    std::uint64_t params_fingerprint = 0;
    NetworkConfig cfg;
    std::vector<Tensor> conv_in;   // per conv layer (indexed like Parameters::convs)
    std::vector<Tensor> conv_pre;  // pre-activation output per conv layer
    std::vector<std::vector<std::size_t>> pool_argmax;
    std::vector<std::vector<std::size_t>> pool_in_shape;
    std::vector<std::size_t> skip_channels;  // channel split point of each decoder concat
    Tensor output;
    bool valid = false;
};

struct ForwardResult {
    Tensor output;
    ForwardCache cache;
};

inline ForwardResult forward(const Parameters& params, const NetworkConfig& cfg, const Tensor& input) {
    require_valid(cfg);
    const auto m = layer_map(cfg);
    if (params.convs.size() != m.total) throw InvalidArgument("forward: parameters do not match network config");
    const std::size_t S = cfg.crop_size;
    if (input.shape != std::vector<std::size_t>{2, S, S})
        throw InvalidArgument("forward: input must have shape 2 x crop_size x crop_size");

    const std::size_t L = cfg.levels;
    const double slope = cfg.leaky_slope;
    ForwardCache cache;
    cache.cfg = cfg;
    cache.params_fingerprint = detail::fingerprint(params);
    cache.conv_in.resize(m.total);
    cache.conv_pre.resize(m.total);
    cache.pool_argmax.resize(L > 0 ? L - 1 : 0);
    cache.pool_in_shape.resize(L > 0 ? L - 1 : 0);
    cache.skip_channels.resize(L > 0 ? L - 1 : 0);

    const auto conv_act = [&](std::size_t layer, Tensor in) {
        Tensor pre = conv2d(in, params.convs[layer]);
        cache.conv_in[layer] = std::move(in);
        Tensor post = pre;
        leaky_relu_inplace(post, slope);
        cache.conv_pre[layer] = std::move(pre);
        return post;
    };

    std::vector<Tensor> enc(L);
    Tensor x = input;
    for (std::size_t l = 0; l < L; ++l) {
        if (l > 0) {
            cache.pool_in_shape[l - 1] = enc[l - 1].shape;
            x = maxpool2(enc[l - 1], &cache.pool_argmax[l - 1]);
        }
        x = conv_act(m.enc_a[l], std::move(x));
        enc[l] = conv_act(m.enc_b[l], std::move(x));
        x = Tensor{};
    }
    Tensor d = conv_act(m.dec_a[L - 1], enc[L - 1]);
    d = conv_act(m.dec_b[L - 1], std::move(d));
    for (std::size_t l = L - 1; l-- > 0;) {
        Tensor u = conv_act(m.up[l], upsample2(d));
        cache.skip_channels[l] = enc[l].channels();
        d = conv_act(m.dec_a[l], concat_channels(enc[l], u));
        d = conv_act(m.dec_b[l], std::move(d));
    }
    Tensor pre = conv2d(d, params.convs[m.output]);
    cache.conv_in[m.output] = std::move(d);
    Tensor out = pre;
    for (auto& v : out.values) v = std::tanh(v);
    cache.conv_pre[m.output] = std::move(pre);
    cache.output = out;
    cache.valid = true;
    return {std::move(out), std::move(cache)};
}

struct BackwardResult {
    Parameters grad_params;
    Tensor grad_input;
};

inline BackwardResult backward(const Parameters& params, const NetworkConfig& cfg, const ForwardCache& cache,
                               const Tensor& grad_output) {
    if (!cache.valid || !(cache.cfg == cfg) || cache.params_fingerprint != detail::fingerprint(params))
        throw InvalidArgument("backward: cache does not belong to these parameters / config");
    if (grad_output.shape != cache.output.shape) throw InvalidArgument("backward: grad_output shape mismatch");

    const auto m = layer_map(cfg);
    const std::size_t L = cfg.levels;
    const double slope = cfg.leaky_slope;
    BackwardResult res;
    res.grad_params = zero_parameters(cfg);
    res.grad_params.iteration = params.iteration;

    const auto conv_act_back = [&](std::size_t layer, Tensor g) {
        leaky_relu_backward_inplace(g, cache.conv_pre[layer], slope);
        return conv2d_backward(cache.conv_in[layer], params.convs[layer], g, res.grad_params.convs[layer]);
    };

    // d tanh = 1 - tanh^2
    Tensor g = grad_output;
    for (std::size_t k = 0; k < g.values.size(); ++k) {
        const double t = cache.output.values[k];
        g.values[k] *= 1.0 - t * t;
    }
    g = conv2d_backward(cache.conv_in[m.output], params.convs[m.output], g, res.grad_params.convs[m.output]);

    std::vector<Tensor> grad_enc(L);
    for (std::size_t l = 0; l + 1 < L; ++l) {
        g = conv_act_back(m.dec_b[l], std::move(g));
        g = conv_act_back(m.dec_a[l], std::move(g));
        auto [g_skip, g_up] = split_channels(g, cache.skip_channels[l]);
        grad_enc[l] = std::move(g_skip);
        g = upsample2_backward(conv_act_back(m.up[l], std::move(g_up)));
    }
    g = conv_act_back(m.dec_b[L - 1], std::move(g));
    g = conv_act_back(m.dec_a[L - 1], std::move(g));
    grad_enc[L - 1] = std::move(g);

    for (std::size_t l = L; l-- > 0;) {
        Tensor ge = std::move(grad_enc[l]);
        ge = conv_act_back(m.enc_b[l], std::move(ge));
        ge = conv_act_back(m.enc_a[l], std::move(ge));
        if (l > 0) {
            Tensor gp = maxpool2_backward(ge, cache.pool_argmax[l - 1], cache.pool_in_shape[l - 1]);
            for (std::size_t k = 0; k < gp.values.size(); ++k) grad_enc[l - 1].values[k] += gp.values[k];
        } else {
            res.grad_input = std::move(ge);
        }
    }
    return res;
}

// ---------------------------------------------------------------------------
// Checkpoint file: text header then raw f64 LE arrays in layout order.
//   DCLNET v1
//   levels <L>
//   filters <f0> ... <fL-1>
//   kernel_size 3
//   leaky_slope <%.17g>
//   crop_size <S>
//   iteration <n>
//   values <count>
//   <count x f64>

inline std::string encode_checkpoint(const NetworkConfig& cfg, const Parameters& params) {
    std::ostringstream hdr;
    hdr.precision(17);
    hdr << "DCLNET v1\n"
        << "levels " << cfg.levels << "\nfilters";
    for (auto f : cfg.filters) hdr << ' ' << f;
    hdr << "\nkernel_size " << cfg.kernel_size << "\nleaky_slope " << cfg.leaky_slope << "\ncrop_size " << cfg.crop_size
        << "\niteration " << params.iteration << "\nvalues " << params.count() << '\n';
    binary::Writer w;
    w.bytes(hdr.str());
    params.for_each_array([&](const std::vector<double>& a) {
        for (double v : a) w.f64(v);
    });
    return w.str();
}

struct Checkpoint {
    NetworkConfig cfg;
    Parameters params;
};

inline Checkpoint decode_checkpoint(std::string_view data) {
    binary::Reader r(data, "checkpoint");
    r.magic("DCLNET v1\n");
    const auto line = [&]() {
        const std::size_t at = r.offset();
        std::string s;
        for (;;) {
            if (r.at_end()) throw FormatError("checkpoint: unterminated header line", at);
            const char ch = r.bytes(1)[0];
            if (ch == '\n') break;
            s.push_back(ch);
        }
        return std::pair{s, at};
    };
    const auto field = [&](const std::string& key) {
        auto [s, at] = line();
        if (s.rfind(key + " ", 0) != 0 && s != key) throw FormatError("checkpoint: expected field '" + key + "'", at);
        return std::pair{std::istringstream(s.substr(key.size())), at};
    };

    Checkpoint ck;
    {
        auto [is, at] = field("levels");
        if (!(is >> ck.cfg.levels)) throw FormatError("checkpoint: bad levels", at);
    }
    {
        auto [is, at] = field("filters");
        ck.cfg.filters.clear();
        std::size_t f;
        while (is >> f) ck.cfg.filters.push_back(f);
    }
    {
        auto [is, at] = field("kernel_size");
        if (!(is >> ck.cfg.kernel_size)) throw FormatError("checkpoint: bad kernel_size", at);
    }
    {
        auto [is, at] = field("leaky_slope");
        if (!(is >> ck.cfg.leaky_slope)) throw FormatError("checkpoint: bad leaky_slope", at);
    }
    {
        auto [is, at] = field("crop_size");
        if (!(is >> ck.cfg.crop_size)) throw FormatError("checkpoint: bad crop_size", at);
    }
    std::uint64_t iteration = 0;
    {
        auto [is, at] = field("iteration");
        if (!(is >> iteration)) throw FormatError("checkpoint: bad iteration", at);
    }
    std::size_t count = 0;
    std::size_t count_at = 0;
    {
        auto [is, at] = field("values");
        count_at = at;
        if (!(is >> count)) throw FormatError("checkpoint: bad values count", at);
    }
    const auto errs = network_config_errors(ck.cfg);
    if (!errs.empty()) throw FormatError("checkpoint: invalid network config: " + errs.front(), 0);
    ck.params = zero_parameters(ck.cfg);
    ck.params.iteration = iteration;
    if (count != ck.params.count())
        throw FormatError("checkpoint: value count " + std::to_string(count) + " does not match config (" +
                              std::to_string(ck.params.count()) + ")",
                          count_at);
    r.need(count * 8);
    ck.params.for_each_array([&](std::vector<double>& a) {
        for (auto& v : a) v = r.f64();
    });
    if (!r.at_end()) r.fail("unexpected trailing bytes");
    return ck;
}

inline void write_checkpoint(const std::string& path, const NetworkConfig& cfg, const Parameters& params) {
    binary::write_file(path, encode_checkpoint(cfg, params));
}

inline Checkpoint read_checkpoint(const std::string& path) { return decode_checkpoint(binary::read_file(path)); }

} // namespace pwdcl
