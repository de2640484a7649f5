#pragma once

// Unsupervised coherence training: a network fed one steered I/Q frame is scored by
// its normalized complex correlation with every other steered frame of the same
// acquisition (the held-out validation frame excluded). The supervised MSE baseline
// shares the loop with a fixed reference target.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "pwdcl/beamform.hpp"
#include "pwdcl/core.hpp"
#include "pwdcl/net.hpp"
#include "pwdcl/random.hpp"

namespace pwdcl {

enum class LossKind { coherence, mse };

struct TrainConfig {
    double lr_init = 1e-4;
    double lr_min = 1e-7;
    std::uint64_t period_steps = 2000;
    double weight_decay = 0.01;
    std::uint64_t total_steps = 2000;
    std::uint64_t seed = 0;
    LossKind loss_kind = LossKind::coherence;
    std::uint64_t log_interval = 100;        // validation + log cadence
    std::uint64_t checkpoint_interval = 0;   // 0 disables periodic checkpoints
    bool log_wall_time = true;               // false writes 0 elapsed for byte-stable logs
};

inline Violations validate(const TrainConfig& cfg) {
    Violations out;
    if (!(cfg.lr_min > 0 && cfg.lr_min <= cfg.lr_init)) out.push_back({"lr_min", "must satisfy 0 < lr_min <= lr_init"});
    if (cfg.period_steps < 1) out.push_back({"period_steps", "must be >= 1"});
    if (!(cfg.weight_decay >= 0)) out.push_back({"weight_decay", "must be >= 0"});
    if (cfg.log_interval < 1) out.push_back({"log_interval", "must be >= 1"});
    return out;
}

struct OptimizerState {
    Parameters first_moment;
    Parameters second_moment;
    std::uint64_t step = 0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;

    static OptimizerState for_config(const NetworkConfig& cfg) {
        return {zero_parameters(cfg), zero_parameters(cfg), 0};
    }
};

struct TrainRecord {
    std::uint64_t step = 0;
    double learning_rate = 0.0;
    double train_loss = std::numeric_limits<double>::quiet_NaN();
    double val_loss = std::numeric_limits<double>::quiet_NaN();
    double elapsed_s = 0.0;
    bool skipped = false;  // degenerate step, no update applied
};

// ---------------------------------------------------------------------------
// Normalization

/// Linear-interpolated percentile (q in [0, 100]) of a copy of the values.
inline double percentile(std::vector<double> values, double q) {
    if (values.empty()) throw InvalidArgument("percentile: empty input");
    const double rank = q / 100.0 * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(rank));
    const auto hi = std::min(lo + 1, values.size() - 1);
    std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(lo), values.end());
    const double v_lo = values[lo];
    double v_hi = v_lo;
    if (hi != lo) v_hi = *std::min_element(values.begin() + static_cast<std::ptrdiff_t>(lo) + 1, values.end());
    return v_lo + (rank - static_cast<double>(lo)) * (v_hi - v_lo);
}

/// Scale every frame by one shared scalar: the 99.9th-percentile envelope of the compounded set.
inline PwSet normalize_set(const PwSet& set) {
    require_valid(set, "PwSet");
    const auto comp = compound(set.frames);
    const double scale = percentile(envelope(comp).data(), 99.9);
    if (!(scale > 0)) throw InvalidArgument("normalize_set: compounded envelope is all zero");
    PwSet out = set;
    for (auto& f : out.frames) {
        for (auto& v : f.i_plane.data()) v /= scale;
        for (auto& v : f.q_plane.data()) v /= scale;
        f.norm_scale *= scale;
    }
    return out;
}

/// Frame whose steering angle is closest to 0 (lowest index on ties).
inline std::size_t middle_angle_index(const std::vector<IqImage>& frames) {
    std::size_t best = 0;
    double best_abs = std::numeric_limits<double>::infinity();
    for (std::size_t f = 0; f < frames.size(); ++f) {
        const double a = frames[f].angle ? std::abs(frames[f].angle->theta) : std::numeric_limits<double>::infinity();
        if (a < best_abs) {
            best_abs = a;
            best = f;
        }
    }
    return best;
}

// ---------------------------------------------------------------------------
// Losses. Predictions and targets are 2 x H x W tensors (channel 0 = I, 1 = Q).

struct LossResult {
    double loss = 0.0;
    Tensor grad;  // d loss / d pred, same shape as pred
};

/// Sum over targets of -Re<f, P_t> / (||f|| ||P_t||), with <f, P> = sum f conj(P).
inline LossResult coherence_loss(const Tensor& pred, const std::vector<const Tensor*>& targets) {
    if (targets.empty()) throw InvalidArgument("coherence_loss: no targets");
    const std::size_t n = pred.values.size();
    double ff = 0.0;
    for (double v : pred.values) ff += v * v;
    if (!(ff > 0)) throw DegenerateNorm("coherence_loss: prediction has zero norm");
    const double f_norm = std::sqrt(ff);

    LossResult res{0.0, Tensor(pred.shape.at(0), pred.shape.at(1), pred.shape.at(2))};
    for (const Tensor* t : targets) {
        if (t->shape != pred.shape) throw InvalidArgument("coherence_loss: target shape differs from prediction");
        double pp = 0.0, re = 0.0;
        // Re(f conj(P)) = f_I P_I + f_Q P_Q, so the real inner product over both planes.
        for (std::size_t k = 0; k < n; ++k) {
            pp += t->values[k] * t->values[k];
            re += pred.values[k] * t->values[k];
        }
        if (!(pp > 0)) throw DegenerateNorm("coherence_loss: target has zero norm");
        const double p_norm = std::sqrt(pp);
        const double denom = f_norm * p_norm;
        res.loss += -re / denom;
        const double a = -1.0 / denom;
        const double b = re / (ff * denom);
        for (std::size_t k = 0; k < n; ++k) res.grad.values[k] += a * t->values[k] + b * pred.values[k];
    }
    return res;
}

/// Mean squared error over both planes; gradient (2 / M) (pred - ref).
inline LossResult mse_loss(const Tensor& pred, const Tensor& reference) {
    if (pred.shape != reference.shape) throw InvalidArgument("mse_loss: shape mismatch");
    const auto m = static_cast<double>(pred.values.size());
    LossResult res{0.0, Tensor(pred.shape.at(0), pred.shape.at(1), pred.shape.at(2))};
    for (std::size_t k = 0; k < pred.values.size(); ++k) {
        const double d = pred.values[k] - reference.values[k];
        res.loss += d * d;
        res.grad.values[k] = 2.0 / m * d;
    }
    res.loss /= m;
    return res;
}

/// Whole-image tensor of an IqImage (2 x height x width).
inline Tensor to_tensor(const IqImage& im) {
    Tensor t(2, im.grid.height, im.grid.width);
    std::copy(im.i_plane.data().begin(), im.i_plane.data().end(), t.channel(0));
    std::copy(im.q_plane.data().begin(), im.q_plane.data().end(), t.channel(1));
    return t;
}

inline IqImage from_tensor(const Tensor& t, const PixelGrid& grid, std::optional<SteeringAngle> angle = std::nullopt) {
    if (t.shape != std::vector<std::size_t>{2, grid.height, grid.width})
        throw InvalidArgument("from_tensor: shape does not match grid");
    IqImage im = IqImage::zeros(grid, angle);
    std::copy(t.channel(0), t.channel(0) + t.plane(), im.i_plane.data().begin());
    std::copy(t.channel(1), t.channel(1) + t.plane(), im.q_plane.data().begin());
    return im;
}

/// Complex-image overloads; the gradient is split back into I and Q planes.
struct ImageLossResult {
    double loss = 0.0;
    Array2D<double> grad_i;
    Array2D<double> grad_q;
};

namespace detail {

inline ImageLossResult split_grad(const PixelGrid& grid, LossResult r) {
    const auto im = from_tensor(r.grad, grid);
    return {r.loss, im.i_plane, im.q_plane};
}

} // namespace detail

inline ImageLossResult coherence_loss(const IqImage& pred, const std::vector<IqImage>& targets) {
    if (targets.empty()) throw InvalidArgument("coherence_loss: no targets");
    const Tensor p = to_tensor(pred);
    std::vector<Tensor> ts;
    ts.reserve(targets.size());
    for (const auto& t : targets) {
        if (!(t.grid == pred.grid)) throw InvalidArgument("coherence_loss: targets must share the prediction grid");
        ts.push_back(to_tensor(t));
    }
    std::vector<const Tensor*> ptrs;
    for (const auto& t : ts) ptrs.push_back(&t);
    return detail::split_grad(pred.grid, coherence_loss(p, ptrs));
}

inline ImageLossResult mse_loss(const IqImage& pred, const IqImage& reference) {
    if (!(pred.grid == reference.grid)) throw InvalidArgument("mse_loss: shape mismatch");
    return detail::split_grad(pred.grid, mse_loss(to_tensor(pred), to_tensor(reference)));
}

// ---------------------------------------------------------------------------
// Optimization

/// Cosine annealing with warm restarts every period_steps.
inline double cosine_lr(std::uint64_t step, const TrainConfig& cfg) {
    const double phase = static_cast<double>(step % cfg.period_steps) / static_cast<double>(cfg.period_steps);
    return cfg.lr_min + 0.5 * (cfg.lr_init - cfg.lr_min) * (1.0 + std::cos(std::numbers::pi * phase));
}

/// AdamW with decoupled weight decay and bias-corrected moments. Throws Divergence
/// (without touching params or state) when any gradient is non-finite.
inline void adamw_step(Parameters& params, const Parameters& grads, OptimizerState& state, double lr,
                       double weight_decay) {
    if (params.convs.size() != grads.convs.size() || params.convs.size() != state.first_moment.convs.size())
        throw InvalidArgument("adamw_step: parameter / gradient / state shapes differ");
    bool finite = true;
    grads.for_each_array([&](const std::vector<double>& a) {
        for (double g : a) finite = finite && std::isfinite(g);
    });
    if (!finite) throw Divergence("adamw_step: non-finite gradient at step " + std::to_string(state.step));

    const std::uint64_t t = state.step + 1;
    const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(t));
    const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(t));
    const double decay = 1.0 - lr * weight_decay;

    for (std::size_t l = 0; l < params.convs.size(); ++l) {
        const auto update = [&](std::vector<double>& theta, const std::vector<double>& g, std::vector<double>& m,
                                std::vector<double>& v) {
            if (theta.size() != g.size() || theta.size() != m.size())
                throw InvalidArgument("adamw_step: array size mismatch");
            for (std::size_t k = 0; k < theta.size(); ++k) {
                m[k] = state.beta1 * m[k] + (1.0 - state.beta1) * g[k];
                v[k] = state.beta2 * v[k] + (1.0 - state.beta2) * g[k] * g[k];
                const double m_hat = m[k] / bc1;
                const double v_hat = v[k] / bc2;
                theta[k] = theta[k] * decay - lr * (m_hat / (std::sqrt(v_hat) + state.epsilon));
            }
        };
        update(params.convs[l].kernel, grads.convs[l].kernel, state.first_moment.convs[l].kernel,
               state.second_moment.convs[l].kernel);
        update(params.convs[l].bias, grads.convs[l].bias, state.first_moment.convs[l].bias,
               state.second_moment.convs[l].bias);
    }
    state.step = t;
    ++params.iteration;
}

// ---------------------------------------------------------------------------
// Crops and tiling

/// S x S crop at (row0, col0) as a 2 x S x S tensor; optionally clipped to [-1, 1].
inline Tensor crop(const IqImage& im, std::size_t row0, std::size_t col0, std::size_t size, bool clip = false,
                   std::size_t* clipped = nullptr) {
    if (row0 + size > im.grid.height || col0 + size > im.grid.width)
        throw InvalidArgument("crop: window exceeds the image");
    Tensor t(2, size, size);
    for (std::size_t y = 0; y < size; ++y)
        for (std::size_t x = 0; x < size; ++x) {
            double vi = im.i_plane(row0 + y, col0 + x);
            double vq = im.q_plane(row0 + y, col0 + x);
            if (clip) {
                if (clipped) *clipped += (std::abs(vi) > 1.0) + (std::abs(vq) > 1.0);
                vi = std::clamp(vi, -1.0, 1.0);
                vq = std::clamp(vq, -1.0, 1.0);
            }
            t.at(0, y, x) = vi;
            t.at(1, y, x) = vq;
        }
    return t;
}

/// Tile origins covering [0, extent) with windows of `size`; the last tile is
/// shifted back to end at the border when extent is not a multiple of size.
inline std::vector<std::size_t> tile_positions(std::size_t extent, std::size_t size) {
    if (size == 0 || extent < size) throw InvalidArgument("tile_positions: image smaller than the crop");
    std::vector<std::size_t> pos;
    for (std::size_t p = 0; p + size <= extent; p += size) pos.push_back(p);
    if (pos.back() + size < extent) pos.push_back(extent - size);
    return pos;
}

/// Full-frame inference by tiling; overlapping tile outputs are averaged.
inline IqImage infer_image(const Parameters& params, const NetworkConfig& cfg, const IqImage& input) {
    const std::size_t S = cfg.crop_size;
    const auto rows = tile_positions(input.grid.height, S);
    const auto cols = tile_positions(input.grid.width, S);
    IqImage out = IqImage::zeros(input.grid);
    Array2D<double> hits(input.grid.height, input.grid.width);
    for (auto r0 : rows)
        for (auto c0 : cols) {
            const auto res = forward(params, cfg, crop(input, r0, c0, S, true));
            for (std::size_t y = 0; y < S; ++y)
                for (std::size_t x = 0; x < S; ++x) {
                    out.i_plane(r0 + y, c0 + x) += res.output.at(0, y, x);
                    out.q_plane(r0 + y, c0 + x) += res.output.at(1, y, x);
                    hits(r0 + y, c0 + x) += 1.0;
                }
        }
    for (std::size_t k = 0; k < hits.size(); ++k) {
        out.i_plane.data()[k] /= hits.data()[k];
        out.q_plane.data()[k] /= hits.data()[k];
    }
    return out;
}

/// Coherence loss of the network applied to the validation frame, against every other
/// frame, averaged over tiles covering the frame.
inline double validate_network(const PwSet& set, const Parameters& params, const NetworkConfig& cfg) {
    const std::size_t S = cfg.crop_size;
    const auto& pv = set.frames.at(set.validation_index);
    const auto rows = tile_positions(pv.grid.height, S);
    const auto cols = tile_positions(pv.grid.width, S);
    double total = 0.0;
    std::size_t tiles = 0;
    for (auto r0 : rows)
        for (auto c0 : cols) {
            const auto res = forward(params, cfg, crop(pv, r0, c0, S, true));
            std::vector<Tensor> targets;
            for (std::size_t t = 0; t < set.size(); ++t)
                if (t != set.validation_index) targets.push_back(crop(set.frames[t], r0, c0, S));
            std::vector<const Tensor*> ptrs;
            for (const auto& t : targets) ptrs.push_back(&t);
            total += coherence_loss(res.output, ptrs).loss;
            ++tiles;
        }
    return total / static_cast<double>(tiles);
}

// ---------------------------------------------------------------------------
// Training step and loop

struct StepChoice {
    std::size_t input_index = 0;
    std::size_t row0 = 0;
    std::size_t col0 = 0;
};

/// Input frame uniform over {0..k-1} \ {v}; crop origin uniform over valid offsets.
inline StepChoice draw_step(const PwSet& set, std::size_t crop_size, Rng& rng) {
    const std::size_t k = set.size();
    const auto j = static_cast<std::size_t>(rng.below(k - 1));
    StepChoice c;
    c.input_index = j < set.validation_index ? j : j + 1;
    const auto& g = set.frames[0].grid;
    if (g.height < crop_size || g.width < crop_size) throw InvalidArgument("train_step: frames smaller than crop");
    c.row0 = static_cast<std::size_t>(rng.below(g.height - crop_size + 1));
    c.col0 = static_cast<std::size_t>(rng.below(g.width - crop_size + 1));
    return c;
}

/// One optimization step. For LossKind::mse, `reference` (normalized, same grid) is the target.
/// A degenerate-norm step is skipped: no update, record.skipped set.
inline TrainRecord train_step(const PwSet& set, Parameters& params, OptimizerState& state, const TrainConfig& cfg,
                              const NetworkConfig& net_cfg, Rng& rng, const IqImage* reference = nullptr,
                              StepChoice* choice_out = nullptr) {
    const std::size_t S = net_cfg.crop_size;
    const auto choice = draw_step(set, S, rng);
    if (choice_out) *choice_out = choice;

    TrainRecord rec;
    rec.step = state.step;
    rec.learning_rate = cosine_lr(state.step, cfg);

    const auto fwd = forward(params, net_cfg, crop(set.frames[choice.input_index], choice.row0, choice.col0, S, true));
    LossResult loss;
    try {
        if (cfg.loss_kind == LossKind::coherence) {
            std::vector<Tensor> targets;
            for (std::size_t t = 0; t < set.size(); ++t)
                if (t != choice.input_index && t != set.validation_index)
                    targets.push_back(crop(set.frames[t], choice.row0, choice.col0, S));
            std::vector<const Tensor*> ptrs;
            for (const auto& t : targets) ptrs.push_back(&t);
            loss = coherence_loss(fwd.output, ptrs);
        } else {
            if (!reference) throw InvalidArgument("train_step: mse loss needs a reference image");
            loss = mse_loss(fwd.output, crop(*reference, choice.row0, choice.col0, S));
        }
    } catch (const DegenerateNorm&) {
        rec.skipped = true;
        return rec;
    }
    rec.train_loss = loss.loss;
    const auto grads = backward(params, net_cfg, fwd.cache, loss.grad);
    adamw_step(params, grads.grad_params, state, rec.learning_rate, cfg.weight_decay);
    return rec;
}

inline std::string format_record(const TrainRecord& r) {
    std::ostringstream os;
    os.precision(17);
    os << r.step << ' ' << r.learning_rate << ' ' << r.train_loss << ' ' << r.val_loss << ' ' << r.elapsed_s;
    return os.str();
}

struct TrainResult {
    Parameters params;
    OptimizerState state;
    std::vector<TrainRecord> records;  // one per logged step
    double initial_val_loss = std::numeric_limits<double>::quiet_NaN();
    double final_val_loss = std::numeric_limits<double>::quiet_NaN();
};

struct TrainHooks {
    std::function<void(const TrainRecord&)> on_log;
    std::function<void(const Parameters&)> on_checkpoint;
};

/// Full loop. Validation runs before the first step, every log_interval steps, and at the end.
/// Validation is only defined for coherence training; MSE runs log NaN validation loss.
inline TrainResult train(const PwSet& normalized_set, const TrainConfig& cfg, const NetworkConfig& net_cfg,
                         const IqImage* reference = nullptr, const TrainHooks& hooks = {}) {
    require_valid(normalized_set, "PwSet");
    require_valid(cfg, "train config");
    TrainResult res{init_parameters(net_cfg, cfg.seed), OptimizerState::for_config(net_cfg), {}};
    Rng rng(cfg.seed ^ 0x9E3779B97F4A7C15ull);
    const auto t_start = std::chrono::steady_clock::now();
    const auto elapsed = [&]() {
        if (!cfg.log_wall_time) return 0.0;
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    };
    const auto val = [&]() {
        if (cfg.loss_kind != LossKind::coherence) return std::numeric_limits<double>::quiet_NaN();
        try {
            return validate_network(normalized_set, res.params, net_cfg);
        } catch (const DegenerateNorm&) {
            return std::numeric_limits<double>::quiet_NaN();
        }
    };

    TrainRecord first;
    first.step = 0;
    first.learning_rate = cosine_lr(0, cfg);
    first.val_loss = res.initial_val_loss = val();
    first.elapsed_s = elapsed();
    res.records.push_back(first);
    if (hooks.on_log) hooks.on_log(first);

    for (std::uint64_t s = 0; s < cfg.total_steps; ++s) {
        TrainRecord rec = train_step(normalized_set, res.params, res.state, cfg, net_cfg, rng, reference);
        rec.step = s + 1;
        const bool last = s + 1 == cfg.total_steps;
        if ((s + 1) % cfg.log_interval == 0 || last) {
            rec.val_loss = val();
            rec.elapsed_s = elapsed();
            res.records.push_back(rec);
            if (hooks.on_log) hooks.on_log(rec);
        }
        if (cfg.checkpoint_interval > 0 && (s + 1) % cfg.checkpoint_interval == 0 && hooks.on_checkpoint)
            hooks.on_checkpoint(res.params);
    }
    res.final_val_loss = res.records.back().val_loss;
    return res;
}

} // namespace pwdcl
