// pwdcl command-line front end: simulate, beamform, compound, dmas, train, infer,
// evaluate, render and the end-to-end pipeline.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "pwdcl/pwdcl.hpp"

namespace fs = std::filesystem;
using namespace pwdcl;

namespace {

struct CommonOptions {
    std::string config_path;
    std::vector<std::string> inputs;
    std::string out;
    std::string checkpoint;
    std::string phantom;
    std::string reference;
    std::string log;
    long long seed = -1;
    bool with_sp = false;
};

/// Loads the config and applies the seed override: --seed > PWC_SEED > config > default.
RunConfig load_config(const CommonOptions& o) {
    ParsedConfig parsed;
    if (!o.config_path.empty()) {
        if (!fs::exists(o.config_path)) throw std::runtime_error("config file not found: " + o.config_path);
        parsed = parse_config(binary::read_file(o.config_path));
    }
    for (const auto& w : parsed.warnings) std::cerr << "warning: " << w << '\n';
    RunConfig cfg = parsed.config;
    std::optional<std::uint64_t> seed;
    if (const char* env = std::getenv("PWC_SEED"); env && *env) {
        char* end = nullptr;
        const auto v = std::strtoull(env, &end, 10);
        if (*end != '\0') throw std::runtime_error(std::string("PWC_SEED is not an unsigned integer: ") + env);
        seed = v;
    }
    if (o.seed >= 0) seed = static_cast<std::uint64_t>(o.seed);
    if (seed) cfg.sim.seed = cfg.train.seed = *seed;
    if (!o.phantom.empty()) cfg.io.phantom = o.phantom;
    if (!o.checkpoint.empty()) cfg.io.checkpoint = o.checkpoint;
    if (!o.log.empty()) cfg.io.log = o.log;
    if (!o.out.empty()) cfg.io.out = o.out;
    return cfg;
}

void require_inputs(const CommonOptions& o, std::size_t min_count) {
    if (o.inputs.size() < min_count)
        throw std::runtime_error("expected at least " + std::to_string(min_count) + " --in path(s)");
    const auto missing = missing_files(o.inputs);
    if (!missing.empty()) throw std::runtime_error("input not found: " + missing.front());
}

void require_out(const RunConfig& cfg) {
    if (cfg.io.out.empty()) throw std::runtime_error("--out is required");
}

double max_angle_rad(const RunConfig& cfg) { return cfg.sim.max_angle_deg * std::numbers::pi / 180.0; }

PixelGrid grid_for(const RunConfig& cfg) {
    return make_pixel_grid(cfg.probe, cfg.grid.z_min, cfg.grid.depth_max, cfg.grid.pixels_per_wavelength);
}

Phantom build_phantom(const RunConfig& cfg) {
    switch (cfg.sim.phantom) {
    case PhantomKind::point: return build_point_phantom(cfg.sim.point_depths, cfg.sim.point_laterals);
    case PhantomKind::cyst:
        return default_cyst_phantom({cfg.sim.box_x_min, cfg.sim.box_x_max, cfg.sim.box_z_min, cfg.sim.box_z_max},
                                    cfg.sim.cyst_radius, cfg.sim.scatterer_density, cfg.sim.seed);
    case PhantomKind::file:
        if (cfg.io.phantom.empty()) throw std::runtime_error("sim.phantom = file needs io.phantom or --phantom");
        return read_phantom(cfg.io.phantom);
    }
    throw std::logic_error("unreachable");
}

/// Record length covering every scatterer echo and the deepest grid row.
double record_duration(const Phantom& ph, const RunConfig& cfg, const Pulse& pulse) {
    const auto& p = cfg.probe;
    const double z = cfg.grid.depth_max;
    const double half = std::abs(p.element_x(0));
    const double grid_echo = (z + std::hypot(2.0 * half, z)) / p.c + 2.0 * pulse.support();
    return std::max(grid_echo, ph.scatterers.empty() ? 0.0 : required_duration(ph, p, max_angle_rad(cfg), pulse));
}

std::vector<RfFrame> simulate_fan(const Phantom& ph, const RunConfig& cfg, std::size_t n_angles) {
    const Pulse pulse{cfg.probe.f0, cfg.sim.fractional_bandwidth};
    const double duration = record_duration(ph, cfg, pulse);
    SimOptions opt;
    opt.noise_std = cfg.sim.noise_std;
    std::vector<RfFrame> out;
    const auto angles = angle_fan(n_angles, max_angle_rad(cfg));
    for (std::size_t a = 0; a < angles.size(); ++a)
        out.push_back(simulate_rf(ph, cfg.probe, angles[a], duration, pulse, cfg.sim.seed + a, opt));
    return out;
}

std::size_t validation_index(const RunConfig& cfg, const std::vector<IqImage>& frames) {
    if (cfg.validation_index < 0) return middle_angle_index(frames);
    if (static_cast<std::size_t>(cfg.validation_index) >= frames.size())
        throw std::runtime_error("train.validation_index out of range for " + std::to_string(frames.size()) + " frames");
    return static_cast<std::size_t>(cfg.validation_index);
}

PwSet beamform_set(const std::vector<RfFrame>& rfs, const RunConfig& cfg, const PixelGrid& grid) {
    PwSet set;
    for (const auto& rf : rfs) set.frames.push_back(das_beamform(rf, grid, cfg.beamform));
    set.validation_index = validation_index(cfg, set.frames);
    return set;
}

/// Reads an IQ image or, for a plane-wave set, its validation frame.
IqImage read_image(const std::string& path) {
    const auto bytes = binary::read_file(path);
    if (file_kind(bytes) == "PWSQ") {
        const auto d = decode_set(bytes);
        return d.set.frames.at(d.set.validation_index);
    }
    return decode_iq(bytes).image;
}

/// Scales a raw image by the 99.9th percentile of its envelope; already-normalized images pass through.
IqImage normalize_image(IqImage im) {
    if (im.norm_scale != 1.0) return im;
    const double s = percentile(envelope(im).data(), 99.9);
    if (!(s > 0)) throw std::runtime_error("input image is all zero");
    for (auto& v : im.i_plane.data()) v /= s;
    for (auto& v : im.q_plane.data()) v /= s;
    im.norm_scale = s;
    return im;
}

IqImage run_inference(const Checkpoint& ck, const IqImage& input) {
    IqImage out = infer_image(ck.params, ck.cfg, input);
    out.angle = input.angle;
    const auto env = envelope(out);
    if (std::all_of(env.data().begin(), env.data().end(), [](double v) { return v == 0.0; }))
        throw std::runtime_error("degenerate output: network produced an all-zero image (dead or untrained checkpoint)");
    return out;
}

// ---------------------------------------------------------------------------
// Metrics

struct MetricLine {
    std::string metric;
    std::string region;
    double value = 0.0;
    std::string unit;
};

std::string mm(double v) {
    char b[32];
    std::snprintf(b, sizeof b, "%.1f", v * 1e3);
    return b;
}

std::vector<MetricLine> point_metrics(const IqImage& im, const Phantom& ph, const RunConfig& cfg) {
    std::vector<MetricLine> out;
    const auto bm = to_bmode(im, cfg.grid.dynamic_range);
    const auto& g = im.grid;
    const double x_lo = g.x(0), x_hi = g.x(g.width - 1), z_lo = g.z(0), z_hi = g.z(g.height - 1);
    for (const auto& s : ph.scatterers) {
        if (s.x < x_lo || s.x > x_hi || s.z < z_lo || s.z > z_hi) continue;
        const std::string region = "x=" + mm(s.x) + "mm,z=" + mm(s.z) + "mm";
        double half = 2.5e-3, below = std::numeric_limits<double>::infinity();
        for (const auto& o : ph.scatterers) {
            if (&o == &s) continue;
            if (std::abs(o.z - s.z) < 1e-9) half = std::min(half, 0.5 * std::abs(o.x - s.x));
            if (std::abs(o.x - s.x) < 1e-9 && o.z > s.z) below = std::min(below, o.z - s.z);
        }
        try {
            const auto lat = window_profile(extract_profile(bm, ProfileAxis::lateral, s.z), s.x - half, s.x + half);
            out.push_back({"fwhm_lateral", region, fwhm(lat) * 1e3, "mm"});
        } catch (const std::exception&) {
            // Peak against the grid border or clipped away: no finite width to report.
        }
        PralOptions po{cfg.metrics.pral_guard, cfg.metrics.pral_window};
        if (std::isfinite(below)) po.window = std::min(po.window, below - 2.0 * po.guard);
        if (!(po.window > 0) || s.z + po.guard + po.window > z_hi) continue;
        const auto ax = extract_profile(bm, ProfileAxis::axial, s.x);
        out.push_back({"pral", region, pral(ax, s.z, po), "dB"});
    }
    return out;
}

std::vector<MetricLine> cyst_metrics(const IqImage& im, const Phantom& ph, const RunConfig& cfg) {
    std::vector<MetricLine> out;
    Array2D<double> img = envelope(im);
    if (cfg.metrics.cnr_domain == MetricDomain::db) img = to_bmode(im, cfg.grid.dynamic_range).db_values;
    const auto env = envelope(im);
    double cnr_sum = 0.0, gcnr_sum = 0.0;
    std::size_t n = 0;
    for (const auto& c : ph.cysts) {
        const auto m = cyst_masks(im.grid, c, cfg.metrics.mask_margin);
        if (!validate(m.inner).empty() || !validate(m.outer).empty()) continue;
        const std::string region = "cyst(x=" + mm(c.x) + "mm,z=" + mm(c.z) + "mm)";
        const double cv = cnr(img, m.inner, m.outer);
        const double gv = gcnr(env, m.inner, m.outer, cfg.metrics.gcnr_bins);
        out.push_back({"cnr", region, cv, "dB"});
        out.push_back({"gcnr", region, gv, "1"});
        cnr_sum += cv;
        gcnr_sum += gv;
        ++n;
    }
    if (n > 0) {
        out.push_back({"cnr", "mean", cnr_sum / static_cast<double>(n), "dB"});
        out.push_back({"gcnr", "mean", gcnr_sum / static_cast<double>(n), "1"});
    }
    return out;
}

std::vector<MetricLine> evaluate_image(const IqImage& im, const Phantom& ph, const RunConfig& cfg) {
    return ph.cysts.empty() ? point_metrics(im, ph, cfg) : cyst_metrics(im, ph, cfg);
}

std::string metric_report(const std::vector<MetricLine>& lines) {
    std::ostringstream os;
    os.precision(6);
    for (const auto& l : lines) os << l.metric << ' ' << l.region << ' ' << l.value << ' ' << l.unit << '\n';
    return os.str();
}

/// One table per metric: rows are regions, columns are methods.
std::string comparison_tables(const std::vector<std::pair<std::string, std::vector<MetricLine>>>& methods) {
    std::vector<std::string> metrics;
    std::map<std::string, std::vector<std::string>> regions;
    std::map<std::tuple<std::string, std::string, std::string>, double> values;
    std::map<std::string, std::string> units;
    for (const auto& [method, lines] : methods)
        for (const auto& l : lines) {
            if (std::find(metrics.begin(), metrics.end(), l.metric) == metrics.end()) metrics.push_back(l.metric);
            auto& r = regions[l.metric];
            if (std::find(r.begin(), r.end(), l.region) == r.end()) r.push_back(l.region);
            values[{l.metric, l.region, method}] = l.value;
            units[l.metric] = l.unit;
        }
    std::ostringstream os;
    for (const auto& m : metrics) {
        os << "## " << m << " (" << units[m] << ")\n";
        char buf[64];
        std::snprintf(buf, sizeof buf, "%-28s", "region");
        os << buf;
        for (const auto& [method, lines] : methods) {
            std::snprintf(buf, sizeof buf, " %10s", method.c_str());
            os << buf;
        }
        os << '\n';
        for (const auto& r : regions[m]) {
            std::snprintf(buf, sizeof buf, "%-28s", r.c_str());
            os << buf;
            for (const auto& [method, lines] : methods) {
                const auto it = values.find({m, r, method});
                if (it == values.end())
                    std::snprintf(buf, sizeof buf, " %10s", "-");
                else
                    std::snprintf(buf, sizeof buf, " %10.3f", it->second);
                os << buf;
            }
            os << '\n';
        }
        os << '\n';
    }
    return os.str();
}

void write_text(const std::string& path, const std::string& text) { binary::write_file(path, text); }

// ---------------------------------------------------------------------------
// Commands

int cmd_simulate(const CommonOptions& o) {
    RunConfig cfg = load_config(o);
    require_out(cfg);
    const Phantom ph = build_phantom(cfg);
    const auto meta = format_config(cfg);
    fs::create_directories(cfg.io.out);
    write_phantom((fs::path(cfg.io.out) / "phantom.txt").string(), ph);
    const auto rfs = simulate_fan(ph, cfg, cfg.sim.n_angles);
    for (std::size_t a = 0; a < rfs.size(); ++a) {
        char name[32];
        std::snprintf(name, sizeof name, "rf_%03zu.pwrf", a);
        write_rf((fs::path(cfg.io.out) / name).string(), rfs[a], meta);
        for (const auto& n : rfs[a].notes) std::cerr << "note: " << name << ": " << n << '\n';
    }
    std::cout << "simulated " << rfs.size() << " plane waves, " << ph.scatterers.size() << " scatterers -> "
              << cfg.io.out << '\n';
    return 0;
}

std::vector<RfFrame> read_rfs(const std::vector<std::string>& paths) {
    std::vector<RfFrame> rfs;
    for (const auto& p : paths) rfs.push_back(read_rf(p).frame);
    std::stable_sort(rfs.begin(), rfs.end(), [](const RfFrame& a, const RfFrame& b) { return a.angle < b.angle; });
    return rfs;
}

/// Applies the probe stored in the RF file so the grid matches the recorded data.
RunConfig with_probe(RunConfig cfg, const RfFrame& rf) {
    cfg.probe = rf.probe;
    return cfg;
}

int cmd_beamform(const CommonOptions& o) {
    RunConfig cfg = load_config(o);
    require_inputs(o, 1);
    require_out(cfg);
    const auto rfs = read_rfs(o.inputs);
    cfg = with_probe(cfg, rfs.front());
    const auto grid = grid_for(cfg);
    const auto meta = format_config(cfg);
    if (rfs.size() == 1) {
        BeamformStats st;
        write_iq(cfg.io.out, das_beamform(rfs[0], grid, cfg.beamform, &st), meta);
        if (st.empty_aperture_pixels) std::cerr << "note: " << st.empty_aperture_pixels << " pixels had no active elements\n";
    } else {
        write_set(cfg.io.out, beamform_set(rfs, cfg, grid), meta);
    }
    std::cout << "beamformed " << rfs.size() << " frame(s) on a " << grid.width << "x" << grid.height << " grid -> "
              << cfg.io.out << '\n';
    return 0;
}

int cmd_dmas(const CommonOptions& o) {
    RunConfig cfg = load_config(o);
    require_inputs(o, 1);
    require_out(cfg);
    const auto rf = read_rf(o.inputs.front()).frame;
    cfg = with_probe(cfg, rf);
    write_iq(cfg.io.out, dmas_beamform(rf, grid_for(cfg), cfg.beamform), format_config(cfg));
    std::cout << "f-DMAS -> " << cfg.io.out << '\n';
    return 0;
}

int cmd_compound(const CommonOptions& o) {
    RunConfig cfg = load_config(o);
    require_inputs(o, 1);
    require_out(cfg);
    std::vector<IqImage> frames;
    for (const auto& p : o.inputs) {
        const auto bytes = binary::read_file(p);
        if (file_kind(bytes) == "PWSQ") {
            for (auto& f : decode_set(bytes).set.frames) frames.push_back(std::move(f));
        } else {
            frames.push_back(decode_iq(bytes).image);
        }
    }
    write_iq(cfg.io.out, compound(frames), format_config(cfg));
    std::cout << "compounded " << frames.size() << " frame(s) -> " << cfg.io.out << '\n';
    return 0;
}

Checkpoint train_network(const PwSet& normalized, const RunConfig& cfg, const IqImage* reference,
                         const std::string& log_path, const std::string& ckpt_path) {
    std::ofstream log;
    if (!log_path.empty()) {
        log.open(log_path, std::ios::trunc);
        if (!log) throw std::runtime_error("cannot open " + log_path + " for writing");
        log << "# step lr train_loss val_loss elapsed_s\n";
    }
    TrainHooks hooks;
    hooks.on_log = [&](const TrainRecord& r) {
        if (log) log << format_record(r) << '\n' << std::flush;
    };
    if (!ckpt_path.empty())
        hooks.on_checkpoint = [&](const Parameters& p) {
            write_checkpoint(ckpt_path + "." + std::to_string(p.iteration), cfg.net, p);
        };
    const auto res = train(normalized, cfg.train, cfg.net, reference, hooks);
    std::cout << "trained " << cfg.train.total_steps << " steps, validation loss " << res.initial_val_loss << " -> "
              << res.final_val_loss << '\n';
    return {cfg.net, res.params};
}

IqImage normalized_reference(const IqImage& ref, double scale) {
    IqImage out = ref;
    for (auto& v : out.i_plane.data()) v /= scale;
    for (auto& v : out.q_plane.data()) v /= scale;
    out.norm_scale = scale;
    return out;
}

int cmd_train(const CommonOptions& o) {
    RunConfig cfg = load_config(o);
    require_inputs(o, 1);
    require_out(cfg);
    auto set = decode_set(binary::read_file(o.inputs.front())).set;
    if (cfg.validation_index >= 0) set.validation_index = validation_index(cfg, set.frames);
    const PwSet norm = normalize_set(set);
    std::optional<IqImage> ref;
    if (cfg.train.loss_kind == LossKind::mse) {
        if (o.reference.empty()) throw std::runtime_error("train.loss = mse needs --reference <compounded IQ>");
        ref = normalized_reference(read_iq(o.reference).image, norm.frames[0].norm_scale);
    }
    const auto ck = train_network(norm, cfg, ref ? &*ref : nullptr, cfg.io.log, cfg.io.out);
    write_checkpoint(cfg.io.out, ck.cfg, ck.params);
    return 0;
}

int cmd_infer(const CommonOptions& o) {
    RunConfig cfg = load_config(o);
    require_inputs(o, 1);
    require_out(cfg);
    if (cfg.io.checkpoint.empty()) throw std::runtime_error("--checkpoint is required");
    if (!fs::exists(cfg.io.checkpoint)) throw std::runtime_error("checkpoint not found: " + cfg.io.checkpoint);
    const auto ck = read_checkpoint(cfg.io.checkpoint);
    const auto bytes = binary::read_file(o.inputs.front());
    IqImage input;
    if (file_kind(bytes) == "PWSQ") {
        const auto set = normalize_set(decode_set(bytes).set);
        input = set.frames[set.validation_index];
    } else {
        input = normalize_image(decode_iq(bytes).image);
    }
    write_iq(cfg.io.out, run_inference(ck, input), format_config(cfg));
    std::cout << "inference -> " << cfg.io.out << '\n';
    return 0;
}

int cmd_evaluate(const CommonOptions& o) {
    RunConfig cfg = load_config(o);
    require_inputs(o, 1);
    if (cfg.io.phantom.empty()) throw std::runtime_error("--phantom (or io.phantom) is required");
    if (!fs::exists(cfg.io.phantom)) throw std::runtime_error("phantom not found: " + cfg.io.phantom);
    const Phantom ph = read_phantom(cfg.io.phantom);
    std::string report;
    for (const auto& p : o.inputs) {
        const auto lines = evaluate_image(read_image(p), ph, cfg);
        if (o.inputs.size() > 1) report += "# " + p + "\n";
        report += metric_report(lines);
    }
    if (!cfg.io.out.empty()) write_text(cfg.io.out, report);
    std::cout << report;
    return 0;
}

int cmd_render(const CommonOptions& o) {
    RunConfig cfg = load_config(o);
    require_inputs(o, 1);
    require_out(cfg);
    render_pgm(to_bmode(read_image(o.inputs.front()), cfg.grid.dynamic_range), cfg.io.out, format_config(cfg));
    std::cout << "rendered -> " << cfg.io.out << '\n';
    return 0;
}

int cmd_pipeline(const CommonOptions& o) {
    RunConfig cfg = load_config(o);
    require_out(cfg);
    const fs::path dir = cfg.io.out;
    fs::create_directories(dir);
    const auto meta = format_config(cfg);
    const auto path = [&](const std::string& name) { return (dir / name).string(); };

    const Phantom ph = build_phantom(cfg);
    write_phantom(path("phantom.txt"), ph);
    const auto grid = grid_for(cfg);
    const auto rfs = simulate_fan(ph, cfg, cfg.sim.n_angles);
    const PwSet set = beamform_set(rfs, cfg, grid);
    write_set(path("das_set.pwsq"), set, meta);
    const std::size_t v = set.validation_index;
    const std::string k_label = "DAS-" + std::to_string(set.size()) + "PW";
    std::cerr << "pipeline: beamformed " << set.size() << " frames, held-out frame " << v << '\n';

    std::vector<std::pair<std::string, IqImage>> images;
    images.emplace_back("DAS-1PW", set.frames[v]);
    images.emplace_back(k_label, compound(set.frames));
    images.emplace_back("f-DMAS", dmas_beamform(rfs[v], grid, cfg.beamform));

    const PwSet norm = normalize_set(set);
    const std::string log_path = cfg.io.log.empty() ? path("train_dcl.log") : cfg.io.log;
    const auto dcl = train_network(norm, cfg, nullptr, log_path, "");
    write_checkpoint(path("dcl.ckpt"), dcl.cfg, dcl.params);
    images.emplace_back("DL-DCL", run_inference(dcl, norm.frames[v]));

    if (o.with_sp) {
        // Supervised baseline: MSE against a densely compounded reference on the same grid.
        std::vector<IqImage> dense;
        for (const auto& rf : simulate_fan(ph, cfg, cfg.sim.reference_angles))
            dense.push_back(das_beamform(rf, grid, cfg.beamform));
        const IqImage ref = normalized_reference(compound(dense), norm.frames[0].norm_scale);
        RunConfig sp_cfg = cfg;
        sp_cfg.train.loss_kind = LossKind::mse;
        const auto sp = train_network(norm, sp_cfg, &ref, path("train_sp.log"), "");
        write_checkpoint(path("sp.ckpt"), sp.cfg, sp.params);
        images.emplace_back("DL-SP", run_inference(sp, norm.frames[v]));
    }

    std::vector<std::pair<std::string, std::vector<MetricLine>>> results;
    for (const auto& [name, im] : images) {
        write_iq(path(name + ".pwiq"), im, meta);
        render_pgm(to_bmode(im, cfg.grid.dynamic_range), path(name + ".pgm"), meta);
        results.emplace_back(name, evaluate_image(im, ph, cfg));
    }
    const std::string report = "# pwdcl comparison report: phantom '" + ph.label + "', " +
                               std::to_string(set.size()) + " plane waves, held-out frame " + std::to_string(v) +
                               "\n\n" + comparison_tables(results);
    write_text(path("report.txt"), report);
    std::cout << report;
    return 0;
}

std::string one_line(std::string s) {
    std::replace(s.begin(), s.end(), '\n', ' ');
    return s;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Plane-wave ultrasound beamforming with deep coherence learning"};
    app.require_subcommand(1);
    CommonOptions o;

    const auto add = [&](const std::string& name, const std::string& help, bool needs_in) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("--config", o.config_path, "key = value configuration file");
        auto* in = sub->add_option("--in", o.inputs, "input file(s)");
        if (needs_in) in->required();
        sub->add_option("--out", o.out, "output file or directory");
        sub->add_option("--seed", o.seed, "seed for simulation and training (overrides PWC_SEED and config)");
        return sub;
    };
    auto* simulate = add("simulate", "simulate RF data for a phantom over the steering fan", false);
    auto* beamform = add("beamform", "DAS beamform RF file(s) to an IQ image or plane-wave set", true);
    auto* compound_cmd = add("compound", "coherently compound IQ frames or a plane-wave set", true);
    auto* dmas = add("dmas", "f-DMAS beamform one RF file", true);
    auto* train_cmd = add("train", "train the network on a plane-wave set", true);
    train_cmd->add_option("--log", o.log, "training log path");
    train_cmd->add_option("--reference", o.reference, "reference IQ image for train.loss = mse");
    auto* infer = add("infer", "apply a checkpoint to an IQ image or a set's held-out frame", true);
    infer->add_option("--checkpoint", o.checkpoint, "network checkpoint")->required();
    auto* evaluate = add("evaluate", "image-quality metrics against a phantom file", true);
    evaluate->add_option("--phantom", o.phantom, "phantom text file");
    auto* render = add("render", "log-compress an IQ image to a PGM file", true);
    auto* pipeline = add("pipeline", "simulate, beamform, train and compare all methods", false);
    pipeline->add_flag("--with-sp", o.with_sp, "also train the supervised MSE baseline");
    simulate->add_option("--phantom", o.phantom, "phantom text file for sim.phantom = file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    const std::map<CLI::App*, int (*)(const CommonOptions&)> commands{
        {simulate, cmd_simulate}, {beamform, cmd_beamform}, {compound_cmd, cmd_compound},
        {dmas, cmd_dmas},         {train_cmd, cmd_train},   {infer, cmd_infer},
        {evaluate, cmd_evaluate}, {render, cmd_render},     {pipeline, cmd_pipeline},
    };
    CLI::App* chosen = app.get_subcommands().front();
    try {
        return commands.at(chosen)(o);
    } catch (const std::exception& e) {
        std::cerr << "pwdcl " << chosen->get_name() << ": error: " << one_line(e.what()) << '\n';
        return 1;
    }
}
