#pragma once

// Flat "key = value" run configuration covering every module.

#include <cerrno>
#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "pwdcl/beamform.hpp"
#include "pwdcl/core.hpp"
#include "pwdcl/errors.hpp"
#include "pwdcl/net.hpp"
#include "pwdcl/quality.hpp"
#include "pwdcl/simfield.hpp"
#include "pwdcl/train.hpp"

namespace pwdcl {

enum class PhantomKind { point, cyst, file };
enum class MetricDomain { envelope, db };

struct SimConfig {
    PhantomKind phantom = PhantomKind::cyst;
    std::size_t n_angles = 16;
    std::size_t reference_angles = 75;
    double max_angle_deg = 16.0;
    double fractional_bandwidth = 0.7;
    std::uint64_t seed = 1;
    double noise_std = 0.0;
    double cyst_radius = 2.0e-3;
    double scatterer_density = 2.0e7;  // per m^2
    double box_x_min = -7.5e-3;
    double box_x_max = 7.5e-3;
    double box_z_min = 8.0e-3;
    double box_z_max = 30.0e-3;
    std::vector<double> point_depths{5e-3, 10e-3, 15e-3, 20e-3, 25e-3, 30e-3, 35e-3, 40e-3};
    std::vector<double> point_laterals{0.0};
};

struct GridConfig {
    double z_min = 0.0;
    double depth_max = 42.0e-3;
    double pixels_per_wavelength = 4.0;
    double dynamic_range = 60.0;
};

struct MetricsConfig {
    std::size_t gcnr_bins = 256;
    double pral_guard = 1.5e-3;
    double pral_window = 5.0e-3;
    MetricDomain cnr_domain = MetricDomain::envelope;
    double mask_margin = 0.5e-3;
};

struct IoConfig {
    std::string phantom;
    std::string rf;
    std::string iq;
    std::string checkpoint;
    std::string log;
    std::string out;
};

struct RunConfig {
    ProbeGeometry probe;
    SimConfig sim;
    GridConfig grid;
    BeamformConfig beamform;
    NetworkConfig net;
    TrainConfig train;
    long long validation_index = -1;  // -1 selects the frame closest to 0 degrees
    MetricsConfig metrics;
    IoConfig io;
};

struct ParsedConfig {
    RunConfig config;
    std::vector<std::string> warnings;
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline double parse_double(const std::string& v, const std::string& key, std::size_t line) {
    const char* begin = v.c_str();
    char* end = nullptr;
    errno = 0;
    const double d = std::strtod(begin, &end);
    if (end == begin || *end != '\0' || errno == ERANGE)
        throw ParseError(key + ": expected a number, got '" + v + "'", line);
    return d;
}

inline std::uint64_t parse_uint(const std::string& v, const std::string& key, std::size_t line) {
    std::uint64_t out = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size())
        throw ParseError(key + ": expected a non-negative integer, got '" + v + "'", line);
    return out;
}

inline long long parse_int(const std::string& v, const std::string& key, std::size_t line) {
    long long out = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size())
        throw ParseError(key + ": expected an integer, got '" + v + "'", line);
    return out;
}

inline bool parse_bool(const std::string& v, const std::string& key, std::size_t line) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ParseError(key + ": expected true/false, got '" + v + "'", line);
}

inline std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream is(v);
    while (std::getline(is, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

template <typename T>
std::string join(const std::vector<T>& v) {
    std::ostringstream os;
    os.precision(17);
    for (std::size_t k = 0; k < v.size(); ++k) os << (k ? "," : "") << v[k];
    return os.str();
}

struct Key {
    std::function<void(RunConfig&, const std::string&, std::size_t)> set;
    std::function<std::string(const RunConfig&)> get;
};

inline std::string num(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

inline const std::map<std::string, Key>& registry() {
    static const std::map<std::string, Key> keys = [] {
        std::map<std::string, Key> k;
        const auto dbl = [&k](const std::string& name, auto member) {
            k[name] = {[=](RunConfig& c, const std::string& v, std::size_t l) { member(c) = parse_double(v, name, l); },
                       [=](const RunConfig& c) { return num(member(const_cast<RunConfig&>(c))); }};
        };
        const auto uns = [&k](const std::string& name, auto member) {
            k[name] = {[=](RunConfig& c, const std::string& v, std::size_t l) {
                           member(c) = static_cast<std::remove_reference_t<decltype(member(c))>>(parse_uint(v, name, l));
                       },
                       [=](const RunConfig& c) { return std::to_string(member(const_cast<RunConfig&>(c))); }};
        };
        const auto str = [&k](const std::string& name, auto member) {
            k[name] = {[=](RunConfig& c, const std::string& v, std::size_t) { member(c) = v; },
                       [=](const RunConfig& c) { return member(const_cast<RunConfig&>(c)); }};
        };
        const auto dlist = [&k](const std::string& name, auto member) {
            k[name] = {[=](RunConfig& c, const std::string& v, std::size_t l) {
                           std::vector<double> out;
                           for (const auto& item : split_list(v)) out.push_back(parse_double(item, name, l));
                           member(c) = out;
                       },
                       [=](const RunConfig& c) { return join(member(const_cast<RunConfig&>(c))); }};
        };

        // probe.*
        k["probe.n_elements"] = {[](RunConfig& c, const std::string& v, std::size_t l) {
                                     c.probe.n_elements = static_cast<int>(parse_int(v, "probe.n_elements", l));
                                 },
                                 [](const RunConfig& c) { return std::to_string(c.probe.n_elements); }};
        dbl("probe.pitch", [](RunConfig& c) -> double& { return c.probe.pitch; });
        dbl("probe.f0", [](RunConfig& c) -> double& { return c.probe.f0; });
        dbl("probe.fs", [](RunConfig& c) -> double& { return c.probe.fs; });
        dbl("probe.c", [](RunConfig& c) -> double& { return c.probe.c; });

        // sim.*
        k["sim.phantom"] = {[](RunConfig& c, const std::string& v, std::size_t l) {
                                if (v == "point") c.sim.phantom = PhantomKind::point;
                                else if (v == "cyst") c.sim.phantom = PhantomKind::cyst;
                                else if (v == "file") c.sim.phantom = PhantomKind::file;
                                else throw ParseError("sim.phantom: expected point|cyst|file, got '" + v + "'", l);
                            },
                            [](const RunConfig& c) {
                                return std::string(c.sim.phantom == PhantomKind::point  ? "point"
                                                   : c.sim.phantom == PhantomKind::cyst ? "cyst"
                                                                                        : "file");
                            }};
        uns("sim.n_angles", [](RunConfig& c) -> std::size_t& { return c.sim.n_angles; });
        uns("sim.reference_angles", [](RunConfig& c) -> std::size_t& { return c.sim.reference_angles; });
        dbl("sim.max_angle_deg", [](RunConfig& c) -> double& { return c.sim.max_angle_deg; });
        dbl("sim.fractional_bandwidth", [](RunConfig& c) -> double& { return c.sim.fractional_bandwidth; });
        uns("sim.seed", [](RunConfig& c) -> std::uint64_t& { return c.sim.seed; });
        dbl("sim.noise_std", [](RunConfig& c) -> double& { return c.sim.noise_std; });
        dbl("sim.cyst_radius", [](RunConfig& c) -> double& { return c.sim.cyst_radius; });
        dbl("sim.scatterer_density", [](RunConfig& c) -> double& { return c.sim.scatterer_density; });
        dbl("sim.box_x_min", [](RunConfig& c) -> double& { return c.sim.box_x_min; });
        dbl("sim.box_x_max", [](RunConfig& c) -> double& { return c.sim.box_x_max; });
        dbl("sim.box_z_min", [](RunConfig& c) -> double& { return c.sim.box_z_min; });
        dbl("sim.box_z_max", [](RunConfig& c) -> double& { return c.sim.box_z_max; });
        dlist("sim.point_depths", [](RunConfig& c) -> std::vector<double>& { return c.sim.point_depths; });
        dlist("sim.point_laterals", [](RunConfig& c) -> std::vector<double>& { return c.sim.point_laterals; });

        // beamform.*
        dbl("beamform.f_number", [](RunConfig& c) -> double& { return c.beamform.f_number; });
        k["beamform.window"] = {[](RunConfig& c, const std::string& v, std::size_t l) {
                                    if (v == "hann") c.beamform.apodization_window = ApodizationWindow::hann;
                                    else if (v == "rectangular") c.beamform.apodization_window = ApodizationWindow::rectangular;
                                    else throw ParseError("beamform.window: expected hann|rectangular, got '" + v + "'", l);
                                },
                                [](const RunConfig& c) {
                                    return std::string(c.beamform.apodization_window == ApodizationWindow::hann ? "hann"
                                                                                                                : "rectangular");
                                }};
        k["beamform.interpolation"] = {[](RunConfig& c, const std::string& v, std::size_t l) {
                                           if (v == "linear") c.beamform.interpolation = Interpolation::linear;
                                           else if (v == "nearest") c.beamform.interpolation = Interpolation::nearest;
                                           else throw ParseError("beamform.interpolation: expected linear|nearest, got '" + v + "'", l);
                                       },
                                       [](const RunConfig& c) {
                                           return std::string(c.beamform.interpolation == Interpolation::linear ? "linear"
                                                                                                                : "nearest");
                                       }};
        dbl("beamform.z_min", [](RunConfig& c) -> double& { return c.grid.z_min; });
        dbl("beamform.depth_max", [](RunConfig& c) -> double& { return c.grid.depth_max; });
        dbl("beamform.pixels_per_wavelength", [](RunConfig& c) -> double& { return c.grid.pixels_per_wavelength; });
        dbl("beamform.dynamic_range", [](RunConfig& c) -> double& { return c.grid.dynamic_range; });

        // net.*
        uns("net.levels", [](RunConfig& c) -> std::size_t& { return c.net.levels; });
        k["net.filters"] = {[](RunConfig& c, const std::string& v, std::size_t l) {
                                c.net.filters.clear();
                                for (const auto& item : split_list(v))
                                    c.net.filters.push_back(static_cast<std::size_t>(parse_uint(item, "net.filters", l)));
                            },
                            [](const RunConfig& c) { return join(c.net.filters); }};
        uns("net.kernel_size", [](RunConfig& c) -> std::size_t& { return c.net.kernel_size; });
        dbl("net.leaky_slope", [](RunConfig& c) -> double& { return c.net.leaky_slope; });
        uns("net.crop_size", [](RunConfig& c) -> std::size_t& { return c.net.crop_size; });

        // train.*
        dbl("train.lr_init", [](RunConfig& c) -> double& { return c.train.lr_init; });
        dbl("train.lr_min", [](RunConfig& c) -> double& { return c.train.lr_min; });
        uns("train.period_steps", [](RunConfig& c) -> std::uint64_t& { return c.train.period_steps; });
        dbl("train.weight_decay", [](RunConfig& c) -> double& { return c.train.weight_decay; });
        uns("train.total_steps", [](RunConfig& c) -> std::uint64_t& { return c.train.total_steps; });
        uns("train.seed", [](RunConfig& c) -> std::uint64_t& { return c.train.seed; });
        uns("train.log_interval", [](RunConfig& c) -> std::uint64_t& { return c.train.log_interval; });
        uns("train.checkpoint_interval", [](RunConfig& c) -> std::uint64_t& { return c.train.checkpoint_interval; });
        k["train.loss"] = {[](RunConfig& c, const std::string& v, std::size_t l) {
                               if (v == "coherence") c.train.loss_kind = LossKind::coherence;
                               else if (v == "mse") c.train.loss_kind = LossKind::mse;
                               else throw ParseError("train.loss: expected coherence|mse, got '" + v + "'", l);
                           },
                           [](const RunConfig& c) {
                               return std::string(c.train.loss_kind == LossKind::coherence ? "coherence" : "mse");
                           }};
        k["train.log_wall_time"] = {[](RunConfig& c, const std::string& v, std::size_t l) {
                                        c.train.log_wall_time = parse_bool(v, "train.log_wall_time", l);
                                    },
                                    [](const RunConfig& c) { return std::string(c.train.log_wall_time ? "true" : "false"); }};
        k["train.validation_index"] = {[](RunConfig& c, const std::string& v, std::size_t l) {
                                           c.validation_index = parse_int(v, "train.validation_index", l);
                                       },
                                       [](const RunConfig& c) { return std::to_string(c.validation_index); }};

        // metrics.*
        uns("metrics.gcnr_bins", [](RunConfig& c) -> std::size_t& { return c.metrics.gcnr_bins; });
        dbl("metrics.pral_guard", [](RunConfig& c) -> double& { return c.metrics.pral_guard; });
        dbl("metrics.pral_window", [](RunConfig& c) -> double& { return c.metrics.pral_window; });
        dbl("metrics.mask_margin", [](RunConfig& c) -> double& { return c.metrics.mask_margin; });
        k["metrics.cnr_domain"] = {[](RunConfig& c, const std::string& v, std::size_t l) {
                                       if (v == "envelope") c.metrics.cnr_domain = MetricDomain::envelope;
                                       else if (v == "db") c.metrics.cnr_domain = MetricDomain::db;
                                       else throw ParseError("metrics.cnr_domain: expected envelope|db, got '" + v + "'", l);
                                   },
                                   [](const RunConfig& c) {
                                       return std::string(c.metrics.cnr_domain == MetricDomain::envelope ? "envelope" : "db");
                                   }};

        // io.*
        str("io.phantom", [](RunConfig& c) -> std::string& { return c.io.phantom; });
        str("io.rf", [](RunConfig& c) -> std::string& { return c.io.rf; });
        str("io.iq", [](RunConfig& c) -> std::string& { return c.io.iq; });
        str("io.checkpoint", [](RunConfig& c) -> std::string& { return c.io.checkpoint; });
        str("io.log", [](RunConfig& c) -> std::string& { return c.io.log; });
        str("io.out", [](RunConfig& c) -> std::string& { return c.io.out; });
        return k;
    }();
    return keys;
}

} // namespace detail

/// Range checks over the assembled config; each message names the offending key.
inline std::vector<std::pair<std::string, std::string>> config_errors(const RunConfig& c) {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& v : validate(c.probe)) out.emplace_back("probe." + v.field, v.message);
    for (const auto& v : validate(c.beamform)) out.emplace_back("beamform." + v.field, v.message);
    for (const auto& e : network_config_errors(c.net)) out.emplace_back("net", e);
    for (const auto& v : validate(c.train)) out.emplace_back("train." + v.field, v.message);
    if (c.sim.n_angles < 1) out.emplace_back("sim.n_angles", "must be >= 1");
    if (!(c.sim.max_angle_deg >= 0 && c.sim.max_angle_deg < 45)) out.emplace_back("sim.max_angle_deg", "must lie in [0, 45)");
    if (!(c.sim.fractional_bandwidth > 0 && c.sim.fractional_bandwidth < 2))
        out.emplace_back("sim.fractional_bandwidth", "must lie in (0, 2)");
    if (!(c.sim.cyst_radius > 0)) out.emplace_back("sim.cyst_radius", "must be > 0");
    if (!(c.sim.scatterer_density > 0)) out.emplace_back("sim.scatterer_density", "must be > 0");
    if (!(c.sim.noise_std >= 0)) out.emplace_back("sim.noise_std", "must be >= 0");
    if (!(c.grid.depth_max > 0)) out.emplace_back("beamform.depth_max", "must be > 0");
    if (!(c.grid.z_min >= 0 && c.grid.z_min < c.grid.depth_max)) out.emplace_back("beamform.z_min", "must lie in [0, depth_max)");
    if (!(c.grid.pixels_per_wavelength >= 2)) out.emplace_back("beamform.pixels_per_wavelength", "must be >= 2");
    if (!(c.grid.dynamic_range > 0)) out.emplace_back("beamform.dynamic_range", "must be > 0");
    if (c.metrics.gcnr_bins < 32) out.emplace_back("metrics.gcnr_bins", "must be >= 32");
    if (!(c.metrics.pral_guard > 0)) out.emplace_back("metrics.pral_guard", "must be > 0");
    if (!(c.metrics.pral_window > 0)) out.emplace_back("metrics.pral_window", "must be > 0");
    if (!(c.metrics.mask_margin >= 0)) out.emplace_back("metrics.mask_margin", "must be >= 0");
    return out;
}

/// Parse "key = value" text with "#" comments. Later duplicates override earlier ones (with a
/// warning); unknown keys, malformed lines, type and range errors raise ParseError.
inline ParsedConfig parse_config(const std::string& text) {
    ParsedConfig out;
    std::map<std::string, std::size_t> seen;
    std::istringstream is(text);
    std::string raw;
    std::size_t lineno = 0;
    const auto& keys = detail::registry();
    while (std::getline(is, raw)) {
        ++lineno;
        const auto hash = raw.find('#');
        const std::string line = detail::trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ParseError("expected 'key = value'", lineno);
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        if (key.empty()) throw ParseError("missing key", lineno);
        const auto it = keys.find(key);
        if (it == keys.end()) throw ParseError("unknown key '" + key + "'", lineno);
        if (auto s = seen.find(key); s != seen.end())
            out.warnings.push_back("line " + std::to_string(lineno) + ": '" + key + "' overrides line " +
                                   std::to_string(s->second));
        seen[key] = lineno;
        it->second.set(out.config, value, lineno);
    }
    const auto errs = config_errors(out.config);
    if (!errs.empty()) {
        const auto& [key, msg] = errs.front();
        const auto s = seen.find(key);
        throw ParseError(key + ": " + msg, s == seen.end() ? 0 : s->second);
    }
    return out;
}

/// Canonical text of every key, suitable for parse_config and for file metadata.
inline std::string format_config(const RunConfig& c) {
    std::string out;
    for (const auto& [key, k] : detail::registry()) out += key + " = " + k.get(c) + "\n";
    return out;
}

/// Paths named in io.* that must already exist for the given command's inputs.
inline std::vector<std::string> missing_files(const std::vector<std::string>& paths) {
    std::vector<std::string> out;
    for (const auto& p : paths)
        if (!p.empty() && !std::filesystem::exists(p)) out.push_back(p);
    return out;
}

} // namespace pwdcl
