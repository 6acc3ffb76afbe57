#ifndef RESOLAB_EXPERIMENTS_HPP
#define RESOLAB_EXPERIMENTS_HPP

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "resolab/resonance.hpp"

namespace resolab {

enum class ExperimentKind { disk, sphere, bie, split, stability, sweep };

inline const char* to_string(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::disk: return "disk";
        case ExperimentKind::sphere: return "sphere";
        case ExperimentKind::bie: return "bie";
        case ExperimentKind::split: return "split";
        case ExperimentKind::stability: return "stability";
        default: return "sweep";
    }
}

inline ExperimentKind parse_experiment_kind(const std::string& s) {
    for (ExperimentKind k : {ExperimentKind::disk, ExperimentKind::sphere,
                             ExperimentKind::bie, ExperimentKind::split,
                             ExperimentKind::stability, ExperimentKind::sweep})
        if (s == to_string(k)) return k;
    throw std::invalid_argument("unknown experiment: " + s);
}

/// Raised when a run's preconditions fail (missing files, nothing to split);
/// the CLI maps it to exit code 2.
struct PreflightError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Raised when the enclosed multiplicity changes during a split sweep;
/// the CLI maps it to exit code 3. The report files are written first.
struct StabilityViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::disk;
    std::string curve = "disk"; // preset name or path to a curve JSON file
    int n_samples = 128;

    // boundary bump deformation (split / stability)
    double center_param = 0.7;
    double bump_h = 0.5;
    int bump_order = 1;
    double t_max = 0.5;
    int rk_steps = 64;
    std::vector<double> t_values;   // split grid; default 0..t_max in 11 steps
    std::vector<double> amplitudes; // stability ladder; default 6 small rungs

    // contour (split / stability); default encloses the first double
    // resonance of the unit-disk preset
    LogPoint contour_center{0.713569480912, -2.198853292323};
    double contour_radius = 0.2;
    int contour_nodes = 32;
    double rank_tol = 1e-6;
    int probe_dim = 8;

    // search region (disk / sphere / bie / sweep); the default stays inside
    // the zone where the n_samples=128 discretization is free of spurious
    // determinant zeros (the continued kernel grows like
    // exp(2 mod |sin arg|), so large modulus at mid-sheet arguments needs a
    // finer quadrature)
    SectorRegion region{-M_PI + 0.05, -0.05, 0.5, 3.0};
    int m_max = 3;
    int l_max = 2;

    // sweep ensemble
    int samples = 20;
    double sweep_h = 0.4;
    double sweep_t_min = 0.02;
    double sweep_t_max = 0.1;

    std::string output_dir = ".";
    std::uint64_t seed = 0;
};

namespace experiments_detail {

using nlohmann::json;
using cplx = std::complex<double>;

inline std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline void write_text(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f << text;
    if (!f) throw std::runtime_error("write failed: " + path);
}

inline json point_json(const LogPoint& p) {
    return {{"modulus", p.modulus}, {"argument", p.argument}};
}

inline json record_json(const ResonanceRecord& r) {
    return {{"modulus", r.location.modulus},
            {"argument", r.location.argument},
            {"multiplicity", r.multiplicity},
            {"residual", r.residual},
            {"source", to_string(r.source)}};
}

inline std::string csv_header() {
    return "experiment,t,modulus,argument,multiplicity,residual,source\n";
}

inline void csv_row(std::string& csv, const char* experiment, double t,
                    const ResonanceRecord& r) {
    csv += experiment;
    csv += ',' + fmt(t) + ',' + fmt(r.location.modulus) + ',' +
           fmt(r.location.argument) + ',' + std::to_string(r.multiplicity) +
           ',' + fmt(r.residual) + ',' + to_string(r.source) + '\n';
}

inline std::filesystem::path out_path(const ExperimentConfig& cfg,
                                      const std::string& name) {
    std::filesystem::path dir(cfg.output_dir);
    std::filesystem::create_directories(dir);
    return dir / name;
}

} // namespace experiments_detail

/// Parse a config from its JSON form. Unknown keys are ignored; values are
/// range-checked where the owning module does not already do so.
inline ExperimentConfig config_from_json(const nlohmann::json& j) {
    ExperimentConfig c;
    if (!j.contains("experiment"))
        throw PreflightError("config: missing \"experiment\"");
    c.kind = parse_experiment_kind(j.at("experiment").get<std::string>());
    c.curve = j.value("curve", c.curve);
    c.n_samples = j.value("n_samples", c.n_samples);
    if (j.contains("deformation")) {
        const auto& d = j.at("deformation");
        c.center_param = d.value("center_param", c.center_param);
        c.bump_h = d.value("h", c.bump_h);
        c.bump_order = d.value("M", c.bump_order);
        c.t_max = d.value("t", c.t_max);
        c.rk_steps = d.value("rk_steps", c.rk_steps);
    }
    if (j.contains("t_values"))
        c.t_values = j.at("t_values").get<std::vector<double>>();
    if (j.contains("amplitudes"))
        c.amplitudes = j.at("amplitudes").get<std::vector<double>>();
    if (j.contains("contour")) {
        const auto& k = j.at("contour");
        if (k.contains("center"))
            c.contour_center = LogPoint(k.at("center").value("modulus", 1.0),
                                        k.at("center").value("argument", -1.0));
        c.contour_radius = k.value("radius", c.contour_radius);
        c.contour_nodes = k.value("nodes", c.contour_nodes);
        c.rank_tol = k.value("rank_tol", c.rank_tol);
        c.probe_dim = k.value("probe_dim", c.probe_dim);
    }
    if (j.contains("region")) {
        const auto& r = j.at("region");
        c.region.arg_min = r.value("arg_min", c.region.arg_min);
        c.region.arg_max = r.value("arg_max", c.region.arg_max);
        c.region.mod_min = r.value("mod_min", c.region.mod_min);
        c.region.mod_max = r.value("mod_max", c.region.mod_max);
        if (!(c.region.arg_min < c.region.arg_max) ||
            !(0.0 < c.region.mod_min && c.region.mod_min < c.region.mod_max))
            throw PreflightError("config: malformed region");
    }
    c.m_max = j.value("m_max", c.m_max);
    c.l_max = j.value("l_max", c.l_max);
    if (j.contains("sweep")) {
        const auto& s = j.at("sweep");
        c.samples = s.value("samples", c.samples);
        c.sweep_h = s.value("h", c.sweep_h);
        c.sweep_t_min = s.value("t_min", c.sweep_t_min);
        c.sweep_t_max = s.value("t_max", c.sweep_t_max);
        if (c.samples < 0 || !(c.sweep_t_min <= c.sweep_t_max))
            throw PreflightError("config: malformed sweep block");
    }
    c.output_dir = j.value("output_dir", c.output_dir);
    c.seed = j.value("seed", c.seed);
    return c;
}

inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw PreflightError("config file not found: " + path);
    nlohmann::json j;
    try {
        f >> j;
    } catch (const nlohmann::json::exception& e) {
        throw PreflightError("config parse error in " + path + ": " + e.what());
    }
    return config_from_json(j);
}

/// Resolve the curve field: the "disk" preset or a curve JSON file
/// {"fourier_x": [[a,b],...], "fourier_y": [...], "n_samples": N}.
inline BoundaryCurve resolve_curve(const ExperimentConfig& cfg) {
    if (cfg.curve == "disk") return unit_circle(cfg.n_samples);
    std::ifstream f(cfg.curve);
    if (!f) throw PreflightError("curve is neither a preset nor a readable file: " +
                                 cfg.curve);
    nlohmann::json j;
    try {
        f >> j;
    } catch (const nlohmann::json::exception& e) {
        throw PreflightError("curve parse error in " + cfg.curve + ": " + e.what());
    }
    BoundaryCurve c;
    try {
        for (const auto& a : j.at("fourier_x"))
            c.fourier_x.push_back({a.at(0).get<double>(), a.at(1).get<double>()});
        for (const auto& a : j.at("fourier_y"))
            c.fourier_y.push_back({a.at(0).get<double>(), a.at(1).get<double>()});
        c.n_samples = j.value("n_samples", cfg.n_samples);
    } catch (const nlohmann::json::exception& e) {
        throw PreflightError("curve format error in " + cfg.curve + ": " + e.what());
    }
    try {
        validate_curve(c);
    } catch (const std::exception& e) {
        throw PreflightError("invalid curve in " + cfg.curve + ": " + e.what());
    }
    return c;
}

// ---------------------------------------------------------------------------
// oracle and solver front-ends: resonance tables

struct TableReport {
    std::string experiment;
    std::vector<ResonanceRecord> records;
};

namespace experiments_detail {

inline void write_table(const ExperimentConfig& cfg, const TableReport& rep) {
    json j;
    j["experiment"] = rep.experiment;
    j["resonances"] = json::array();
    for (const auto& r : rep.records) j["resonances"].push_back(record_json(r));
    write_text(out_path(cfg, rep.experiment + "_report.json").string(),
               j.dump(2) + "\n");
    std::string csv = csv_header();
    for (const auto& r : rep.records)
        csv_row(csv, rep.experiment.c_str(), 0.0, r);
    write_text(out_path(cfg, rep.experiment + "_resonances.csv").string(), csv);
}

} // namespace experiments_detail

inline TableReport run_disk(const ExperimentConfig& cfg) {
    TableReport rep{"disk", disk_resonances(cfg.m_max, cfg.region)};
    experiments_detail::write_table(cfg, rep);
    return rep;
}

inline TableReport run_sphere(const ExperimentConfig& cfg) {
    TableReport rep{"sphere", sphere_resonances(cfg.l_max, cfg.region)};
    experiments_detail::write_table(cfg, rep);
    return rep;
}

inline TableReport run_bie(const ExperimentConfig& cfg) {
    RegionSolveOptions opt;
    opt.nodes = cfg.contour_nodes;
    opt.rank_tol = cfg.rank_tol;
    opt.probe_dim = cfg.probe_dim;
    TableReport rep{"bie", region_resonances(resolve_curve(cfg), cfg.region, opt)};
    experiments_detail::write_table(cfg, rep);
    return rep;
}

// ---------------------------------------------------------------------------
// split experiment

struct SplitReport {
    std::vector<double> t_values;
    std::vector<std::vector<ResonanceRecord>> records_per_t;
    int total_in_contour = 0;
    std::optional<double> split_detected_at;
    bool stable = true;
};

namespace experiments_detail {

inline std::string color_by_t(double frac) {
    // blue (t=0) to red (t=max)
    int r = static_cast<int>(31 + frac * (214 - 31));
    int g = static_cast<int>(119 + frac * (39 - 119));
    int b = static_cast<int>(180 + frac * (40 - 180));
    char buf[8];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
    return buf;
}

/// Minimal SVG 1.1 scatter of the resonance trajectories in the lambda
/// plane: the contour circle, segments linking each point to its nearest
/// predecessor at the previous t, and points colored by t.
inline std::string split_svg(const SplitReport& rep, const LogPoint& center,
                             double radius) {
    cplx c = project(center);
    double xmin = c.real() - radius, xmax = c.real() + radius;
    double ymin = c.imag() - radius, ymax = c.imag() + radius;
    for (const auto& recs : rep.records_per_t)
        for (const auto& r : recs) {
            cplx z = project(r.location);
            xmin = std::min(xmin, z.real());
            xmax = std::max(xmax, z.real());
            ymin = std::min(ymin, z.imag());
            ymax = std::max(ymax, z.imag());
        }
    double pad = 0.08 * std::max(xmax - xmin, ymax - ymin);
    xmin -= pad; xmax += pad; ymin -= pad; ymax += pad;
    double W = 640.0, H = 640.0;
    double sx = W / (xmax - xmin), sy = H / (ymax - ymin);
    auto X = [&](double re) { return (re - xmin) * sx; };
    auto Y = [&](double im) { return H - (im - ymin) * sy; }; // flip y
    std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" "
                    "height=\"640\" viewBox=\"0 0 640 640\">\n";
    s += "<rect width=\"640\" height=\"640\" fill=\"white\"/>\n";
    s += "<circle cx=\"" + fmt(X(c.real())) + "\" cy=\"" + fmt(Y(c.imag())) +
         "\" r=\"" + fmt(radius * sx) +
         "\" fill=\"none\" stroke=\"#999999\" stroke-dasharray=\"4 3\"/>\n";
    double tmax = rep.t_values.empty() ? 1.0 : rep.t_values.back();
    if (tmax == 0.0) tmax = 1.0;
    // trajectory segments: nearest predecessor at the previous t
    for (std::size_t i = 1; i < rep.records_per_t.size(); ++i)
        for (const auto& r : rep.records_per_t[i]) {
            cplx z = project(r.location);
            const auto& prev = rep.records_per_t[i - 1];
            if (prev.empty()) continue;
            cplx best = project(prev[0].location);
            for (const auto& p : prev)
                if (std::abs(project(p.location) - z) < std::abs(best - z))
                    best = project(p.location);
            s += "<line x1=\"" + fmt(X(best.real())) + "\" y1=\"" +
                 fmt(Y(best.imag())) + "\" x2=\"" + fmt(X(z.real())) +
                 "\" y2=\"" + fmt(Y(z.imag())) +
                 "\" stroke=\"#bbbbbb\" stroke-width=\"1\"/>\n";
        }
    for (std::size_t i = 0; i < rep.records_per_t.size(); ++i)
        for (const auto& r : rep.records_per_t[i]) {
            cplx z = project(r.location);
            s += "<circle cx=\"" + fmt(X(z.real())) + "\" cy=\"" +
                 fmt(Y(z.imag())) + "\" r=\"4\" fill=\"" +
                 color_by_t(rep.t_values[i] / tmax) + "\"/>\n";
        }
    s += "</svg>\n";
    return s;
}

inline void write_split(const ExperimentConfig& cfg, const SplitReport& rep) {
    json j;
    j["experiment"] = "split";
    j["t_values"] = rep.t_values;
    j["total_in_contour"] = rep.total_in_contour;
    j["stable"] = rep.stable;
    if (!rep.stable) j["flag"] = "FAILED-STABILITY";
    if (rep.split_detected_at)
        j["split_detected_at"] = *rep.split_detected_at;
    else
        j["split_detected_at"] = nullptr;
    j["contour"] = {{"center", point_json(cfg.contour_center)},
                    {"radius", cfg.contour_radius}};
    j["records"] = json::array();
    for (std::size_t i = 0; i < rep.records_per_t.size(); ++i) {
        json row;
        row["t"] = rep.t_values[i];
        row["resonances"] = json::array();
        for (const auto& r : rep.records_per_t[i])
            row["resonances"].push_back(record_json(r));
        j["records"].push_back(row);
    }
    write_text(out_path(cfg, "split_report.json").string(), j.dump(2) + "\n");
    std::string csv = csv_header();
    for (std::size_t i = 0; i < rep.records_per_t.size(); ++i)
        for (const auto& r : rep.records_per_t[i])
            csv_row(csv, "split", rep.t_values[i], r);
    write_text(out_path(cfg, "split_report.csv").string(), csv);
    write_text(out_path(cfg, "split_trajectories.svg").string(),
               split_svg(rep, cfg.contour_center, cfg.contour_radius));
}

} // namespace experiments_detail

inline SplitReport run_split(const ExperimentConfig& cfg) {
    BoundaryCurve curve = resolve_curve(cfg);
    ContourSpec contour(cfg.contour_center, cfg.contour_radius, cfg.contour_nodes,
                        cfg.rank_tol, cfg.probe_dim);
    DeformationField field =
        make_field(curve, cfg.center_param, cfg.bump_h, cfg.bump_order, 2);

    int base = multiplicity_in(curve, contour);
    if (base < 2)
        throw PreflightError("split: contour encloses multiplicity " +
                             std::to_string(base) + "; nothing to split");

    SplitReport rep;
    rep.t_values = cfg.t_values;
    if (rep.t_values.empty())
        for (int i = 0; i <= 10; ++i) rep.t_values.push_back(cfg.t_max * i / 10.0);
    if (rep.t_values.front() != 0.0 ||
        !std::is_sorted(rep.t_values.begin(), rep.t_values.end()))
        throw PreflightError("split: t_values must be sorted and start at 0");
    rep.total_in_contour = base;

    std::string violation;
    for (double t : rep.t_values) {
        BoundaryCurve deformed = curve;
        if (t != 0.0)
            deformed = deform_curve(curve, FlowDeformation(field, t, cfg.rk_steps));
        std::vector<ResonanceRecord> recs;
        try {
            recs = beyn_solve(deformed, contour);
        } catch (const std::runtime_error& e) {
            rep.stable = false;
            violation = "solve failed at t = " + experiments_detail::fmt(t) +
                        " (resonance on the contour?): " + e.what();
            break;
        }
        int sum = 0;
        for (const auto& r : recs) sum += r.multiplicity;
        if (sum != base) {
            rep.stable = false;
            violation = "total multiplicity changed from " + std::to_string(base) +
                        " to " + std::to_string(sum) + " at t = " +
                        experiments_detail::fmt(t);
        }
        if (!rep.split_detected_at && recs.size() >= 2)
            rep.split_detected_at = t;
        rep.records_per_t.push_back(std::move(recs));
        if (!rep.stable) break;
    }
    while (rep.records_per_t.size() < rep.t_values.size())
        rep.t_values.pop_back(); // truncate an aborted sweep for the report

    experiments_detail::write_split(cfg, rep);
    if (!rep.stable) throw StabilityViolation("split: " + violation);
    return rep;
}

// ---------------------------------------------------------------------------
// stability experiment

struct StabilityReport {
    std::vector<double> amplitudes;
    std::vector<double> c2_distances;
    std::vector<int> multiplicities;
    int base_multiplicity = 0;
    double largest_validated = 0.0; // empirical deformation-size threshold
    bool constant = true;
};

inline StabilityReport run_stability(const ExperimentConfig& cfg) {
    using experiments_detail::json;
    BoundaryCurve curve = resolve_curve(cfg);
    ContourSpec contour(cfg.contour_center, cfg.contour_radius, cfg.contour_nodes,
                        cfg.rank_tol, cfg.probe_dim);
    DeformationField field =
        make_field(curve, cfg.center_param, cfg.bump_h, cfg.bump_order, 2);

    StabilityReport rep;
    rep.amplitudes = cfg.amplitudes;
    if (rep.amplitudes.empty())
        rep.amplitudes = {1e-5, 3e-5, 1e-4, 2e-4, 4e-4, 8e-4};
    if (!std::is_sorted(rep.amplitudes.begin(), rep.amplitudes.end()))
        throw PreflightError("stability: amplitudes must be sorted");
    rep.base_multiplicity = multiplicity_in(curve, contour);

    bool prefix_ok = true;
    for (double a : rep.amplitudes) {
        FlowDeformation flow(field, a, cfg.rk_steps);
        rep.c2_distances.push_back(c2_distance(flow));
        int m;
        try {
            m = multiplicity_in(deform_curve(curve, flow), contour);
        } catch (const std::runtime_error&) {
            m = -1; // contour-exit or winding failure: a finding, not an error
        }
        rep.multiplicities.push_back(m);
        if (m != rep.base_multiplicity) {
            rep.constant = false;
            prefix_ok = false;
        }
        if (prefix_ok) rep.largest_validated = a;
    }

    json j;
    j["experiment"] = "stability";
    j["base_multiplicity"] = rep.base_multiplicity;
    j["constant"] = rep.constant;
    j["largest_validated_amplitude"] = rep.largest_validated;
    j["ladder"] = json::array();
    for (std::size_t i = 0; i < rep.amplitudes.size(); ++i)
        j["ladder"].push_back({{"amplitude", rep.amplitudes[i]},
                               {"c2_distance", rep.c2_distances[i]},
                               {"multiplicity", rep.multiplicities[i]}});
    experiments_detail::write_text(
        experiments_detail::out_path(cfg, "stability_report.json").string(),
        j.dump(2) + "\n");
    return rep;
}

// ---------------------------------------------------------------------------
// sweep experiment

struct SweepSample {
    int index = 0;
    double center_param = 0.0;
    double t = 0.0;
    bool has_multiple = false;
    std::vector<ResonanceRecord> records;
};

struct SweepReport {
    std::vector<SweepSample> samples; // [0] is the undeformed baseline
    int deformed_with_multiples = 0;
};

inline SweepReport run_sweep(const ExperimentConfig& cfg) {
    using experiments_detail::json;
    BoundaryCurve curve = resolve_curve(cfg);
    RegionSolveOptions opt;
    opt.nodes = cfg.contour_nodes;
    opt.rank_tol = cfg.rank_tol;
    opt.probe_dim = cfg.probe_dim;

    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> cen(0.0, 2.0 * M_PI);
    std::uniform_real_distribution<double> ts(cfg.sweep_t_min, cfg.sweep_t_max);

    SweepReport rep;
    for (int k = 0; k <= cfg.samples; ++k) {
        SweepSample s;
        s.index = k;
        BoundaryCurve shape = curve;
        if (k > 0) {
            s.center_param = cen(rng);
            s.t = ts(rng);
            DeformationField field =
                make_field(curve, s.center_param, cfg.sweep_h, 1, 2);
            shape = deform_curve(curve, FlowDeformation(field, s.t, cfg.rk_steps));
        }
        s.records = region_resonances(shape, cfg.region, opt);
        for (const auto& r : s.records)
            if (r.multiplicity >= 2) s.has_multiple = true;
        if (k > 0 && s.has_multiple) ++rep.deformed_with_multiples;
        rep.samples.push_back(std::move(s));
    }

    json j;
    j["experiment"] = "sweep";
    j["seed"] = cfg.seed;
    j["deformed_samples"] = cfg.samples;
    j["deformed_with_multiples"] = rep.deformed_with_multiples;
    j["samples"] = json::array();
    std::string csv = experiments_detail::csv_header();
    for (const auto& s : rep.samples) {
        json row;
        row["index"] = s.index;
        row["baseline"] = (s.index == 0);
        row["center_param"] = s.center_param;
        row["t"] = s.t;
        row["has_multiple"] = s.has_multiple;
        row["resonances"] = json::array();
        for (const auto& r : s.records) {
            row["resonances"].push_back(experiments_detail::record_json(r));
            experiments_detail::csv_row(csv, "sweep", s.t, r);
        }
        j["samples"].push_back(row);
    }
    experiments_detail::write_text(
        experiments_detail::out_path(cfg, "sweep_report.json").string(),
        j.dump(2) + "\n");
    experiments_detail::write_text(
        experiments_detail::out_path(cfg, "sweep_resonances.csv").string(), csv);
    return rep;
}

/// Dispatch on config.kind; returns the CLI exit code contract's "success".
inline void run_experiment(const ExperimentConfig& cfg) {
    switch (cfg.kind) {
        case ExperimentKind::disk: run_disk(cfg); break;
        case ExperimentKind::sphere: run_sphere(cfg); break;
        case ExperimentKind::bie: run_bie(cfg); break;
        case ExperimentKind::split: run_split(cfg); break;
        case ExperimentKind::stability: run_stability(cfg); break;
        case ExperimentKind::sweep: run_sweep(cfg); break;
    }
}

} // namespace resolab

#endif
