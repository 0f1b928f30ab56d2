#pragma once

#include <charconv>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "config.hpp"

namespace blochpdc {

enum class Subcommand { band, modes, surface, emission, intersect, efficiency };

inline const char* to_string(Subcommand s) {
    switch (s) {
        case Subcommand::band: return "band";
        case Subcommand::modes: return "modes";
        case Subcommand::surface: return "surface";
        case Subcommand::emission: return "emission";
        case Subcommand::intersect: return "intersect";
        case Subcommand::efficiency: return "efficiency";
    }
    return "?";
}

namespace io {

// shortest round-trip representation, locale independent
inline std::string num(double v) {
    char buf[64];
    auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

class Csv {
public:
    Csv(const std::filesystem::path& p, const std::string& header) : out_(p, std::ios::binary) {
        if (!out_) throw Error("cannot write " + p.string());
        out_ << header << '\n';
    }
    template <class... T>
    void row(const T&... v) {
        bool first = true;
        ((out_ << (first ? "" : ",") << cell(v), first = false), ...);
        out_ << '\n';
    }

private:
    static std::string cell(double v) { return num(v); }
    static std::string cell(int v) { return std::to_string(v); }
    static std::string cell(const char* v) { return v; }
    static std::string cell(const std::string& v) { return v; }
    std::ofstream out_;
};

inline void write_json(const std::filesystem::path& p, const nlohmann::json& j) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw Error("cannot write " + p.string());
    out << j.dump(2) << '\n';
}

}  // namespace io

namespace detail {

inline nlohmann::json pair_json(double x, double y) { return nlohmann::json::array({x, y}); }

inline std::string pol_tag(Polarization p) { return p == Polarization::TE ? "te" : "tm"; }

inline void run_band(const RunConfig& cfg, const std::filesystem::path& out) {
    nlohmann::json meta;
    meta["units"] = {{"lambda_nm", "nm"}, {"k_par", "rad/nm"}, {"re_Kz", "rad/nm"}, {"im_Kz", "rad/nm"}};
    meta["axes"] = cfg.band.axes == BandAxes::normalized ? "normalized" : "wavelength_angle";
    meta["x_range"] = pair_json(cfg.band.x_min, cfg.band.x_max);
    meta["y_range"] = pair_json(cfg.band.y_min, cfg.band.y_max);
    meta["resolution"] = cfg.band.resolution;
    const double L = cfg.structure.period();
    double lam_lo, lam_hi;
    if (cfg.band.axes == BandAxes::normalized) {
        lam_lo = 2 * L / cfg.band.x_max;
        lam_hi = 2 * L / cfg.band.x_min;
    } else {
        lam_lo = cfg.band.x_min;
        lam_hi = cfg.band.x_max;
    }
    for (Polarization pol : cfg.band.pols) {
        BandScanSpec spec{cfg.band.axes, cfg.band.x_min, cfg.band.x_max, cfg.band.y_min, cfg.band.y_max,
                          cfg.band.resolution, cfg.band.resolution, pol};
        const BandGrid g = band_scan(cfg.structure, spec, cfg.threads);
        io::Csv csv(out / ("band_" + pol_tag(pol) + ".csv"), "lambda_nm,k_par,classification,re_Kz,im_Kz");
        for (const auto& c : g.cells)
            csv.row(c.lambda_nm, c.k_par, to_string(c.classification), c.K.real(), c.K.imag());
        nlohmann::json p;
        p["gap_cells"] = g.count(Classification::gap);
        p["tir_cells"] = g.count(Classification::total_internal_reflection);
        p["absorbing_cells"] = g.count(Classification::absorbing);
        p["propagating_cells"] = g.count(Classification::propagating);
        // refined band edges at normal incidence over the transparent part of the range
        double lo = lam_lo;
        for (const Material* m : {&cfg.structure.material_a, &cfg.structure.material_b})
            if (m->absorption_edge_nm) lo = std::max(lo, *m->absorption_edge_nm);
        std::vector<double> edges;
        if (lo < lam_hi) {
            try {
                edges = band_edges(cfg.structure, 0.0, pol, lo, lam_hi, 4 * cfg.band.resolution);
            } catch (const OutOfRange&) {
            }
        }
        p["normal_incidence_band_edges_nm"] = edges;
        p["normal_incidence_gap_count"] = edges.size() / 2;
        meta[to_string(pol)] = p;
    }
    io::write_json(out / "band.json", meta);
}

inline void run_modes(const RunConfig& cfg, const std::filesystem::path& out) {
    std::vector<ModeSettings> modes = cfg.modes;
    if (modes.empty()) modes.push_back(ModeSettings{"pump", cfg.process.pump, Direction::forward});
    nlohmann::json index = nlohmann::json::array();
    const double L = cfg.structure.period();
    for (const auto& ms : modes) {
        const BlochMode m = make_mode(cfg.structure, ms.query, ms.direction, cfg.window);
        const std::string base = "mode_" + ms.label;
        io::Csv csv(out / (base + ".csv"), "n,G_rad_per_nm,re_ex,im_ex,re_ey,im_ey,re_ez,im_ez");
        for (int n = m.window.n_min; n <= m.window.n_max; ++n) {
            const Vec3c& c = m[n];
            csv.row(n, 2 * std::numbers::pi * n / L, c[0].real(), c[0].imag(), c[1].real(), c[1].imag(), c[2].real(),
                    c[2].imag());
        }
        nlohmann::json h;
        h["label"] = ms.label;
        h["lambda_nm"] = ms.query.lambda_nm;
        h["k_par_rad_per_nm"] = pair_json(ms.query.kx, ms.query.ky);
        h["polarization"] = to_string(ms.query.pol);
        h["direction"] = ms.direction == Direction::forward ? "forward" : "backward";
        h["K_z_rad_per_nm"] = pair_json(m.K.K.real(), m.K.K.imag());
        h["classification"] = to_string(m.K.classification);
        h["normalization"] = "unit Euclidean norm of retained coefficients";
        h["window"] = pair_json(m.window.n_min, m.window.n_max);
        h["window_converged"] = m.converged;
        h["dominant_n"] = m.dominant_index();
        h["coefficients_csv"] = base + ".csv";
        io::write_json(out / (base + ".json"), h);
        index.push_back(base);
    }
    io::write_json(out / "modes.json", nlohmann::json{{"modes", index}});
}

inline void run_surface(const RunConfig& cfg, const std::filesystem::path& out) {
    const double lambda = cfg.surface.lambda_nm.value_or(cfg.process.lambda_signal);
    nlohmann::json meta;
    meta["lambda_nm"] = lambda;
    meta["units"] = {{"k_par", "rad/nm"}, {"Kz", "rad/nm"}};
    for (Polarization pol : {Polarization::TE, Polarization::TM}) {
        const DispersionSurface d = dispersion_surface(cfg.structure, lambda, pol, cfg.surface.samples);
        io::Csv csv(out / ("surface_" + pol_tag(pol) + ".csv"), "k_par,Kz");
        for (std::size_t i = 0; i < d.k_par.size(); ++i) csv.row(d.k_par[i], d.Kz[i]);
        meta[to_string(pol)] = {{"samples", d.k_par.size()}};
    }
    const EffectiveIndices e = effective_indices(cfg.structure, lambda);
    meta["n_o"] = e.n_o;
    meta["n_e"] = e.n_e;
    io::write_json(out / "surface.json", meta);
}

inline void run_emission(const RunConfig& cfg, const std::filesystem::path& out) {
    for (ProcessType t : cfg.emission.processes) {
        ProcessSpec spec = cfg.process;
        spec.type = t;
        EmissionOptions o;
        o.resolution = cfg.emission.resolution;
        o.chi2_weighting = cfg.emission.chi2_weighting;
        o.window = cfg.window;
        o.threads = cfg.threads;
        const EmissionMap m = emission_map(spec, cfg.structure, o);
        const std::string base = std::string("emission_") + to_string(t);
        io::Csv csv(out / (base + ".csv"), "kx,ky,intensity");
        for (std::size_t j = 0; j < m.ky.size(); ++j)
            for (std::size_t i = 0; i < m.kx.size(); ++i) csv.row(m.kx[i], m.ky[j], m.at(i, j));
        nlohmann::json meta;
        meta["process"] = to_string(t);
        meta["units"] = {{"kx", "rad/nm"}, {"ky", "rad/nm"}, {"intensity", "relative |amplitude|^2"}};
        meta["light_line_radius_rad_per_nm"] = m.light_line_radius;
        meta["peak_intensity"] = m.peak;
        meta["chi2_weighting"] = o.chi2_weighting;
        meta["resolution"] = o.resolution;
        const auto [cx, cy] = ring_center(spec);
        meta["ring_center_rad_per_nm"] = pair_json(cx, cy);
        nlohmann::json radii = nlohmann::json::array();
        for (int k = 0; k < 4; ++k) {
            const double phi = k * std::numbers::pi / 2;
            nlohmann::json r;
            r["azimuth_deg"] = 90 * k;
            r["signal"] = ring_radii(spec, cfg.structure, phi, spec.signal_pol(), spec.idler_pol());
            if (t == ProcessType::II)
                r["signal_tm"] = ring_radii(spec, cfg.structure, phi, Polarization::TM, Polarization::TE);
            radii.push_back(r);
        }
        meta["ring_radii_rad_per_nm"] = radii;
        io::write_json(out / (base + ".json"), meta);
    }
}

inline nlohmann::json intersections_json(const RunConfig& cfg, const IntersectionResult& r) {
    nlohmann::json j;
    j["process"] = "II";
    j["units"] = {{"k", "rad/nm"}};
    j["rings_coincide"] = r.rings_coincide;
    j["state"] = IntersectionResult::state;
    j["upsilon"] = "symbolic";
    j["pump_k_par_rad_per_nm"] = pair_json(cfg.process.pump.kx, cfg.process.pump.ky);
    nlohmann::json pairs = nlohmann::json::array();
    for (const auto& p : r.points) {
        nlohmann::json e;
        e["k"] = pair_json(p.kx, p.ky);
        e["partner_k"] = pair_json(p.partner_kx, p.partner_ky);
        e["lambda_nm"] = cfg.process.lambda_signal;
        e["partner_lambda_nm"] = cfg.process.lambda_idler();
        e["labels"] = {{"H", "TE"}, {"V", "TM"}};
        e["terms"] = nlohmann::json::array({{{"k", "H"}, {"partner_k", "V"}}, {{"k", "V"}, {"partner_k", "H"}}});
        pairs.push_back(e);
    }
    j["pairs"] = pairs;
    return j;
}

inline void run_intersect(const RunConfig& cfg, const std::filesystem::path& out) {
    ProcessSpec spec = cfg.process;
    spec.type = ProcessType::II;
    const IntersectionResult r = find_intersections(spec, cfg.structure);
    io::write_json(out / "intersect.json", intersections_json(cfg, r));
}

inline void run_efficiency(const RunConfig& cfg, const std::filesystem::path& out) {
    ProcessSpec spec = cfg.process;
    spec.type = ProcessType::II;
    const IntersectionResult r = find_intersections(spec, cfg.structure);
    double kx, ky;
    if (r.rings_coincide || r.points.empty()) {
        const auto [cx, cy] = ring_center(spec);
        const double rad = solve_ring(spec, cfg.structure, 0.0);
        kx = cx + rad;
        ky = cy;
    } else {
        kx = r.points.front().kx;
        ky = r.points.front().ky;
    }
    const Triplet t = make_triplet(spec, cfg.structure, kx, ky, cfg.window);
    const PhaseMatchCandidate c = make_candidate(t, cfg.structure, spec.g_branch, cfg.window);
    nlohmann::json j;
    j["fourier_product"] = c.fourier_product;
    j["chi2_factor"] = c.chi2_factor;
    j["ratio_vs_reference"] = efficiency_ratio(c, cfg.reference_chi2);
    j["reference_chi2_pm_per_V"] = cfg.reference_chi2;
    j["chi2_material_pm_per_V"] = c.chi2_material;
    j["g_indices"] = {{"n_chi", c.g.n_chi}, {"n_p", c.g.n_p}, {"n_1", c.g.n_1}, {"n_2", c.g.n_2}};
    j["amplitudes"] = {c.amplitude_chi, c.amplitude_pump, c.amplitude_signal, c.amplitude_idler};
    j["expected_amplitudes"] = {0.66, 0.90, 0.99, 0.98};
    j["signal_k_rad_per_nm"] = pair_json(kx, ky);
    j["delta_K_rad_per_nm"] = c.delta_K;
    io::write_json(out / "efficiency.json", j);
}

}  // namespace detail

inline void run(Subcommand cmd, const RunConfig& cfg) {
    const std::filesystem::path out(cfg.output_dir);
    std::filesystem::create_directories(out);
    switch (cmd) {
        case Subcommand::band: detail::run_band(cfg, out); break;
        case Subcommand::modes: detail::run_modes(cfg, out); break;
        case Subcommand::surface: detail::run_surface(cfg, out); break;
        case Subcommand::emission: detail::run_emission(cfg, out); break;
        case Subcommand::intersect: detail::run_intersect(cfg, out); break;
        case Subcommand::efficiency: detail::run_efficiency(cfg, out); break;
    }
}

inline nlohmann::json error_json(const std::exception& e, const std::string& subcommand) {
    nlohmann::json j;
    j["subcommand"] = subcommand;
    j["message"] = e.what();
    if (const auto* be = dynamic_cast<const Error*>(&e)) {
        j["error"] = be->kind();
        if (const auto* ce = dynamic_cast<const ConfigError*>(&e)) j["violations"] = ce->violations;
    } else {
        j["error"] = "InternalError";
    }
    return j;
}

}  // namespace blochpdc
