#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "band_diagram.hpp"
#include "phase_matching.hpp"

namespace blochpdc {

using json = nlohmann::json;

struct BandSettings {
    BandAxes axes = BandAxes::normalized;
    double x_min = 0.02, x_max = 1.0;
    double y_min = 0.0, y_max = 1.0;
    int resolution = 512;
    std::vector<Polarization> pols{Polarization::TE, Polarization::TM};
};

struct ModeSettings {
    std::string label;
    ModeQuery query;
    Direction direction = Direction::forward;
};

struct SurfaceSettings {
    std::optional<double> lambda_nm;  // defaults to the signal wavelength
    int samples = 256;
};

struct EmissionSettings {
    int resolution = 200;
    bool chi2_weighting = true;
    std::vector<ProcessType> processes{ProcessType::I, ProcessType::II, ProcessType::III};
};

struct RunConfig {
    BraggStructure structure;
    ProcessSpec process;
    double reference_chi2 = 2.2;
    FourierWindow window{};
    BandSettings band;
    std::vector<ModeSettings> modes;
    SurfaceSettings surface;
    EmissionSettings emission;
    std::string output_dir = "out";
    unsigned threads = 1;
};

namespace detail {

using nlohmann::json;

class Validator {
public:
    std::vector<std::string> errors;

    void fail(const std::string& path, const std::string& msg) { errors.push_back(path + ": " + msg); }

    // Reports keys outside `allowed`; true when j is an object.
    bool object(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
        if (!j.is_object()) {
            fail(path, "expected an object");
            return false;
        }
        std::set<std::string> ok(allowed.begin(), allowed.end());
        for (auto it = j.begin(); it != j.end(); ++it)
            if (!ok.count(it.key())) fail(join(path, it.key()), "unknown key");
        return true;
    }

    static std::string join(const std::string& path, const std::string& key) {
        return path.empty() ? key : path + "." + key;
    }

    std::optional<double> number(const json& j, const std::string& path, bool required) {
        if (j.is_null()) {
            if (required) fail(path, "missing required number");
            return std::nullopt;
        }
        if (!j.is_number()) {
            fail(path, "expected a number");
            return std::nullopt;
        }
        return j.get<double>();
    }

    std::optional<long long> integer(const json& j, const std::string& path, bool required) {
        if (j.is_null()) {
            if (required) fail(path, "missing required integer");
            return std::nullopt;
        }
        if (!j.is_number_integer()) {
            fail(path, "expected an integer");
            return std::nullopt;
        }
        return j.get<long long>();
    }

    std::optional<std::string> string(const json& j, const std::string& path, bool required) {
        if (j.is_null()) {
            if (required) fail(path, "missing required string");
            return std::nullopt;
        }
        if (!j.is_string()) {
            fail(path, "expected a string");
            return std::nullopt;
        }
        return j.get<std::string>();
    }

    std::optional<bool> boolean(const json& j, const std::string& path) {
        if (j.is_null()) return std::nullopt;
        if (!j.is_boolean()) {
            fail(path, "expected true or false");
            return std::nullopt;
        }
        return j.get<bool>();
    }

    std::optional<Polarization> polarization(const json& j, const std::string& path, bool required) {
        auto s = string(j, path, required);
        if (!s) return std::nullopt;
        if (*s == "TE") return Polarization::TE;
        if (*s == "TM") return Polarization::TM;
        fail(path, "expected \"TE\" or \"TM\"");
        return std::nullopt;
    }
};

inline const json& get(const json& j, const char* key) {
    static const json null;
    if (!j.is_object()) return null;
    auto it = j.find(key);
    return it == j.end() ? null : *it;
}

inline std::optional<ProcessType> parse_process(const std::string& s) {
    if (s == "I") return ProcessType::I;
    if (s == "II") return ProcessType::II;
    if (s == "III") return ProcessType::III;
    return std::nullopt;
}

inline std::optional<Dispersion> parse_index(Validator& v, const json& j, const std::string& path,
                                             const std::filesystem::path& base) {
    if (!v.object(j, path, {"constant", "table", "table_file", "vacuum"})) return std::nullopt;
    const bool has_c = j.contains("constant"), has_t = j.contains("table"), has_f = j.contains("table_file"),
               has_v = j.contains("vacuum");
    const int count = has_c + has_t + has_f + has_v;
    if (has_t && has_f) {
        v.fail(path, "ambiguous: both an inline table and table_file are given");
        return std::nullopt;
    }
    if (count != 1) {
        v.fail(path, "give exactly one of constant, table, table_file, vacuum");
        return std::nullopt;
    }
    try {
        if (has_v) {
            auto b = v.boolean(j["vacuum"], path + ".vacuum");
            if (b && !*b) v.fail(path + ".vacuum", "must be true when present");
            return Dispersion::vacuum();
        }
        if (has_c) {
            auto n = v.number(j["constant"], path + ".constant", true);
            if (!n) return std::nullopt;
            if (!(*n >= 1)) {
                v.fail(path + ".constant", "refractive index must be >= 1");
                return std::nullopt;
            }
            return Dispersion::constant(*n);
        }
        if (has_f) {
            auto f = v.string(j["table_file"], path + ".table_file", true);
            if (!f) return std::nullopt;
            std::filesystem::path p(*f);
            if (p.is_relative()) p = base / p;
            return read_dispersion_csv(p.string());
        }
        const json& t = j["table"];
        if (!t.is_array()) {
            v.fail(path + ".table", "expected a list of [lambda_nm, n] rows");
            return std::nullopt;
        }
        std::vector<std::pair<double, double>> rows;
        for (std::size_t i = 0; i < t.size(); ++i) {
            const json& r = t[i];
            if (!r.is_array() || r.size() != 2 || !r[0].is_number() || !r[1].is_number()) {
                v.fail(path + ".table[" + std::to_string(i) + "]", "expected [lambda_nm, n]");
                return std::nullopt;
            }
            rows.emplace_back(r[0].get<double>(), r[1].get<double>());
        }
        return Dispersion::table(std::move(rows));
    } catch (const Error& e) {
        v.fail(path, e.what());
        return std::nullopt;
    }
}

inline std::optional<Chi2Tensor> parse_chi2(Validator& v, const json& j, const std::string& path) {
    if (j.is_null()) return Chi2Tensor{};
    if (!v.object(j, path, {"symmetry", "magnitude_pm_per_V", "orientation"})) return std::nullopt;
    auto sym = v.string(get(j, "symmetry"), path + ".symmetry", true);
    auto mag = v.number(get(j, "magnitude_pm_per_V"), path + ".magnitude_pm_per_V", false);
    Chi2Symmetry s = Chi2Symmetry::zero;
    bool ok = true;
    if (sym) {
        if (*sym == "zincblende_43m")
            s = Chi2Symmetry::zincblende_43m;
        else if (*sym == "scalar_isotropic")
            s = Chi2Symmetry::scalar_isotropic;
        else if (*sym == "zero")
            s = Chi2Symmetry::zero;
        else {
            v.fail(path + ".symmetry", "expected zincblende_43m, scalar_isotropic or zero");
            ok = false;
        }
    } else {
        ok = false;
    }
    if (s != Chi2Symmetry::zero && !mag) {
        v.fail(path + ".magnitude_pm_per_V", "required for a nonzero tensor");
        ok = false;
    }
    if (mag && *mag < 0) {
        v.fail(path + ".magnitude_pm_per_V", "must be non-negative");
        ok = false;
    }
    Eigen::Matrix3d R = Eigen::Matrix3d::Identity();
    const json& o = get(j, "orientation");
    if (!o.is_null()) {
        bool shape = o.is_array() && o.size() == 3;
        for (std::size_t i = 0; shape && i < 3; ++i) {
            shape = o[i].is_array() && o[i].size() == 3;
            for (std::size_t k = 0; shape && k < 3; ++k) {
                shape = o[i][k].is_number();
                if (shape) R(static_cast<int>(i), static_cast<int>(k)) = o[i][k].get<double>();
            }
        }
        if (!shape) {
            v.fail(path + ".orientation", "expected a 3x3 rotation matrix");
            ok = false;
        }
    }
    if (!ok) return std::nullopt;
    try {
        return Chi2Tensor(s, mag.value_or(0.0), R);
    } catch (const Error& e) {
        v.fail(path + ".orientation", e.what());
        return std::nullopt;
    }
}

inline std::optional<Material> parse_material(Validator& v, const std::string& name, const json& j,
                                              const std::string& path, const std::filesystem::path& base) {
    if (!v.object(j, path, {"index", "absorption_edge_nm", "chi2"})) return std::nullopt;
    const json& idx = get(j, "index");
    std::optional<Dispersion> d;
    if (idx.is_null())
        v.fail(path + ".index", "missing required object");
    else
        d = parse_index(v, idx, path + ".index", base);
    auto edge = v.number(get(j, "absorption_edge_nm"), path + ".absorption_edge_nm", false);
    if (edge && !(*edge > 0)) v.fail(path + ".absorption_edge_nm", "must be positive");
    auto chi = parse_chi2(v, get(j, "chi2"), path + ".chi2");
    if (!d || !chi) return std::nullopt;
    return Material{name, *d, edge, *chi};
}

// [kx, ky] in rad/nm, or incidence angle from air plus azimuth of k_par.
inline std::optional<std::pair<double, double>> parse_k_par(Validator& v, const json& j, const std::string& path,
                                                            double lambda_nm) {
    const json& k = get(j, "k_par_rad_per_nm");
    const json& inc = get(j, "incidence_deg");
    const json& az = get(j, "azimuth_deg");
    if (!k.is_null() && (!inc.is_null() || !az.is_null())) {
        v.fail(path, "ambiguous: give either k_par_rad_per_nm or incidence_deg/azimuth_deg");
        return std::nullopt;
    }
    if (!k.is_null()) {
        if (!k.is_array() || k.size() != 2 || !k[0].is_number() || !k[1].is_number()) {
            v.fail(path + ".k_par_rad_per_nm", "expected [kx, ky]");
            return std::nullopt;
        }
        return std::make_pair(k[0].get<double>(), k[1].get<double>());
    }
    auto th = v.number(inc, path + ".incidence_deg", false);
    auto ph = v.number(az, path + ".azimuth_deg", false);
    const double theta = th.value_or(0.0), phi = ph.value_or(90.0);
    if (th && !(theta >= 0 && theta < 90)) {
        v.fail(path + ".incidence_deg", "must be in [0, 90)");
        return std::nullopt;
    }
    if (theta == 0.0) return std::make_pair(0.0, 0.0);
    const double kp = 2 * std::numbers::pi / lambda_nm * std::sin(theta * std::numbers::pi / 180);
    // exact zeros along the axes keep mirror symmetries bitwise
    const double c = phi == 90.0 || phi == 270.0 ? 0.0 : std::cos(phi * std::numbers::pi / 180);
    const double s = phi == 0.0 || phi == 180.0 ? 0.0 : std::sin(phi * std::numbers::pi / 180);
    return std::make_pair(kp * c, kp * s);
}

}  // namespace detail

inline RunConfig parse_config_json(const nlohmann::json& root, const std::filesystem::path& base) {
    using detail::get;
    detail::Validator v;
    RunConfig cfg;
    if (!v.object(root, "", {"materials", "structure", "pump", "process", "fourier_window", "band", "modes",
                             "surface", "emission", "output_dir", "threads"}))
        throw ConfigError(v.errors);

    std::map<std::string, Material> materials;
    const json& mats = get(root, "materials");
    if (mats.is_null())
        v.fail("materials", "missing required object");
    else if (!mats.is_object())
        v.fail("materials", "expected an object");
    else
        for (auto it = mats.begin(); it != mats.end(); ++it)
            if (auto m = detail::parse_material(v, it.key(), it.value(), "materials." + it.key(), base))
                materials.emplace(it.key(), std::move(*m));

    const json& st = get(root, "structure");
    if (st.is_null()) {
        v.fail("structure", "missing required object");
    } else if (v.object(st, "structure", {"layer_a", "layer_b", "periods", "layers"})) {
        auto layer = [&](const char* key, Material& m, double& t) {
            const std::string p = std::string("structure.") + key;
            const json& l = get(st, key);
            if (l.is_null()) {
                v.fail(p, "missing required object");
                return;
            }
            if (!v.object(l, p, {"material", "thickness_nm"})) return;
            auto name = v.string(get(l, "material"), p + ".material", true);
            auto th = v.number(get(l, "thickness_nm"), p + ".thickness_nm", true);
            if (th) {
                if (*th < 0)
                    v.fail(p + ".thickness_nm", "must be non-negative (got " + std::to_string(*th) + ")");
                t = *th;
            }
            if (name) {
                auto it = materials.find(*name);
                if (it != materials.end())
                    m = it->second;
                else if (!mats.is_object() || !mats.contains(*name))
                    v.fail(p + ".material", "unknown material '" + *name + "'");
            }
        };
        layer("layer_a", cfg.structure.material_a, cfg.structure.thickness_a);
        layer("layer_b", cfg.structure.material_b, cfg.structure.thickness_b);
        auto periods = v.integer(get(st, "periods"), "structure.periods", true);
        if (periods) {
            if (*periods < 1) v.fail("structure.periods", "must be >= 1");
            cfg.structure.periods = static_cast<int>(*periods);
        }
        auto layers = v.integer(get(st, "layers"), "structure.layers", false);
        if (layers) {
            const long long need = 2 * periods.value_or(1);
            if (*layers != need && *layers != need + 1)
                v.fail("structure.layers", "must equal 2*periods or 2*periods+1");
            cfg.structure.layers = static_cast<int>(*layers);
        } else {
            cfg.structure.layers = 2 * cfg.structure.periods;
        }
        if (cfg.structure.thickness_a >= 0 && cfg.structure.thickness_b >= 0 && !(cfg.structure.period() > 0) &&
            get(get(st, "layer_a"), "thickness_nm").is_number() && get(get(st, "layer_b"), "thickness_nm").is_number())
            v.fail("structure", "period thickness_a + thickness_b must be positive");
    }

    const json& pr = get(root, "process");
    if (!pr.is_null() && v.object(pr, "process", {"type", "lambda_signal_nm", "g_branch", "reference_chi2_pm_per_V"})) {
        if (auto t = v.string(get(pr, "type"), "process.type", false)) {
            if (auto p = detail::parse_process(*t))
                cfg.process.type = *p;
            else
                v.fail("process.type", "expected I, II or III");
        }
        if (auto l = v.number(get(pr, "lambda_signal_nm"), "process.lambda_signal_nm", false)) {
            if (!(*l > 0)) v.fail("process.lambda_signal_nm", "must be positive");
            cfg.process.lambda_signal = *l;
        }
        if (auto g = v.integer(get(pr, "g_branch"), "process.g_branch", false)) cfg.process.g_branch = static_cast<int>(*g);
        if (auto r = v.number(get(pr, "reference_chi2_pm_per_V"), "process.reference_chi2_pm_per_V", false)) {
            if (!(*r > 0)) v.fail("process.reference_chi2_pm_per_V", "must be positive");
            cfg.reference_chi2 = *r;
        }
    }

    const json& pu = get(root, "pump");
    if (!pu.is_null() &&
        v.object(pu, "pump", {"lambda_nm", "polarization", "k_par_rad_per_nm", "incidence_deg", "azimuth_deg"})) {
        if (auto l = v.number(get(pu, "lambda_nm"), "pump.lambda_nm", false)) {
            if (!(*l > 0)) v.fail("pump.lambda_nm", "must be positive");
            cfg.process.pump.lambda_nm = *l;
        }
        if (auto p = v.polarization(get(pu, "polarization"), "pump.polarization", false)) cfg.process.pump.pol = *p;
        if (cfg.process.pump.lambda_nm > 0)
            if (auto k = detail::parse_k_par(v, pu, "pump", cfg.process.pump.lambda_nm)) {
                cfg.process.pump.kx = k->first;
                cfg.process.pump.ky = k->second;
            }
    }
    if (cfg.process.pump.lambda_nm > 0 && cfg.process.lambda_signal > 0 &&
        !(cfg.process.lambda_signal > cfg.process.pump.lambda_nm))
        v.fail("process.lambda_signal_nm", "must exceed pump.lambda_nm");

    if (auto w = v.integer(get(root, "fourier_window"), "fourier_window", false)) {
        if (*w < 1)
            v.fail("fourier_window", "must be >= 1");
        else
            cfg.window = FourierWindow::symmetric(static_cast<int>(*w));
    }

    const json& bd = get(root, "band");
    if (!bd.is_null() && v.object(bd, "band", {"axes", "x_min", "x_max", "y_min", "y_max", "resolution", "polarizations"})) {
        if (auto a = v.string(get(bd, "axes"), "band.axes", false)) {
            if (*a == "normalized")
                cfg.band.axes = BandAxes::normalized;
            else if (*a == "wavelength_angle")
                cfg.band.axes = BandAxes::wavelength_angle;
            else
                v.fail("band.axes", "expected normalized or wavelength_angle");
        }
        if (auto x = v.number(get(bd, "x_min"), "band.x_min", false)) cfg.band.x_min = *x;
        if (auto x = v.number(get(bd, "x_max"), "band.x_max", false)) cfg.band.x_max = *x;
        if (auto x = v.number(get(bd, "y_min"), "band.y_min", false)) cfg.band.y_min = *x;
        if (auto x = v.number(get(bd, "y_max"), "band.y_max", false)) cfg.band.y_max = *x;
        if (!(cfg.band.x_min > 0)) v.fail("band.x_min", "must be positive");
        if (!(cfg.band.x_max > cfg.band.x_min)) v.fail("band.x_max", "must exceed band.x_min");
        if (!(cfg.band.y_max >= cfg.band.y_min)) v.fail("band.y_max", "must be >= band.y_min");
        if (auto r = v.integer(get(bd, "resolution"), "band.resolution", false)) {
            if (*r < 2) v.fail("band.resolution", "must be >= 2");
            cfg.band.resolution = static_cast<int>(*r);
        }
        const json& ps = get(bd, "polarizations");
        if (!ps.is_null()) {
            cfg.band.pols.clear();
            if (!ps.is_array() || ps.empty())
                v.fail("band.polarizations", "expected a non-empty list");
            else
                for (std::size_t i = 0; i < ps.size(); ++i)
                    if (auto p = v.polarization(ps[i], "band.polarizations[" + std::to_string(i) + "]", true))
                        cfg.band.pols.push_back(*p);
        }
    }

    const json& md = get(root, "modes");
    if (!md.is_null()) {
        if (!md.is_array()) {
            v.fail("modes", "expected a list of mode queries");
        } else {
            for (std::size_t i = 0; i < md.size(); ++i) {
                const std::string p = "modes[" + std::to_string(i) + "]";
                if (!v.object(md[i], p,
                              {"label", "lambda_nm", "polarization", "k_par_rad_per_nm", "incidence_deg", "azimuth_deg",
                               "direction"}))
                    continue;
                ModeSettings m;
                m.label = v.string(get(md[i], "label"), p + ".label", false).value_or("mode" + std::to_string(i));
                auto l = v.number(get(md[i], "lambda_nm"), p + ".lambda_nm", true);
                auto pol = v.polarization(get(md[i], "polarization"), p + ".polarization", true);
                if (auto d = v.string(get(md[i], "direction"), p + ".direction", false)) {
                    if (*d == "forward")
                        m.direction = Direction::forward;
                    else if (*d == "backward")
                        m.direction = Direction::backward;
                    else
                        v.fail(p + ".direction", "expected forward or backward");
                }
                if (!l || !pol) continue;
                if (!(*l > 0)) {
                    v.fail(p + ".lambda_nm", "must be positive");
                    continue;
                }
                m.query.lambda_nm = *l;
                m.query.pol = *pol;
                if (auto k = detail::parse_k_par(v, md[i], p, *l)) {
                    m.query.kx = k->first;
                    m.query.ky = k->second;
                }
                cfg.modes.push_back(m);
            }
        }
    }

    const json& sf = get(root, "surface");
    if (!sf.is_null() && v.object(sf, "surface", {"lambda_nm", "samples"})) {
        if (auto l = v.number(get(sf, "lambda_nm"), "surface.lambda_nm", false)) {
            if (!(*l > 0)) v.fail("surface.lambda_nm", "must be positive");
            cfg.surface.lambda_nm = *l;
        }
        if (auto n = v.integer(get(sf, "samples"), "surface.samples", false)) {
            if (*n < 2) v.fail("surface.samples", "must be >= 2");
            cfg.surface.samples = static_cast<int>(*n);
        }
    }

    const json& em = get(root, "emission");
    if (!em.is_null() && v.object(em, "emission", {"resolution", "chi2_weighting", "processes"})) {
        if (auto r = v.integer(get(em, "resolution"), "emission.resolution", false)) {
            if (*r < 2) v.fail("emission.resolution", "must be >= 2");
            cfg.emission.resolution = static_cast<int>(*r);
        }
        if (auto b = v.boolean(get(em, "chi2_weighting"), "emission.chi2_weighting")) cfg.emission.chi2_weighting = *b;
        const json& ps = get(em, "processes");
        if (!ps.is_null()) {
            cfg.emission.processes.clear();
            if (!ps.is_array() || ps.empty())
                v.fail("emission.processes", "expected a non-empty list");
            else
                for (std::size_t i = 0; i < ps.size(); ++i) {
                    const std::string p = "emission.processes[" + std::to_string(i) + "]";
                    if (auto s = v.string(ps[i], p, true)) {
                        if (auto t = detail::parse_process(*s))
                            cfg.emission.processes.push_back(*t);
                        else
                            v.fail(p, "expected I, II or III");
                    }
                }
        }
    }

    if (auto o = v.string(get(root, "output_dir"), "output_dir", false)) cfg.output_dir = *o;
    if (auto t = v.integer(get(root, "threads"), "threads", false)) {
        if (*t < 0) v.fail("threads", "must be >= 0");
        cfg.threads = static_cast<unsigned>(std::max(0LL, *t));
    }

    if (!v.errors.empty()) throw ConfigError(v.errors);
    return cfg;
}

inline RunConfig parse_config_text(const std::string& text, const std::filesystem::path& base = ".") {
    nlohmann::json root;
    try {
        root = nlohmann::json::parse(text, nullptr, true, true);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError({std::string("syntax: ") + e.what()});
    }
    return parse_config_json(root, base);
}

inline RunConfig parse_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError({path.string() + ": cannot open config file"});
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str(), path.parent_path().empty() ? std::filesystem::path(".") : path.parent_path());
}

}  // namespace blochpdc
