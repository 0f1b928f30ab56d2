#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

#include "band_diagram.hpp"
#include "bloch_modes.hpp"
#include "parallel.hpp"

namespace blochpdc {

enum class ProcessType { I, II, III };

inline const char* to_string(ProcessType t) {
    switch (t) {
        case ProcessType::I: return "I";
        case ProcessType::II: return "II";
        case ProcessType::III: return "III";
    }
    return "?";
}

// Pump TM by default; the idler wavelength follows from energy conservation.
struct ProcessSpec {
    ModeQuery pump{750.0, 0.0, 0.0, Polarization::TM};
    double lambda_signal = 1500.0;
    ProcessType type = ProcessType::II;
    // n_p - n_chi - n_1 - n_2
    int g_branch = 1;

    double lambda_idler() const { return 1.0 / (1.0 / pump.lambda_nm - 1.0 / lambda_signal); }
    Polarization signal_pol() const { return type == ProcessType::III ? Polarization::TM : Polarization::TE; }
    Polarization idler_pol() const { return type == ProcessType::I ? Polarization::TE : Polarization::TM; }

    void validate() const {
        if (!(pump.lambda_nm > 0) || !(lambda_signal > pump.lambda_nm))
            throw InvalidArgument("signal wavelength must exceed the pump wavelength");
    }
};

struct GIndices {
    int n_chi = 0, n_p = 0, n_1 = 0, n_2 = 0;
    int branch() const { return n_p - n_chi - n_1 - n_2; }
    bool operator==(const GIndices&) const = default;
};

// Fourier coefficient of the indicator function of layer a ([-a, 0]) or b
// ([-period, -a]) within one period.
inline cd layer_indicator_fourier(const BraggStructure& s, bool layer_a, int n) {
    using namespace std::complex_literals;
    const double L = s.period(), a = s.thickness_a, b = s.thickness_b;
    const double pi = std::numbers::pi;
    if (layer_a) return (a / L) * sinc(pi * n * a / L) * std::exp(1i * (pi * n * a / L));
    return (b / L) * sinc(pi * n * b / L) * std::exp(1i * (pi * n * (L + a) / L));
}

inline cd chi2_fourier(const BraggStructure& s, int n) {
    return s.material_a.chi2.magnitude() * layer_indicator_fourier(s, true, n) +
           s.material_b.chi2.magnitude() * layer_indicator_fourier(s, false, n);
}

inline double chi2_reference_magnitude(const BraggStructure& s) {
    return std::max(s.material_a.chi2.magnitude(), s.material_b.chi2.magnitude());
}

struct Triplet {
    BlochMode pump, signal, idler;
    bool propagating() const { return pump.K.propagating() && signal.K.propagating() && idler.K.propagating(); }
};

namespace detail {

// Down-converted photons take the sign of K_p - g 2pi/period.
inline Direction down_converted_direction(cd Kp, int g, double period) {
    const double target = Kp.real() - g * 2 * std::numbers::pi / period;
    return target < 0 ? Direction::backward : Direction::forward;
}

inline cd signed_K(const CellMatrix& c, double period, Direction d) {
    const BlochWavevector w = bloch_wavevector(c, period);
    return d == Direction::backward ? -w.K : w.K;
}

}  // namespace detail

// Signal at transverse k = (kx, ky); idler at pump k_par - k.
inline Triplet make_triplet(const ProcessSpec& spec, const BraggStructure& s, double kx, double ky,
                            Polarization sig_pol, Polarization idl_pol, FourierWindow w = {}) {
    Triplet t;
    const double L = s.period();
    t.pump = make_mode(s, spec.pump, Direction::forward, w);
    const Direction d = detail::down_converted_direction(t.pump.K.K, spec.g_branch, L);
    t.signal = make_mode(s, ModeQuery{spec.lambda_signal, kx, ky, sig_pol}, d, w);
    t.idler = make_mode(s, ModeQuery{spec.lambda_idler(), spec.pump.kx - kx, spec.pump.ky - ky, idl_pol}, d, w);
    return t;
}

inline Triplet make_triplet(const ProcessSpec& spec, const BraggStructure& s, double kx, double ky,
                            FourierWindow w = {}) {
    return make_triplet(spec, s, kx, ky, spec.signal_pol(), spec.idler_pol(), w);
}

struct Mismatch {
    double delta_K = 0;
    double sinc_factor = 1;
};

inline Mismatch longitudinal_mismatch(cd Kp, cd K1, cd K2, int g_branch, double period, double length) {
    Mismatch m;
    m.delta_K = (Kp - K1 - K2).real() - g_branch * 2 * std::numbers::pi / period;
    m.sinc_factor = sinc(m.delta_K * length);
    return m;
}

inline Mismatch longitudinal_mismatch(const Triplet& t, const BraggStructure& s, int g_branch) {
    return longitudinal_mismatch(t.pump.K.K, t.signal.K.K, t.idler.K.K, g_branch, s.period(), s.crystal_length());
}

// Phase mismatch from the Bloch wavevectors alone; empty when a mode does not
// propagate.
inline std::optional<double> mismatch_at(const ProcessSpec& spec, const BraggStructure& s, double kx, double ky,
                                         Polarization sig_pol, Polarization idl_pol) {
    const double L = s.period();
    const BlochWavevector wp = bloch_wavevector(cell_matrix(s, spec.pump), L);
    if (!wp.propagating()) return std::nullopt;
    const Direction d = detail::down_converted_direction(wp.K, spec.g_branch, L);
    const CellMatrix c1 = cell_matrix(s, ModeQuery{spec.lambda_signal, kx, ky, sig_pol});
    const CellMatrix c2 =
        cell_matrix(s, ModeQuery{spec.lambda_idler(), spec.pump.kx - kx, spec.pump.ky - ky, idl_pol});
    const BlochWavevector w1 = bloch_wavevector(c1, L), w2 = bloch_wavevector(c2, L);
    if (!w1.propagating() || !w2.propagating()) return std::nullopt;
    const cd K1 = d == Direction::backward ? -w1.K : w1.K;
    const cd K2 = d == Direction::backward ? -w2.K : w2.K;
    return longitudinal_mismatch(wp.K, K1, K2, spec.g_branch, L, s.crystal_length()).delta_K;
}

struct PhiFourierResult {
    cd value;
    GIndices dominant;
    cd dominant_term;
    std::size_t terms_kept = 0;
    double delta_K = 0;
    double sinc_factor = 1;
    bool converged = true;
};

namespace detail {

struct PhiTerm {
    cd v;
    double mag;
    int np, n1, n2;
};

inline PhiFourierResult phi_fourier_window(const Triplet& t, const BraggStructure& s, int g, const FourierWindow& w) {
    w.validate();
    const int W = w.size();
    std::vector<Vec3c> P(W), E1(W), E2(W);
    for (int i = 0; i < W; ++i) {
        const int n = w.n_min + i;
        P[i] = t.pump.coefficient(n);
        E1[i] = t.signal.coefficient(n);
        E2[i] = t.idler.coefficient(n);
    }
    struct Layer {
        const Chi2Tensor* T;
        bool is_a;
    };
    std::vector<Layer> layers;
    if (!s.material_a.chi2.is_zero()) layers.push_back({&s.material_a.chi2, true});
    if (!s.material_b.chi2.is_zero()) layers.push_back({&s.material_b.chi2, false});

    // n_chi = n_p - n_1 - n_2 - g spans [lo, hi]
    const int lo = w.n_min - 2 * w.n_max - g, hi = w.n_max - 2 * w.n_min - g;
    std::vector<std::vector<cd>> ind(layers.size(), std::vector<cd>(static_cast<std::size_t>(hi - lo + 1)));
    for (std::size_t l = 0; l < layers.size(); ++l)
        for (int n = lo; n <= hi; ++n) ind[l][n - lo] = layer_indicator_fourier(s, layers[l].is_a, n);

    std::vector<PhiTerm> terms;
    terms.reserve(static_cast<std::size_t>(W) * W * W);
    for (int ip = 0; ip < W; ++ip) {
        for (int i1 = 0; i1 < W; ++i1) {
            // partial contraction over i, j leaves a vector in k per layer
            std::vector<Vec3c> v(layers.size(), Vec3c::Zero());
            for (std::size_t l = 0; l < layers.size(); ++l)
                for (int k = 0; k < 3; ++k) {
                    Vec3c ek = Vec3c::Zero();
                    ek[k] = 1.0;
                    v[l][k] = layers[l].T->contract(P[ip], E1[i1], ek);
                }
            for (int i2 = 0; i2 < W; ++i2) {
                const int np = w.n_min + ip, n1 = w.n_min + i1, n2 = w.n_min + i2;
                const int nchi = np - n1 - n2 - g;
                cd term = 0;
                for (std::size_t l = 0; l < layers.size(); ++l)
                    term += ind[l][nchi - lo] * (v[l][0] * E2[i2][0] + v[l][1] * E2[i2][1] + v[l][2] * E2[i2][2]);
                const double m = std::abs(term);
                if (m > 0) terms.push_back({term, m, np, n1, n2});
            }
        }
    }
    std::sort(terms.begin(), terms.end(), [](const PhiTerm& x, const PhiTerm& y) {
        if (x.mag != y.mag) return x.mag > y.mag;
        if (x.np != y.np) return x.np < y.np;
        if (x.n1 != y.n1) return x.n1 < y.n1;
        return x.n2 < y.n2;
    });
    double total = 0;
    for (const auto& x : terms) total += x.mag;
    PhiFourierResult r;
    double acc = 0;
    cd sum = 0;
    for (const auto& x : terms) {
        sum += x.v;
        acc += x.mag;
        ++r.terms_kept;
        if (acc >= (1 - 1e-9) * total) break;
    }
    const Mismatch mm = longitudinal_mismatch(t, s, g);
    r.delta_K = mm.delta_K;
    r.sinc_factor = mm.sinc_factor;
    r.value = sum * mm.sinc_factor;
    if (!terms.empty()) {
        const auto& d = terms.front();
        r.dominant = GIndices{d.np - d.n1 - d.n2 - g, d.np, d.n1, d.n2};
        r.dominant_term = d.v;
    }
    return r;
}

}  // namespace detail

// Fourier-route overlap: sum over G combinations on the targeted branch,
// times the finite-length sinc. Per unit crystal length; epsilon_0 = 1.
inline PhiFourierResult phi_fourier(const Triplet& t, const BraggStructure& s, int g_branch,
                                    const FourierWindow& w = {}, bool check_convergence = true) {
    PhiFourierResult r = detail::phi_fourier_window(t, s, g_branch, w);
    if (check_convergence) {
        const PhiFourierResult r2 = detail::phi_fourier_window(t, s, g_branch, w.doubled());
        const double a = std::abs(r.value), b = std::abs(r2.value);
        const double scale = std::max(a, b);
        r.converged = scale == 0 || std::abs(a - b) <= 1e-6 * scale;
    }
    return r;
}

struct PhiSpatialResult {
    cd value;
    bool converged = true;
};

namespace detail {

inline cd phi_spatial_panels(const Triplet& t, const BraggStructure& s, int panels) {
    using Gauss = boost::math::quadrature::gauss<double, 20>;
    const auto& xs = Gauss::abscissa();
    const auto& ws = Gauss::weights();
    const double L = s.period(), a = s.thickness_a;
    const int N = s.periods;
    auto integrand = [&](const Chi2Tensor& T, double z) {
        return T.contract(field_at(t.pump, z), field_at(t.signal, z), field_at(t.idler, z));
    };
    auto layer = [&](const Chi2Tensor& T, double z0, double z1) {
        cd acc = 0;
        const double h = (z1 - z0) / panels;
        for (int p = 0; p < panels; ++p) {
            const double c = z0 + (p + 0.5) * h, r = 0.5 * h;
            for (std::size_t i = 0; i < xs.size(); ++i) {
                if (xs[i] == 0.0)
                    acc += ws[i] * r * integrand(T, c);
                else
                    acc += ws[i] * r * (integrand(T, c - r * xs[i]) + integrand(T, c + r * xs[i]));
            }
        }
        return acc;
    };
    cd total = 0;
    // cells c = -N+1 .. N cover [-N period, N period]
    for (int c = -N + 1; c <= N; ++c) {
        const double top = c * L;
        if (!s.material_a.chi2.is_zero() && a > 0) total += layer(s.material_a.chi2, top - a, top);
        if (!s.material_b.chi2.is_zero() && s.thickness_b > 0)
            total += layer(s.material_b.chi2, top - L, top - a);
    }
    return total / (2.0 * N * L);
}

}  // namespace detail

// Real-space overlap averaged over the slab |z| <= N period, so a phase
// mismatch enters as sin(dK L)/(dK L) with L = N period.
inline PhiSpatialResult phi_spatial(const Triplet& t, const BraggStructure& s, int panels = 4) {
    if (panels < 1) throw InvalidArgument("quadrature needs at least one panel per layer");
    PhiSpatialResult r;
    r.value = detail::phi_spatial_panels(t, s, panels);
    const cd v2 = detail::phi_spatial_panels(t, s, 2 * panels);
    const double scale = std::max(std::abs(r.value), std::abs(v2));
    r.converged = scale == 0 || std::abs(r.value - v2) <= 1e-7 * scale;
    return r;
}

struct PhaseMatchCandidate {
    Triplet modes;
    GIndices g;
    double delta_K = 0;
    double sinc_factor = 1;
    // chi~(n_chi)/chi_material and the three coefficient magnitudes
    double amplitude_chi = 0, amplitude_pump = 0, amplitude_signal = 0, amplitude_idler = 0;
    double fourier_product = 0;
    // |contraction| of the unit polarization directions, tensor scaled to unit magnitude
    double chi2_factor = 0;
    double chi2_material = 0;
    cd amplitude;
};

// Amplitude factors of one G combination.
inline PhaseMatchCandidate evaluate_combination(Triplet t, const BraggStructure& s, const GIndices& g,
                                                bool chi2_weighting = true) {
    PhaseMatchCandidate c;
    c.g = g;
    const Mismatch mm = longitudinal_mismatch(t, s, g.branch());
    c.delta_K = mm.delta_K;
    c.sinc_factor = mm.sinc_factor;
    c.chi2_material = chi2_reference_magnitude(s);
    const Vec3c P = t.pump.coefficient(g.n_p), E1 = t.signal.coefficient(g.n_1), E2 = t.idler.coefficient(g.n_2);
    const cd chi = chi2_fourier(s, g.n_chi);
    c.amplitude_chi = c.chi2_material > 0 ? std::abs(chi) / c.chi2_material : 0.0;
    c.amplitude_pump = P.norm();
    c.amplitude_signal = E1.norm();
    c.amplitude_idler = E2.norm();
    c.fourier_product = c.amplitude_chi * c.amplitude_pump * c.amplitude_signal * c.amplitude_idler;
    if (c.fourier_product > 0) {
        const Vec3c p = P / P.norm(), e1 = E1 / E1.norm(), e2 = E2 / E2.norm();
        cd contraction = 0;
        if (!s.material_a.chi2.is_zero())
            contraction += layer_indicator_fourier(s, true, g.n_chi) * s.material_a.chi2.contract(p, e1, e2);
        if (!s.material_b.chi2.is_zero())
            contraction += layer_indicator_fourier(s, false, g.n_chi) * s.material_b.chi2.contract(p, e1, e2);
        c.chi2_factor = std::abs(contraction) / std::abs(chi);
    }
    const double w = chi2_weighting ? c.chi2_factor : 1.0;
    c.amplitude = c.sinc_factor * c.fourier_product * w;
    c.modes = std::move(t);
    return c;
}

// Candidate whose G combination is the dominant term of the Fourier-route sum.
inline PhaseMatchCandidate make_candidate(Triplet t, const BraggStructure& s, int g_branch,
                                          const FourierWindow& w = {}) {
    const PhiFourierResult phi = phi_fourier(t, s, g_branch, w, false);
    return evaluate_combination(std::move(t), s, phi.dominant);
}

inline double efficiency_ratio(const PhaseMatchCandidate& c, double reference_chi2) {
    if (!(reference_chi2 > 0)) throw InvalidArgument("reference chi2 must be positive");
    const double v = c.chi2_factor * c.fourier_product * c.chi2_material / reference_chi2;
    return v * v;
}

// ---- rings ------------------------------------------------------------------

struct RingOptions {
    int scan_samples = 400;
};

// Ring centre: the signal's share of the pump's transverse momentum.
inline std::pair<double, double> ring_center(const ProcessSpec& spec) {
    const double f = spec.pump.lambda_nm / spec.lambda_signal;
    return {f * spec.pump.kx, f * spec.pump.ky};
}

inline double light_line(double lambda_nm) { return 2 * std::numbers::pi / lambda_nm; }

// Radii r along the ray centre + r (cos phi, sin phi) where the mismatch
// vanishes, inside the signal's free-space light circle.
inline std::vector<double> ring_radii(const ProcessSpec& spec, const BraggStructure& s, double phi,
                                      Polarization sig_pol, Polarization idl_pol, const RingOptions& o = {}) {
    const auto [cx, cy] = ring_center(spec);
    const double R = light_line(spec.lambda_signal);
    const double ux = std::cos(phi), uy = std::sin(phi);
    // exit point of the ray from the light circle
    const double bdot = cx * ux + cy * uy, cc = cx * cx + cy * cy - R * R;
    const double disc = bdot * bdot - cc;
    if (disc <= 0) return {};
    const double rmax = -bdot + std::sqrt(disc);
    if (rmax <= 0) return {};
    auto f = [&](double r) { return mismatch_at(spec, s, cx + r * ux, cy + r * uy, sig_pol, idl_pol); };
    std::vector<double> roots;
    const int n = o.scan_samples;
    double r0 = 0;
    std::optional<double> f0 = f(r0);
    for (int i = 1; i <= n; ++i) {
        // stay strictly inside the light circle
        const double r1 = rmax * i / n * (1 - 1e-9);
        const std::optional<double> f1 = f(r1);
        if (f0 && f1 && (*f0 <= 0) != (*f1 <= 0)) {
            double lo = r0, hi = r1, flo = *f0;
            double root = 0.5 * (lo + hi);
            for (int it = 0; it < 200; ++it) {
                const double mid = 0.5 * (lo + hi);
                const std::optional<double> fm = f(mid);
                if (!fm) break;
                root = mid;
                if (std::abs(*fm) < 1e-13 || mid == lo || mid == hi) break;
                if ((*fm <= 0) == (flo <= 0)) {
                    lo = mid;
                    flo = *fm;
                } else {
                    hi = mid;
                }
            }
            roots.push_back(root);
        }
        r0 = r1;
        f0 = f1;
    }
    return roots;
}

inline double solve_ring(const ProcessSpec& spec, const BraggStructure& s, double phi = 0.0,
                         const RingOptions& o = {}) {
    const auto r = ring_radii(spec, s, phi, spec.signal_pol(), spec.idler_pol(), o);
    if (r.empty()) throw NoSolution("mismatch has no zero inside the light circle");
    return r.front();
}

struct IntersectionPoint {
    double kx = 0, ky = 0;
    // partner photon direction (pump k_par minus this one)
    double partner_kx = 0, partner_ky = 0;
    double azimuth = 0;
};

struct IntersectionResult {
    bool rings_coincide = false;
    std::vector<IntersectionPoint> points;
    static constexpr const char* state = "(|H>|V> + e^{i*Upsilon}|V>|H>)/sqrt(2)";
};

// Points where the TE-signal ring (TM partner) meets the TM-signal ring (TE
// partner); there a photon in either polarization has a partner of the other.
inline IntersectionResult find_intersections(const ProcessSpec& spec, const BraggStructure& s, int samples = 720,
                                             const RingOptions& o = {}) {
    if (spec.type != ProcessType::II) throw InvalidArgument("intersections are defined for Type II");
    const auto [cx, cy] = ring_center(spec);
    const auto te = Polarization::TE, tm = Polarization::TM;
    auto point = [&](double phi) -> std::optional<std::pair<double, double>> {
        const auto r = ring_radii(spec, s, phi, te, tm, o);
        if (r.empty()) return std::nullopt;
        return std::make_pair(cx + r.front() * std::cos(phi), cy + r.front() * std::sin(phi));
    };
    auto gfun = [&](double phi) -> std::optional<double> {
        const auto p = point(phi);
        if (!p) return std::nullopt;
        return mismatch_at(spec, s, p->first, p->second, tm, te);
    };
    IntersectionResult res;
    const double two_pi = 2 * std::numbers::pi;
    std::vector<std::optional<double>> gs(static_cast<std::size_t>(samples));
    double gmax = 0;
    bool any = false;
    for (int i = 0; i < samples; ++i) {
        gs[i] = gfun(two_pi * i / samples);
        if (gs[i]) {
            any = true;
            gmax = std::max(gmax, std::abs(*gs[i]));
        }
    }
    if (!any) throw NoIntersection("Type II ring not found");
    if (gmax < 1e-10) {
        res.rings_coincide = true;
        return res;
    }
    for (int i = 0; i < samples; ++i) {
        const auto& g0 = gs[i];
        const auto& g1 = gs[(i + 1) % samples];
        if (!g0 || !g1) continue;
        if (*g0 == 0 || (*g0 < 0) != (*g1 < 0)) {
            double lo = two_pi * i / samples, hi = two_pi * (i + 1) / samples, glo = *g0;
            if (*g0 != 0) {
                for (int it = 0; it < 100; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    const auto gm = gfun(mid);
                    if (!gm) break;
                    if (std::abs(*gm) < 1e-13 || mid == lo || mid == hi) {
                        lo = hi = mid;
                        break;
                    }
                    if ((*gm < 0) == (glo < 0)) {
                        lo = mid;
                        glo = *gm;
                    } else {
                        hi = mid;
                    }
                }
            }
            const double phi = 0.5 * (lo + hi);
            const auto p = point(phi);
            if (!p) continue;
            IntersectionPoint ip;
            ip.kx = p->first;
            ip.ky = p->second;
            ip.partner_kx = spec.pump.kx - ip.kx;
            ip.partner_ky = spec.pump.ky - ip.ky;
            ip.azimuth = phi;
            res.points.push_back(ip);
        }
    }
    if (res.points.empty()) throw NoIntersection("TE and TM rings do not intersect");
    return res;
}

// ---- emission maps ------------------------------------------------------------

struct EmissionOptions {
    int resolution = 200;
    bool chi2_weighting = true;
    FourierWindow window{};
    unsigned threads = 1;
};

struct EmissionMap {
    ProcessType type = ProcessType::I;
    std::vector<double> kx, ky;
    std::vector<double> intensity;  // ky-major: index j * nx + i
    double light_line_radius = 0;
    double peak = 0;

    double at(std::size_t i, std::size_t j) const { return intensity[j * kx.size() + i]; }
};

namespace detail {

// Per-mode dominant coefficients; n_chi fixed by the branch.
inline double cell_amplitude(const Triplet& t, const BraggStructure& s, int g, bool chi2_weighting) {
    if (!t.propagating()) return 0.0;
    const int np = t.pump.dominant_index(), n1 = t.signal.dominant_index(), n2 = t.idler.dominant_index();
    const GIndices gi{np - n1 - n2 - g, np, n1, n2};
    const PhaseMatchCandidate c = evaluate_combination(t, s, gi, chi2_weighting);
    return std::abs(c.amplitude);
}

}  // namespace detail

inline EmissionMap emission_map(const ProcessSpec& spec, const BraggStructure& s, const EmissionOptions& o = {}) {
    spec.validate();
    if (o.resolution < 1) throw InvalidArgument("emission grid resolution must be positive");
    EmissionMap m;
    m.type = spec.type;
    const int n = o.resolution;
    const double R = light_line(spec.lambda_signal);
    m.light_line_radius = R;
    m.kx.resize(n);
    for (int i = 0; i < n; ++i) m.kx[i] = R * static_cast<double>(2 * i + 1 - n) / n;
    m.ky = m.kx;
    m.intensity.assign(static_cast<std::size_t>(n) * n, 0.0);
    const BlochMode pump = make_mode(s, spec.pump, Direction::forward, o.window);
    if (!pump.K.propagating()) return m;
    const Direction d = detail::down_converted_direction(pump.K.K, spec.g_branch, s.period());
    parallel_for(m.intensity.size(), o.threads, [&](std::size_t idx) {
        const double kx = m.kx[idx % n], ky = m.ky[idx / n];
        if (kx * kx + ky * ky >= R * R) return;
        Triplet t;
        t.pump = pump;
        t.signal = make_mode(s, ModeQuery{spec.lambda_signal, kx, ky, spec.signal_pol()}, d, o.window);
        t.idler = make_mode(
            s, ModeQuery{spec.lambda_idler(), spec.pump.kx - kx, spec.pump.ky - ky, spec.idler_pol()}, d, o.window);
        const double a = detail::cell_amplitude(t, s, spec.g_branch, o.chi2_weighting);
        m.intensity[idx] = a * a;
    });
    for (double v : m.intensity) m.peak = std::max(m.peak, v);
    return m;
}

// |amplitude|^2 along the ray centre + r (cos phi, sin phi).
inline double ring_intensity(const ProcessSpec& spec, const BraggStructure& s, double phi, double r,
                             const EmissionOptions& o = {}) {
    const auto [cx, cy] = ring_center(spec);
    const Triplet t = make_triplet(spec, s, cx + r * std::cos(phi), cy + r * std::sin(phi), o.window);
    const double a = detail::cell_amplitude(t, s, spec.g_branch, o.chi2_weighting);
    return a * a;
}

// Full width at half maximum of the ring's radial profile at azimuth phi.
inline double ring_fwhm(const ProcessSpec& spec, const BraggStructure& s, double phi = 0.0,
                        const EmissionOptions& o = {}) {
    const double r0 = solve_ring(spec, s, phi);
    const double peak = ring_intensity(spec, s, phi, r0, o);
    if (!(peak > 0)) throw NoSolution("ring has zero amplitude");
    auto half = [&](double dir) {
        // step outward until below half maximum, then bisect
        double step = 1e-6 * light_line(spec.lambda_signal);
        double inner = r0, outer = r0 + dir * step;
        for (int i = 0; i < 200 && ring_intensity(spec, s, phi, outer, o) > 0.5 * peak; ++i) {
            inner = outer;
            step *= 1.5;
            outer = r0 + dir * step;
        }
        for (int it = 0; it < 80; ++it) {
            const double mid = 0.5 * (inner + outer);
            if (ring_intensity(spec, s, phi, mid, o) > 0.5 * peak)
                inner = mid;
            else
                outer = mid;
        }
        return 0.5 * (inner + outer);
    };
    return half(1.0) - half(-1.0);
}

}  // namespace blochpdc
