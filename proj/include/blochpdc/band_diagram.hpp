#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <vector>

#include "bloch_modes.hpp"
#include "parallel.hpp"

namespace blochpdc {

struct ScanCell {
    double lambda_nm = 0;
    double k_par = 0;
    Classification classification = Classification::absorbing;
    cd K;
};

inline ScanCell classify(const BraggStructure& s, const ModeQuery& q) {
    ScanCell cell{q.lambda_nm, q.k_par(), Classification::absorbing, cd(0)};
    try {
        const BlochWavevector w = bloch_wavevector(cell_matrix(s, q), s.period());
        cell.classification = w.classification;
        cell.K = w.K;
    } catch (const AbsorbingRegion&) {
    }
    return cell;
}

enum class BandAxes {
    // free-space lambda (nm) and propagation angle (deg) in the low-index layer
    wavelength_angle,
    // omega*period/(pi c) and k_par*period/pi
    normalized,
};

struct BandScanSpec {
    BandAxes axes = BandAxes::normalized;
    double x_min = 0, x_max = 1;
    double y_min = 0, y_max = 1;
    int nx = 512, ny = 512;
    Polarization pol = Polarization::TE;
};

struct BandGrid {
    BandScanSpec spec;
    std::vector<double> x, y;
    std::vector<ScanCell> cells;  // x-major

    const ScanCell& at(int i, int j) const { return cells[static_cast<std::size_t>(i) * y.size() + j]; }
    std::size_t count(Classification c) const {
        std::size_t n = 0;
        for (const auto& cell : cells) n += cell.classification == c;
        return n;
    }
};

namespace detail {

inline std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> v(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) v[i] = n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
    return v;
}

inline double low_index(const BraggStructure& s, double lambda) {
    return std::min(refractive_index(s.material_a, lambda), refractive_index(s.material_b, lambda));
}

}  // namespace detail

inline BandGrid band_scan(const BraggStructure& s, const BandScanSpec& spec, unsigned threads = 1) {
    if (spec.nx < 1 || spec.ny < 1) throw InvalidArgument("band scan resolution must be positive");
    if (!(spec.x_max >= spec.x_min) || !(spec.y_max >= spec.y_min))
        throw InvalidArgument("band scan ranges must be ordered");
    if (spec.axes == BandAxes::normalized && !(spec.x_min > 0))
        throw InvalidArgument("normalized frequency axis must be positive");
    if (spec.axes == BandAxes::wavelength_angle && !(spec.x_min > 0))
        throw InvalidArgument("wavelength axis must be positive");
    BandGrid g;
    g.spec = spec;
    g.x = detail::linspace(spec.x_min, spec.x_max, spec.nx);
    g.y = detail::linspace(spec.y_min, spec.y_max, spec.ny);
    g.cells.resize(static_cast<std::size_t>(spec.nx) * spec.ny);
    const double L = s.period();
    parallel_for(g.cells.size(), threads, [&](std::size_t idx) {
        const double xv = g.x[idx / g.y.size()], yv = g.y[idx % g.y.size()];
        ModeQuery q;
        q.pol = spec.pol;
        if (spec.axes == BandAxes::normalized) {
            q.lambda_nm = 2 * L / xv;
            q.ky = yv * std::numbers::pi / L;
            g.cells[idx] = classify(s, q);
        } else {
            q.lambda_nm = xv;
            try {
                const double nlow = detail::low_index(s, xv);
                q.ky = q.k0() * nlow * std::sin(yv * std::numbers::pi / 180.0);
                g.cells[idx] = classify(s, q);
            } catch (const AbsorbingRegion&) {
                g.cells[idx] = ScanCell{xv, 0.0, Classification::absorbing, cd(0)};
            }
        }
    });
    return g;
}

// Wavelengths in (lo, hi) where |(A+D)/2| crosses 1 at fixed k_par, bisected
// down to adjacent doubles. The gap-side endpoint is returned, so the mode there
// is the clamped K = 0 or pi/period standing wave.
inline std::vector<double> band_edges(const BraggStructure& s, double k_par, Polarization pol, double lambda_lo,
                                      double lambda_hi, int samples = 512) {
    auto f = [&](double lambda) {
        ModeQuery q{lambda, 0.0, k_par, pol};
        return std::abs(cell_matrix(s, q).half_trace) - 1.0;
    };
    std::vector<double> edges;
    double x0 = lambda_lo, f0 = f(x0);
    for (int i = 1; i <= samples; ++i) {
        const double x1 = lambda_lo + (lambda_hi - lambda_lo) * i / samples;
        const double f1 = f(x1);
        if ((f0 < 0) != (f1 < 0)) {
            // invariant: f(in) < 0 <= f(gap)
            double in = f0 < 0 ? x0 : x1, gap = f0 < 0 ? x1 : x0;
            for (int it = 0; it < 200; ++it) {
                const double mid = 0.5 * (in + gap);
                if (mid == in || mid == gap) break;
                (f(mid) < 0 ? in : gap) = mid;
            }
            edges.push_back(gap);
        }
        x0 = x1;
        f0 = f1;
    }
    return edges;
}

struct EffectiveIndices {
    double n_o = 1;
    double n_e = 1;
};

inline EffectiveIndices effective_indices(const BraggStructure& s, double lambda_ref) {
    const double na = refractive_index(s.material_a, lambda_ref);
    const double nb = refractive_index(s.material_b, lambda_ref);
    const double fa = s.thickness_a / s.period(), fb = s.thickness_b / s.period();
    EffectiveIndices e;
    e.n_o = std::sqrt(fa * na * na + fb * nb * nb);
    e.n_e = 1.0 / std::sqrt(fa / (na * na) + fb / (nb * nb));
    return e;
}

struct DispersionSurface {
    double lambda_nm = 0;
    Polarization pol = Polarization::TE;
    std::vector<double> k_par;
    std::vector<double> Kz;

    double magnitude(std::size_t i) const { return std::hypot(k_par[i], Kz[i]); }
    // angle from the stacking axis
    double polar_angle(std::size_t i) const { return std::atan2(k_par[i], Kz[i]); }
};

// Samples K_z(k_par) on [0, k0*max(n)) keeping the propagating points.
inline DispersionSurface dispersion_surface(const BraggStructure& s, double lambda, Polarization pol,
                                            int samples = 256) {
    if (samples < 2) throw InvalidArgument("dispersion surface needs at least 2 samples");
    const double nmax =
        std::max(refractive_index(s.material_a, lambda), refractive_index(s.material_b, lambda));
    const double kmax = 2 * std::numbers::pi * nmax / lambda;
    DispersionSurface d;
    d.lambda_nm = lambda;
    d.pol = pol;
    for (int i = 0; i < samples; ++i) {
        const double kp = kmax * i / samples;
        const BlochWavevector w = bloch_wavevector(cell_matrix(s, ModeQuery{lambda, 0.0, kp, pol}), s.period());
        if (!w.propagating()) continue;
        d.k_par.push_back(kp);
        d.Kz.push_back(w.K.real());
    }
    if (d.k_par.empty()) throw EmptySurface("no propagating Bloch waves at this wavelength");
    return d;
}

// |K period - (ka a + kb b)| reduced mod 2 pi (either sign of the phase), at
// normal incidence, for the structure's indices rescaled to optical fill
// fraction f = na a / l and lambda = x l, with l = na a + nb b kept fixed.
inline double geometric_dispersion_deviation(const BraggStructure& s, double f, double x,
                                             Polarization pol = Polarization::TE) {
    if (!(f > 0 && f < 1) || !(x > 0)) throw InvalidArgument("need 0 < f < 1 and x > 0");
    // indices at lambda = x l; a couple of fixed-point passes for tabulated media
    double lambda = 1000.0;
    double na = 1, nb = 1, l = 0;
    for (int it = 0; it < 4; ++it) {
        na = refractive_index(s.material_a, lambda);
        nb = refractive_index(s.material_b, lambda);
        l = na * s.thickness_a + nb * s.thickness_b;
        lambda = x * l;
    }
    const double a = f * l / na, b = (1 - f) * l / nb;
    const CellMatrix c = cell_matrix_from_indices(na, nb, a, b, ModeQuery{lambda, 0.0, 0.0, pol});
    const BlochWavevector w = bloch_wavevector(c, a + b);
    if (!w.propagating()) return std::numeric_limits<double>::infinity();
    const double KL = w.K.real() * (a + b);
    const double phase = (c.ka * a + c.kb * b).real();
    const double two_pi = 2 * std::numbers::pi;
    auto dist = [&](double u) {
        double r = std::remainder(u, two_pi);
        return std::abs(r);
    };
    return std::min(dist(KL - phase), dist(KL + phase));
}

inline bool trivial_dispersion_check(const BraggStructure& s, double f, double x) {
    return geometric_dispersion_deviation(s, f, x) < 1e-10;
}

}  // namespace blochpdc
