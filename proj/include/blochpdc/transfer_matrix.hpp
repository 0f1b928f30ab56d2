#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include <Eigen/Dense>

#include "structure.hpp"

namespace blochpdc {

enum class Polarization { TE, TM };

inline const char* to_string(Polarization p) { return p == Polarization::TE ? "TE" : "TM"; }

// Free-space wavelength plus transverse wavevector (rad/nm).
struct ModeQuery {
    double lambda_nm = 0;
    double kx = 0;
    double ky = 0;
    Polarization pol = Polarization::TE;

    double k_par() const { return std::hypot(kx, ky); }
    double k0() const { return 2 * std::numbers::pi / lambda_nm; }
};

inline cd kz_layer(double n, double lambda_nm, double k_par) {
    double k = 2 * std::numbers::pi * n / lambda_nm;
    double v = (k - k_par) * (k + k_par);
    if (v >= 0) return {std::sqrt(v), 0.0};
    return {0.0, std::sqrt(-v)};
}

// sin(z)/z, regular at 0
inline cd sinc(cd z) {
    if (std::abs(z) < 1e-4) {
        cd z2 = z * z;
        return 1.0 - z2 / 6.0 + z2 * z2 / 120.0;
    }
    return std::sin(z) / z;
}

inline double sinc(double x) {
    if (std::abs(x) < 1e-4) {
        double x2 = x * x;
        return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
    }
    return std::sin(x) / x;
}

enum class Classification { propagating, gap, total_internal_reflection, absorbing };

inline const char* to_string(Classification c) {
    switch (c) {
        case Classification::propagating: return "propagating";
        case Classification::gap: return "gap";
        case Classification::total_internal_reflection: return "tir";
        case Classification::absorbing: return "absorbing";
    }
    return "?";
}

struct CellMatrix {
    cd A, B, C, D;
    ModeQuery query;
    double n_a = 1, n_b = 1;
    double thickness_a = 0, thickness_b = 0;
    cd ka, kb;
    // (A+D)/2 from the closed form that stays finite on the light lines
    double half_trace = 0;

    Eigen::Matrix2cd matrix() const {
        Eigen::Matrix2cd m;
        m << A, B, C, D;
        return m;
    }
    cd det() const { return A * D - B * C; }
};

inline CellMatrix cell_matrix_from_indices(double na, double nb, double a, double b, const ModeQuery& q) {
    using namespace std::complex_literals;
    CellMatrix c;
    c.query = q;
    c.n_a = na;
    c.n_b = nb;
    c.thickness_a = a;
    c.thickness_b = b;
    const double kp = q.k_par();
    const cd ka = kz_layer(na, q.lambda_nm, kp);
    const cd kb = kz_layer(nb, q.lambda_nm, kp);
    c.ka = ka;
    c.kb = kb;

    const cd Sa = std::sin(ka * a), Sb = std::sin(kb * b);
    const cd sa = sinc(ka * a), sb = sinc(kb * b);
    // ratio between the layers' boundary conditions: 1 for TE, nb^2/na^2 for TM
    const double rho = q.pol == Polarization::TE ? 1.0 : (nb * nb) / (na * na);

    // s*sin(kb b) and d*sin(kb b) written with sinc so that kb -> 0 is regular
    const cd t1 = rho * ka * b * sb;
    const cd t2 = kb / (rho * ka) * Sb;
    const cd sS = t1 + t2;
    const cd dS = q.pol == Polarization::TE ? t2 - t1 : t1 - t2;

    const cd ea = std::exp(1i * ka * a), eam = std::exp(-1i * ka * a);
    const cd cb = std::cos(kb * b);
    c.A = ea * (cb + 0.5i * sS);
    c.B = eam * (0.5i * dS);
    c.C = ea * (-0.5i * dS);
    c.D = eam * (cb - 0.5i * sS);

    const cd x = std::cos(ka * a + kb * b) + Sa * Sb -
                 0.5 * (kb * a * sa * Sb / rho + rho * ka * b * sb * Sa);
    c.half_trace = x.real();
    return c;
}

inline CellMatrix cell_matrix(const BraggStructure& s, const ModeQuery& q) {
    const double na = refractive_index(s.material_a, q.lambda_nm);
    const double nb = refractive_index(s.material_b, q.lambda_nm);
    return cell_matrix_from_indices(na, nb, s.thickness_a, s.thickness_b, q);
}

struct BlochWavevector {
    cd K;
    Classification classification = Classification::propagating;

    bool propagating() const { return classification == Classification::propagating; }
    // counter-propagating partner (K -> -K)
    BlochWavevector reversed() const { return {-K, classification}; }
};

inline BlochWavevector bloch_wavevector(const CellMatrix& c, double period) {
    using namespace std::complex_literals;
    const double x = c.half_trace;
    BlochWavevector w;
    // a few ulps of slack so exact band edges and the empty lattice stay propagating
    if (std::abs(x) <= 1.0 + 1e-14) {
        w.K = std::acos(std::clamp(x, -1.0, 1.0)) / period;
        w.classification = Classification::propagating;
        return w;
    }
    if (x > 1.0)
        w.K = 1i * std::acosh(x) / period;
    else
        w.K = (std::numbers::pi + 1i * std::acosh(-x)) / period;
    const bool layer_evanescent = c.ka.imag() > 0 || c.kb.imag() > 0;
    w.classification = layer_evanescent ? Classification::total_internal_reflection : Classification::gap;
    return w;
}

struct LayerAmplitudes {
    cd a_plus, a_minus, b_plus, b_minus;

    LayerAmplitudes scaled(cd f) const { return {a_plus * f, a_minus * f, b_plus * f, b_minus * f}; }
};

// Maps (a0+, a0-) to (b0+, b0-) across the a/b interface at z = -a.
inline Eigen::Matrix2cd amplitude_map(const CellMatrix& c) {
    using namespace std::complex_literals;
    const cd ka = c.ka, kb = c.kb;
    const double na = c.n_a, nb = c.n_b, a = c.thickness_a;
    cd p, q;
    if (c.query.pol == Polarization::TE) {
        const cd f = 1.0 / (2.0 * kb);
        p = (ka + kb) * f;
        q = (kb - ka) * f;
    } else {
        const cd f = 1.0 / (2.0 * na * nb * kb);
        p = (nb * nb * ka + na * na * kb) * f;
        q = (nb * nb * ka - na * na * kb) * f;
    }
    Eigen::Matrix2cd M;
    M << p * std::exp(1i * a * (ka - kb)), q * std::exp(-1i * a * (ka + kb)),
        q * std::exp(1i * a * (ka + kb)), p * std::exp(-1i * a * (ka - kb));
    return M;
}

inline LayerAmplitudes layer_amplitudes(const CellMatrix& c, const BlochWavevector& K, double period) {
    using namespace std::complex_literals;
    const cd lam = std::exp(1i * K.K * period);
    Eigen::Vector2cd v1(c.B, lam - c.A);
    Eigen::Vector2cd v2(lam - c.D, c.C);
    Eigen::Vector2cd v = v1.norm() >= v2.norm() ? v1 : v2;
    const double scale = std::abs(c.A) + std::abs(c.B) + std::abs(c.C) + std::abs(c.D);
    if (v.norm() <= 1e-12 * scale) v = Eigen::Vector2cd(1.0, 0.0);
    v /= v.norm();
    const Eigen::Vector2cd b = amplitude_map(c) * v;
    return {v[0], v[1], b[0], b[1]};
}

inline LayerAmplitudes layer_amplitudes(const CellMatrix& c, const BlochWavevector& K, const ModeQuery&,
                                        const BraggStructure& s) {
    return layer_amplitudes(c, K, s.period());
}

}  // namespace blochpdc
