#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "transfer_matrix.hpp"

namespace blochpdc {

// Retained reciprocal-vector indices n, G = 2 pi n / period.
struct FourierWindow {
    int n_min = -32;
    int n_max = 32;

    static FourierWindow symmetric(int w) { return {-w, w}; }
    int size() const { return n_max - n_min + 1; }
    bool contains(int n) const { return n >= n_min && n <= n_max; }
    FourierWindow doubled() const { return {2 * n_min, 2 * n_max}; }
    void validate() const {
        if (!(n_min <= 0 && 0 <= n_max)) throw InvalidArgument("Fourier window must contain n = 0");
    }
};

enum class Direction { forward, backward };

// Unit polarization vectors of the four plane waves of a cell, lab frame.
struct PolarizationVectors {
    Vec3c a_plus, a_minus, b_plus, b_minus;
};

namespace detail {

// about z, taking y onto the k_par direction
inline Vec3c rotate_z(const Vec3c& v, double c, double s) {
    return Vec3c(c * v[0] - s * v[1], s * v[0] + c * v[1], v[2]);
}

inline PolarizationVectors polarization_vectors(const CellMatrix& c) {
    const ModeQuery& q = c.query;
    const double kp = q.k_par();
    double ca = 1, sa = 0;
    if (kp > 0) {
        ca = q.ky / kp;
        sa = -q.kx / kp;
    }
    auto tm = [&](double n, cd kz, double sign) {
        const double nk = n * q.k0();
        return Vec3c(0.0, kz / nk, -sign * kp / nk);
    };
    PolarizationVectors p;
    if (q.pol == Polarization::TE) {
        const Vec3c x(1.0, 0.0, 0.0);
        p.a_plus = p.a_minus = p.b_plus = p.b_minus = rotate_z(x, ca, sa);
    } else {
        p.a_plus = rotate_z(tm(c.n_a, c.ka, 1.0), ca, sa);
        p.a_minus = rotate_z(tm(c.n_a, c.ka, -1.0), ca, sa);
        p.b_plus = rotate_z(tm(c.n_b, c.kb, 1.0), ca, sa);
        p.b_minus = rotate_z(tm(c.n_b, c.kb, -1.0), ca, sa);
    }
    return p;
}

}  // namespace detail

class BlochMode {
public:
    CellMatrix cell;
    BlochWavevector K;
    LayerAmplitudes amplitudes;
    PolarizationVectors pvec;
    double period = 0;
    FourierWindow window;
    std::vector<Vec3c> fourier;  // indexed by n - window.n_min
    bool converged = true;

    const ModeQuery& query() const { return cell.query; }
    double thickness_a() const { return cell.thickness_a; }
    double thickness_b() const { return cell.thickness_b; }

    // closed-form coefficient for any n
    Vec3c coefficient(int n) const {
        using namespace std::complex_literals;
        const double a = cell.thickness_a, b = cell.thickness_b, L = period;
        const double G = 2 * std::numbers::pi * n / L;
        const cd Kz = K.K;
        const cd q1 = Kz - cell.ka - G, q2 = Kz + cell.ka - G;
        const cd q3 = Kz - cell.kb - G, q4 = Kz + cell.kb - G;
        const auto& A = amplitudes;
        Vec3c r = (a / L) * A.a_plus * sinc(q1 * a / 2.0) * std::exp(-1i * q1 * a / 2.0) * pvec.a_plus;
        r += (a / L) * A.a_minus * sinc(q2 * a / 2.0) * std::exp(-1i * q2 * a / 2.0) * pvec.a_minus;
        r += (b / L) * A.b_plus * sinc(q3 * b / 2.0) * std::exp(-1i * q3 * (a + b / 2.0)) * pvec.b_plus;
        r += (b / L) * A.b_minus * sinc(q4 * b / 2.0) * std::exp(-1i * q4 * (a + b / 2.0)) * pvec.b_minus;
        return r;
    }

    // stored coefficient when inside the window
    const Vec3c& operator[](int n) const { return fourier[static_cast<std::size_t>(n - window.n_min)]; }

    double coefficient_norm2() const {
        double s = 0;
        for (const auto& v : fourier) s += v.squaredNorm();
        return s;
    }

    // index of the largest retained coefficient
    int dominant_index() const {
        int best = window.n_min;
        double m = -1;
        for (int n = window.n_min; n <= window.n_max; ++n) {
            double v = (*this)[n].squaredNorm();
            if (v > m) {
                m = v;
                best = n;
            }
        }
        return best;
    }
};

struct FourierSeries {
    FourierWindow window;
    std::vector<Vec3c> c;
    // retained norm^2 over the norm^2 with the window doubled
    double retained_fraction = 1;
    bool converged = true;
};

inline FourierSeries fourier_coefficients(const BlochMode& m, const FourierWindow& w) {
    w.validate();
    FourierSeries out;
    out.window = w;
    out.c.reserve(static_cast<std::size_t>(w.size()));
    double inner = 0;
    for (int n = w.n_min; n <= w.n_max; ++n) {
        out.c.push_back(m.coefficient(n));
        inner += out.c.back().squaredNorm();
    }
    const FourierWindow d = w.doubled();
    double outer = inner;
    for (int n = d.n_min; n <= d.n_max; ++n)
        if (!w.contains(n)) outer += m.coefficient(n).squaredNorm();
    out.retained_fraction = outer > 0 ? inner / outer : 1.0;
    out.converged = out.retained_fraction >= 0.999;
    return out;
}

inline void refresh_fourier(BlochMode& m) {
    FourierSeries f = fourier_coefficients(m, m.window);
    m.fourier = std::move(f.c);
    m.converged = f.converged;
}

// Unit Euclidean norm of the retained coefficient vector.
inline BlochMode normalize(BlochMode m) {
    const double s = m.coefficient_norm2();
    if (!(s > 0) || !std::isfinite(s)) throw DegenerateMode("mode has zero or non-finite field");
    m.amplitudes = m.amplitudes.scaled(1.0 / std::sqrt(s));
    refresh_fourier(m);
    return m;
}

inline BlochMode scaled(BlochMode m, cd f) {
    m.amplitudes = m.amplitudes.scaled(f);
    refresh_fourier(m);
    return m;
}

inline BlochMode make_mode(const CellMatrix& c, double period, Direction dir = Direction::forward,
                           FourierWindow w = {}, bool unit_norm = true) {
    BlochMode m;
    m.cell = c;
    m.period = period;
    m.window = w;
    m.K = bloch_wavevector(c, period);
    if (dir == Direction::backward) m.K = m.K.reversed();
    m.amplitudes = layer_amplitudes(c, m.K, period);
    m.pvec = detail::polarization_vectors(c);
    refresh_fourier(m);
    return unit_norm ? normalize(std::move(m)) : m;
}

inline BlochMode make_mode(const BraggStructure& s, const ModeQuery& q, Direction dir = Direction::forward,
                           FourierWindow w = {}, bool unit_norm = true) {
    return make_mode(cell_matrix(s, q), s.period(), dir, w, unit_norm);
}

// E(z) in the lab frame; E(z + period) = exp(-i K period) E(z).
inline Vec3c field_at(const BlochMode& m, double z) {
    using namespace std::complex_literals;
    const double L = m.period, a = m.cell.thickness_a;
    double n = std::ceil(z / L);
    double zr = z - n * L;
    if (zr > 0) {
        n += 1;
        zr -= L;
    } else if (zr <= -L) {
        n -= 1;
        zr += L;
    }
    const cd phase = std::exp(-1i * n * m.K.K * L);
    const auto& A = m.amplitudes;
    if (zr >= -a) {
        return phase * (A.a_plus * std::exp(-1i * m.cell.ka * zr) * m.pvec.a_plus +
                        A.a_minus * std::exp(1i * m.cell.ka * zr) * m.pvec.a_minus);
    }
    return phase * (A.b_plus * std::exp(-1i * m.cell.kb * zr) * m.pvec.b_plus +
                    A.b_minus * std::exp(1i * m.cell.kb * zr) * m.pvec.b_minus);
}

}  // namespace blochpdc
