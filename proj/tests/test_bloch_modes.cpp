#include <random>

#include <gtest/gtest.h>

#include "common.hpp"
#include "fft_oracle.hpp"

using namespace blochpdc;
using namespace std::complex_literals;

namespace {

std::vector<BlochMode> random_modes(const BraggStructure& s, int count, unsigned seed) {
    std::mt19937_64 g(seed);
    std::uniform_real_distribution<double> U(0, 1);
    std::vector<BlochMode> out;
    while (static_cast<int>(out.size()) < count) {
        const double lambda = 2 * s.period() / (0.05 + 1.2 * U(g));
        const double kp = 2 * std::numbers::pi / lambda * 5.0 * U(g), phi = 2 * std::numbers::pi * U(g);
        const ModeQuery q{lambda, kp * std::cos(phi), kp * std::sin(phi), U(g) < 0.5 ? Polarization::TE : Polarization::TM};
        const CellMatrix c = cell_matrix(s, q);
        if (!bloch_wavevector(c, s.period()).propagating()) continue;
        out.push_back(make_mode(c, s.period(), U(g) < 0.5 ? Direction::forward : Direction::backward));
    }
    return out;
}

double rel_l2(const std::vector<Vec3c>& x, const std::vector<Vec3c>& y) {
    double num = 0, den = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        num += (x[i] - y[i]).squaredNorm();
        den += y[i].squaredNorm();
    }
    return std::sqrt(num / den);
}

}  // namespace

TEST(FourierCoefficients, MatchFftOracle) {
    const auto s = fixture::illustrative();
    double worst = 0;
    for (const BlochMode& m : random_modes(s, 40, 21)) {
        const double e = rel_l2(m.fourier, fixture::fft_coefficients(m, m.window));
        worst = std::max(worst, e);
        EXPECT_LT(e, 1e-8) << to_string(m.query().pol) << " lambda " << m.query().lambda_nm;
    }
    RecordProperty("worst_rel_l2", std::to_string(worst));
}

TEST(FourierCoefficients, MatchFftOracleOnExampleStructure) {
    const auto s = fixture::algaas_air();
    for (auto [lambda, pol] : {std::pair{750.0, Polarization::TM}, {1500.0, Polarization::TE}, {1500.0, Polarization::TM}}) {
        const BlochMode m = make_mode(s, ModeQuery{lambda, 0.0001, 0.0007, pol});
        EXPECT_LT(rel_l2(m.fourier, fixture::fft_coefficients(m, m.window)), 1e-8);
    }
}

TEST(FourierCoefficients, UniformMediumSingleCoefficient) {
    const auto s = fixture::uniform(1.5);
    for (double lambda : {700.0, 1234.0, 3000.0}) {
        const BlochMode m = make_mode(s, ModeQuery{lambda, 0, 0, Polarization::TE});
        const int d = m.dominant_index();
        EXPECT_NEAR(m[d].norm(), 1.0, 1e-12);
        for (int n = m.window.n_min; n <= m.window.n_max; ++n)
            if (n != d) { EXPECT_LT(m[n].norm(), 1e-12); }
        // the surviving G folds +-k_z into the zone
        const double k = kz_layer(1.5, lambda, 0).real();
        EXPECT_NEAR(std::abs(m.K.K.real() - 2 * std::numbers::pi * d / s.period()), k, 1e-12);
    }
}

TEST(FourierCoefficients, WindowConvergenceOfRawCoefficients) {
    const auto s = fixture::illustrative();
    for (const BlochMode& m : random_modes(s, 20, 5)) {
        const BlochMode raw = make_mode(m.cell, m.period, Direction::forward, FourierWindow::symmetric(32), false);
        const BlochMode big = make_mode(m.cell, m.period, Direction::forward, FourierWindow::symmetric(64), false);
        for (int n = -32; n <= 32; ++n) EXPECT_LT((raw[n] - big[n]).norm(), 1e-10);
    }
}

TEST(FourierCoefficients, ConvergenceFlag) {
    const auto s = fixture::illustrative();
    const BlochMode m = make_mode(s, ModeQuery{4000, 0, 0.001, Polarization::TE});
    EXPECT_TRUE(m.converged);
    const BlochMode tiny = make_mode(s, ModeQuery{800, 0, 0.002, Polarization::TM}, Direction::forward,
                                     FourierWindow::symmetric(1));
    EXPECT_FALSE(tiny.converged);
}

TEST(Normalize, UnitNormAndIdempotent) {
    const auto s = fixture::illustrative();
    for (const BlochMode& m : random_modes(s, 20, 8)) {
        EXPECT_NEAR(m.coefficient_norm2(), 1.0, 1e-9);
        const BlochMode again = normalize(m);
        for (int n = -32; n <= 32; ++n) EXPECT_LT((again[n] - m[n]).norm(), 1e-12);
        const BlochMode seven = normalize(scaled(m, 7.0));
        for (int n = -32; n <= 32; ++n) EXPECT_LT((seven[n] - m[n]).norm(), 1e-12);
    }
}

TEST(Normalize, ZeroFieldIsDegenerate) {
    const auto s = fixture::illustrative();
    const BlochMode m = make_mode(s, ModeQuery{4000, 0, 0, Polarization::TE});
    EXPECT_THROW(normalize(scaled(m, 0.0)), DegenerateMode);
}

TEST(Field, UniformPlaneWave) {
    const auto s = fixture::uniform(1.3);
    const BlochMode m = make_mode(s, ModeQuery{900, 0, 0, Polarization::TE});
    // forward or backward plane wave depending on which side the fold lands
    const double k = kz_layer(1.3, 900, 0).real();
    const double sign = std::abs(m.amplitudes.a_plus) > std::abs(m.amplitudes.a_minus) ? -1 : 1;
    const Vec3c e0 = field_at(m, 0.0);
    for (double z : {-1234.5, -77.0, 0.3, 812.0}) {
        const Vec3c e = field_at(m, z);
        EXPECT_LT((e - e0 * std::exp(1i * sign * k * z)).norm(), 1e-12);
    }
}

TEST(Field, BlochProperty) {
    const auto s = fixture::illustrative();
    for (const BlochMode& m : random_modes(s, 30, 2)) {
        for (double z : {-900.0, -400.0, -100.0, 10.0, 333.0}) {
            const Vec3c e = field_at(m, z), e2 = field_at(m, z + s.period());
            EXPECT_LT((e2 - std::exp(-1i * m.K.K * s.period()) * e).norm(), 1e-10 * std::max(1.0, e.norm()));
        }
    }
}

TEST(Field, TEFieldAlongRotatedX) {
    const auto s = fixture::illustrative();
    for (const BlochMode& m : random_modes(s, 40, 4)) {
        if (m.query().pol != Polarization::TE) continue;
        const double kp = m.query().k_par();
        Vec3c dir(1, 0, 0);
        if (kp > 0) dir = Vec3c(m.query().ky / kp, -m.query().kx / kp, 0);
        for (double z = -1000; z < 0; z += 37) {
            const Vec3c e = field_at(m, z);
            EXPECT_LT((e - dir * dir.dot(e)).norm(), 1e-12 * std::max(1.0, e.norm()));
        }
    }
}

TEST(Field, Parseval) {
    using Gauss = boost::math::quadrature::gauss<double, 20>;
    const auto s = fixture::illustrative();
    for (const BlochMode& m : random_modes(s, 12, 6)) {
        // mean |E|^2 over one period, Gauss per layer
        auto integrate = [&](double z0, double z1) {
            return Gauss::integrate([&](double z) { return field_at(m, z).squaredNorm(); }, z0, z1);
        };
        double mean = 0;
        const int panels = 64;
        const double a = s.thickness_a, L = s.period();
        for (int p = 0; p < panels; ++p) {
            mean += integrate(-a + a * p / panels, -a + a * (p + 1) / panels);
            mean += integrate(-L + (L - a) * p / panels, -L + (L - a) * (p + 1) / panels);
        }
        mean /= L;
        // coefficient sum over a wide window plus the 1/n^2 tail of the jumps
        const int M = 20000;
        double sum = 0;
        for (int n = -M; n <= M; ++n) sum += m.coefficient(n).squaredNorm();
        double tail = 0;
        for (double zd : {-a, 0.0}) {
            const Vec3c j = field_at(m, zd + 1e-9) - field_at(m, zd - 1e-9);
            tail += j.squaredNorm() * 2.0 / (4 * std::numbers::pi * std::numbers::pi) / (M + 0.5);
        }
        EXPECT_NEAR(sum + tail, mean, 1e-8 * mean) << to_string(m.query().pol);
    }
}

TEST(Field, ContinuityAcrossInterfaces) {
    const auto s = fixture::illustrative();
    for (const BlochMode& m : random_modes(s, 30, 10)) {
        for (double zd : {-s.thickness_a, 0.0, -s.period()}) {
            const Vec3c up = field_at(m, zd + 1e-9), dn = field_at(m, zd - 1e-9);
            // tangential components continuous
            EXPECT_LT(std::abs(up[0] - dn[0]) + std::abs(up[1] - dn[1]), 1e-9 * std::max(1.0, up.norm()));
            // normal D continuous for TM
            const double na = 1.0, nb = 5.0;
            const double nu = zd == -s.thickness_a ? na : nb, nd = zd == -s.thickness_a ? nb : na;
            EXPECT_LT(std::abs(nu * nu * up[2] - nd * nd * dn[2]), 1e-9 * std::max(1.0, up.norm()) * 25);
        }
    }
}
