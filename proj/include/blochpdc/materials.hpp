#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <complex>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>
// boost 1.74's pchip calls isnan unqualified
namespace boost::math::interpolators {
using std::isnan;
}
#include <boost/math/interpolators/pchip.hpp>

#include "errors.hpp"

namespace blochpdc {

using cd = std::complex<double>;
using Vec3c = Eigen::Vector3cd;

// Refractive index n(lambda), lambda in free-space nm.
class Dispersion {
public:
    struct Vacuum {};
    struct Constant {
        double n;
    };
    struct Table {
        std::vector<double> lambda_nm;
        std::vector<double> n;
        // pchip needs >= 4 nodes; shorter tables interpolate linearly
        std::shared_ptr<const boost::math::interpolators::pchip<std::vector<double>>> spline;
    };

    Dispersion() : v_(Vacuum{}) {}

    static Dispersion vacuum() { return Dispersion{}; }

    static Dispersion constant(double n) {
        if (!(n >= 1.0)) throw InvalidArgument("constant refractive index must be >= 1");
        Dispersion d;
        d.v_ = Constant{n};
        return d;
    }

    static Dispersion table(std::vector<std::pair<double, double>> rows) {
        if (rows.size() < 2) throw InvalidArgument("dispersion table needs at least 2 rows");
        Table t;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            auto [l, n] = rows[i];
            if (!(l > 0.0)) throw InvalidArgument("dispersion table wavelength must be positive");
            if (!(n >= 1.0)) throw InvalidArgument("dispersion table index must be >= 1");
            if (i > 0 && !(l > rows[i - 1].first))
                throw InvalidArgument("dispersion table wavelengths must be strictly increasing");
            t.lambda_nm.push_back(l);
            t.n.push_back(n);
        }
        if (t.lambda_nm.size() >= 4) {
            auto x = t.lambda_nm;
            auto y = t.n;
            t.spline = std::make_shared<const boost::math::interpolators::pchip<std::vector<double>>>(
                std::move(x), std::move(y));
        }
        Dispersion d;
        d.v_ = std::move(t);
        return d;
    }

    bool is_vacuum() const { return std::holds_alternative<Vacuum>(v_); }
    bool is_constant() const { return std::holds_alternative<Constant>(v_); }
    bool is_table() const { return std::holds_alternative<Table>(v_); }
    const Table* as_table() const { return std::get_if<Table>(&v_); }

    double operator()(double lambda_nm) const {
        if (const auto* c = std::get_if<Constant>(&v_)) return c->n;
        if (const auto* t = std::get_if<Table>(&v_)) return interpolate(*t, lambda_nm);
        return 1.0;
    }

private:
    static double interpolate(const Table& t, double l) {
        const auto& x = t.lambda_nm;
        if (l < x.front() || l > x.back()) throw OutOfRange(l, x.front(), x.back());
        // exact at nodes
        auto it = std::lower_bound(x.begin(), x.end(), l);
        std::size_t i = static_cast<std::size_t>(it - x.begin());
        if (i < x.size() && x[i] == l) return t.n[i];
        if (t.spline) return (*t.spline)(l);
        std::size_t j = i - 1;
        double u = (l - x[j]) / (x[i] - x[j]);
        return t.n[j] + u * (t.n[i] - t.n[j]);
    }

    std::variant<Vacuum, Constant, Table> v_;
};

// CSV with header "lambda_nm,n".
inline Dispersion read_dispersion_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open dispersion table '" + path + "'");
    std::string line;
    std::getline(in, line);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "lambda_nm,n")
        throw InvalidArgument("dispersion table '" + path + "' must start with header lambda_nm,n");
    std::vector<std::pair<double, double>> rows;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto comma = line.find(',');
        double l = 0, n = 0;
        bool ok = comma != std::string::npos;
        if (ok) {
            auto r1 = std::from_chars(line.data(), line.data() + comma, l);
            auto r2 = std::from_chars(line.data() + comma + 1, line.data() + line.size(), n);
            ok = r1.ec == std::errc{} && r2.ec == std::errc{} && r1.ptr == line.data() + comma &&
                 r2.ptr == line.data() + line.size();
        }
        if (!ok)
            throw InvalidArgument("malformed row " + std::to_string(lineno) + " in '" + path + "'");
        rows.emplace_back(l, n);
    }
    return Dispersion::table(std::move(rows));
}

enum class Chi2Symmetry { zincblende_43m, scalar_isotropic, zero };

// Full 3-index chi(2) tensor in the lab frame, pm/V.
class Chi2Tensor {
public:
    Chi2Tensor() : Chi2Tensor(Chi2Symmetry::zero, 0.0) {}

    Chi2Tensor(Chi2Symmetry sym, double magnitude,
               const Eigen::Matrix3d& orientation = Eigen::Matrix3d::Identity())
        : sym_(sym), mag_(magnitude), rot_(orientation) {
        if (!(orientation.transpose() * orientation).isApprox(Eigen::Matrix3d::Identity(), 1e-9))
            throw InvalidArgument("chi2 orientation must be a rotation matrix");
        std::array<double, 27> base{};
        if (sym == Chi2Symmetry::zincblende_43m) {
            const int p[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
            for (auto& q : p) base[idx(q[0], q[1], q[2])] = magnitude;
        } else if (sym == Chi2Symmetry::scalar_isotropic) {
            for (int i = 0; i < 3; ++i) base[idx(i, i, i)] = magnitude;
        }
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                for (int k = 0; k < 3; ++k) {
                    double s = 0;
                    for (int a = 0; a < 3; ++a)
                        for (int b = 0; b < 3; ++b)
                            for (int c = 0; c < 3; ++c) {
                                double v = base[idx(a, b, c)];
                                if (v != 0.0) s += rot_(i, a) * rot_(j, b) * rot_(k, c) * v;
                            }
                    t_[idx(i, j, k)] = s;
                }
        for (int i = 0; i < 27; ++i)
            if (t_[i] != 0.0) nonzero_.push_back(i);
    }

    Chi2Symmetry symmetry() const { return sym_; }
    double magnitude() const { return mag_; }
    const Eigen::Matrix3d& orientation() const { return rot_; }
    double operator()(int i, int j, int k) const { return t_[idx(i, j, k)]; }
    bool is_zero() const { return nonzero_.empty(); }

    // sum chi_ijk conj(ep_i) e1_j e2_k, no precondition checks
    cd contract(const Vec3c& ep, const Vec3c& e1, const Vec3c& e2) const {
        cd s = 0;
        for (int f : nonzero_) {
            int i = f / 9, j = (f / 3) % 3, k = f % 3;
            s += t_[f] * std::conj(ep[i]) * e1[j] * e2[k];
        }
        return s;
    }

    // same contraction with the tensor scaled to unit magnitude
    cd contract_normalized(const Vec3c& ep, const Vec3c& e1, const Vec3c& e2) const {
        return mag_ == 0.0 ? cd(0) : contract(ep, e1, e2) / mag_;
    }

private:
    static constexpr int idx(int i, int j, int k) { return 9 * i + 3 * j + k; }
    Chi2Symmetry sym_;
    double mag_;
    Eigen::Matrix3d rot_;
    std::array<double, 27> t_{};
    std::vector<int> nonzero_;
};

inline cd chi2_contract(const Chi2Tensor& t, const Vec3c& ep, const Vec3c& e1, const Vec3c& e2) {
    for (const Vec3c* v : {&ep, &e1, &e2})
        if (std::abs(v->norm() - 1.0) > 1e-9) throw InvalidArgument("chi2_contract expects unit vectors");
    return t.contract(ep, e1, e2);
}

struct Material {
    std::string name;
    Dispersion dispersion;
    std::optional<double> absorption_edge_nm;
    Chi2Tensor chi2;
};

inline double refractive_index(const Material& m, double lambda_nm) {
    if (!(lambda_nm > 0.0)) throw InvalidArgument("wavelength must be positive");
    if (m.absorption_edge_nm && lambda_nm < *m.absorption_edge_nm)
        throw AbsorbingRegion(lambda_nm, *m.absorption_edge_nm);
    return m.dispersion(lambda_nm);
}

inline Material vacuum_material(std::string name = "vacuum") {
    return Material{std::move(name), Dispersion::vacuum(), std::nullopt, Chi2Tensor{}};
}

inline Material constant_material(std::string name, double n, Chi2Tensor chi2 = {}) {
    return Material{std::move(name), Dispersion::constant(n), std::nullopt, std::move(chi2)};
}

}  // namespace blochpdc
