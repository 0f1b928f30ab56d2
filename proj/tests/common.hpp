#pragma once

#include <string>

#include <blochpdc/config.hpp>

namespace blochpdc::fixture {

inline std::string source_path(const std::string& rel) { return std::string(BLOCHPDC_SOURCE_DIR) + "/" + rel; }

// n = 1 / 5 with a quarter of the period in the low-index layer
inline BraggStructure illustrative(double period = 1000.0, int periods = 15) {
    return make_structure(constant_material("low", 1.0), 0.25 * period, constant_material("high", 5.0),
                          0.75 * period, periods);
}

inline BraggStructure uniform(double n, double a = 300.0, double b = 200.0) {
    return make_structure(constant_material("a", n), a, constant_material("b", n), b, 10);
}

inline Material algaas() {
    Material m;
    m.name = "algaas";
    m.dispersion = read_dispersion_csv(source_path("data/al0.4ga0.6as.csv"));
    m.absorption_edge_nm = 640.0;
    m.chi2 = Chi2Tensor(Chi2Symmetry::zincblende_43m, 200.0);
    return m;
}

inline BraggStructure algaas_air(int periods = 15) {
    return make_structure(algaas(), 123.0, vacuum_material("air"), 64.5, periods);
}

// 750 nm TM pump tilted 10 degrees along y in air, as in configs/algaas_air.cfg
inline ProcessSpec example_process(ProcessType type = ProcessType::II) {
    ProcessSpec p;
    p.pump = ModeQuery{750.0, 0.0, 2 * std::numbers::pi / 750.0 * std::sin(10.0 * std::numbers::pi / 180.0),
                       Polarization::TM};
    p.lambda_signal = 1500.0;
    p.type = type;
    p.g_branch = 1;
    return p;
}

}  // namespace blochpdc::fixture
