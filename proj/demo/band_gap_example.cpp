// Prints the normal-incidence gaps of the n = 1/5 quarter-fill stack and the
// form birefringence in the long-wavelength limit.
#include <cstdio>

#include <blochpdc/band_diagram.hpp>

int main() {
    using namespace blochpdc;
    const double period = 1000;
    auto s = make_structure(constant_material("low", 1.0), 0.25 * period, constant_material("high", 5.0),
                            0.75 * period, 15);

    // omega period / (pi c) from 0.05 to 1 corresponds to lambda = 2 period / x
    const auto edges = band_edges(s, 0.0, Polarization::TE, 2 * period / 1.0, 2 * period / 0.05, 4096);
    // edges come in ascending wavelength; an unpaired one belongs to a gap cut by the range
    std::printf("normal-incidence gaps (omega period / pi c):\n");
    for (std::size_t i = edges.size(); i >= 2; i -= 2)
        std::printf("  %.6f .. %.6f\n", 2 * period / edges[i - 1], 2 * period / edges[i - 2]);

    const auto e = effective_indices(s, 40 * period);
    std::printf("n_o = %.6f  n_e = %.6f\n", e.n_o, e.n_e);
}
