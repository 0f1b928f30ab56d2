#pragma once

#include "materials.hpp"

namespace blochpdc {

// Two-layer unit cell. Within cell n, layer a occupies z - n*period in [-a, 0]
// and layer b occupies [-period, -a].
struct BraggStructure {
    Material material_a;
    double thickness_a = 0;
    Material material_b;
    double thickness_b = 0;
    int periods = 1;
    // optional "layers" count from the config; recorded only
    int layers = 0;

    double period() const { return thickness_a + thickness_b; }
    double crystal_length() const { return periods * period(); }

    void validate() const {
        if (!(thickness_a >= 0) || !(thickness_b >= 0))
            throw InvalidArgument("layer thicknesses must be non-negative");
        if (!(period() > 0)) throw InvalidArgument("period must be positive");
        if (periods < 1) throw InvalidArgument("number of periods must be >= 1");
    }
};

inline BraggStructure make_structure(Material a, double ta, Material b, double tb, int periods) {
    BraggStructure s{std::move(a), ta, std::move(b), tb, periods, 2 * periods};
    s.validate();
    return s;
}

}  // namespace blochpdc
