#pragma once

#include <cmath>
#include <vector>

#include "pscurv/pscurv.hpp"

namespace pscurv::testing {

inline Point point2(cplx a, cplx b) {
    Point p(2);
    p << a, b;
    return p;
}

inline Point random_point(CounterRng& rng, int dim, double scale = 0.7) {
    Point z(dim);
    for (int j = 0; j < dim; ++j) z[j] = scale * rng.complex_normal();
    return z;
}

/// Surface samples of a catalog family through its own seeder.
inline std::vector<SurfaceFrame> family_frames(const FamilyInstance& fam, std::size_t count, std::uint64_t seed) {
    return sample_surface(fam.contact_function(), fam.metric, count, seed, family_seeder(fam));
}

/// Each catalog family with a representative parameter choice.
inline std::vector<FamilyInstance> catalog_instances() {
    return {builtin_family("sphere", {}),
            builtin_family("sphere", {{"n", 2}}),
            builtin_family("perturbed_sphere_E", {}),
            builtin_family("perturbed_sphere_E", {{"n", 2}}),
            builtin_family("ellipsoid", {{"alpha", 1.5}, {"beta", 2.0}, {"gamma", 0.3}, {"sigma", 0.4}}),
            builtin_family("ellipsoid", {{"a", 1}, {"b", 2}, {"c", 3}, {"d", 4}}),
            builtin_family("hartogs", {{"t", 1.0}}),
            builtin_family("reinhardt", {{"eps", 1.0}})};
}

}  // namespace pscurv::testing
