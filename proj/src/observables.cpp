#include "eetsim/observables.hpp"

#include "eetsim/errors.hpp"

#include <cmath>

namespace eetsim {

Observables observables(const Eigen::MatrixXcd& rho, const Geometry& geometry, int ref_site) {
    const int n = geometry.n_sites();
    if (rho.rows() != n + 2 || rho.cols() != n + 2) {
        throw InputError("density matrix does not match the geometry's site count");
    }
    if (ref_site < 1 || ref_site > n) {
        throw InputError("reference site out of range");
    }
    Observables obs;
    obs.p_trap = rho(trap_index(n), trap_index(n)).real();
    obs.p_survival = 1.0 - obs.p_trap;
    for (int i = 1; i <= n; ++i) {
        for (int j = 1; j <= n; ++j) {
            if (i != j) {
                obs.total_coherence += std::abs(rho(i, j));
            }
        }
        obs.mean_displacement += geometry.distance(ref_site, i) * rho(i, i).real();
    }
    return obs;
}

}  // namespace eetsim
