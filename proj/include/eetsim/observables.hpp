#pragma once

#include "eetsim/model.hpp"

#include <Eigen/Dense>

namespace eetsim {

// Density-matrix basis: 0 = global ground state, 1..n = sites, n + 1 = trap.
inline int trap_index(int n_sites) { return n_sites + 1; }

struct Observables {
    double p_trap = 0.0;
    double p_survival = 1.0;
    double total_coherence = 0.0;    // sum over site pairs i != j of |rho_ij|
    double mean_displacement = 0.0;  // sum_i d(ref, i) rho_ii, Angstrom
};

Observables observables(const Eigen::MatrixXcd& rho, const Geometry& geometry, int ref_site);

}  // namespace eetsim
