#pragma once

#include "eetsim/dynamics.hpp"
#include "eetsim/model.hpp"
#include "eetsim/noise.hpp"
#include "eetsim/observables.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>

namespace eetsim {

/// Everything one trajectory needs apart from its seed.
struct EnsembleConfig {
    SiteHamiltonian hamiltonian;
    Geometry geometry;
    RateParams rates;
    NoiseConfig noise;
    CorrelationMatrix correlation;
    int initial_site = 1;
    PropagationSettings propagation;

    void validate() const;
};

struct EnsembleOptions {
    std::uint64_t first_index = 0;  // trajectory k uses make_rng(master_seed, first_index + k)
    unsigned workers = 0;           // 0: default_workers()
};

/// Worker count from EETSIM_WORKERS, else the hardware concurrency.
unsigned default_workers();

/// Pointwise statistics over trajectories sharing one time grid. Columns follow SeriesColumn.
struct EnsembleStatistics {
    Eigen::VectorXd time;
    Eigen::MatrixXd mean;
    Eigen::MatrixXd sum_sq_dev;  // sum of squared deviations from the mean
    std::size_t n_trajectories = 0;
    std::uint64_t master_seed = 0;
    std::uint64_t first_index = 0;
    int n_sites = 0;
    InvariantReport invariants;
    Eigen::MatrixXcd mean_coherences;  // ensemble mean of TrajectoryResult::site_coherences

    Eigen::MatrixXd sd() const;  // sample standard deviation
    Eigen::MatrixXd se() const;  // sd / sqrt(n)
    Eigen::Index columns() const { return mean.cols(); }
    /// Total coherence sum_{i != j} |E[rho_ij]| of the ensemble-averaged state, per time.
    Eigen::VectorXd coherence_of_mean() const;
};

/// Runs trajectories first_index .. first_index + n - 1. The result does not depend on
/// the worker count or scheduling. A failing trajectory raises NumericalError naming it.
EnsembleStatistics run_ensemble(const EnsembleConfig& config, std::size_t n_trajectories, std::uint64_t master_seed,
                                const EnsembleOptions& options = {});

/// Statistics from explicit per-trajectory results (in trajectory order).
EnsembleStatistics summarize(const std::vector<TrajectoryResult>& trajectories);

/// Pools two disjoint ensembles on the same grid (Chan et al. pairwise update).
EnsembleStatistics merge(const EnsembleStatistics& a, const EnsembleStatistics& b);

}  // namespace eetsim
