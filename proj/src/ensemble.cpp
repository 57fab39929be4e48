#include "eetsim/ensemble.hpp"

#include "eetsim/errors.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace eetsim {

void EnsembleConfig::validate() const {
    const int n = hamiltonian.n_sites();
    if (geometry.n_sites() != n || correlation.size() != n) {
        throw InputError("Hamiltonian, geometry and correlation matrix disagree on the number of sites");
    }
    if (initial_site < 1 || initial_site > n) {
        throw InputError("initial site " + std::to_string(initial_site) + " out of range");
    }
    rates.validate(n);
    noise.validate();
    propagation.validate(noise.tau_c);
}

unsigned default_workers() {
    if (const char* env = std::getenv("EETSIM_WORKERS")) {
        char* end = nullptr;
        const long value = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && value > 0) {
            return static_cast<unsigned>(value);
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

Eigen::MatrixXd EnsembleStatistics::sd() const {
    if (n_trajectories < 2) {
        return Eigen::MatrixXd::Zero(mean.rows(), mean.cols());
    }
    return (sum_sq_dev / static_cast<double>(n_trajectories - 1)).cwiseSqrt();
}

Eigen::MatrixXd EnsembleStatistics::se() const {
    return sd() / std::sqrt(static_cast<double>(n_trajectories));
}

Eigen::VectorXd EnsembleStatistics::coherence_of_mean() const {
    return 2.0 * mean_coherences.cwiseAbs().rowwise().sum();
}

namespace {

// Pairwise summation over trajectories [lo, hi) of f(k), elementwise.
template <typename M = Eigen::MatrixXd, typename F>
M pairwise_sum(std::size_t lo, std::size_t hi, const F& f) {
    if (hi - lo == 1) {
        return f(lo);
    }
    const std::size_t mid = lo + (hi - lo) / 2;
    return pairwise_sum<M>(lo, mid, f) + pairwise_sum<M>(mid, hi, f);
}

}  // namespace

EnsembleStatistics summarize(const std::vector<TrajectoryResult>& trajectories) {
    if (trajectories.empty()) {
        throw InputError("no trajectories to summarize");
    }
    const auto& first = trajectories.front();
    for (const auto& t : trajectories) {
        if (t.values.rows() != first.values.rows() || t.values.cols() != first.values.cols() ||
            t.site_coherences.rows() != first.site_coherences.rows() ||
            t.site_coherences.cols() != first.site_coherences.cols()) {
            throw InputError("trajectories do not share a time grid");
        }
    }
    const std::size_t n = trajectories.size();
    EnsembleStatistics stats;
    stats.time = first.time;
    stats.n_trajectories = n;
    stats.n_sites = static_cast<int>(first.values.cols()) - kFirstPopulation;
    stats.mean = pairwise_sum(0, n, [&](std::size_t k) -> Eigen::MatrixXd { return trajectories[k].values; }) /
                 static_cast<double>(n);
    stats.sum_sq_dev = pairwise_sum(0, n, [&](std::size_t k) -> Eigen::MatrixXd {
        return (trajectories[k].values - stats.mean).array().square().matrix();
    });
    stats.mean_coherences =
        pairwise_sum<Eigen::MatrixXcd>(0, n, [&](std::size_t k) -> Eigen::MatrixXcd {
            return trajectories[k].site_coherences;
        }) /
        static_cast<double>(n);
    for (const auto& t : trajectories) {
        stats.invariants.merge(t.invariants);
    }
    return stats;
}

EnsembleStatistics run_ensemble(const EnsembleConfig& config, std::size_t n_trajectories, std::uint64_t master_seed,
                                const EnsembleOptions& options) {
    if (n_trajectories < 2) {
        throw InputError("an ensemble needs at least 2 trajectories");
    }
    config.validate();
    const Liouvillian liouvillian(config.hamiltonian, config.rates, config.hamiltonian.mean_site_energy());

    std::vector<TrajectoryResult> results(n_trajectories);
    std::vector<std::exception_ptr> errors(n_trajectories);
    std::atomic<std::size_t> next{0};

    auto worker = [&] {
        for (std::size_t k = next++; k < n_trajectories; k = next++) {
            try {
                CorrelatedNoise noise(config.noise, config.correlation, config.propagation.dt,
                                      make_rng(master_seed, options.first_index + k));
                results[k] = propagate(config.initial_site, liouvillian, noise, config.propagation, config.geometry);
            } catch (...) {
                errors[k] = std::current_exception();
            }
        }
    };

    const unsigned workers =
        std::min<std::size_t>(options.workers == 0 ? default_workers() : options.workers, n_trajectories);
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back(worker);
        }
    }

    for (std::size_t k = 0; k < n_trajectories; ++k) {
        if (!errors[k]) {
            continue;
        }
        const std::string where = "trajectory " + std::to_string(options.first_index + k) + ": ";
        try {
            std::rethrow_exception(errors[k]);
        } catch (const NumericalError& e) {
            throw NumericalError(where + e.what());
        } catch (const InputError& e) {
            throw InputError(where + e.what());
        }
    }

    EnsembleStatistics stats = summarize(results);
    stats.master_seed = master_seed;
    stats.first_index = options.first_index;
    return stats;
}

EnsembleStatistics merge(const EnsembleStatistics& a, const EnsembleStatistics& b) {
    if (a.mean.rows() != b.mean.rows() || a.mean.cols() != b.mean.cols() || a.time != b.time) {
        throw InputError("cannot merge ensembles on different grids");
    }
    const double na = static_cast<double>(a.n_trajectories);
    const double nb = static_cast<double>(b.n_trajectories);
    const double n = na + nb;
    const Eigen::MatrixXd delta = b.mean - a.mean;

    EnsembleStatistics out = a;
    out.n_trajectories = a.n_trajectories + b.n_trajectories;
    out.mean = (na * a.mean + nb * b.mean) / n;
    out.mean_coherences = (na * a.mean_coherences + nb * b.mean_coherences) / n;
    out.sum_sq_dev = a.sum_sq_dev + b.sum_sq_dev + delta.array().square().matrix() * (na * nb / n);
    out.first_index = std::min(a.first_index, b.first_index);
    out.invariants.merge(b.invariants);
    return out;
}

}  // namespace eetsim
