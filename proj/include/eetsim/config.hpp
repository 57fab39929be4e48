#pragma once

#include "eetsim/dynamics.hpp"
#include "eetsim/ensemble.hpp"
#include "eetsim/noise.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace eetsim {

/// One ensemble of a sweep.
struct SweepPoint {
    double tau_c = 45.0;
    double temperature = 77.0;
    SpatialModel model;
    int initial_site = 1;

    /// File-name-safe identifier, e.g. "exponential-10_tau45_T77_site1".
    std::string id() const;
};

/// Everything a run or sweep needs. Built by parse_run_config; paths are absolute.
struct RunConfig {
    std::filesystem::path hamiltonian;
    std::filesystem::path geometry;
    RateParams rates;
    NoiseConfig noise;
    SpatialModel spatial;
    int initial_site = 1;

    double t_final = 20000.0;
    std::optional<double> dt;  // empty: chosen per point by auto_dt
    double record_interval = 10.0;
    Integrator integrator = Integrator::Split;
    bool check_invariants = true;

    std::size_t n_trajectories = 100;
    std::uint64_t master_seed = 1;

    // Sweep axes; an empty axis means the base value above.
    std::vector<double> sweep_tau_c;
    std::vector<double> sweep_temperature;
    std::vector<SpatialModel> sweep_models;
    std::vector<int> sweep_sites;

    std::filesystem::path output_dir;
    bool plots = true;

    std::string origin = "<string>";
    std::map<std::string, int> key_lines;  // source line of each key (0 for JSON)

    /// Cartesian product of the sweep axes in the order tau_c, temperature, model, site.
    std::vector<SweepPoint> points() const;
    bool is_sweep() const { return points().size() > 1; }

    /// Time step for one point: the explicit dt, or auto_dt(tau_c).
    double dt_for(double tau_c) const;

    /// Range checks (tau_c and T in [1, 1000]), file existence, dt preconditions at every point.
    void validate() const;

    /// Loads the data files and assembles the ensemble configuration of one point.
    EnsembleConfig ensemble_config(const SweepPoint& point) const;

    /// Normalized text covering every field that affects results, and its FNV-1a hash.
    std::string canonical() const;
    std::uint64_t hash() const;
};

/// Largest dt <= min(1 fs, tau_c / 10) that divides the record interval.
double auto_dt(double tau_c, double record_interval);

/// Key-value text ([section] headers, dotted keys, '#' comments, comma-separated lists),
/// or JSON when the text starts with '{'. Relative paths resolve against `base_dir`.
RunConfig parse_run_config(const std::string& text, const std::string& origin = "<string>",
                           const std::filesystem::path& base_dir = std::filesystem::current_path());
RunConfig load_run_config(const std::filesystem::path& path);

std::uint64_t fnv1a(const std::string& bytes);

}  // namespace eetsim
