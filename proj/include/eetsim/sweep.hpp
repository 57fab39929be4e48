#pragma once

#include "eetsim/config.hpp"
#include "eetsim/csv.hpp"

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

namespace eetsim {

struct SweepOptions {
    unsigned workers = 0;  // 0: default_workers()
    bool fresh = false;    // ignore (and replace) a manifest from a different configuration
    std::function<void(const std::string&)> progress;
};

struct SweepReport {
    std::size_t computed = 0;
    std::size_t skipped = 0;
    std::vector<SummaryRow> summary;  // in point order
    std::filesystem::path directory;
};

/// Runs every point of `config` into config.output_dir:
///   <point id>.csv   time series of each ensemble
///   summary.csv      p_trap(t_final) per point
///   manifest.json    config hash, seed, version, per-point completion (the only file with timestamps)
///   *.svg            when config.plots is set
/// Every point uses the same master seed. Points already recorded as complete in a manifest
/// with the same config hash are not recomputed.
SweepReport run_sweep(const RunConfig& config, const SweepOptions& options = {});

std::string version_string();

}  // namespace eetsim
