#include "eetsim/sweep.hpp"

#include "eetsim/errors.hpp"
#include "eetsim/plot.hpp"

#include <json.hpp>

#include <atomic>
#include <chrono>
#include <ctime>
#include <exception>
#include <fstream>
#include <mutex>
#include <thread>

namespace eetsim {

namespace fs = std::filesystem;
using nlohmann::json;

std::string version_string() {
    return EETSIM_VERSION;
}

namespace {

std::string hex(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::string utc_now() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

json read_manifest(const fs::path& path) {
    std::ifstream in(path);
    if (!in) {
        return nullptr;
    }
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw InputError(path.string() + ": corrupt manifest: " + e.what());
    }
}

SummaryRow row_from_series(const fs::path& file, const SweepPoint& point) {
    const CsvTable table = read_csv(file);
    if (table.rows.empty()) {
        throw InputError(file.string() + ": empty time series");
    }
    const std::size_t last = table.rows.size() - 1;
    SummaryRow row;
    row.model = point.model.tag();
    row.tau_c = point.tau_c;
    row.temperature = point.temperature;
    row.initial_site = point.initial_site;
    row.t_final = table.numbers("t")[last];
    row.p_trap_mean = table.numbers("p_trap_mean")[last];
    row.p_trap_sd = table.numbers("p_trap_sd")[last];
    row.p_trap_se = table.numbers("p_trap_se")[last];
    row.series = file.filename().string();
    return row;
}

}  // namespace

SweepReport run_sweep(const RunConfig& config, const SweepOptions& options) {
    config.validate();
    const fs::path dir = config.output_dir;
    fs::create_directories(dir);
    const fs::path manifest_path = dir / "manifest.json";
    const std::string config_hash = hex(config.hash());

    json manifest = read_manifest(manifest_path);
    if (!manifest.is_null() && manifest.value("config_hash", "") != config_hash) {
        if (!options.fresh) {
            throw InputError(manifest_path.string() + " was written for a different configuration (hash " +
                             manifest.value("config_hash", "?") + ", now " + config_hash +
                             "); choose another output directory or start fresh");
        }
        manifest = nullptr;
    }
    if (manifest.is_null()) {
        manifest = {{"version", version_string()},
                    {"config_hash", config_hash},
                    {"master_seed", config.master_seed},
                    {"n_trajectories", config.n_trajectories},
                    {"created", utc_now()},
                    {"points", json::object()}};
    }

    const std::vector<SweepPoint> points = config.points();
    std::vector<bool> done(points.size(), false);
    SweepReport report;
    report.directory = dir;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const std::string id = points[i].id();
        if (manifest["points"].contains(id) && fs::is_regular_file(dir / (id + ".csv"))) {
            done[i] = true;
            ++report.skipped;
        }
    }

    std::mutex mutex;
    const auto say = [&](const std::string& msg) {
        if (options.progress) {
            const std::lock_guard lock(mutex);
            options.progress(msg);
        }
    };
    const auto save_manifest = [&] {
        manifest["updated"] = utc_now();
        write_text_file(manifest_path, manifest.dump(2) + "\n");
    };
    save_manifest();

    std::vector<std::size_t> todo;
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (!done[i]) {
            todo.push_back(i);
        } else {
            say("skip " + points[i].id() + " (complete)");
        }
    }

    const unsigned total = options.workers == 0 ? default_workers() : options.workers;
    const unsigned point_workers = std::max<unsigned>(1, std::min<std::size_t>(total, todo.size()));
    const unsigned trajectory_workers = std::max(1u, total / point_workers);

    std::vector<std::exception_ptr> errors(points.size());
    std::atomic<std::size_t> next{0};
    const auto worker = [&] {
        for (std::size_t k = next++; k < todo.size(); k = next++) {
            const SweepPoint& p = points[todo[k]];
            const std::string id = p.id();
            try {
                say("run  " + id);
                const EnsembleConfig ec = config.ensemble_config(p);
                const EnsembleStatistics stats =
                    run_ensemble(ec, config.n_trajectories, config.master_seed, {0, trajectory_workers});
                const fs::path file = dir / (id + ".csv");
                write_timeseries_csv(file, stats);
                if (config.plots) {
                    const CsvTable table = parse_csv(format_timeseries_csv(stats), file.string());
                    write_text_file(dir / (id + "_p_trap.svg"), render_svg(timeseries_plot(table)));
                    write_text_file(dir / (id + "_survival.svg"), render_svg(timeseries_plot(table, "", true)));
                }
                const std::lock_guard lock(mutex);
                manifest["points"][id] = {
                    {"file", id + ".csv"},
                    {"model", p.model.tag()},
                    {"tau_c", p.tau_c},
                    {"temperature", p.temperature},
                    {"initial_site", p.initial_site},
                    {"dt", ec.propagation.dt},
                    {"integrator", integrator_name(ec.propagation.method)},
                    {"max_trace_error", stats.invariants.max_trace_error},
                    {"max_hermiticity_error", stats.invariants.max_hermiticity_error},
                    {"min_eigenvalue", stats.invariants.min_eigenvalue},
                    {"completed", utc_now()},
                };
                save_manifest();
                if (options.progress) {
                    options.progress("done " + id);
                }
            } catch (...) {
                errors[todo[k]] = std::current_exception();
            }
        }
    };
    if (point_workers <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < point_workers; ++w) {
            pool.emplace_back(worker);
        }
    }
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (errors[i]) {
            try {
                std::rethrow_exception(errors[i]);
            } catch (const NumericalError& e) {
                throw NumericalError("point " + points[i].id() + ": " + e.what());
            } catch (const InputError& e) {
                throw InputError("point " + points[i].id() + ": " + e.what());
            }
        }
    }
    report.computed = todo.size();

    for (const auto& p : points) {
        SummaryRow row = row_from_series(dir / (p.id() + ".csv"), p);
        row.n_trajectories = config.n_trajectories;
        report.summary.push_back(row);
    }
    write_text_file(dir / "summary.csv", format_summary_csv(report.summary));
    if (config.plots && points.size() > 1) {
        write_text_file(dir / "summary.svg",
                        render_svg(summary_plot(parse_csv(format_summary_csv(report.summary), "summary.csv"))));
    }
    return report;
}

}  // namespace eetsim
