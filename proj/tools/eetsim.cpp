// eetsim: command-line driver for ensembles, sweeps, analytic rates and plots.

#include "eetsim/config.hpp"
#include "eetsim/errors.hpp"
#include "eetsim/plot.hpp"
#include "eetsim/rates.hpp"
#include "eetsim/survival.hpp"
#include "eetsim/sweep.hpp"
#include "eetsim/units.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace eetsim;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitNumerical = 2;

void print_summary(const SweepReport& report) {
    std::printf("%zu point(s): %zu computed, %zu already complete; output in %s\n", report.summary.size(),
                report.computed, report.skipped, report.directory.c_str());
    for (const auto& r : report.summary) {
        std::printf("  %-22s tau_c %6g fs  T %5g K  site %d  p_trap(%g ps) = %.4f +- %.4f (se)\n", r.model.c_str(),
                    r.tau_c, r.temperature, r.initial_site, r.t_final / 1000.0, r.p_trap_mean, r.p_trap_se);
    }
}

int cmd_run(const std::string& path, unsigned workers, bool fresh, bool quiet, bool require_sweep) {
    const RunConfig config = load_run_config(path);
    if (require_sweep && !config.is_sweep()) {
        throw InputError(path + ": no sweep axes with more than one point; use 'run'");
    }
    SweepOptions options;
    options.workers = workers;
    options.fresh = fresh;
    if (!quiet) {
        options.progress = [](const std::string& msg) { std::fprintf(stderr, "%s\n", msg.c_str()); };
    }
    const SweepReport report = run_sweep(config, options);
    print_summary(report);
    if (report.summary.size() == 1) {
        const CsvTable table = read_csv(report.directory / report.summary.front().series);
        const auto t = table.numbers("t");
        const auto p = table.numbers("p_surv_mean");
        if (t.back() >= kDefaultLongWindow.end) {
            const SurvivalFit fit = fit_survival(t, p);
            std::printf("  survival: long-window decay rate %.6g /ps (rms %.3g), short-window cubic c1..c3 = %.4g %.4g %.4g\n",
                        fit.decay_rate() * units::kFsPerPs, fit.long_window.rms_residual,
                        fit.short_window.coefficients[1], fit.short_window.coefficients[2],
                        fit.short_window.coefficients[3]);
        }
    }
    return kExitOk;
}

int cmd_validate(const std::string& path) {
    const RunConfig config = load_run_config(path);
    config.validate();
    const auto points = config.points();
    for (const auto& p : points) {
        config.ensemble_config(p);
    }
    std::printf("%s: ok, %zu point(s), %zu trajectories each, config hash %016llx\n", path.c_str(), points.size(),
                config.n_trajectories, static_cast<unsigned long long>(config.hash()));
    for (const auto& p : points) {
        std::printf("  %s  dt %g fs\n", p.id().c_str(), config.dt_for(p.tau_c));
    }
    return kExitOk;
}

struct RatesArgs {
    std::string config;
    std::string hamiltonian;
    double tau_c = 45.0;
    double temperature = 77.0;
    double e_r = 35.0;
    std::vector<double> times;
    double band_lo = 90.0;
    double band_hi = 350.0;
    double overlap_threshold = 0.15;
    std::string output;
    bool excitons = false;
};

int cmd_rates(const RatesArgs& args) {
    NoiseConfig noise{args.tau_c, args.e_r, args.temperature};
    std::string hamiltonian = args.hamiltonian;
    if (!args.config.empty()) {
        const RunConfig config = load_run_config(args.config);
        noise = config.noise;
        if (hamiltonian.empty()) {
            hamiltonian = config.hamiltonian.string();
        }
    }
    if (hamiltonian.empty()) {
        hamiltonian = std::string(EETSIM_DATA_DIR) + "/fmo_ctepidum_hamiltonian.txt";
    }
    noise.validate();
    const ExcitonBasis basis = diagonalize(load_site_hamiltonian(hamiltonian));

    if (args.excitons) {
        const auto overlaps = dominant_overlaps(basis, args.overlap_threshold);
        std::printf("exciton,energy_cm,sites\n");
        for (int a = 0; a < basis.size(); ++a) {
            std::string sites;
            for (int s : overlaps[a]) {
                sites += (sites.empty() ? "" : " ") + std::to_string(s);
            }
            std::printf("%d,%.1f,%s\n", a, basis.energies[a], sites.c_str());
        }
        return kExitOk;
    }

    const RateTable table = rate_table(basis, noise, args.times);
    std::ostringstream csv;
    csv << "alpha,beta,gap_cm,omega_rad_per_fs,tau_c_opt_fs,gamma_inf";
    for (double t : table.times) {
        csv << ",gamma_t" << format_double(t);
    }
    csv << "\n";
    for (int a = 0; a < basis.size(); ++a) {
        for (int b = 0; b < basis.size(); ++b) {
            const double gap = basis.energies[a] - basis.energies[b];
            csv << a << ',' << b << ',' << format_double(gap) << ',' << format_double(table.omega(a, b)) << ','
                << (a == b ? std::string("inf") : format_double(optimal_tau_c_for_gap(gap))) << ','
                << format_double(table.gamma_inf(a, b));
            for (const auto& g : table.gamma_at) {
                csv << ',' << format_double(g(a, b));
            }
            csv << "\n";
        }
    }
    const OptimalTauC opt = optimal_tau_c(basis, args.band_lo, args.band_hi);
    char line[256];
    std::snprintf(line, sizeof line, "optimal tau_c over %zu pair(s) with gaps in [%g, %g] cm^-1: [%.1f, %.1f] fs\n",
                  opt.pairs.size(), args.band_lo, args.band_hi, opt.min, opt.max);
    if (args.output.empty()) {
        std::cout << csv.str();
        std::fputs(line, stderr);
    } else {
        write_text_file(args.output, csv.str());
        std::fputs(line, stdout);
    }
    return kExitOk;
}

int cmd_plot(const std::string& input, const std::string& output, const std::string& column, bool log_y) {
    const CsvTable table = read_csv(input);
    const PlotSpec spec = table.has("tau_c") ? summary_plot(table) : timeseries_plot(table, column, log_y);
    write_text_file(output, render_svg(spec));
    std::printf("wrote %s\n", output.c_str());
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Stochastic Liouville simulator for excitation transport (eetsim " + version_string() + ")"};
    app.require_subcommand(1);
    app.set_version_flag("--version", version_string());

    std::string config_path;
    unsigned workers = 0;
    bool fresh = false;
    bool quiet = false;

    auto* run = app.add_subcommand("run", "Run the ensemble (or every sweep point) described by a config");
    run->add_option("config", config_path, "Config file (key-value or JSON)")->required()->check(CLI::ExistingFile);
    run->add_option("-j,--workers", workers, "Worker threads (default: EETSIM_WORKERS or all cores)");
    run->add_flag("--fresh", fresh, "Replace results from a different configuration");
    run->add_flag("-q,--quiet", quiet, "No progress messages");

    auto* sweep = app.add_subcommand("sweep", "Run a sweep over tau_c, temperature, spatial model and initial site");
    sweep->add_option("config", config_path, "Config file with a [sweep] section")->required()->check(CLI::ExistingFile);
    sweep->add_option("-j,--workers", workers, "Worker threads (default: EETSIM_WORKERS or all cores)");
    sweep->add_flag("--fresh", fresh, "Replace results from a different configuration");
    sweep->add_flag("-q,--quiet", quiet, "No progress messages");

    RatesArgs rates_args;
    auto* rates = app.add_subcommand("rates", "Analytic exciton transition rates and optimal tau_c");
    rates->add_option("--config", rates_args.config, "Take Hamiltonian and noise parameters from a config");
    rates->add_option("--hamiltonian", rates_args.hamiltonian, "Site Hamiltonian file");
    rates->add_option("--tau-c", rates_args.tau_c, "Correlation time, fs");
    rates->add_option("--temperature", rates_args.temperature, "Temperature, K");
    rates->add_option("--e-r", rates_args.e_r, "Reorganization energy, cm^-1");
    rates->add_option("--times", rates_args.times, "Also evaluate Gamma(t) at these times (fs)")->delimiter(',');
    rates->add_option("--band-lo", rates_args.band_lo, "Lower gap bound for the optimal tau_c summary, cm^-1");
    rates->add_option("--band-hi", rates_args.band_hi, "Upper gap bound, cm^-1");
    rates->add_option("-o,--output", rates_args.output, "Write the rate table here instead of stdout");
    rates->add_flag("--excitons", rates_args.excitons, "Print exciton energies and dominant site overlaps instead");
    rates->add_option("--overlap-threshold", rates_args.overlap_threshold, "Weight threshold for --excitons");

    std::string plot_input, plot_output, plot_column;
    bool log_y = false;
    auto* plot = app.add_subcommand("plot", "Render a summary or time-series CSV as SVG");
    plot->add_option("csv", plot_input, "summary.csv or a time-series CSV")->required()->check(CLI::ExistingFile);
    plot->add_option("-o,--output", plot_output, "SVG file")->required();
    plot->add_option("--column", plot_column, "Time-series column (default p_trap_mean)");
    plot->add_flag("--log", log_y, "Logarithmic y axis (survival plots)");

    auto* validate = app.add_subcommand("validate", "Check a config without running anything");
    validate->add_option("config", config_path, "Config file")->required()->check(CLI::ExistingFile);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (*run) {
            return cmd_run(config_path, workers, fresh, quiet, false);
        }
        if (*sweep) {
            return cmd_run(config_path, workers, fresh, quiet, true);
        }
        if (*rates) {
            return cmd_rates(rates_args);
        }
        if (*plot) {
            return cmd_plot(plot_input, plot_output, plot_column, log_y);
        }
        if (*validate) {
            return cmd_validate(config_path);
        }
    } catch (const InputError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitConfig;
    } catch (const NumericalError& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return kExitNumerical;
    } catch (const std::filesystem::filesystem_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitConfig;
    }
    return kExitOk;
}
