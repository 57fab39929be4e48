#pragma once

#include "eetsim/ensemble.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace eetsim {

/// Columns: t, p_trap_mean, p_trap_sd, p_trap_se, p_surv_mean, coherence_mean, coherence_sd,
/// displacement_mean, displacement_sd, pop_1 .. pop_n (population means), coherence_of_mean
/// (total coherence of the ensemble-averaged state).
std::string format_timeseries_csv(const EnsembleStatistics& stats);
void write_timeseries_csv(const std::filesystem::path& path, const EnsembleStatistics& stats);

/// One line of the sweep summary: p_trap at the final time.
struct SummaryRow {
    std::string model;
    double tau_c = 0.0;
    double temperature = 0.0;
    int initial_site = 0;
    std::size_t n_trajectories = 0;
    double t_final = 0.0;
    double p_trap_mean = 0.0;
    double p_trap_sd = 0.0;
    double p_trap_se = 0.0;
    std::string series;  // time-series file name
};

SummaryRow summary_row(const EnsembleStatistics& stats);
std::string format_summary_csv(const std::vector<SummaryRow>& rows);

/// Comma-separated table with a header row. Cells are kept as text.
class CsvTable {
public:
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::string origin;

    bool has(const std::string& column) const;
    std::size_t index(const std::string& column) const;
    std::vector<double> numbers(const std::string& column) const;
    std::vector<std::string> text(const std::string& column) const;
};

/// Requires a header and rows of equal width; errors name the line.
CsvTable parse_csv(const std::string& text, const std::string& origin = "<string>");
CsvTable read_csv(const std::filesystem::path& path);

std::vector<SummaryRow> summary_rows(const CsvTable& table);

/// Writes through a sibling temporary and a rename, so readers never see a partial file.
void write_text_file(const std::filesystem::path& path, const std::string& content);

/// Shortest round-trip decimal representation used by every writer.
std::string format_double(double value);

}  // namespace eetsim
