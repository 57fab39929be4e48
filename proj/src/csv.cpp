#include "eetsim/csv.hpp"

#include "eetsim/errors.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

namespace eetsim {

std::string format_double(double value) {
    char buf[32];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
    if (ec != std::errc{}) {
        throw NumericalError("cannot format number");
    }
    return std::string(buf, end);
}

std::string format_timeseries_csv(const EnsembleStatistics& stats) {
    const Eigen::MatrixXd sd = stats.sd();
    const Eigen::MatrixXd se = stats.se();
    Eigen::VectorXd coherence_of_mean = stats.coherence_of_mean();
    if (coherence_of_mean.size() != stats.mean.rows()) {
        coherence_of_mean = Eigen::VectorXd::Zero(stats.mean.rows());
    }
    std::ostringstream out;
    out << "t,p_trap_mean,p_trap_sd,p_trap_se,p_surv_mean,coherence_mean,coherence_sd,displacement_mean,"
           "displacement_sd";
    for (int j = 1; j <= stats.n_sites; ++j) {
        out << ",pop_" << j;
    }
    out << ",coherence_of_mean\n";
    for (Eigen::Index r = 0; r < stats.mean.rows(); ++r) {
        out << format_double(stats.time[r]) << ',' << format_double(stats.mean(r, kPTrap)) << ','
            << format_double(sd(r, kPTrap)) << ',' << format_double(se(r, kPTrap)) << ','
            << format_double(stats.mean(r, kPSurvival)) << ',' << format_double(stats.mean(r, kCoherence)) << ','
            << format_double(sd(r, kCoherence)) << ',' << format_double(stats.mean(r, kDisplacement)) << ','
            << format_double(sd(r, kDisplacement));
        for (int j = 0; j < stats.n_sites; ++j) {
            out << ',' << format_double(stats.mean(r, kFirstPopulation + j));
        }
        out << ',' << format_double(coherence_of_mean[r]) << "\n";
    }
    return out.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) {
            throw InputError("cannot write " + tmp.string());
        }
        out << content;
        if (!out) {
            throw InputError("write failed: " + tmp.string());
        }
    }
    std::filesystem::rename(tmp, path);
}

void write_timeseries_csv(const std::filesystem::path& path, const EnsembleStatistics& stats) {
    write_text_file(path, format_timeseries_csv(stats));
}

SummaryRow summary_row(const EnsembleStatistics& stats) {
    const Eigen::Index last = stats.mean.rows() - 1;
    SummaryRow row;
    row.n_trajectories = stats.n_trajectories;
    row.t_final = stats.time[last];
    row.p_trap_mean = stats.mean(last, kPTrap);
    row.p_trap_sd = stats.sd()(last, kPTrap);
    row.p_trap_se = stats.se()(last, kPTrap);
    return row;
}

std::string format_summary_csv(const std::vector<SummaryRow>& rows) {
    std::ostringstream out;
    out << "model,tau_c,temperature,initial_site,n_trajectories,t_final,p_trap_mean,p_trap_sd,p_trap_se,series\n";
    for (const auto& r : rows) {
        out << r.model << ',' << format_double(r.tau_c) << ',' << format_double(r.temperature) << ','
            << r.initial_site << ',' << r.n_trajectories << ',' << format_double(r.t_final) << ','
            << format_double(r.p_trap_mean) << ',' << format_double(r.p_trap_sd) << ','
            << format_double(r.p_trap_se) << ',' << r.series << "\n";
    }
    return out.str();
}

bool CsvTable::has(const std::string& column) const {
    return std::find(header.begin(), header.end(), column) != header.end();
}

std::size_t CsvTable::index(const std::string& column) const {
    const auto it = std::find(header.begin(), header.end(), column);
    if (it == header.end()) {
        throw InputError(origin + ": missing column '" + column + "'");
    }
    return static_cast<std::size_t>(it - header.begin());
}

std::vector<double> CsvTable::numbers(const std::string& column) const {
    const std::size_t c = index(column);
    std::vector<double> out;
    out.reserve(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const std::string& cell = rows[r][c];
        double value = 0.0;
        const auto [end, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
        if (ec != std::errc{} || end != cell.data() + cell.size()) {
            throw InputError(origin + ":" + std::to_string(r + 2) + ": column '" + column + "': not a number: '" +
                             cell + "'");
        }
        out.push_back(value);
    }
    return out;
}

std::vector<std::string> CsvTable::text(const std::string& column) const {
    const std::size_t c = index(column);
    std::vector<std::string> out;
    out.reserve(rows.size());
    for (const auto& row : rows) {
        out.push_back(row[c]);
    }
    return out;
}

CsvTable parse_csv(const std::string& text, const std::string& origin) {
    CsvTable table;
    table.origin = origin;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    const auto split = [](const std::string& s) {
        std::vector<std::string> cells;
        std::size_t start = 0;
        while (true) {
            const auto comma = s.find(',', start);
            cells.push_back(s.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
            if (comma == std::string::npos) {
                return cells;
            }
            start = comma + 1;
        }
    };
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        auto cells = split(line);
        if (table.header.empty()) {
            table.header = std::move(cells);
            continue;
        }
        if (cells.size() != table.header.size()) {
            throw InputError(origin + ":" + std::to_string(line_no) + ": expected " +
                             std::to_string(table.header.size()) + " fields, found " + std::to_string(cells.size()));
        }
        table.rows.push_back(std::move(cells));
    }
    if (table.header.empty()) {
        throw InputError(origin + ": empty CSV");
    }
    return table;
}

CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw InputError("cannot open " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_csv(buf.str(), path.string());
}

std::vector<SummaryRow> summary_rows(const CsvTable& table) {
    const auto models = table.text("model");
    const auto tau = table.numbers("tau_c");
    const auto temp = table.numbers("temperature");
    const auto site = table.numbers("initial_site");
    const auto n = table.numbers("n_trajectories");
    const auto t_final = table.numbers("t_final");
    const auto mean = table.numbers("p_trap_mean");
    const auto sd = table.numbers("p_trap_sd");
    const auto se = table.numbers("p_trap_se");
    const auto series = table.text("series");
    std::vector<SummaryRow> rows;
    for (std::size_t i = 0; i < models.size(); ++i) {
        rows.push_back({models[i], tau[i], temp[i], static_cast<int>(site[i]), static_cast<std::size_t>(n[i]),
                        t_final[i], mean[i], sd[i], se[i], series[i]});
    }
    return rows;
}

}  // namespace eetsim
