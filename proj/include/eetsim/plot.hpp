#pragma once

#include "eetsim/csv.hpp"

#include <string>
#include <vector>

namespace eetsim {

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    std::vector<double> error;  // optional symmetric error bars, same length as y
    bool markers = true;        // points; otherwise a polyline
    bool trend = false;         // overlay a cubic least-squares trend line
};

struct PlotSpec {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_y = false;  // decade ticks; non-positive values are dropped
    int width = 720;
    int height = 480;
    std::vector<Series> series;
};

/// Deterministic SVG text. Throws InputError when there is nothing to draw.
std::string render_svg(const PlotSpec& spec);

/// p_trap(t_final) against tau_c with standard-error bars and cubic trends, one series per
/// (model, temperature, initial site) group present in the summary.
PlotSpec summary_plot(const CsvTable& summary);

/// One time-series column against t in ps. `column` defaults to p_trap_mean, or to
/// p_surv_mean on a log axis when log_y is set.
PlotSpec timeseries_plot(const CsvTable& series, std::string column = "", bool log_y = false);

}  // namespace eetsim
