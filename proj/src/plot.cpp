#include "eetsim/plot.hpp"

#include "eetsim/errors.hpp"
#include "eetsim/survival.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <sstream>

namespace eetsim {

namespace {

constexpr std::array<const char*, 8> kPalette{"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                              "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

// Round step of 1, 2 or 5 times a power of ten giving about `target` intervals.
double nice_step(double span, int target) {
    const double raw = span / target;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    for (double m : {1.0, 2.0, 5.0}) {
        if (m * mag >= raw) {
            return m * mag;
        }
    }
    return 10.0 * mag;
}

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();

    void add(double v) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    bool empty() const { return !(lo <= hi); }
};

}  // namespace

std::string render_svg(const PlotSpec& spec) {
    const auto usable = [&](double y) { return std::isfinite(y) && (!spec.log_y || y > 0.0); };

    Range xr, yr;
    for (const auto& s : spec.series) {
        if (s.x.size() != s.y.size() || (!s.error.empty() && s.error.size() != s.y.size())) {
            throw InputError("series '" + s.label + "' has mismatched lengths");
        }
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !usable(s.y[i])) {
                continue;
            }
            xr.add(s.x[i]);
            const double e = s.error.empty() ? 0.0 : s.error[i];
            for (double y : {s.y[i] - e, s.y[i] + e}) {
                if (usable(y)) {
                    yr.add(spec.log_y ? std::log10(y) : y);
                }
            }
        }
    }
    if (xr.empty() || yr.empty()) {
        throw InputError("nothing to plot: every series is empty");
    }
    if (xr.hi == xr.lo) {
        xr.lo -= 0.5;
        xr.hi += 0.5;
    }
    if (spec.log_y) {
        yr.lo = std::floor(yr.lo);
        yr.hi = std::max(std::ceil(yr.hi), yr.lo + 1.0);
    } else {
        if (yr.hi == yr.lo) {
            yr.lo -= 0.5;
            yr.hi += 0.5;
        }
        const double pad = 0.05 * (yr.hi - yr.lo);
        yr.lo -= pad;
        yr.hi += pad;
    }

    const double left = 70, right = 170, top = 40, bottom = 55;
    const double pw = spec.width - left - right;
    const double ph = spec.height - top - bottom;
    const auto px = [&](double x) { return left + (x - xr.lo) / (xr.hi - xr.lo) * pw; };
    const auto py = [&](double y) {
        const double v = spec.log_y ? std::log10(y) : y;
        return top + (yr.hi - v) / (yr.hi - yr.lo) * ph;
    };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << spec.width << "\" height=\"" << spec.height
        << "\" viewBox=\"0 0 " << spec.width << ' ' << spec.height << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<text x=\"" << num(left + pw / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
        << escape(spec.title) << "</text>\n";
    svg << "<rect x=\"" << num(left) << "\" y=\"" << num(top) << "\" width=\"" << num(pw) << "\" height=\"" << num(ph)
        << "\" fill=\"none\" stroke=\"black\"/>\n";

    // Axes and ticks.
    const double xstep = nice_step(xr.hi - xr.lo, 6);
    for (double x = std::ceil(xr.lo / xstep) * xstep; x <= xr.hi + 1e-9 * xstep; x += xstep) {
        const double X = px(x);
        svg << "<line x1=\"" << num(X) << "\" y1=\"" << num(top + ph) << "\" x2=\"" << num(X) << "\" y2=\""
            << num(top + ph + 5) << "\" stroke=\"black\"/>\n";
        svg << "<text x=\"" << num(X) << "\" y=\"" << num(top + ph + 18) << "\" text-anchor=\"middle\">"
            << tick_label(std::abs(x) < 1e-12 * xstep ? 0.0 : x) << "</text>\n";
    }
    if (spec.log_y) {
        for (int d = static_cast<int>(yr.lo); d <= static_cast<int>(yr.hi); ++d) {
            const double Y = py(std::pow(10.0, d));
            svg << "<line x1=\"" << num(left - 5) << "\" y1=\"" << num(Y) << "\" x2=\"" << num(left) << "\" y2=\""
                << num(Y) << "\" stroke=\"black\"/>\n";
            svg << "<text x=\"" << num(left - 8) << "\" y=\"" << num(Y + 4) << "\" text-anchor=\"end\">1e" << d
                << "</text>\n";
        }
    } else {
        const double ystep = nice_step(yr.hi - yr.lo, 5);
        for (double y = std::ceil(yr.lo / ystep) * ystep; y <= yr.hi + 1e-9 * ystep; y += ystep) {
            const double Y = py(y);
            svg << "<line x1=\"" << num(left - 5) << "\" y1=\"" << num(Y) << "\" x2=\"" << num(left) << "\" y2=\""
                << num(Y) << "\" stroke=\"black\"/>\n";
            svg << "<text x=\"" << num(left - 8) << "\" y=\"" << num(Y + 4) << "\" text-anchor=\"end\">"
                << tick_label(std::abs(y) < 1e-12 * ystep ? 0.0 : y) << "</text>\n";
        }
    }
    svg << "<text x=\"" << num(left + pw / 2) << "\" y=\"" << num(spec.height - 12) << "\" text-anchor=\"middle\">"
        << escape(spec.x_label) << "</text>\n";
    svg << "<text transform=\"translate(16," << num(top + ph / 2) << ") rotate(-90)\" text-anchor=\"middle\">"
        << escape(spec.y_label) << "</text>\n";

    for (std::size_t k = 0; k < spec.series.size(); ++k) {
        const Series& s = spec.series[k];
        const char* colour = kPalette[k % kPalette.size()];
        svg << "<g stroke=\"" << colour << "\" fill=\"" << colour << "\">\n";
        std::vector<double> fx, fy;
        std::ostringstream poly;
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !usable(s.y[i])) {
                continue;
            }
            fx.push_back(s.x[i]);
            fy.push_back(s.y[i]);
            const double X = px(s.x[i]);
            const double Y = py(s.y[i]);
            poly << (poly.tellp() > 0 ? " " : "") << num(X) << ',' << num(Y);
            if (!s.error.empty() && s.error[i] > 0.0) {
                const double lo = s.y[i] - s.error[i];
                const double y1 = usable(lo) ? py(lo) : top + ph;
                const double y2 = py(s.y[i] + s.error[i]);
                svg << "<line x1=\"" << num(X) << "\" y1=\"" << num(y1) << "\" x2=\"" << num(X) << "\" y2=\""
                    << num(y2) << "\"/>\n";
                svg << "<line x1=\"" << num(X - 3) << "\" y1=\"" << num(y1) << "\" x2=\"" << num(X + 3)
                    << "\" y2=\"" << num(y1) << "\"/>\n";
                svg << "<line x1=\"" << num(X - 3) << "\" y1=\"" << num(y2) << "\" x2=\"" << num(X + 3)
                    << "\" y2=\"" << num(y2) << "\"/>\n";
            }
            if (s.markers) {
                svg << "<circle cx=\"" << num(X) << "\" cy=\"" << num(Y) << "\" r=\"3\"/>\n";
            }
        }
        if (!s.markers && !fx.empty()) {
            svg << "<polyline fill=\"none\" points=\"" << poly.str() << "\"/>\n";
        }
        if (s.trend && fx.size() >= 4) {
            const PolynomialFit fit = fit_polynomial(fx, fy, 3);
            const double x0 = *std::min_element(fx.begin(), fx.end());
            const double x1 = *std::max_element(fx.begin(), fx.end());
            std::ostringstream curve;
            constexpr int kSamples = 80;
            for (int i = 0; i <= kSamples; ++i) {
                const double x = x0 + (x1 - x0) * i / kSamples;
                const double y = fit(x);
                if (!usable(y)) {
                    continue;
                }
                curve << (curve.tellp() > 0 ? " " : "") << num(px(x)) << ',' << num(std::clamp(py(y), top, top + ph));
            }
            svg << "<polyline fill=\"none\" stroke-width=\"1.5\" points=\"" << curve.str() << "\"/>\n";
        }
        const double ly = top + 14 + 18 * static_cast<double>(k);
        svg << "<line x1=\"" << num(left + pw + 12) << "\" y1=\"" << num(ly - 4) << "\" x2=\"" << num(left + pw + 32)
            << "\" y2=\"" << num(ly - 4) << "\" stroke-width=\"2\"/>\n";
        svg << "<text x=\"" << num(left + pw + 38) << "\" y=\"" << num(ly) << "\" stroke=\"none\" fill=\"black\">"
            << escape(s.label) << "</text>\n";
        svg << "</g>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

PlotSpec summary_plot(const CsvTable& summary) {
    const auto rows = summary_rows(summary);
    if (rows.empty()) {
        throw InputError(summary.origin + ": summary has no rows");
    }
    std::map<std::string, std::size_t> seen_t, seen_site;
    for (const auto& r : rows) {
        seen_t[format_double(r.temperature)] = 1;
        seen_site[std::to_string(r.initial_site)] = 1;
    }
    const auto label = [&](const SummaryRow& r) {
        std::string out = r.model;
        if (seen_t.size() > 1) {
            out += " T=" + format_double(r.temperature) + "K";
        }
        if (seen_site.size() > 1) {
            out += " site " + std::to_string(r.initial_site);
        }
        return out;
    };

    PlotSpec spec;
    spec.x_label = "tau_c (fs)";
    spec.y_label = "P_trap(" + format_double(rows.front().t_final / 1000.0) + " ps)";
    spec.title = "Trapping probability vs correlation time";
    std::vector<std::string> order;
    std::map<std::string, Series> groups;
    for (const auto& r : rows) {
        const std::string key = label(r);
        if (!groups.count(key)) {
            order.push_back(key);
            groups[key].label = key;
            groups[key].trend = true;
        }
        Series& s = groups[key];
        s.x.push_back(r.tau_c);
        s.y.push_back(r.p_trap_mean);
        s.error.push_back(r.p_trap_se);
    }
    for (const auto& key : order) {
        Series s = groups[key];
        std::vector<std::size_t> idx(s.x.size());
        for (std::size_t i = 0; i < idx.size(); ++i) {
            idx[i] = i;
        }
        std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return s.x[a] < s.x[b]; });
        Series sorted{s.label, {}, {}, {}, true, true};
        for (std::size_t i : idx) {
            sorted.x.push_back(s.x[i]);
            sorted.y.push_back(s.y[i]);
            sorted.error.push_back(s.error[i]);
        }
        spec.series.push_back(std::move(sorted));
    }
    return spec;
}

PlotSpec timeseries_plot(const CsvTable& table, std::string column, bool log_y) {
    if (column.empty()) {
        column = log_y ? "p_surv_mean" : "p_trap_mean";
    }
    const auto t = table.numbers("t");
    const auto y = table.numbers(column);
    if (t.empty()) {
        throw InputError(table.origin + ": time series has no rows");
    }
    PlotSpec spec;
    spec.log_y = log_y;
    spec.title = column + (log_y ? " (log scale)" : "");
    spec.x_label = "t (ps)";
    spec.y_label = column;
    Series s;
    s.label = column;
    s.markers = false;
    for (std::size_t i = 0; i < t.size(); ++i) {
        s.x.push_back(t[i] / 1000.0);
        s.y.push_back(y[i]);
    }
    const std::string sd_column = column.substr(0, column.rfind("_mean")) + "_sd";
    if (column.size() > 5 && column.compare(column.size() - 5, 5, "_mean") == 0 && table.has(sd_column) && !log_y) {
        spec.series.push_back(s);
        const auto sd = table.numbers(sd_column);
        Series upper{column + " + sd", s.x, {}, {}, false, false};
        Series lower{column + " - sd", s.x, {}, {}, false, false};
        for (std::size_t i = 0; i < y.size(); ++i) {
            upper.y.push_back(y[i] + sd[i]);
            lower.y.push_back(y[i] - sd[i]);
        }
        spec.series.push_back(std::move(upper));
        spec.series.push_back(std::move(lower));
        return spec;
    }
    spec.series.push_back(std::move(s));
    return spec;
}

}  // namespace eetsim
