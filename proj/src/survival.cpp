#include "eetsim/survival.hpp"

#include "eetsim/errors.hpp"

#include <cmath>
#include <sstream>
#include <vector>

namespace eetsim {

double PolynomialFit::operator()(double x) const {
    double acc = 0.0;
    for (Eigen::Index i = coefficients.size() - 1; i >= 0; --i) {
        acc = acc * x + coefficients[i];
    }
    return acc;
}

PolynomialFit fit_polynomial(std::span<const double> x, std::span<const double> y, int degree) {
    if (x.size() != y.size()) {
        throw InputError("fit_polynomial: x and y differ in length");
    }
    if (degree < 0 || x.size() < static_cast<std::size_t>(degree) + 1) {
        throw InputError("fit_polynomial: not enough points for the requested degree");
    }
    const auto m = static_cast<Eigen::Index>(x.size());
    double scale = 0.0;
    for (double v : x) {
        scale = std::max(scale, std::abs(v));
    }
    if (scale == 0.0) {
        scale = 1.0;
    }
    Eigen::MatrixXd vandermonde(m, degree + 1);
    Eigen::VectorXd rhs(m);
    for (Eigen::Index r = 0; r < m; ++r) {
        const double xs = x[r] / scale;
        double p = 1.0;
        for (int c = 0; c <= degree; ++c) {
            vandermonde(r, c) = p;
            p *= xs;
        }
        rhs[r] = y[r];
    }
    const Eigen::VectorXd scaled = vandermonde.colPivHouseholderQr().solve(rhs);

    PolynomialFit fit;
    fit.coefficients.resize(degree + 1);
    double factor = 1.0;
    for (int c = 0; c <= degree; ++c) {
        fit.coefficients[c] = scaled[c] / factor;
        factor *= scale;
    }
    fit.rms_residual = std::sqrt((vandermonde * scaled - rhs).squaredNorm() / static_cast<double>(m));
    fit.n_points = x.size();
    fit.x_begin = x.front();
    fit.x_end = x.back();
    return fit;
}

namespace {

PolynomialFit fit_log_window(std::span<const double> time, std::span<const double> p_survival, Window window,
                             int degree, const char* name) {
    std::vector<double> xs;
    std::vector<double> ys;
    for (std::size_t i = 0; i < time.size(); ++i) {
        if (time[i] < window.begin || time[i] > window.end) {
            continue;
        }
        if (!(p_survival[i] > 0.0)) {
            break;
        }
        xs.push_back(time[i]);
        ys.push_back(std::log(p_survival[i]));
    }
    constexpr std::size_t kMinPoints = 5;
    if (xs.size() < kMinPoints) {
        std::ostringstream msg;
        msg << name << " window [" << window.begin << ", " << window.end << "] fs has " << xs.size()
            << " usable points; need at least " << kMinPoints;
        throw InputError(msg.str());
    }
    return fit_polynomial(xs, ys, degree);
}

}  // namespace

SurvivalFit fit_survival(std::span<const double> time, std::span<const double> p_survival, Window short_window,
                         Window long_window) {
    if (time.size() != p_survival.size()) {
        throw InputError("fit_survival: time and survival series differ in length");
    }
    SurvivalFit fit;
    fit.short_window = fit_log_window(time, p_survival, short_window, 3, "short");
    fit.long_window = fit_log_window(time, p_survival, long_window, 1, "long");
    return fit;
}

SurvivalFit fit_survival(const EnsembleStatistics& stats, Window short_window, Window long_window) {
    const Eigen::VectorXd p = stats.mean.col(kPSurvival);
    return fit_survival(std::span<const double>(stats.time.data(), static_cast<std::size_t>(stats.time.size())),
                        std::span<const double>(p.data(), static_cast<std::size_t>(p.size())), short_window,
                        long_window);
}

}  // namespace eetsim
