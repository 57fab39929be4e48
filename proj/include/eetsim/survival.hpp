#pragma once

#include "eetsim/ensemble.hpp"

#include <Eigen/Dense>

#include <span>

namespace eetsim {

struct Window {
    double begin = 0.0;  // fs, inclusive
    double end = 0.0;    // fs, inclusive
};

/// Least-squares polynomial y ~ sum_i c_i x^i over the points it was given.
struct PolynomialFit {
    Eigen::VectorXd coefficients;  // c_0 .. c_degree, in powers of the raw x
    double rms_residual = 0.0;
    std::size_t n_points = 0;
    double x_begin = 0.0;
    double x_end = 0.0;

    double operator()(double x) const;
};

/// Requires at least degree + 1 points; x is rescaled internally for conditioning.
PolynomialFit fit_polynomial(std::span<const double> x, std::span<const double> y, int degree);

/// ln P_surv fitted by a cubic on the short window and a line on the long window.
struct SurvivalFit {
    PolynomialFit short_window;
    PolynomialFit long_window;

    /// Asymptotic decay rate beta in P_surv ~ exp(-beta t), fs^-1.
    double decay_rate() const { return -long_window.coefficients[1]; }
};

inline constexpr Window kDefaultShortWindow{0.0, 2000.0};
inline constexpr Window kDefaultLongWindow{10000.0, 20000.0};

/// Points are taken from each window up to the first non-positive P_surv. A window with
/// fewer than 5 usable points is an InputError.
SurvivalFit fit_survival(std::span<const double> time, std::span<const double> p_survival,
                         Window short_window = kDefaultShortWindow, Window long_window = kDefaultLongWindow);
SurvivalFit fit_survival(const EnsembleStatistics& stats, Window short_window = kDefaultShortWindow,
                         Window long_window = kDefaultLongWindow);

}  // namespace eetsim
