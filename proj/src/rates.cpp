#include "eetsim/rates.hpp"

#include "eetsim/errors.hpp"
#include "eetsim/units.hpp"

#include <cmath>
#include <limits>

namespace eetsim {

double lorentzian_spectrum(double omega, double sigma, double tau_c) {
    return 2.0 * sigma * sigma * tau_c / (1.0 + tau_c * tau_c * omega * omega);
}

double transition_rate(double omega, double t, double sigma, double tau_c) {
    // 2 Delta0^2 [tau_c + tau_c^2 e^{-t/tau_c} (omega sin - cos / tau_c)] / (1 + tau_c^2 omega^2),
    // with J(omega) factored out so the two terms cancel exactly at t = 0.
    const double bracket = std::exp(-t / tau_c) * (tau_c * omega * std::sin(omega * t) - std::cos(omega * t));
    return lorentzian_spectrum(omega, sigma, tau_c) * (1.0 + bracket);
}

double exciton_frequency(const ExcitonBasis& basis, int alpha, int beta) {
    return (basis.energies[alpha] - basis.energies[beta]) / units::kHbar;
}

double gamma(int alpha, int beta, double t, double sigma, double tau_c, const ExcitonBasis& basis) {
    return transition_rate(exciton_frequency(basis, alpha, beta), t, sigma, tau_c);
}

RateTable rate_table(const ExcitonBasis& basis, const NoiseConfig& noise, std::span<const double> times) {
    noise.validate();
    const int n = basis.size();
    const double sigma = noise.sigma();
    RateTable table;
    table.omega.resize(n, n);
    table.gamma_inf.resize(n, n);
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
            table.omega(a, b) = exciton_frequency(basis, a, b);
            table.gamma_inf(a, b) = lorentzian_spectrum(table.omega(a, b), sigma, noise.tau_c);
        }
    }
    for (double t : times) {
        Eigen::MatrixXd g(n, n);
        for (int a = 0; a < n; ++a) {
            for (int b = 0; b < n; ++b) {
                g(a, b) = transition_rate(table.omega(a, b), t, sigma, noise.tau_c);
            }
        }
        table.times.push_back(t);
        table.gamma_at.push_back(std::move(g));
    }
    return table;
}

double optimal_tau_c_for_gap(double gap_cm) {
    return units::kHbar / std::abs(gap_cm);
}

OptimalTauC optimal_tau_c(const ExcitonBasis& basis, double band_lo, double band_hi) {
    const int n = basis.size();
    constexpr double kDegenerate = 1e-9;  // cm^-1
    const double lo = band_lo - 1e-6;     // band edges are inclusive up to rounding in the gaps
    const double hi = band_hi + 1e-6;
    OptimalTauC out;
    out.per_pair = Eigen::MatrixXd::Constant(n, n, std::numeric_limits<double>::infinity());
    bool any_gap = false;
    out.min = std::numeric_limits<double>::infinity();
    out.max = -std::numeric_limits<double>::infinity();
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
            const double gap = std::abs(basis.energies[a] - basis.energies[b]);
            if (a == b || gap <= kDegenerate) {
                continue;
            }
            any_gap = true;
            out.per_pair(a, b) = optimal_tau_c_for_gap(gap);
            if (a < b && gap >= lo && gap <= hi) {
                out.pairs.emplace_back(a, b);
                out.min = std::min(out.min, out.per_pair(a, b));
                out.max = std::max(out.max, out.per_pair(a, b));
            }
        }
    }
    if (!any_gap) {
        throw InputError("exciton spectrum is fully degenerate");
    }
    if (out.pairs.empty()) {
        throw InputError("no exciton gap falls inside the requested band");
    }
    return out;
}

}  // namespace eetsim
