#pragma once

#include "eetsim/model.hpp"
#include "eetsim/noise.hpp"

#include <Eigen/Dense>

#include <span>
#include <utility>
#include <vector>

namespace eetsim {

// Analytic second-order cumulant (Blumen-Silbey) rates for exponentially correlated
// site-energy noise. Frequencies in rad/fs, Delta0 in cm^-1, times in fs.

/// J(omega) = 2 Delta0^2 tau_c / (1 + tau_c^2 omega^2), in cm^-2 fs.
double lorentzian_spectrum(double omega, double sigma, double tau_c);

/// Gamma(t) for a transition of angular frequency omega; tends to J(omega) for t >> tau_c.
double transition_rate(double omega, double t, double sigma, double tau_c);

/// omega_ab = (E_a - E_b) / hbar.
double exciton_frequency(const ExcitonBasis& basis, int alpha, int beta);

double gamma(int alpha, int beta, double t, double sigma, double tau_c, const ExcitonBasis& basis);

struct RateTable {
    Eigen::MatrixXd omega;       // rad/fs, antisymmetric
    Eigen::MatrixXd gamma_inf;   // J(omega_ab)
    std::vector<double> times;   // fs
    std::vector<Eigen::MatrixXd> gamma_at;  // Gamma_ab(times[k])
};

RateTable rate_table(const ExcitonBasis& basis, const NoiseConfig& noise, std::span<const double> times = {});

/// tau_c that maximizes J at the frequency of an energy gap: hbar / |gap|.
double optimal_tau_c_for_gap(double gap_cm);

struct OptimalTauC {
    Eigen::MatrixXd per_pair;                 // hbar / |E_a - E_b|, infinity on the diagonal
    std::vector<std::pair<int, int>> pairs;   // (alpha, beta), alpha < beta, gap inside the band
    double min = 0.0;                         // over `pairs`
    double max = 0.0;
};

/// Throws InputError when every level is degenerate or no gap falls in [band_lo, band_hi].
OptimalTauC optimal_tau_c(const ExcitonBasis& basis, double band_lo = 90.0, double band_hi = 350.0);

}  // namespace eetsim
