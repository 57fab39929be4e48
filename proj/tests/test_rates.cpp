#include "eetsim/errors.hpp"
#include "eetsim/rates.hpp"
#include "eetsim/units.hpp"

#include <doctest.h>

#include <cmath>

using namespace eetsim;

namespace {

const std::string kData = EETSIM_DATA_DIR;

// 2 Re int_0^t sigma^2 e^{-s/tau} e^{i omega s} ds by composite Simpson.
double gamma_by_quadrature(double omega, double t, double sigma, double tau) {
    const int n = 20000;
    const double h = t / n;
    double sum = 0.0;
    for (int k = 0; k <= n; ++k) {
        const double s = k * h;
        const double w = (k == 0 || k == n) ? 1.0 : (k % 2 ? 4.0 : 2.0);
        sum += w * std::exp(-s / tau) * std::cos(omega * s);
    }
    return 2.0 * sigma * sigma * sum * h / 3.0;
}

double golden_argmax(double (*f)(double, double), double omega, double lo, double hi) {
    const double r = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    while (b - a > 1e-10) {
        const double c = b - r * (b - a);
        const double d = a + r * (b - a);
        (f(c, omega) > f(d, omega) ? b : a) = (f(c, omega) > f(d, omega) ? d : c);
    }
    return 0.5 * (a + b);
}

double spectrum_of_tau(double tau, double omega) {
    return lorentzian_spectrum(omega, 1.0, tau);
}

ExcitonBasis fmo_basis() {
    return diagonalize(load_site_hamiltonian(kData + "/fmo_ctepidum_hamiltonian.txt"));
}

}  // namespace

TEST_SUITE("rates") {

TEST_CASE("Lorentzian spectrum values") {
    CHECK(lorentzian_spectrum(0.0, 2.0, 10.0) == doctest::Approx(80.0));
    CHECK(lorentzian_spectrum(0.1, 2.0, 10.0) == doctest::Approx(40.0));
    CHECK(lorentzian_spectrum(-0.1, 2.0, 10.0) == lorentzian_spectrum(0.1, 2.0, 10.0));
}

TEST_CASE("Gamma(t) against direct quadrature of the correlation function") {
    const double sigma = std::sqrt(2.0 * 35.0 * units::kBoltzmann * 77.0);
    for (double tau : {5.0, 45.0, 160.0}) {
        for (double omega : {0.0, 0.01, 0.05, -0.03}) {
            for (double t : {1.0, 20.0, 75.0, 400.0}) {
                CAPTURE(tau);
                CAPTURE(omega);
                CAPTURE(t);
                const double oracle = gamma_by_quadrature(omega, t, sigma, tau);
                CHECK(transition_rate(omega, t, sigma, tau) == doctest::Approx(oracle).epsilon(1e-8).scale(1.0));
            }
        }
    }
}

TEST_CASE("Gamma(t) limits") {
    CHECK(transition_rate(0.03, 0.0, 9.0, 45.0) == 0.0);
    CHECK(transition_rate(0.03, 100 * 45.0, 9.0, 45.0) == doctest::Approx(lorentzian_spectrum(0.03, 9.0, 45.0)));
    // omega = 0: 2 sigma^2 tau (1 - e^{-t/tau}).
    CHECK(transition_rate(0.0, 30.0, 3.0, 45.0) == doctest::Approx(2 * 9.0 * 45.0 * (1 - std::exp(-30.0 / 45.0))));
}

TEST_CASE("Gamma(t) approaches J inside the decaying envelope") {
    const double sigma = 15.0;
    for (double tau : {10.0, 45.0, 120.0}) {
        for (double omega : {0.005, 0.03, 0.1}) {
            const double j = lorentzian_spectrum(omega, sigma, tau);
            const double x = tau * omega;
            for (double t = 0.0; t <= 2000.0; t += 7.0) {
                const double bound = 2 * sigma * sigma * tau * std::exp(-t / tau) * std::sqrt(1 + x * x) / (1 + x * x);
                CHECK(std::abs(transition_rate(omega, t, sigma, tau) - j) <= bound * (1 + 1e-12) + 1e-12);
            }
        }
    }
}

TEST_CASE("J is maximized over tau_c at 1/omega") {
    for (double omega : {0.01, 0.0333, 0.066}) {
        CHECK(golden_argmax(spectrum_of_tau, omega, 0.1, 1000.0) == doctest::Approx(1.0 / omega).epsilon(1e-6));
    }
    CHECK(optimal_tau_c_for_gap(177.0) == doctest::Approx(29.99).epsilon(1e-3));
    CHECK(optimal_tau_c_for_gap(-177.0) == optimal_tau_c_for_gap(177.0));
}

TEST_CASE("optimal tau_c band for a spectrum covering 90..350 cm^-1") {
    Eigen::MatrixXd m = Eigen::Vector3d(0.0, 90.0, 350.0).asDiagonal();
    const OptimalTauC opt = optimal_tau_c(diagonalize(SiteHamiltonian(m)));
    CHECK(opt.min == doctest::Approx(units::kHbar / 350.0));
    CHECK(opt.max == doctest::Approx(units::kHbar / 90.0));
    CHECK(opt.min == doctest::Approx(15.2).epsilon(0.01));
    CHECK(opt.max == doctest::Approx(59.0).epsilon(0.01));
    CHECK(opt.pairs.size() == 3);
}

TEST_CASE("rate table on the bundled Hamiltonian") {
    const ExcitonBasis b = fmo_basis();
    const double times[] = {0.0, 50.0};
    const RateTable t = rate_table(b, NoiseConfig{45.0, 35.0, 77.0}, times);
    CHECK((t.omega + t.omega.transpose()).cwiseAbs().maxCoeff() == 0.0);
    CHECK((t.gamma_inf - t.gamma_inf.transpose()).cwiseAbs().maxCoeff() == 0.0);
    CHECK(t.gamma_at[0].cwiseAbs().maxCoeff() == 0.0);
    CHECK(gamma(1, 0, 50.0, NoiseConfig{45.0, 35.0, 77.0}.sigma(), 45.0, b) == doctest::Approx(t.gamma_at[1](1, 0)));
    const OptimalTauC opt = optimal_tau_c(b);
    CHECK(opt.min >= units::kHbar / 350.0);
    CHECK(opt.max <= units::kHbar / 90.0);
}

TEST_CASE("degenerate or out-of-band spectra are errors") {
    CHECK_THROWS_AS(optimal_tau_c(diagonalize(SiteHamiltonian(Eigen::MatrixXd::Identity(3, 3)))), InputError);
    Eigen::MatrixXd m = Eigen::Vector2d(0.0, 10.0).asDiagonal();
    CHECK_THROWS_AS(optimal_tau_c(diagonalize(SiteHamiltonian(m))), InputError);
    CHECK_THROWS_AS(rate_table(fmo_basis(), NoiseConfig{-1.0, 35.0, 77.0}), InputError);
}

}  // TEST_SUITE
