#pragma once

#include "eetsim/model.hpp"
#include "eetsim/noise.hpp"
#include "eetsim/observables.hpp"

#include <Eigen/Dense>

#include <limits>
#include <string>

namespace eetsim {

/// Radiative loss from every site to the ground state and trapping from `trap_site`.
struct RateParams {
    double gamma_l = 1e-3;  // ps^-1 (1 ns^-1)
    double gamma_t = 1.0;   // ps^-1
    int trap_site = 3;

    void validate(int n_sites) const;
};

/// Right-hand side of the stochastic master equation
///   d rho / dt = -i/hbar [H_el + diag(0, Delta, 0), rho]
///                + gamma_l sum_j D[|0><j|] rho + gamma_t D[|trap><trap_site|] rho.
/// Site energies are measured from `energy_reference`; ground and trap sit at 0.
class Liouvillian {
public:
    Liouvillian(const SiteHamiltonian& h, const RateParams& rates, double energy_reference = 0.0);

    int n_sites() const { return n_sites_; }
    int dim() const { return n_sites_ + 2; }

    /// out = L(rho). `rho` must be Hermitian; `out` must not alias `rho`.
    void apply(const Eigen::MatrixXcd& rho, const Eigen::VectorXd& delta, Eigen::MatrixXcd& out) const;
    Eigen::MatrixXcd operator()(const Eigen::MatrixXcd& rho, const Eigen::VectorXd& delta) const;

    /// Site block of the coherent Hamiltonian, cm^-1, shifted by the energy reference.
    Eigen::MatrixXd site_hamiltonian() const { return hamiltonian_.block(1, 1, n_sites_, n_sites_); }
    double gamma_l() const { return gamma_l_; }
    double gamma_t() const { return gamma_t_; }
    int trap_site() const { return trap_site_; }

private:
    int n_sites_;
    Eigen::MatrixXd hamiltonian_;  // embedded, dim x dim
    Eigen::VectorXd decay_;        // total outflow rate of each basis state, fs^-1
    double gamma_l_;               // fs^-1
    double gamma_t_;               // fs^-1
    int trap_site_;
};

enum class Integrator {
    Split,  // exact noise-free step between two half-step noise phases
    Abm4,   // Adams-Bashforth-Moulton predictor-corrector on the full density matrix
};

std::string integrator_name(Integrator method);
Integrator parse_integrator(const std::string& name);

struct PropagationSettings {
    double t_final = 20000.0;        // fs
    double dt = 1.0;                 // fs
    double record_interval = 10.0;   // fs
    bool check_invariants = true;
    Integrator method = Integrator::Split;

    /// dt <= 2 fs, dt <= tau_c / 10, and both intervals whole multiples of dt.
    void validate(double tau_c = std::numeric_limits<double>::infinity()) const;
    long steps() const;
    long stride() const;
};

/// Worst invariant violations seen on the recording grid.
struct InvariantReport {
    double max_trace_error = 0.0;
    double max_hermiticity_error = 0.0;
    double min_eigenvalue = std::numeric_limits<double>::infinity();

    void merge(const InvariantReport& other);
    bool within(double trace_tol, double herm_tol, double eig_tol) const;
};

inline constexpr double kTraceTolerance = 1e-8;
inline constexpr double kHermiticityTolerance = 1e-10;
inline constexpr double kEigenvalueTolerance = 1e-8;

InvariantReport inspect_state(const Eigen::MatrixXcd& rho);

/// Column layout of per-time series: four scalar observables, then site populations.
enum SeriesColumn : int { kPTrap = 0, kPSurvival = 1, kCoherence = 2, kDisplacement = 3, kFirstPopulation = 4 };

struct TrajectoryResult {
    Eigen::VectorXd time;    // fs
    Eigen::MatrixXd values;  // rows follow `time`, columns follow SeriesColumn
    InvariantReport invariants;
    Eigen::MatrixXcd final_state;
    Eigen::MatrixXcd site_coherences;  // rows follow `time`; rho_ij for site pairs i < j, row-major pair order

    auto p_trap() const { return values.col(kPTrap); }
    auto p_survival() const { return values.col(kPSurvival); }
    auto coherence() const { return values.col(kCoherence); }
    auto displacement() const { return values.col(kDisplacement); }
    auto population(int site) const { return values.col(kFirstPopulation + site - 1); }
};

/// Integrates one noise realization from |initial_site><initial_site|. The noise is held at
/// Delta(t_k) over step k.
///
/// Split: rho <- P V0 P rho P^+ V0^+ P^+ with P = exp(-i Delta h / 2 hbar) and V0 the exact
/// noise-free propagator of the site block; ground and trap gain the exact integrated outflow.
/// Trace, Hermiticity and positivity hold to rounding.
///
/// Abm4: fourth-order Adams-Bashforth-Moulton predictor-corrector started by three classical
/// Runge-Kutta steps, with the frozen Delta_k applied to the whole history.
///
/// Observables are measured relative to `initial_site`. Throws NumericalError when an
/// invariant drifts beyond ten times its tolerance (if checking is enabled).
TrajectoryResult propagate(int initial_site, const Liouvillian& liouvillian, NoiseSource& noise,
                           const PropagationSettings& settings, const Geometry& geometry);

}  // namespace eetsim
