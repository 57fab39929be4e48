#include "eetsim/dynamics.hpp"

#include "eetsim/errors.hpp"
#include "eetsim/units.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <sstream>

#include <unsupported/Eigen/MatrixFunctions>

namespace eetsim {

using Complex = std::complex<double>;

void RateParams::validate(int n_sites) const {
    if (!(gamma_l >= 0.0) || !(gamma_t >= 0.0)) {
        throw InputError("loss and trapping rates must be non-negative");
    }
    if (trap_site < 1 || trap_site > n_sites) {
        throw InputError("trap site " + std::to_string(trap_site) + " is not a site");
    }
}

Liouvillian::Liouvillian(const SiteHamiltonian& h, const RateParams& rates, double energy_reference)
    : n_sites_(h.n_sites()),
      hamiltonian_(Eigen::MatrixXd::Zero(h.n_sites() + 2, h.n_sites() + 2)),
      decay_(Eigen::VectorXd::Zero(h.n_sites() + 2)),
      gamma_l_(rates.gamma_l / units::kFsPerPs),
      gamma_t_(rates.gamma_t / units::kFsPerPs),
      trap_site_(rates.trap_site) {
    rates.validate(n_sites_);
    hamiltonian_.block(1, 1, n_sites_, n_sites_) = h.matrix();
    hamiltonian_.diagonal().segment(1, n_sites_).array() -= energy_reference;
    decay_.segment(1, n_sites_).setConstant(gamma_l_);
    decay_[trap_site_] += gamma_t_;
}

void Liouvillian::apply(const Eigen::MatrixXcd& rho, const Eigen::VectorXd& delta, Eigen::MatrixXcd& out) const {
    const int d = dim();
    // H rho, with the diagonal noise folded in row by row.
    out.noalias() = hamiltonian_ * rho;
    for (int j = 1; j <= n_sites_; ++j) {
        out.row(j) += delta[j - 1] * rho.row(j);
    }
    // For Hermitian rho, rho H = (H rho)^dagger, so [H, rho] = C - C^dagger.
    constexpr Complex kMinusIOverHbar{0.0, -1.0 / units::kHbar};
    for (int b = 0; b < d; ++b) {
        out(b, b) = 2.0 * out(b, b).imag() / units::kHbar;
        for (int a = b + 1; a < d; ++a) {
            const Complex value = kMinusIOverHbar * (out(a, b) - std::conj(out(b, a)));
            out(a, b) = value;
            out(b, a) = std::conj(value);
        }
    }
    // Anticommutator parts of the dissipators.
    for (int b = 0; b < d; ++b) {
        for (int a = 0; a < d; ++a) {
            out(a, b) -= 0.5 * (decay_[a] + decay_[b]) * rho(a, b);
        }
    }
    // Jump terms.
    double excited = 0.0;
    for (int j = 1; j <= n_sites_; ++j) {
        excited += rho(j, j).real();
    }
    out(0, 0) += gamma_l_ * excited;
    const int trap = trap_index(n_sites_);
    out(trap, trap) += gamma_t_ * rho(trap_site_, trap_site_);
}

Eigen::MatrixXcd Liouvillian::operator()(const Eigen::MatrixXcd& rho, const Eigen::VectorXd& delta) const {
    Eigen::MatrixXcd out(dim(), dim());
    apply(rho, delta, out);
    return out;
}

std::string integrator_name(Integrator method) {
    return method == Integrator::Split ? "split" : "abm4";
}

Integrator parse_integrator(const std::string& name) {
    if (name == "split") {
        return Integrator::Split;
    }
    if (name == "abm4") {
        return Integrator::Abm4;
    }
    throw InputError("unknown integrator '" + name + "' (expected split or abm4)");
}

namespace {

long whole_multiple(double interval, double dt, const char* what) {
    const double ratio = interval / dt;
    const double rounded = std::round(ratio);
    if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-9 * std::max(1.0, ratio)) {
        std::ostringstream msg;
        msg << what << " (" << interval << " fs) must be a positive whole multiple of dt (" << dt << " fs)";
        throw InputError(msg.str());
    }
    return static_cast<long>(rounded);
}

}  // namespace

void PropagationSettings::validate(double tau_c) const {
    if (!(dt > 0.0)) {
        throw InputError("dt must be positive");
    }
    if (dt > 2.0) {
        throw InputError("dt must not exceed 2 fs");
    }
    if (dt > tau_c / 10.0 * (1.0 + 1e-12)) {
        std::ostringstream msg;
        msg << "dt = " << dt << " fs exceeds tau_c / 10 = " << tau_c / 10.0 << " fs";
        throw InputError(msg.str());
    }
    whole_multiple(t_final, dt, "t_final");
    const long stride_steps = whole_multiple(record_interval, dt, "record interval");
    if (whole_multiple(t_final, dt, "t_final") % stride_steps != 0) {
        throw InputError("t_final must be a whole multiple of the record interval");
    }
}

long PropagationSettings::steps() const {
    return whole_multiple(t_final, dt, "t_final");
}

long PropagationSettings::stride() const {
    return whole_multiple(record_interval, dt, "record interval");
}

void InvariantReport::merge(const InvariantReport& other) {
    max_trace_error = std::max(max_trace_error, other.max_trace_error);
    max_hermiticity_error = std::max(max_hermiticity_error, other.max_hermiticity_error);
    min_eigenvalue = std::min(min_eigenvalue, other.min_eigenvalue);
}

bool InvariantReport::within(double trace_tol, double herm_tol, double eig_tol) const {
    return max_trace_error < trace_tol && max_hermiticity_error < herm_tol && min_eigenvalue > -eig_tol;
}

InvariantReport inspect_state(const Eigen::MatrixXcd& rho) {
    InvariantReport report;
    report.max_trace_error = std::abs(rho.trace() - Complex(1.0, 0.0));
    report.max_hermiticity_error = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
    const Eigen::MatrixXcd hermitian_part = 0.5 * (rho + rho.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(hermitian_part, Eigen::EigenvaluesOnly);
    report.min_eigenvalue = solver.eigenvalues()[0];
    return report;
}

namespace {

void run_abm4(Eigen::MatrixXcd& rho, const Liouvillian& liouvillian, NoiseSource& noise, double h, long n_steps,
              const std::function<void(long)>& on_step) {
    const int n = liouvillian.n_sites();
    const int d = liouvillian.dim();
    // Within step k the noise is frozen at Delta_k. The generator splits into the noise-free
    // part L0 and the diagonal commutator N_k, which is linear, so the Adams sums of N_k over
    // the history collapse to N_k applied to one combination of past states.
    const Eigen::VectorXd no_noise = Eigen::VectorXd::Zero(n);
    std::array<Eigen::MatrixXcd, 4> states, drift;  // [0] = step k, [1] = k - 1, ...
    for (int j = 0; j < 4; ++j) {
        states[j].resize(d, d);
        drift[j].resize(d, d);
    }
    Eigen::MatrixXcd k1(d, d), k2(d, d), k3(d, d), k4(d, d), stage(d, d), combo(d, d), predicted(d, d),
        drift_pred(d, d);

    const auto add_noise = [&](const Eigen::VectorXd& delta, const Eigen::MatrixXcd& x, Eigen::MatrixXcd& out) {
        const double scale = 1.0 / units::kHbar;
        for (int b = 1; b <= n; ++b) {
            for (int a = 1; a <= n; ++a) {
                out(a, b) += Complex(0.0, -scale * (delta[a - 1] - delta[b - 1])) * x(a, b);
            }
        }
    };

    states[0] = rho;
    liouvillian.apply(rho, no_noise, drift[0]);

    const long bootstrap = std::min<long>(3, n_steps);
    for (long step = 0; step < n_steps; ++step) {
        const Eigen::VectorXd& delta = noise.current();
        if (step < bootstrap) {
            liouvillian.apply(rho, delta, k1);
            stage = rho + (0.5 * h) * k1;
            liouvillian.apply(stage, delta, k2);
            stage = rho + (0.5 * h) * k2;
            liouvillian.apply(stage, delta, k3);
            stage = rho + h * k3;
            liouvillian.apply(stage, delta, k4);
            rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        } else {
            combo = 55.0 * states[0] - 59.0 * states[1] + 37.0 * states[2] - 9.0 * states[3];
            predicted = 55.0 * drift[0] - 59.0 * drift[1] + 37.0 * drift[2] - 9.0 * drift[3];
            add_noise(delta, combo, predicted);
            predicted = rho + (h / 24.0) * predicted;
            liouvillian.apply(predicted, no_noise, drift_pred);
            combo = 9.0 * predicted + 19.0 * states[0] - 5.0 * states[1] + states[2];
            stage = 9.0 * drift_pred + 19.0 * drift[0] - 5.0 * drift[1] + drift[2];
            add_noise(delta, combo, stage);
            rho += (h / 24.0) * stage;
        }
        noise.advance();
        std::rotate(states.rbegin(), states.rbegin() + 1, states.rend());
        std::rotate(drift.rbegin(), drift.rbegin() + 1, drift.rend());
        states[0] = rho;
        liouvillian.apply(rho, no_noise, drift[0]);
        on_step(step + 1);
    }
}

// Exact noise-free step of the site block, S -> V S V^+, and the integrated outflow
// weights: ground gains tr(W_l S), the trap tr(W_t S).
struct SplitStep {
    Eigen::MatrixXcd v;
    Eigen::MatrixXcd w_loss;
    Eigen::MatrixXcd w_trap;

    SplitStep(const Liouvillian& liouvillian, double h) {
        const int n = liouvillian.n_sites();
        Eigen::MatrixXcd generator = Complex(0.0, -1.0 / units::kHbar) * liouvillian.site_hamiltonian().cast<Complex>();
        generator.diagonal().array() -= 0.5 * liouvillian.gamma_l();
        generator(liouvillian.trap_site() - 1, liouvillian.trap_site() - 1) -= 0.5 * liouvillian.gamma_t();
        v = (generator * h).exp();
        // gamma_l V(s)^+ V(s) integrated over the step by 8-point Gauss-Legendre.
        static constexpr std::array<double, 8> nodes{-0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
                                                     -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
                                                     0.7966664774136267,  0.9602898564975363};
        static constexpr std::array<double, 8> weights{0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
                                                       0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
                                                       0.2223810344533745, 0.1012285362903763};
        w_loss = Eigen::MatrixXcd::Zero(n, n);
        for (std::size_t q = 0; q < nodes.size(); ++q) {
            const double s = 0.5 * h * (nodes[q] + 1.0);
            const Eigen::MatrixXcd vs = (generator * s).exp();
            w_loss += (0.5 * h * weights[q] * liouvillian.gamma_l()) * (vs.adjoint() * vs);
        }
        // The remaining outflow goes to the trap, so the trace is conserved exactly.
        w_trap = Eigen::MatrixXcd::Identity(n, n) - v.adjoint() * v - w_loss;
    }
};

void run_split(Eigen::MatrixXcd& rho, const Liouvillian& liouvillian, NoiseSource& noise, double h, long n_steps,
               const std::function<void(long)>& on_step) {
    const int n = liouvillian.n_sites();
    const int trap = trap_index(n);
    const SplitStep step_data(liouvillian, h);
    Eigen::MatrixXcd block = rho.block(1, 1, n, n);
    Eigen::MatrixXcd scratch(n, n);
    Eigen::VectorXcd phase(n);

    const auto half_phase = [&](const Eigen::VectorXd& delta) {
        for (int j = 0; j < n; ++j) {
            phase[j] = std::polar(1.0, -0.5 * h * delta[j] / units::kHbar);
        }
        block = phase.asDiagonal() * block * phase.conjugate().asDiagonal();
    };

    for (long step = 0; step < n_steps; ++step) {
        const Eigen::VectorXd& delta = noise.current();
        half_phase(delta);
        rho(0, 0) += (step_data.w_loss.cwiseProduct(block.transpose())).sum().real();
        rho(trap, trap) += (step_data.w_trap.cwiseProduct(block.transpose())).sum().real();
        scratch.noalias() = step_data.v * block;
        block.noalias() = scratch * step_data.v.adjoint();
        half_phase(delta);
        noise.advance();
        rho.block(1, 1, n, n) = block;
        on_step(step + 1);
    }
}

}  // namespace

TrajectoryResult propagate(int initial_site, const Liouvillian& liouvillian, NoiseSource& noise,
                           const PropagationSettings& settings, const Geometry& geometry) {
    const int n = liouvillian.n_sites();
    if (initial_site < 1 || initial_site > n) {
        throw InputError("initial site " + std::to_string(initial_site) + " out of range");
    }
    if (geometry.n_sites() != n) {
        throw InputError("geometry and Hamiltonian disagree on the number of sites");
    }
    settings.validate(noise.correlation_time());
    const long n_steps = settings.steps();
    const long stride = settings.stride();
    const double h = settings.dt;
    const int d = liouvillian.dim();

    TrajectoryResult result;
    const long n_records = n_steps / stride + 1;
    result.time.resize(n_records);
    result.values.resize(n_records, kFirstPopulation + n);
    result.site_coherences.resize(n_records, n * (n - 1) / 2);

    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(d, d);
    rho(initial_site, initial_site) = 1.0;

    auto record = [&](long step) {
        const long row = step / stride;
        result.time[row] = static_cast<double>(step) * h;
        const Observables obs = observables(rho, geometry, initial_site);
        result.values(row, kPTrap) = obs.p_trap;
        result.values(row, kPSurvival) = obs.p_survival;
        result.values(row, kCoherence) = obs.total_coherence;
        result.values(row, kDisplacement) = obs.mean_displacement;
        for (int j = 1; j <= n; ++j) {
            result.values(row, kFirstPopulation + j - 1) = rho(j, j).real();
        }
        for (int i = 1, c = 0; i <= n; ++i) {
            for (int j = i + 1; j <= n; ++j) {
                result.site_coherences(row, c++) = rho(i, j);
            }
        }
        if (settings.check_invariants) {
            const InvariantReport now = inspect_state(rho);
            result.invariants.merge(now);
            if (!now.within(10 * kTraceTolerance, 10 * kHermiticityTolerance, 10 * kEigenvalueTolerance)) {
                std::ostringstream msg;
                msg << "state invariant violated at t = " << result.time[row] << " fs (trace error "
                    << now.max_trace_error << ", hermiticity error " << now.max_hermiticity_error
                    << ", min eigenvalue " << now.min_eigenvalue << "); dt = " << h << " fs is likely too large";
                throw NumericalError(msg.str());
            }
        }
    };

    record(0);
    const std::function<void(long)> on_step = [&](long step) {
        if (step % stride == 0) {
            record(step);
        }
    };
    if (settings.method == Integrator::Split) {
        run_split(rho, liouvillian, noise, h, n_steps, on_step);
    } else {
        run_abm4(rho, liouvillian, noise, h, n_steps, on_step);
    }
    result.final_state = rho;
    return result;
}

}  // namespace eetsim
