#pragma once

#include "eetsim/model.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <string>

namespace eetsim {

using Rng = std::mt19937_64;

/// Generator for trajectory `index` of an ensemble seeded with `master_seed`.
Rng make_rng(std::uint64_t master_seed, std::uint64_t index);

/// Site-energy fluctuation parameters. Delta0^2 = 2 E_R k_B T.
struct NoiseConfig {
    double tau_c = 45.0;          // fs
    double e_r = 35.0;            // cm^-1
    double temperature = 77.0;    // K

    double sigma() const;         // Delta0, cm^-1
    void validate() const;
};

enum class SpatialKind { None, Dimerized, Exponential, InverseSquare };

struct SpatialModel {
    SpatialKind kind = SpatialKind::None;
    double rc_angstrom = 10.0;    // exponential only
    double power = 2.0;           // inverse_square only

    static SpatialModel none() { return {}; }
    static SpatialModel dimerized() { return {SpatialKind::Dimerized}; }
    static SpatialModel exponential(double rc) { return {SpatialKind::Exponential, rc}; }
    static SpatialModel inverse_square(double power = 2.0) { return {SpatialKind::InverseSquare, 10.0, power}; }

    /// "none", "dimerized", "exponential:10", "inverse_square", "inverse_square:3".
    /// A bare "exponential" means 10 Angstrom.
    std::string tag() const;
    static SpatialModel parse(const std::string& tag);

    friend bool operator==(const SpatialModel&, const SpatialModel&) = default;
};

/// Equal-time spatial correlation C_ij of site-energy fluctuations with its Cholesky factor.
class CorrelationMatrix {
public:
    /// Validates (symmetric, unit diagonal, entries in [0, 1]) and factorizes.
    static CorrelationMatrix from_matrix(Eigen::MatrixXd matrix, std::string tag = "custom");

    const Eigen::MatrixXd& matrix() const { return matrix_; }
    const Eigen::MatrixXd& cholesky_factor() const { return factor_; }
    const std::string& model_tag() const { return tag_; }
    int size() const { return static_cast<int>(matrix_.rows()); }

private:
    Eigen::MatrixXd matrix_;
    Eigen::MatrixXd factor_;
    std::string tag_;
};

/// Lower-triangular L with L L^T = c. Throws NumericalError when a pivot is <= 1e-12.
Eigen::MatrixXd cholesky(const Eigen::MatrixXd& c);

/// Largest s in [0, 1] (absolute tolerance 1e-4) keeping I + s (pattern - I) positive definite
/// with smallest eigenvalue > 1e-9. Returns 1 when s = 1 already qualifies.
double max_offdiagonal_scale(const Eigen::MatrixXd& pattern);

/// Literal dimerized pattern: C12 = C56 = 0.9, C45 = C47 = 0.4. It is not positive definite;
/// build_correlation_matrix scales its off-diagonal part by max_offdiagonal_scale.
Eigen::MatrixXd dimerized_pattern(int n_sites);

/// Largest beta in (0, 1] (absolute tolerance 1e-4) keeping I + beta / d^power positive
/// definite, with d in nm. Returns 1 when beta = 1 already qualifies.
double find_max_beta(const Geometry& geometry, double power = 2.0);

/// Off-diagonal pattern C_ij = beta / d_ij^power (d in nm), unit diagonal.
Eigen::MatrixXd inverse_power_matrix(const Geometry& geometry, double beta, double power);

CorrelationMatrix build_correlation_matrix(const SpatialModel& model, const Geometry& geometry);

/// Exact stationary Ornstein-Uhlenbeck update of a unit-variance state, in place:
/// u <- a u + sqrt(1 - a^2) xi, a = exp(-dt / tau_c).
void ou_step(Eigen::Ref<Eigen::VectorXd> u, double dt, double tau_c, Rng& rng);

/// Site-energy fluctuations read sequentially on the integrator's step grid.
class NoiseSource {
public:
    virtual ~NoiseSource() = default;
    /// Delta at the current grid point (cm^-1).
    virtual const Eigen::VectorXd& current() const = 0;
    virtual void advance() = 0;
    /// Temporal correlation time in fs; infinity for static or absent noise.
    virtual double correlation_time() const = 0;
};

class ZeroNoise final : public NoiseSource {
public:
    explicit ZeroNoise(int n_sites) : zero_(Eigen::VectorXd::Zero(n_sites)) {}
    const Eigen::VectorXd& current() const override { return zero_; }
    void advance() override {}
    double correlation_time() const override;

private:
    Eigen::VectorXd zero_;
};

/// Sequential generator of Delta(t_k) = Delta0 L u(t_k) on a fixed step grid.
class CorrelatedNoise final : public NoiseSource {
public:
    CorrelatedNoise(const NoiseConfig& config, const CorrelationMatrix& corr, double dt, Rng rng);

    const Eigen::VectorXd& current() const override { return delta_; }
    const Eigen::VectorXd& state() const { return u_; }
    void advance() override;
    double correlation_time() const override { return tau_c_; }

private:
    void mix();

    Eigen::MatrixXd scaled_factor_;  // Delta0 * L
    double tau_c_;
    double decay_;
    double kick_;
    Rng rng_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    Eigen::VectorXd u_;
    Eigen::VectorXd delta_;
};

/// Noise samples on a grid: row k is Delta(k dt) in cm^-1.
struct NoiseField {
    double dt = 0.0;
    Eigen::MatrixXd delta;
};

/// Replays every `stride`-th row of a recorded field, so one realization can drive
/// integrations at dt and at dt / stride.
class RecordedNoise final : public NoiseSource {
public:
    RecordedNoise(const NoiseField& field, double tau_c, std::size_t stride = 1);
    const Eigen::VectorXd& current() const override { return current_; }
    void advance() override;
    double correlation_time() const override { return tau_c_; }

private:
    const NoiseField* field_;
    double tau_c_;
    std::size_t stride_;
    std::size_t row_ = 0;
    Eigen::VectorXd current_;
};

NoiseField sample_field(const NoiseConfig& config, const CorrelationMatrix& corr, std::size_t n_steps, double dt,
                        std::uint64_t seed);

}  // namespace eetsim
