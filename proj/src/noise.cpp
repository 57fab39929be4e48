#include "eetsim/noise.hpp"

#include "eetsim/errors.hpp"
#include "eetsim/units.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace eetsim {

Rng make_rng(std::uint64_t master_seed, std::uint64_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(master_seed), static_cast<std::uint32_t>(master_seed >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
    return Rng(seq);
}

double NoiseConfig::sigma() const {
    return std::sqrt(2.0 * e_r * units::kBoltzmann * temperature);
}

void NoiseConfig::validate() const {
    if (!(tau_c > 0.0)) {
        throw InputError("tau_c must be positive");
    }
    if (!(e_r >= 0.0)) {
        throw InputError("reorganization energy must be non-negative");
    }
    if (!(temperature > 0.0)) {
        throw InputError("temperature must be positive");
    }
}

namespace {

std::string format_number(double x) {
    std::ostringstream out;
    out << x;
    return out.str();
}

}  // namespace

std::string SpatialModel::tag() const {
    switch (kind) {
        case SpatialKind::None:
            return "none";
        case SpatialKind::Dimerized:
            return "dimerized";
        case SpatialKind::Exponential:
            return "exponential:" + format_number(rc_angstrom);
        case SpatialKind::InverseSquare:
            return power == 2.0 ? "inverse_square" : "inverse_square:" + format_number(power);
    }
    return "unknown";
}

SpatialModel SpatialModel::parse(const std::string& tag) {
    const auto colon = tag.find(':');
    const std::string name = tag.substr(0, colon);
    const bool has_arg = colon != std::string::npos;
    double arg = 0.0;
    if (has_arg) {
        const std::string text = tag.substr(colon + 1);
        std::size_t used = 0;
        try {
            arg = std::stod(text, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != text.size()) {
            throw InputError("bad spatial model parameter in '" + tag + "'");
        }
    }
    if (name == "none" && !has_arg) {
        return none();
    }
    if (name == "dimerized" && !has_arg) {
        return dimerized();
    }
    if (name == "exponential") {
        if (!has_arg) {
            return exponential(10.0);
        }
        if (!(arg > 0.0)) {
            throw InputError("exponential correlation radius must be positive");
        }
        return exponential(arg);
    }
    if (name == "inverse_square") {
        const double power = has_arg ? arg : 2.0;
        if (!(power > 0.0)) {
            throw InputError("inverse_square power must be positive");
        }
        return inverse_square(power);
    }
    throw InputError("unknown spatial model '" + tag + "'");
}

Eigen::MatrixXd cholesky(const Eigen::MatrixXd& c) {
    const Eigen::Index n = c.rows();
    if (c.cols() != n) {
        throw InputError("cholesky: matrix must be square");
    }
    constexpr double kMinPivot = 1e-12;
    Eigen::MatrixXd l = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        double pivot = c(j, j) - l.row(j).head(j).squaredNorm();
        if (!(pivot > kMinPivot)) {
            std::ostringstream msg;
            msg << "matrix is not positive definite (pivot " << pivot << " at row " << j + 1 << ")";
            throw NumericalError(msg.str());
        }
        l(j, j) = std::sqrt(pivot);
        for (Eigen::Index i = j + 1; i < n; ++i) {
            l(i, j) = (c(i, j) - l.row(i).head(j).dot(l.row(j).head(j))) / l(j, j);
        }
    }
    return l;
}

CorrelationMatrix CorrelationMatrix::from_matrix(Eigen::MatrixXd matrix, std::string tag) {
    const Eigen::Index n = matrix.rows();
    if (matrix.cols() != n || n < 1) {
        throw InputError("correlation matrix must be square");
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        if (matrix(i, i) != 1.0) {
            throw InputError("correlation matrix must have a unit diagonal");
        }
        for (Eigen::Index j = 0; j < n; ++j) {
            if (matrix(i, j) != matrix(j, i)) {
                throw InputError("correlation matrix must be symmetric");
            }
            if (!(matrix(i, j) >= 0.0 && matrix(i, j) <= 1.0)) {
                throw InputError("correlation entries must lie in [0, 1]");
            }
        }
    }
    CorrelationMatrix result;
    result.factor_ = cholesky(matrix);
    result.matrix_ = std::move(matrix);
    result.tag_ = std::move(tag);
    return result;
}

Eigen::MatrixXd inverse_power_matrix(const Geometry& geometry, double beta, double power) {
    const int n = geometry.n_sites();
    Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i != j) {
                const double d_nm = geometry.distances()(i, j) / units::kAngstromPerNm;
                m(i, j) = beta / std::pow(d_nm, power);
            }
        }
    }
    return m;
}

double max_offdiagonal_scale(const Eigen::MatrixXd& pattern) {
    constexpr double kMinEigenvalue = 1e-9;
    constexpr double kTolerance = 1e-4;
    const Eigen::Index n = pattern.rows();
    Eigen::MatrixXd off = pattern;
    off.diagonal().setZero();
    auto positive_definite = [&](double s) {
        const Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n) + s * off;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::EigenvaluesOnly);
        return solver.eigenvalues()[0] > kMinEigenvalue;
    };
    if (positive_definite(1.0)) {
        return 1.0;
    }
    double lo = 0.0;  // s = 0 gives the identity
    double hi = 1.0;
    while (hi - lo > kTolerance) {
        const double mid = 0.5 * (lo + hi);
        (positive_definite(mid) ? lo : hi) = mid;
    }
    return lo;
}

double find_max_beta(const Geometry& geometry, double power) {
    if (!(power > 0.0)) {
        throw InputError("power must be positive");
    }
    return max_offdiagonal_scale(inverse_power_matrix(geometry, 1.0, power));
}

Eigen::MatrixXd dimerized_pattern(int n_sites) {
    if (n_sites < 7) {
        throw InputError("dimerized model is defined for the 7-site FMO monomer");
    }
    Eigen::MatrixXd c = Eigen::MatrixXd::Identity(n_sites, n_sites);
    auto set = [&](int i, int j, double v) { c(i - 1, j - 1) = c(j - 1, i - 1) = v; };
    set(1, 2, 0.9);
    set(5, 6, 0.9);
    set(4, 5, 0.4);
    set(4, 7, 0.4);
    return c;
}

CorrelationMatrix build_correlation_matrix(const SpatialModel& model, const Geometry& geometry) {
    const int n = geometry.n_sites();
    Eigen::MatrixXd c = Eigen::MatrixXd::Identity(n, n);
    switch (model.kind) {
        case SpatialKind::None:
            break;
        case SpatialKind::Dimerized: {
            // The literal pattern is slightly indefinite (smallest eigenvalue -2.3e-4), so the
            // off-diagonal entries are scaled by the largest factor that keeps it definite.
            const Eigen::MatrixXd pattern = dimerized_pattern(n);
            const double s = max_offdiagonal_scale(pattern);
            c += s * (pattern - Eigen::MatrixXd::Identity(n, n));
            break;
        }
        case SpatialKind::Exponential: {
            if (!(model.rc_angstrom > 0.0)) {
                throw InputError("exponential correlation radius must be positive");
            }
            for (int i = 0; i < n; ++i) {
                for (int j = 0; j < n; ++j) {
                    if (i != j) {
                        c(i, j) = std::exp(-geometry.distances()(i, j) / model.rc_angstrom);
                    }
                }
            }
            break;
        }
        case SpatialKind::InverseSquare: {
            const double beta = find_max_beta(geometry, model.power);
            // Positive definiteness already bounds every off-diagonal entry below 1.
            c = inverse_power_matrix(geometry, beta, model.power);
            break;
        }
    }
    return CorrelationMatrix::from_matrix(std::move(c), model.tag());
}

void ou_step(Eigen::Ref<Eigen::VectorXd> u, double dt, double tau_c, Rng& rng) {
    const double a = std::exp(-dt / tau_c);
    const double b = std::sqrt(1.0 - a * a);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (Eigen::Index i = 0; i < u.size(); ++i) {
        u[i] = a * u[i] + b * normal(rng);
    }
}

double ZeroNoise::correlation_time() const {
    return std::numeric_limits<double>::infinity();
}

CorrelatedNoise::CorrelatedNoise(const NoiseConfig& config, const CorrelationMatrix& corr, double dt, Rng rng)
    : scaled_factor_(config.sigma() * corr.cholesky_factor()),
      tau_c_(config.tau_c),
      decay_(std::exp(-dt / config.tau_c)),
      kick_(std::sqrt(1.0 - decay_ * decay_)),
      rng_(std::move(rng)),
      u_(corr.size()),
      delta_(corr.size()) {
    config.validate();
    if (!(dt > 0.0)) {
        throw InputError("noise step must be positive");
    }
    for (Eigen::Index i = 0; i < u_.size(); ++i) {
        u_[i] = normal_(rng_);
    }
    mix();
}

void CorrelatedNoise::advance() {
    for (Eigen::Index i = 0; i < u_.size(); ++i) {
        u_[i] = decay_ * u_[i] + kick_ * normal_(rng_);
    }
    mix();
}

void CorrelatedNoise::mix() {
    delta_.noalias() = scaled_factor_.triangularView<Eigen::Lower>() * u_;
}

RecordedNoise::RecordedNoise(const NoiseField& field, double tau_c, std::size_t stride)
    : field_(&field), tau_c_(tau_c), stride_(stride) {
    if (stride_ == 0 || field.delta.rows() == 0) {
        throw InputError("recorded noise needs a positive stride and at least one sample");
    }
    current_ = field.delta.row(0).transpose();
}

void RecordedNoise::advance() {
    row_ += stride_;
    if (row_ >= static_cast<std::size_t>(field_->delta.rows())) {
        throw InputError("recorded noise exhausted");
    }
    current_ = field_->delta.row(static_cast<Eigen::Index>(row_)).transpose();
}

NoiseField sample_field(const NoiseConfig& config, const CorrelationMatrix& corr, std::size_t n_steps, double dt,
                        std::uint64_t seed) {
    CorrelatedNoise noise(config, corr, dt, make_rng(seed, 0));
    NoiseField field;
    field.dt = dt;
    field.delta.resize(static_cast<Eigen::Index>(n_steps), corr.size());
    for (std::size_t k = 0; k < n_steps; ++k) {
        if (k > 0) {
            noise.advance();
        }
        field.delta.row(static_cast<Eigen::Index>(k)) = noise.current().transpose();
    }
    return field;
}

}  // namespace eetsim
