#include "eetsim/errors.hpp"
#include "eetsim/noise.hpp"
#include "eetsim/units.hpp"

#include <doctest.h>

#include <cmath>

using namespace eetsim;

namespace {

const std::string kData = EETSIM_DATA_DIR;

Geometry line_geometry(const std::vector<double>& x) {
    Eigen::MatrixX3d coords = Eigen::MatrixX3d::Zero(static_cast<Eigen::Index>(x.size()), 3);
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < x.size(); ++i) {
        coords(static_cast<Eigen::Index>(i), 0) = x[i];
        labels.push_back("S" + std::to_string(i + 1));
    }
    return Geometry(labels, coords);
}

// Equilateral triangle with 10 Angstrom (1 nm) sides.
Geometry triangle() {
    Eigen::MatrixX3d coords(3, 3);
    coords << 0, 0, 0, 10, 0, 0, 5, 10 * std::sqrt(3.0) / 2, 0;
    return Geometry({"a", "b", "c"}, coords);
}

}  // namespace

TEST_SUITE("noise") {

TEST_CASE("fluctuation magnitude") {
    CHECK(NoiseConfig{45, 35, 300}.sigma() == doctest::Approx(std::sqrt(2 * 35 * 0.69504 * 300)));
    CHECK(NoiseConfig{45, 35, 300}.sigma() == doctest::Approx(120.8).epsilon(1e-3));
    CHECK(NoiseConfig{45, 35, 77}.sigma() == doctest::Approx(61.2).epsilon(1e-3));
    CHECK_THROWS_AS((NoiseConfig{0, 35, 77}.validate()), InputError);
    CHECK_THROWS_AS((NoiseConfig{45, -1, 77}.validate()), InputError);
    CHECK_THROWS_AS((NoiseConfig{45, 35, 0}.validate()), InputError);
}

TEST_CASE("cholesky: identity, closed-form 2x2, indefinite") {
    CHECK(cholesky(Eigen::MatrixXd::Identity(4, 4)).isApprox(Eigen::MatrixXd::Identity(4, 4)));
    Eigen::Matrix2d c;
    c << 1, 0.9, 0.9, 1;
    const Eigen::MatrixXd l = cholesky(c);
    CHECK(l(0, 0) == doctest::Approx(1.0));
    CHECK(l(0, 1) == 0.0);
    CHECK(l(1, 0) == doctest::Approx(0.9));
    CHECK(l(1, 1) == doctest::Approx(std::sqrt(0.19)));
    c << 1, 1.1, 1.1, 1;
    CHECK_THROWS_AS(cholesky(c), NumericalError);
}

TEST_CASE("spatial model tags round trip") {
    for (const std::string tag : {"none", "dimerized", "exponential:10", "exponential:2.5", "inverse_square",
                                  "inverse_square:3"}) {
        CHECK(SpatialModel::parse(tag).tag() == tag);
    }
    CHECK(SpatialModel::parse("exponential") == SpatialModel::exponential(10));
    CHECK_THROWS_AS(SpatialModel::parse("gaussian"), InputError);
    CHECK_THROWS_AS(SpatialModel::parse("exponential:-1"), InputError);
    CHECK_THROWS_AS(SpatialModel::parse("exponential:x"), InputError);
}

TEST_CASE("none model is the identity") {
    const auto c = build_correlation_matrix(SpatialModel::none(), load_geometry(kData + "/fmo_ctepidum_geometry.txt"));
    CHECK(c.matrix().isIdentity());
    CHECK(c.cholesky_factor().isIdentity());
    CHECK(c.model_tag() == "none");
}

TEST_CASE("exponential model: two sites 10 Angstrom apart") {
    const auto c = build_correlation_matrix(SpatialModel::exponential(10), line_geometry({0, 10}));
    CHECK(c.matrix()(0, 1) == doctest::Approx(std::exp(-1.0)));
    CHECK(c.matrix()(0, 1) == doctest::Approx(0.3679).epsilon(1e-4));
    const Eigen::MatrixXd l = c.cholesky_factor();
    CHECK((l * l.transpose() - c.matrix()).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("dimerized pattern is literal, the model scales it just enough") {
    const Eigen::MatrixXd p = dimerized_pattern(7);
    int nonzero = 0;
    for (int i = 0; i < 7; ++i) {
        for (int j = 0; j < 7; ++j) {
            if (i != j && p(i, j) != 0.0) {
                ++nonzero;
            }
        }
    }
    CHECK(nonzero == 8);
    CHECK(p(0, 1) == 0.9);
    CHECK(p(4, 5) == 0.9);
    CHECK(p(3, 4) == 0.4);
    CHECK(p(3, 6) == 0.4);
    // The literal pattern is indefinite.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> literal(p);
    CHECK(literal.eigenvalues()[0] < 0.0);

    const auto c = build_correlation_matrix(SpatialModel::dimerized(), load_geometry(kData + "/fmo_ctepidum_geometry.txt"));
    const double s = c.matrix()(0, 1) / 0.9;
    CHECK(s > 0.999);
    CHECK(s <= 1.0);
    CHECK(c.matrix()(4, 5) == doctest::Approx(0.9 * s));
    CHECK(c.matrix()(3, 4) == doctest::Approx(0.4 * s));
    CHECK(c.matrix()(3, 6) == doctest::Approx(0.4 * s));
    CHECK(c.matrix()(0, 2) == 0.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> scaled(c.matrix());
    CHECK(scaled.eigenvalues()[0] > 1e-9);
    const Eigen::MatrixXd l = c.cholesky_factor();
    CHECK((l * l.transpose() - c.matrix()).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("find_max_beta: two sites 2 nm apart cap at one") {
    CHECK(find_max_beta(line_geometry({0, 20})) == 1.0);
}

TEST_CASE("find_max_beta: equilateral triple at 1 nm") {
    // Eigenvalues 1 + 2b, 1 - b, 1 - b: definite for b < 1, singular at b = 1.
    const double beta = find_max_beta(triangle());
    CHECK(beta < 1.0);
    CHECK(beta > 1.0 - 2e-4);
}

TEST_CASE("max_offdiagonal_scale binds where the closed form says") {
    // I + s (P - I) with P - I = -(ones - I) on three sites has eigenvalues 1 - 2s, 1 + s, 1 + s.
    const Eigen::Matrix3d p = -Eigen::Matrix3d::Ones() + 2 * Eigen::Matrix3d::Identity();
    const double s = max_offdiagonal_scale(p);
    CHECK(s <= 0.5);
    CHECK(s > 0.5 - 2e-4);
    CHECK(max_offdiagonal_scale(Eigen::Matrix3d::Identity()) == 1.0);
}

TEST_CASE("correlation matrix validation") {
    Eigen::Matrix2d m;
    m << 1, 0.5, 0.4, 1;
    CHECK_THROWS_AS(CorrelationMatrix::from_matrix(m), InputError);
    m << 1, -0.1, -0.1, 1;
    CHECK_THROWS_AS(CorrelationMatrix::from_matrix(m), InputError);
    m << 2, 0, 0, 1;
    CHECK_THROWS_AS(CorrelationMatrix::from_matrix(m), InputError);
    CHECK_THROWS_AS(CorrelationMatrix::from_matrix(Eigen::MatrixXd::Ones(3, 3)), NumericalError);
    const double eps = 1e-6;
    const Eigen::MatrixXd near = (1 - eps) * Eigen::MatrixXd::Ones(3, 3) + eps * Eigen::MatrixXd::Identity(3, 3);
    const auto c = CorrelationMatrix::from_matrix(near);
    NoiseConfig cfg{45, 35, 77};
    const NoiseField f = sample_field(cfg, c, 100, 1.0, 3);
    for (Eigen::Index k = 0; k < f.delta.rows(); ++k) {
        CHECK(std::abs(f.delta(k, 0) - f.delta(k, 2)) < 1e-2 * cfg.sigma());
    }
}

TEST_CASE("OU step limits") {
    Rng rng = make_rng(1, 0);
    Eigen::VectorXd u = Eigen::VectorXd::Constant(3, 0.7);
    ou_step(u, 1e-9, 45, rng);
    CHECK((u.array() - 0.7).abs().maxCoeff() < 1e-4);

    Rng a = make_rng(2, 0);
    Rng b = make_rng(2, 0);
    Eigen::VectorXd ua = Eigen::VectorXd::Constant(3, 5.0);
    Eigen::VectorXd ub = Eigen::VectorXd::Constant(3, -5.0);
    ou_step(ua, 1e6, 45, a);
    ou_step(ub, 1e6, 45, b);
    CHECK((ua - ub).cwiseAbs().maxCoeff() < 1e-12);  // memory erased: same fresh draw
}

TEST_CASE("stationary statistics of sampled fields") {
    const Geometry g = load_geometry(kData + "/fmo_ctepidum_geometry.txt");
    const auto corr = build_correlation_matrix(SpatialModel::exponential(20), g);
    const NoiseConfig cfg{45, 35, 77};
    const std::size_t n = 100000;
    const double s2 = cfg.sigma() * cfg.sigma();

    // Samples one correlation time apart are nearly independent, so 1e5 of them pin the
    // variance to about 0.5%.
    const NoiseField sparse = sample_field(cfg, corr, n, cfg.tau_c, 11);
    for (int j = 0; j < 7; ++j) {
        const double var = sparse.delta.col(j).squaredNorm() / n;
        CHECK(std::abs(var / s2 - 1.0) < 0.03);
    }
    for (int i = 0; i < 7; ++i) {
        for (int j = i + 1; j < 7; ++j) {
            const double c = sparse.delta.col(i).dot(sparse.delta.col(j)) / n / s2;
            CHECK(std::abs(c - corr.matrix()(i, j)) < 0.03);
        }
    }
    for (int lag : {1, 2}) {
        for (int j = 0; j < 7; ++j) {
            const double r = sparse.delta.col(j).head(n - lag).dot(sparse.delta.col(j).tail(n - lag)) / (n - lag) / s2;
            CHECK(std::abs(r - std::exp(-lag)) < 0.02);
        }
    }

    // 1e5 steps of 1 fs, averaged over sites.
    const NoiseField dense = sample_field(cfg, corr, n, 1.0, 12);
    for (int lag : {45, 90}) {
        double acc = 0.0;
        for (int j = 0; j < 7; ++j) {
            const auto x = dense.delta.col(j);
            acc += x.head(n - lag).dot(x.tail(n - lag)) / x.squaredNorm() * n / (n - lag);
        }
        CHECK(std::abs(acc / 7 - std::exp(-lag / 45.0)) < 0.02);
    }
}

TEST_CASE("fields are reproducible per seed and independent across seeds") {
    const auto corr = build_correlation_matrix(SpatialModel::none(), line_geometry({0, 10}));
    const NoiseConfig cfg{45, 35, 77};
    const NoiseField a = sample_field(cfg, corr, 20000, 1.0, 5);
    const NoiseField b = sample_field(cfg, corr, 20000, 1.0, 5);
    const NoiseField c = sample_field(cfg, corr, 20000, 1.0, 6);
    CHECK(a.delta == b.delta);
    const double r = a.delta.col(0).dot(c.delta.col(0)) / (a.delta.col(0).norm() * c.delta.col(0).norm());
    // 20000 samples at tau_c = 45 fs hold about 20000 / 90 independent blocks.
    CHECK(std::abs(r) < 4.0 / std::sqrt(20000.0 / 90.0));
}

TEST_CASE("recorded noise replays a field at a coarser stride") {
    const auto corr = build_correlation_matrix(SpatialModel::none(), line_geometry({0, 10}));
    const NoiseField f = sample_field({45, 35, 77}, corr, 9, 0.5, 1);
    RecordedNoise replay(f, 45, 2);
    CHECK(replay.current() == Eigen::VectorXd(f.delta.row(0).transpose()));
    replay.advance();
    CHECK(replay.current() == Eigen::VectorXd(f.delta.row(2).transpose()));
}

TEST_CASE("generator streams differ by index") {
    Rng a = make_rng(42, 0);
    Rng b = make_rng(42, 1);
    Rng c = make_rng(43, 0);
    const auto x = a();
    CHECK(x != b());
    CHECK(x != c());
    Rng again = make_rng(42, 0);
    CHECK(again() == x);
}

}  // TEST_SUITE
