#include "eetsim/errors.hpp"
#include "eetsim/model.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

using namespace eetsim;

namespace {

const std::string kData = EETSIM_DATA_DIR;

Eigen::MatrixXd reconstruct(const ExcitonBasis& b) {
    const Eigen::VectorXd e = b.energies.array() + b.shift;
    return b.eigenvectors * e.asDiagonal() * b.eigenvectors.transpose();
}

}  // namespace

TEST_SUITE("model") {

TEST_CASE("two-site matrix parses") {
    const SiteHamiltonian h = parse_site_hamiltonian("0 1\n1 0\n");
    CHECK(h.n_sites() == 2);
    CHECK(h.matrix()(0, 1) == 1.0);
}

TEST_CASE("asymmetric entries are rejected") {
    CHECK_THROWS_AS(parse_site_hamiltonian("0 5\n7 0\n"), InputError);
}

TEST_CASE("tiny asymmetry is averaged away") {
    const SiteHamiltonian h = parse_site_hamiltonian("0 1\n1.0000000000005 0\n");
    CHECK(h.matrix()(0, 1) == h.matrix()(1, 0));
}

TEST_CASE("malformed Hamiltonian files name the line") {
    CHECK_THROWS_AS(parse_site_hamiltonian("1 2 3\n4 5 6\n"), InputError);
    CHECK_THROWS_AS(parse_site_hamiltonian("1\n"), InputError);
    try {
        parse_site_hamiltonian("# header\n0 1\n1 x\n", "h.txt");
        FAIL("expected an error");
    } catch (const InputError& e) {
        CHECK(std::string(e.what()).find("h.txt:3") != std::string::npos);
    }
}

TEST_CASE("geometry from coordinates") {
    const Geometry g = parse_geometry("A 0 0 0\nB 3 4 0\nC 0 0 10\n");
    CHECK(g.n_sites() == 3);
    CHECK(g.distance(1, 2) == doctest::Approx(5.0));
    CHECK(g.distance(2, 1) == g.distance(1, 2));
    CHECK(g.distance(1, 1) == 0.0);
    CHECK(g.labels()[2] == "C");
    CHECK_THROWS_AS(parse_geometry("A 0 0 0\nB 0 0 0\n"), InputError);
    CHECK_THROWS_AS(parse_geometry("A 0 0\n"), InputError);
}

TEST_CASE("diagonal matrix gives shifted sorted energies and a permutation") {
    Eigen::MatrixXd m = Eigen::Vector3d(3, 1, 2).asDiagonal();
    const ExcitonBasis b = diagonalize(SiteHamiltonian(m));
    CHECK(b.energies[0] == doctest::Approx(0.0));
    CHECK(b.energies[1] == doctest::Approx(1.0));
    CHECK(b.energies[2] == doctest::Approx(2.0));
    CHECK(b.shift == doctest::Approx(1.0));
    CHECK(std::abs(b.eigenvectors(1, 0)) == doctest::Approx(1.0));
    CHECK(std::abs(b.eigenvectors(2, 1)) == doctest::Approx(1.0));
    CHECK(std::abs(b.eigenvectors(0, 2)) == doctest::Approx(1.0));
    const auto overlaps = dominant_overlaps(b, 0.5);
    for (const auto& o : overlaps) {
        CHECK(o.size() == 1);
    }
}

TEST_CASE("symmetric dimer: energies 0 and 2J, equal weights") {
    const double j = 37.5;
    Eigen::Matrix2d m;
    m << 0, j, j, 0;
    const ExcitonBasis b = diagonalize(SiteHamiltonian(m));
    CHECK(b.energies[0] == doctest::Approx(0.0));
    CHECK(b.energies[1] == doctest::Approx(2 * j));
    // Lower level of [[0, J], [J, 0]] with J > 0 is (1, -1)/sqrt2.
    CHECK(std::abs(b.eigenvectors(0, 0)) == doctest::Approx(1 / std::sqrt(2.0)));
    CHECK(b.eigenvectors(0, 0) * b.eigenvectors(1, 0) == doctest::Approx(-0.5));
    CHECK(b.eigenvectors(0, 1) * b.eigenvectors(1, 1) == doctest::Approx(0.5));
    for (int a = 0; a < 2; ++a) {
        for (int s = 1; s <= 2; ++s) {
            CHECK(b.weight(a, s) == doctest::Approx(0.5));
        }
    }
    const auto overlaps = dominant_overlaps(b, 0.4);
    CHECK(overlaps[0].size() == 2);
    CHECK(overlaps[1].size() == 2);
}

TEST_CASE("degenerate levels are ordered by their dominant site") {
    Eigen::MatrixXd m = Eigen::Vector3d(5, 5, 1).asDiagonal();
    const ExcitonBasis b = diagonalize(SiteHamiltonian(m));
    CHECK(b.weight(1, 1) == doctest::Approx(1.0));
    CHECK(b.weight(2, 2) == doctest::Approx(1.0));
    CHECK(b.eigenvectors(0, 1) > 0.0);
    CHECK(b.eigenvectors(1, 2) > 0.0);
}

TEST_CASE("bundled FMO Hamiltonian: round trip, orthonormality, shift invariance") {
    const SiteHamiltonian h = load_site_hamiltonian(kData + "/fmo_ctepidum_hamiltonian.txt");
    REQUIRE(h.n_sites() == 7);
    const ExcitonBasis b = diagonalize(h);
    CHECK((reconstruct(b) - h.matrix()).cwiseAbs().maxCoeff() < 1e-8);
    const Eigen::MatrixXd gram = b.eigenvectors.transpose() * b.eigenvectors;
    CHECK((gram - Eigen::MatrixXd::Identity(7, 7)).cwiseAbs().maxCoeff() < 1e-10);
    for (int s = 1; s <= 7; ++s) {
        double total = 0.0;
        for (int a = 0; a < 7; ++a) {
            total += b.weight(a, s);
        }
        CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
    }
    CHECK(b.energies[0] == 0.0);
    CHECK(std::is_sorted(b.energies.data(), b.energies.data() + 7));

    const Eigen::MatrixXd shifted = h.matrix() + 1234.5 * Eigen::MatrixXd::Identity(7, 7);
    const ExcitonBasis bs = diagonalize(SiteHamiltonian(shifted));
    CHECK((bs.energies - b.energies).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("bundled FMO: lowest exciton sits on sites 3 and 4") {
    const ExcitonBasis b = diagonalize(load_site_hamiltonian(kData + "/fmo_ctepidum_hamiltonian.txt"));
    const auto overlaps = dominant_overlaps(b, 0.15);
    CHECK(std::set<int>(overlaps[0].begin(), overlaps[0].end()) == std::set<int>{3, 4});
    for (const auto& o : overlaps) {
        for (std::size_t k = 1; k < o.size(); ++k) {
            CHECK(b.weight(&o - overlaps.data(), o[k - 1]) >= b.weight(&o - overlaps.data(), o[k]));
        }
    }
}

TEST_CASE("bundled geometry is consistent") {
    const Geometry g = load_geometry(kData + "/fmo_ctepidum_geometry.txt");
    REQUIRE(g.n_sites() == 7);
    for (int i = 1; i <= 7; ++i) {
        for (int j = 1; j <= 7; ++j) {
            if (i != j) {
                CHECK(g.distance(i, j) > 0.0);
                for (int k = 1; k <= 7; ++k) {
                    CHECK(g.distance(i, j) <= g.distance(i, k) + g.distance(k, j) + 1e-12);
                }
            }
        }
    }
}

}  // TEST_SUITE
