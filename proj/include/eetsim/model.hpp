#pragma once

#include <Eigen/Dense>

#include <filesystem>
#include <string>
#include <vector>

namespace eetsim {

// Sites are numbered 1..n throughout the public API, matching chromophore labels.

/// Frenkel exciton Hamiltonian in the site basis (cm^-1). Always exactly symmetric.
class SiteHamiltonian {
public:
    /// Validates and symmetrizes; asymmetry above `asym_tol` is an InputError.
    explicit SiteHamiltonian(Eigen::MatrixXd matrix, double asym_tol = 1e-9);

    int n_sites() const { return static_cast<int>(matrix_.rows()); }
    const Eigen::MatrixXd& matrix() const { return matrix_; }
    double mean_site_energy() const { return matrix_.diagonal().mean(); }

private:
    Eigen::MatrixXd matrix_;
};

/// Chromophore positions and the derived pairwise distance matrix (Angstrom).
class Geometry {
public:
    Geometry(std::vector<std::string> labels, Eigen::MatrixX3d coords);
    /// Distance-only geometry; coordinates are unavailable.
    explicit Geometry(Eigen::MatrixXd distances);

    int n_sites() const { return static_cast<int>(distances_.rows()); }
    const Eigen::MatrixXd& distances() const { return distances_; }
    /// Distance between 1-based sites i and j.
    double distance(int i, int j) const { return distances_(i - 1, j - 1); }
    const std::vector<std::string>& labels() const { return labels_; }

private:
    std::vector<std::string> labels_;
    Eigen::MatrixXd distances_;
};

struct ExcitonBasis {
    Eigen::VectorXd energies;      // ascending, min = 0 (cm^-1)
    double shift = 0.0;            // original lowest eigenvalue
    Eigen::MatrixXd eigenvectors;  // column alpha = exciton alpha in the site basis

    int size() const { return static_cast<int>(energies.size()); }
    /// |<j|alpha>|^2 for 1-based site j.
    double weight(int alpha, int site) const {
        const double c = eigenvectors(site - 1, alpha);
        return c * c;
    }
};

SiteHamiltonian load_site_hamiltonian(const std::filesystem::path& path);
SiteHamiltonian parse_site_hamiltonian(const std::string& text, const std::string& origin = "<string>");

Geometry load_geometry(const std::filesystem::path& path);
Geometry parse_geometry(const std::string& text, const std::string& origin = "<string>");

/// Diagonalizes H. Degenerate levels are ordered by the index of their largest-amplitude
/// site; each eigenvector's largest-amplitude component is made positive.
ExcitonBasis diagonalize(const SiteHamiltonian& h);

/// For each exciton, the 1-based sites with weight >= threshold, by descending weight.
std::vector<std::vector<int>> dominant_overlaps(const ExcitonBasis& basis, double weight_threshold);

}  // namespace eetsim
