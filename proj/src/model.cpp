#include "eetsim/model.hpp"

#include "eetsim/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

namespace eetsim {

namespace {

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw InputError("cannot open " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string strip_comment(const std::string& line) {
    const auto hash = line.find('#');
    return hash == std::string::npos ? line : line.substr(0, hash);
}

double parse_number(const std::string& token, const std::string& where) {
    std::size_t used = 0;
    double value = 0.0;
    try {
        value = std::stod(token, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != token.size() || !std::isfinite(value)) {
        throw InputError(where + ": not a number: '" + token + "'");
    }
    return value;
}

}  // namespace

SiteHamiltonian::SiteHamiltonian(Eigen::MatrixXd matrix, double asym_tol) : matrix_(std::move(matrix)) {
    if (matrix_.rows() != matrix_.cols()) {
        throw InputError("Hamiltonian must be square, got " + std::to_string(matrix_.rows()) + "x" +
                         std::to_string(matrix_.cols()));
    }
    if (matrix_.rows() < 2) {
        throw InputError("Hamiltonian needs at least 2 sites");
    }
    if (!matrix_.allFinite()) {
        throw InputError("Hamiltonian has non-finite entries");
    }
    const Eigen::Index n = matrix_.rows();
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double diff = std::abs(matrix_(i, j) - matrix_(j, i));
            if (diff > asym_tol) {
                std::ostringstream msg;
                msg << "Hamiltonian is asymmetric at (" << i + 1 << "," << j + 1 << "): " << matrix_(i, j)
                    << " vs " << matrix_(j, i);
                throw InputError(msg.str());
            }
            const double avg = 0.5 * (matrix_(i, j) + matrix_(j, i));
            matrix_(i, j) = matrix_(j, i) = avg;
        }
    }
}

Geometry::Geometry(std::vector<std::string> labels, Eigen::MatrixX3d coords) : labels_(std::move(labels)) {
    const Eigen::Index n = coords.rows();
    if (static_cast<Eigen::Index>(labels_.size()) != n) {
        throw InputError("geometry labels and coordinates differ in length");
    }
    if (n < 2) {
        throw InputError("geometry needs at least 2 sites");
    }
    distances_.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            distances_(i, j) = (coords.row(i) - coords.row(j)).norm();
        }
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            if (!(distances_(i, j) > 0.0)) {
                throw InputError("sites " + labels_[i] + " and " + labels_[j] + " coincide");
            }
        }
    }
}

Geometry::Geometry(Eigen::MatrixXd distances) : distances_(std::move(distances)) {
    const Eigen::Index n = distances_.rows();
    if (distances_.cols() != n || n < 2) {
        throw InputError("distance matrix must be square with at least 2 sites");
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        if (distances_(i, i) != 0.0) {
            throw InputError("distance matrix must have a zero diagonal");
        }
        for (Eigen::Index j = i + 1; j < n; ++j) {
            if (distances_(i, j) != distances_(j, i) || !(distances_(i, j) > 0.0)) {
                throw InputError("distance matrix must be symmetric and positive off the diagonal");
            }
        }
        labels_.push_back(std::to_string(i + 1));
    }
}

SiteHamiltonian parse_site_hamiltonian(const std::string& text, const std::string& origin) {
    std::vector<std::vector<double>> rows;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream fields(strip_comment(line));
        std::vector<double> row;
        std::string token;
        while (fields >> token) {
            row.push_back(parse_number(token, origin + ":" + std::to_string(line_no)));
        }
        if (row.empty()) {
            continue;
        }
        if (!rows.empty() && row.size() != rows.front().size()) {
            throw InputError(origin + ":" + std::to_string(line_no) + ": row has " + std::to_string(row.size()) +
                             " entries, expected " + std::to_string(rows.front().size()));
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) {
        throw InputError(origin + ": no matrix rows");
    }
    if (rows.size() != rows.front().size()) {
        throw InputError(origin + ": matrix is not square (" + std::to_string(rows.size()) + " rows, " +
                         std::to_string(rows.front().size()) + " columns)");
    }
    const auto n = static_cast<Eigen::Index>(rows.size());
    Eigen::MatrixXd m(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            m(i, j) = rows[i][j];
        }
    }
    try {
        return SiteHamiltonian(std::move(m));
    } catch (const InputError& e) {
        throw InputError(origin + ": " + e.what());
    }
}

SiteHamiltonian load_site_hamiltonian(const std::filesystem::path& path) {
    return parse_site_hamiltonian(read_file(path), path.string());
}

Geometry parse_geometry(const std::string& text, const std::string& origin) {
    std::vector<std::string> labels;
    std::vector<Eigen::Vector3d> points;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream fields(strip_comment(line));
        std::vector<std::string> tokens;
        std::string token;
        while (fields >> token) {
            tokens.push_back(token);
        }
        if (tokens.empty()) {
            continue;
        }
        const std::string where = origin + ":" + std::to_string(line_no);
        if (tokens.size() != 4) {
            throw InputError(where + ": expected 'label x y z'");
        }
        labels.push_back(tokens[0]);
        points.emplace_back(parse_number(tokens[1], where), parse_number(tokens[2], where),
                            parse_number(tokens[3], where));
    }
    Eigen::MatrixX3d coords(static_cast<Eigen::Index>(points.size()), 3);
    for (std::size_t i = 0; i < points.size(); ++i) {
        coords.row(static_cast<Eigen::Index>(i)) = points[i].transpose();
    }
    try {
        return Geometry(std::move(labels), std::move(coords));
    } catch (const InputError& e) {
        throw InputError(origin + ": " + e.what());
    }
}

Geometry load_geometry(const std::filesystem::path& path) {
    return parse_geometry(read_file(path), path.string());
}

ExcitonBasis diagonalize(const SiteHamiltonian& h) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h.matrix());
    const Eigen::VectorXd& values = solver.eigenvalues();
    const Eigen::MatrixXd& vectors = solver.eigenvectors();
    const int n = h.n_sites();

    std::vector<int> dominant_site(n);
    for (int a = 0; a < n; ++a) {
        vectors.col(a).cwiseAbs().maxCoeff(&dominant_site[a]);
    }

    // Levels closer than this are treated as degenerate for ordering purposes.
    const double scale = std::max(1.0, values.cwiseAbs().maxCoeff());
    const double degenerate_tol = 1e-10 * scale;

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        if (std::abs(values[a] - values[b]) <= degenerate_tol) {
            return dominant_site[a] < dominant_site[b];
        }
        return values[a] < values[b];
    });

    ExcitonBasis basis;
    basis.shift = values.minCoeff();
    basis.energies.resize(n);
    basis.eigenvectors.resize(n, n);
    for (int k = 0; k < n; ++k) {
        const int src = order[k];
        basis.energies[k] = values[src] - basis.shift;
        Eigen::VectorXd v = vectors.col(src);
        if (v[dominant_site[src]] < 0.0) {
            v = -v;
        }
        basis.eigenvectors.col(k) = v;
    }
    return basis;
}

std::vector<std::vector<int>> dominant_overlaps(const ExcitonBasis& basis, double weight_threshold) {
    if (!(weight_threshold > 0.0 && weight_threshold < 1.0)) {
        throw InputError("weight threshold must lie in (0, 1)");
    }
    const int n = basis.size();
    std::vector<std::vector<int>> result(n);
    for (int a = 0; a < n; ++a) {
        std::vector<int> sites;
        for (int j = 1; j <= n; ++j) {
            if (basis.weight(a, j) >= weight_threshold) {
                sites.push_back(j);
            }
        }
        std::stable_sort(sites.begin(), sites.end(),
                         [&](int x, int y) { return basis.weight(a, x) > basis.weight(a, y); });
        result[a] = std::move(sites);
    }
    return result;
}

}  // namespace eetsim
