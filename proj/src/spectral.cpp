#include "qmpemba/spectral.hpp"

#include "qmpemba/errors.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace qmpemba {

namespace {

std::vector<Eigen::Index> spectral_order(const Vector& values) {
    std::vector<Eigen::Index> order(static_cast<std::size_t>(values.size()));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
        if (values[a].real() != values[b].real()) return values[a].real() > values[b].real();
        return values[a].imag() < values[b].imag();
    });
    const double scale = std::max(1.0, values.size() ? values.cwiseAbs().maxCoeff() : 0.0);
    const double band = 1e-9 * scale;
    // Runs of numerically equal real parts are re-ordered by imaginary part.
    std::size_t start = 0;
    while (start < order.size()) {
        std::size_t end = start + 1;
        while (end < order.size() &&
               values[order[start]].real() - values[order[end]].real() <= band) {
            ++end;
        }
        std::stable_sort(order.begin() + static_cast<std::ptrdiff_t>(start),
                         order.begin() + static_cast<std::ptrdiff_t>(end),
                         [&](Eigen::Index a, Eigen::Index b) {
                             return values[a].imag() < values[b].imag();
                         });
        start = end;
    }
    return order;
}

double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const auto n = static_cast<double>(x.size());
    if (x.size() < 2) return 0.0;
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    return sxx > 0.0 ? sxy / sxx : 0.0;
}

// Bulk sites 2..L-1 (1-based); the whole chain when it is too short.
std::pair<Eigen::Index, Eigen::Index> bulk_range(Eigen::Index n) {
    if (n < 4) return {0, n};
    return {1, n - 1};
}

}  // namespace

EigenSystem biorthogonal_eigensystem(const Matrix& generator) {
    if (generator.rows() != generator.cols() || generator.rows() == 0) {
        throw InvalidParameter("eigensystem needs a non-empty square matrix");
    }
    Eigen::ComplexEigenSolver<Matrix> solver(generator, true);
    if (solver.info() != Eigen::Success) {
        throw DefectiveEigensystem("eigenvalue iteration did not converge");
    }
    const auto order = spectral_order(solver.eigenvalues());
    const auto n = generator.rows();

    EigenSystem sys;
    sys.eigenvalues.resize(n);
    sys.right.resize(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        sys.eigenvalues[k] = solver.eigenvalues()[order[static_cast<std::size_t>(k)]];
        sys.right.col(k) = solver.eigenvectors().col(order[static_cast<std::size_t>(k)]);
        const double norm = sys.right.col(k).norm();
        if (norm > 0.0) sys.right.col(k) /= norm;
    }

    Eigen::PartialPivLU<Matrix> lu(sys.right);
    sys.left = lu.inverse().adjoint();
    const Matrix identity = Matrix::Identity(n, n);
    if (!sys.left.allFinite()) {
        sys.biorthogonality_defect = std::numeric_limits<double>::infinity();
        sys.completeness_defect = std::numeric_limits<double>::infinity();
        sys.reconstruction_defect = std::numeric_limits<double>::infinity();
    } else {
        sys.biorthogonality_defect = linalg::max_abs(sys.left.adjoint() * sys.right - identity);
        sys.completeness_defect = linalg::max_abs(sys.right * sys.left.adjoint() - identity);
        const Matrix rebuilt = sys.right * sys.eigenvalues.asDiagonal() * sys.left.adjoint();
        sys.reconstruction_defect =
            linalg::max_abs(rebuilt - generator) / std::max(1.0, linalg::max_abs(generator));
    }
    Eigen::JacobiSVD<Matrix> svd(sys.right);
    const auto& sv = svd.singularValues();
    sys.condition_estimate = sv[n - 1] > 0.0 ? sv[0] / sv[n - 1]
                                             : std::numeric_limits<double>::infinity();
    sys.residual = linalg::max_abs(generator * sys.right -
                                   sys.right * sys.eigenvalues.asDiagonal());

    const double defect = std::max({sys.biorthogonality_defect, sys.completeness_defect,
                                    sys.reconstruction_defect});
    if (!(defect <= kDefectThreshold)) {
        throw DefectiveEigensystem("eigensystem defect " + std::to_string(defect) +
                                   " exceeds threshold (condition estimate " +
                                   std::to_string(sys.condition_estimate) + ")");
    }
    return sys;
}

EigenSystem biorthogonal_eigensystem(const EffectiveHamiltonian& generator) {
    EigenSystem sys = biorthogonal_eigensystem(generator.matrix);
    sys.chain = generator.chain;
    return sys;
}

std::vector<cplx> analytic_spectrum_obc(double hopping, double gamma_gain, double gamma_loss,
                                        int sites) {
    if (sites < 1) throw InvalidParameter("sites must be positive");
    const double gamma = 0.5 * (gamma_gain + gamma_loss);
    const cplx j_tilde = std::sqrt(cplx{(hopping - gamma) * (hopping + gamma), 0.0});
    std::vector<cplx> out;
    out.reserve(static_cast<std::size_t>(sites));
    for (int m = 1; m <= sites; ++m) {
        const double k = std::numbers::pi * m / (sites + 1);
        out.push_back(-2.0 * gamma - cplx{0.0, 2.0} * j_tilde * std::cos(k));
    }
    return out;
}

std::vector<cplx> analytic_spectrum_pbc(double hopping, double gamma_gain, double gamma_loss,
                                        int sites) {
    if (sites < 2) throw InvalidParameter("periodic spectrum needs at least 2 sites");
    const double gamma = 0.5 * (gamma_gain + gamma_loss);
    std::vector<cplx> out;
    out.reserve(static_cast<std::size_t>(sites));
    for (int m = 0; m < sites; ++m) {
        const double k = 2.0 * std::numbers::pi * m / sites;
        out.emplace_back(-2.0 * gamma - 2.0 * gamma * std::sin(k), -2.0 * hopping * std::cos(k));
    }
    return out;
}

LocalizationReport localization_profile(const EigenSystem& system, EigenvectorSide side) {
    const Matrix& vectors = side == EigenvectorSide::Right ? system.right : system.left;
    const auto n = vectors.rows();
    const auto [first, last] = bulk_range(n);

    LocalizationReport report;
    report.mean_position.reserve(static_cast<std::size_t>(vectors.cols()));
    report.envelope_slope.reserve(static_cast<std::size_t>(vectors.cols()));
    RealVector density = RealVector::Zero(n);
    for (Eigen::Index col = 0; col < vectors.cols(); ++col) {
        const RealVector weight = vectors.col(col).cwiseAbs2();
        const double total = weight.sum();
        const RealVector normalized = total > 0.0 ? RealVector(weight / total) : weight;
        density += normalized;
        double mean = 0.0;
        for (Eigen::Index x = 0; x < n; ++x) mean += static_cast<double>(x + 1) * normalized[x];
        report.mean_position.push_back(mean);

        // Exact nodes of standing waves would dominate a log fit.
        const double peak = std::sqrt(normalized.maxCoeff());
        std::vector<double> xs;
        std::vector<double> ys;
        for (Eigen::Index x = first; x < last; ++x) {
            const double amp = std::sqrt(normalized[x]);
            if (amp <= 1e-14 * peak) continue;
            xs.push_back(static_cast<double>(x + 1));
            ys.push_back(std::log(amp));
        }
        report.envelope_slope.push_back(least_squares_slope(xs, ys));
    }
    std::vector<double> xs;
    std::vector<double> ys;
    for (Eigen::Index x = first; x < last; ++x) {
        if (density[x] <= 0.0) continue;
        xs.push_back(static_cast<double>(x + 1));
        ys.push_back(0.5 * std::log(density[x]));
    }
    report.aggregate_slope = least_squares_slope(xs, ys);

    if (system.chain) {
        const auto& c = *system.chain;
        const double gamma = c.decay_scale();
        if (std::abs(c.hopping) != gamma) {
            const double ln_r = std::log(gauge_ratio(c.hopping, gamma));
            // Left eigenvectors sit on the opposite edge.
            const bool flip = (c.skin == SkinDirection::Right) != (side == EigenvectorSide::Left);
            report.theoretical_slope = flip ? -ln_r : ln_r;
        }
    }
    return report;
}

double gauge_ratio(double hopping, double decay_scale) {
    const double num = hopping - decay_scale;
    const double den = hopping + decay_scale;
    if (num == 0.0 || den == 0.0) {
        throw GaugeUnavailable("|J| == Gamma: one-way hopping has no imaginary gauge");
    }
    return std::sqrt(std::abs(num / den));
}

RealVector gauge_transform(double hopping, double decay_scale, int sites, SkinDirection skin) {
    if (sites < 1) throw InvalidParameter("sites must be positive");
    const double r = gauge_ratio(hopping, decay_scale);
    const double base = skin == SkinDirection::Left ? r : 1.0 / r;
    RealVector s(sites);
    for (int j = 0; j < sites; ++j) s[j] = std::pow(base, j + 1);
    return s;
}

double gauge_condition_number(const RealVector& diagonal) {
    const RealVector a = diagonal.cwiseAbs();
    return a.maxCoeff() / a.minCoeff();
}

}  // namespace qmpemba
