#include "qmpemba/model.hpp"

#include "qmpemba/errors.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <string>
#include <vector>

namespace qmpemba {

namespace {

constexpr double kHermitianTolerance = 1e-12;
constexpr double kPhysicalTolerance = 1e-10;

void require_finite_nonnegative(double value, const char* field) {
    if (!std::isfinite(value) || value < 0.0) {
        throw InvalidParameter(std::string(field) + " must be finite and non-negative");
    }
}

void check_size(int sites, int max_sites) {
    if (sites > max_sites) {
        throw SizeLimitExceeded("model size " + std::to_string(sites) + " exceeds the limit of " +
                                std::to_string(max_sites) + " sites");
    }
}

}  // namespace

std::string_view to_string(Boundary b) { return b == Boundary::Open ? "OBC" : "PBC"; }

std::string_view to_string(SkinDirection s) { return s == SkinDirection::Left ? "left" : "right"; }

LatticeModel::LatticeModel(Matrix h, Matrix g, Matrix l, Boundary b,
                           std::optional<ChainParameters> chain)
    : hamiltonian_(std::move(h)),
      gain_(std::move(g)),
      loss_(std::move(l)),
      boundary_(b),
      chain_(std::move(chain)) {}

LatticeModel LatticeModel::chain(const ChainParameters& p, int max_sites) {
    if (p.sites < 2) throw InvalidParameter("chain needs at least 2 sites");
    require_finite_nonnegative(p.hopping, "J");
    require_finite_nonnegative(p.gamma_gain, "gamma_g");
    require_finite_nonnegative(p.gamma_loss, "gamma_l");
    check_size(p.sites, max_sites);

    const int n = p.sites;
    const bool periodic = p.boundary == Boundary::Periodic;
    // Bonds (j, j+1); PBC closes the ring with (L, 1).
    std::vector<std::pair<int, int>> bonds;
    for (int j = 0; j + 1 < n; ++j) bonds.emplace_back(j, j + 1);
    if (periodic) bonds.emplace_back(n - 1, 0);

    Matrix h = Matrix::Zero(n, n);
    for (auto [a, b] : bonds) {
        h(a, b) += -p.hopping;
        h(b, a) += -p.hopping;
    }

    const bool add_edges = p.edge_compensation && !periodic;
    const auto rows = static_cast<Eigen::Index>(bonds.size() + (add_edges ? 2 : 0));
    Matrix gain = Matrix::Zero(rows, n);
    Matrix loss = Matrix::Zero(rows, n);
    const double g = std::sqrt(p.gamma_gain / 2.0);
    const double l = std::sqrt(p.gamma_loss / 2.0);
    // L^g_j = g (c_j^dag + i c_{j+1}^dag), L^l_j = l (c_j - i c_{j+1})
    const cplx phase = p.skin == SkinDirection::Left ? cplx{0.0, 1.0} : cplx{0.0, -1.0};
    Eigen::Index row = 0;
    for (auto [a, b] : bonds) {
        gain(row, a) = g;
        gain(row, b) = phase * g;
        loss(row, a) = l;
        loss(row, b) = -phase * l;
        ++row;
    }
    if (add_edges) {
        for (int site : {0, n - 1}) {
            gain(row, site) = g;
            loss(row, site) = l;
            ++row;
        }
    }
    return LatticeModel(std::move(h), std::move(gain), std::move(loss), p.boundary, p);
}

LatticeModel LatticeModel::custom(Matrix hamiltonian, Matrix gain_coeffs, Matrix loss_coeffs,
                                  Boundary boundary, int max_sites) {
    const auto n = hamiltonian.rows();
    if (n < 1 || hamiltonian.cols() != n) {
        throw InvalidParameter("Hamiltonian must be a non-empty square matrix");
    }
    check_size(static_cast<int>(n), max_sites);
    if (!hamiltonian.allFinite() || !gain_coeffs.allFinite() || !loss_coeffs.allFinite()) {
        throw InvalidParameter("model matrices contain non-finite entries");
    }
    if (linalg::hermiticity_defect(hamiltonian) > kHermitianTolerance) {
        throw InvalidParameter("Hamiltonian is not Hermitian");
    }
    if (gain_coeffs.size() == 0) gain_coeffs = Matrix::Zero(0, n);
    if (loss_coeffs.size() == 0) loss_coeffs = Matrix::Zero(0, n);
    if (gain_coeffs.cols() != n || loss_coeffs.cols() != n) {
        throw InvalidParameter("jump coefficient matrices need one column per site");
    }
    return LatticeModel(std::move(hamiltonian), std::move(gain_coeffs), std::move(loss_coeffs),
                        boundary, std::nullopt);
}

LatticeModel build_chain_model(double hopping, double gamma_gain, double gamma_loss, int sites,
                               Boundary boundary, bool edge_compensation) {
    ChainParameters p;
    p.hopping = hopping;
    p.gamma_gain = gamma_gain;
    p.gamma_loss = gamma_loss;
    p.sites = sites;
    p.boundary = boundary;
    p.edge_compensation = edge_compensation;
    return LatticeModel::chain(p);
}

DissipatorPair dissipator_matrices(const LatticeModel& model) {
    DissipatorPair out;
    // (D^dag D)_ij = sum_mu conj(D_mu,i) D_mu,j
    out.gain = model.gain_coeffs().adjoint() * model.gain_coeffs();
    out.loss = model.loss_coeffs().adjoint() * model.loss_coeffs();
    if (const auto& chain = model.chain_parameters()) out.decay_scale = chain->decay_scale();
    return out;
}

EffectiveHamiltonian effective_hamiltonian(const LatticeModel& model) {
    const DissipatorPair d = dissipator_matrices(model);
    EffectiveHamiltonian out;
    out.matrix = cplx{0.0, 1.0} * model.hamiltonian().transpose() -
                 (d.loss.transpose() + d.gain);
    out.boundary = model.boundary();
    out.chain = model.chain_parameters();
    return out;
}

PhysicalityReport validate_correlation_matrix(const Matrix& c) {
    if (c.rows() != c.cols()) throw InvalidParameter("correlation matrix must be square");
    PhysicalityReport report;
    if (c.size() == 0) {
        report.physical = true;
        return report;
    }
    report.hermiticity_defect = linalg::hermiticity_defect(c);
    Eigen::SelfAdjointEigenSolver<Matrix> solver(linalg::hermitian_part(c),
                                                 Eigen::EigenvaluesOnly);
    report.min_eigenvalue = solver.eigenvalues().minCoeff();
    report.max_eigenvalue = solver.eigenvalues().maxCoeff();
    report.physical = report.hermiticity_defect <= kPhysicalTolerance &&
                      report.min_eigenvalue >= -kPhysicalTolerance &&
                      report.max_eigenvalue <= 1.0 + kPhysicalTolerance;
    return report;
}

}  // namespace qmpemba
