#include "qmpemba/oracle.hpp"

#include "qmpemba/errors.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace qmpemba::oracle {

namespace {

constexpr double kRhoTolerance = 1e-10;

void check_sites(int sites) {
    if (sites < 1) throw InvalidParameter("oracle needs at least one site");
    if (sites > kMaxSites) {
        throw SizeLimitExceeded("oracle is capped at " + std::to_string(kMaxSites) + " sites, got " +
                                std::to_string(sites));
    }
}

Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

}  // namespace

FockOperators::FockOperators(int sites) : sites_(sites) {
    check_sites(sites);
    const Eigen::Index dim = dimension();
    annihilators_.reserve(static_cast<std::size_t>(sites));
    for (int i = 0; i < sites; ++i) {
        const Eigen::Index bit = Eigen::Index{1} << (sites - 1 - i);
        // Jordan-Wigner string over the sites left of i, i.e. the higher bits.
        const Eigen::Index higher = ~((bit << 1) - 1) & (dim - 1);
        Matrix c = Matrix::Zero(dim, dim);
        for (Eigen::Index n = 0; n < dim; ++n) {
            if ((n & bit) == 0) continue;
            const int parity = __builtin_popcountll(static_cast<unsigned long long>(n & higher)) & 1;
            c(n ^ bit, n) = parity ? -1.0 : 1.0;
        }
        annihilators_.push_back(std::move(c));
    }
}

const Matrix& FockOperators::annihilator(int site) const {
    if (site < 0 || site >= sites_) throw InvalidParameter("site index out of range");
    return annihilators_[static_cast<std::size_t>(site)];
}

double FockOperators::anticommutation_defect() const {
    const Eigen::Index dim = dimension();
    const Matrix id = Matrix::Identity(dim, dim);
    double worst = 0.0;
    for (int i = 0; i < sites_; ++i) {
        for (int j = 0; j < sites_; ++j) {
            const Matrix& ci = annihilators_[static_cast<std::size_t>(i)];
            const Matrix& cj = annihilators_[static_cast<std::size_t>(j)];
            Matrix mixed = ci * cj.adjoint() + cj.adjoint() * ci;
            if (i == j) mixed -= id;
            const Matrix same = ci * cj + cj * ci;
            worst = std::max({worst, mixed.cwiseAbs().maxCoeff(), same.cwiseAbs().maxCoeff()});
        }
    }
    return worst;
}

Matrix many_body_hamiltonian(const LatticeModel& model, const FockOperators& fock) {
    if (model.size() != fock.sites()) throw InvalidParameter("model and Fock space sizes differ");
    const Matrix& h = model.hamiltonian();
    const Eigen::Index dim = fock.dimension();
    Matrix out = Matrix::Zero(dim, dim);
    for (int i = 0; i < fock.sites(); ++i) {
        for (int j = 0; j < fock.sites(); ++j) {
            if (h(i, j) == cplx{}) continue;
            out += h(i, j) * fock.creator(i) * fock.annihilator(j);
        }
    }
    return out;
}

std::vector<Matrix> jump_operators(const LatticeModel& model, const FockOperators& fock) {
    if (model.size() != fock.sites()) throw InvalidParameter("model and Fock space sizes differ");
    const Eigen::Index dim = fock.dimension();
    std::vector<Matrix> out;
    auto add_rows = [&](const Matrix& coeffs, bool creation) {
        for (Eigen::Index mu = 0; mu < coeffs.rows(); ++mu) {
            Matrix op = Matrix::Zero(dim, dim);
            for (int j = 0; j < fock.sites(); ++j) {
                if (coeffs(mu, j) == cplx{}) continue;
                op += coeffs(mu, j) * (creation ? fock.creator(j) : fock.annihilator(j));
            }
            out.push_back(std::move(op));
        }
    };
    add_rows(model.gain_coeffs(), true);
    add_rows(model.loss_coeffs(), false);
    return out;
}

LiouvillianMatrix build_liouvillian(const Matrix& hamiltonian, std::span<const Matrix> jumps,
                                    int sites) {
    check_sites(sites);
    const Eigen::Index dim = Eigen::Index{1} << sites;
    if (hamiltonian.rows() != dim || hamiltonian.cols() != dim) {
        throw InvalidParameter("many-body Hamiltonian has the wrong dimension");
    }
    const Matrix id = Matrix::Identity(dim, dim);
    const cplx minus_i{0.0, -1.0};
    LiouvillianMatrix out;
    out.sites = sites;
    out.superoperator = minus_i * (kron(hamiltonian, id) - kron(id, hamiltonian.transpose()));
    for (const Matrix& l : jumps) {
        if (l.rows() != dim || l.cols() != dim) {
            throw InvalidParameter("jump operator has the wrong dimension");
        }
        const Matrix ldl = l.adjoint() * l;
        out.superoperator += 2.0 * kron(l, l.conjugate()) - kron(ldl, id) - kron(id, ldl.transpose());
    }
    return out;
}

LiouvillianMatrix build_liouvillian(const LatticeModel& model) {
    check_sites(model.size());
    const FockOperators fock(model.size());
    const std::vector<Matrix> jumps = jump_operators(model, fock);
    return build_liouvillian(many_body_hamiltonian(model, fock), jumps, model.size());
}

Vector vectorize(const Matrix& rho) {
    const Eigen::Index d = rho.rows();
    Vector v(d * rho.cols());
    for (Eigen::Index a = 0; a < d; ++a) {
        for (Eigen::Index b = 0; b < rho.cols(); ++b) v(a * rho.cols() + b) = rho(a, b);
    }
    return v;
}

Matrix unvectorize(const Vector& v, Eigen::Index dimension) {
    if (v.size() != dimension * dimension) throw InvalidParameter("vector length mismatch");
    Matrix rho(dimension, dimension);
    for (Eigen::Index a = 0; a < dimension; ++a) {
        for (Eigen::Index b = 0; b < dimension; ++b) rho(a, b) = v(a * dimension + b);
    }
    return rho;
}

double trace_defect(const LiouvillianMatrix& liouvillian) {
    const Eigen::Index d = liouvillian.dimension();
    const Matrix& s = liouvillian.superoperator;
    double worst = 0.0;
    for (Eigen::Index col = 0; col < s.cols(); ++col) {
        cplx sum{};
        for (Eigen::Index a = 0; a < d; ++a) sum += s(a * d + a, col);
        worst = std::max(worst, std::abs(sum));
    }
    return worst;
}

namespace {

void check_density_matrix(const Matrix& rho0, Eigen::Index d) {
    if (rho0.rows() != d || rho0.cols() != d) {
        throw InvalidParameter("density matrix dimension does not match the Liouvillian");
    }
    if (linalg::hermiticity_defect(rho0) > kRhoTolerance) {
        throw InvalidParameter("density matrix is not Hermitian");
    }
    if (std::abs(rho0.trace() - cplx{1.0, 0.0}) > kRhoTolerance) {
        throw InvalidParameter("density matrix is not normalised (trace " +
                               std::to_string(rho0.trace().real()) + ")");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> check(linalg::hermitian_part(rho0), Eigen::EigenvaluesOnly);
    if (check.eigenvalues().minCoeff() < -kRhoTolerance) {
        throw PhysicalityError("density matrix is not positive semidefinite");
    }
}

}  // namespace

Matrix evolve_density_matrix(const Matrix& rho0, const LiouvillianMatrix& liouvillian, double t) {
    const Eigen::Index d = liouvillian.dimension();
    check_density_matrix(rho0, d);
    if (!std::isfinite(t) || t < 0.0) throw InvalidParameter("evolution time must be >= 0");
    if (t == 0.0) return rho0;
    const Matrix propagator = (liouvillian.superoperator * t).exp();
    return linalg::hermitian_part(unvectorize(propagator * vectorize(rho0), d));
}

std::vector<Matrix> evolve_trajectory(const Matrix& rho0, const LiouvillianMatrix& liouvillian,
                                      std::span<const double> t_grid) {
    const Eigen::Index d = liouvillian.dimension();
    check_density_matrix(rho0, d);
    std::vector<Matrix> out;
    out.reserve(t_grid.size());
    Vector state = vectorize(rho0);
    double previous = 0.0;
    double cached_step = -1.0;
    Matrix step_map;
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        const double t = t_grid[i];
        if (!std::isfinite(t) || t < 0.0 || (i > 0 && !(t > t_grid[i - 1]))) {
            throw InvalidParameter("time grid must be non-negative and strictly increasing");
        }
        const double step = t - previous;
        if (step > 0.0) {
            if (std::abs(step - cached_step) > 1e-12 * std::max(step, 1.0)) {
                step_map = (liouvillian.superoperator * step).exp();
                cached_step = step;
            }
            state = step_map * state;
        }
        previous = t;
        out.push_back(step > 0.0 || i > 0 ? linalg::hermitian_part(unvectorize(state, d)) : rho0);
    }
    return out;
}

CorrelationState correlation_from_rho(const Matrix& rho, const FockOperators& fock) {
    if (rho.rows() != fock.dimension() || rho.cols() != fock.dimension()) {
        throw InvalidParameter("density matrix dimension does not match the Fock space");
    }
    const int n = fock.sites();
    CorrelationState out;
    out.kind = StateKind::Full;
    out.matrix = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            out.matrix(i, j) = (fock.creator(i) * fock.annihilator(j) * rho).trace();
        }
    }
    return out;
}

LiouvillianSpectrum liouvillian_spectrum(const LiouvillianMatrix& liouvillian) {
    check_sites(liouvillian.sites);
    Eigen::ComplexEigenSolver<Matrix> solver(liouvillian.superoperator, false);
    if (solver.info() != Eigen::Success) throw Error("Liouvillian eigensolver failed");
    std::vector<cplx> values(solver.eigenvalues().data(),
                             solver.eigenvalues().data() + solver.eigenvalues().size());
    const double scale = std::max(1.0, liouvillian.superoperator.cwiseAbs().maxCoeff());
    std::sort(values.begin(), values.end(), [scale](cplx a, cplx b) {
        if (std::abs(a.real() - b.real()) > 1e-9 * scale) return a.real() > b.real();
        return a.imag() < b.imag();
    });
    LiouvillianSpectrum out;
    out.eigenvalues = Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
    if (values.size() > 1) out.gap = std::abs(values[1].real());
    return out;
}

Matrix steady_state_rho(const LiouvillianMatrix& liouvillian) {
    check_sites(liouvillian.sites);
    Eigen::BDCSVD<Matrix> svd(liouvillian.superoperator, Eigen::ComputeFullV);
    const Vector null = svd.matrixV().col(svd.matrixV().cols() - 1);
    Matrix rho = unvectorize(null, liouvillian.dimension());
    const cplx trace = rho.trace();
    if (std::abs(trace) < 1e-300) throw Error("Liouvillian null vector is traceless");
    rho /= trace;
    return linalg::hermitian_part(rho);
}

double rho_hs_distance(const Matrix& rho, const Matrix& rho_ss) {
    if (rho.rows() != rho_ss.rows() || rho.cols() != rho_ss.cols()) {
        throw InvalidParameter("density matrix dimensions differ");
    }
    return (rho - rho_ss).norm();
}

Matrix product_state(std::span<const double> occupations) {
    const int sites = static_cast<int>(occupations.size());
    check_sites(sites);
    for (double n : occupations) {
        if (!(n >= 0.0 && n <= 1.0)) throw InvalidParameter("occupations must lie in [0, 1]");
    }
    const Eigen::Index dim = Eigen::Index{1} << sites;
    Matrix rho = Matrix::Zero(dim, dim);
    for (Eigen::Index basis = 0; basis < dim; ++basis) {
        double p = 1.0;
        for (int i = 0; i < sites; ++i) {
            const bool filled = (basis >> (sites - 1 - i)) & 1;
            p *= filled ? occupations[static_cast<std::size_t>(i)]
                        : 1.0 - occupations[static_cast<std::size_t>(i)];
        }
        rho(basis, basis) = p;
    }
    return rho;
}

}  // namespace qmpemba::oracle
