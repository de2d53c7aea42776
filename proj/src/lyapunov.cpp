#include "qmpemba/dynamics.hpp"

#include "qmpemba/errors.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <string>

namespace qmpemba {

namespace {
constexpr double kDecayMargin = 1e-12;
}  // namespace

std::string_view to_string(LyapunovMethod m) {
    switch (m) {
        case LyapunovMethod::Auto: return "auto";
        case LyapunovMethod::Spectral: return "spectral";
        case LyapunovMethod::Schur: return "schur";
        case LyapunovMethod::Kronecker: return "kronecker";
    }
    return "unknown";
}

Matrix solve_lyapunov_spectral(const EigenSystem& system, const Matrix& rhs) {
    const Matrix projected = system.left.adjoint() * rhs * system.left;
    const auto n = projected.rows();
    Matrix x(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = 0; i < n; ++i) {
            x(i, j) = projected(i, j) / (system.eigenvalues[i] + std::conj(system.eigenvalues[j]));
        }
    }
    return linalg::multiply_adjoint(linalg::multiply(system.right, x), system.right);
}

Matrix solve_lyapunov_schur(const Matrix& a, const Matrix& rhs) {
    // A = U T U^dag turns the equation into T Y + Y T^dag = U^dag Q U with T
    // upper triangular; columns of Y are solved from the last one backwards.
    Eigen::ComplexSchur<Matrix> schur(a);
    if (schur.info() != Eigen::Success) throw Error("Schur decomposition did not converge");
    const Matrix& t = schur.matrixT();
    const Matrix& u = schur.matrixU();
    const Matrix f = u.adjoint() * rhs * u;
    const auto n = a.rows();
    Matrix y = Matrix::Zero(n, n);
    for (Eigen::Index j = n - 1; j >= 0; --j) {
        Vector col = f.col(j);
        for (Eigen::Index k = j + 1; k < n; ++k) col -= std::conj(t(j, k)) * y.col(k);
        Matrix shifted = t;
        shifted.diagonal().array() += std::conj(t(j, j));
        y.col(j) = shifted.triangularView<Eigen::Upper>().solve(col);
    }
    return u * y * u.adjoint();
}

Matrix solve_lyapunov_kronecker(const Matrix& a, const Matrix& rhs) {
    // Column-major vec: vec(A X) = (I (x) A) vec X, vec(X A^dag) = (conj(A) (x) I) vec X.
    const auto n = a.rows();
    const auto nn = n * n;
    Matrix system = Matrix::Zero(nn, nn);
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = 0; i < n; ++i) {
            const Eigen::Index row = i + n * j;
            for (Eigen::Index k = 0; k < n; ++k) system(row, k + n * j) += a(i, k);
            for (Eigen::Index l = 0; l < n; ++l) system(row, i + n * l) += std::conj(a(j, l));
        }
    }
    const Vector b = rhs.reshaped();
    const Vector x = system.partialPivLu().solve(b);
    return x.reshaped(n, n);
}

double lyapunov_residual(const Matrix& generator, const Matrix& gain, const Matrix& c) {
    return linalg::max_abs(generator * c + c * generator.adjoint() + 2.0 * gain);
}

SteadyStateResult solve_steady_state(const LatticeModel& model,
                                     const SteadyStateOptions& options) {
    const EffectiveHamiltonian generator = effective_hamiltonian(model);
    const DissipatorPair dissipators = dissipator_matrices(model);
    const Matrix& h = generator.matrix;

    Eigen::ComplexEigenSolver<Matrix> values(h, false);
    for (Eigen::Index i = 0; i < values.eigenvalues().size(); ++i) {
        if (values.eigenvalues()[i].real() >= -kDecayMargin) {
            throw NoUniqueSteadyState(
                "generator has a non-decaying mode (Re lambda = " +
                std::to_string(values.eigenvalues()[i].real()) + "); the steady state is not unique");
        }
    }

    const Matrix rhs = -2.0 * dissipators.gain;
    SteadyStateResult result;
    auto finish = [&](Matrix c, LyapunovMethod used) {
        result.state.matrix = linalg::hermitian_part(c);
        result.state.kind = StateKind::Full;
        result.method = used;
        result.residual = lyapunov_residual(h, dissipators.gain, result.state.matrix);
    };

    switch (options.method) {
        case LyapunovMethod::Spectral:
            finish(solve_lyapunov_spectral(biorthogonal_eigensystem(generator), rhs),
                   LyapunovMethod::Spectral);
            return result;
        case LyapunovMethod::Schur:
            finish(solve_lyapunov_schur(h, rhs), LyapunovMethod::Schur);
            return result;
        case LyapunovMethod::Kronecker:
            if (model.size() > options.kronecker_max_sites) {
                throw SizeLimitExceeded("vectorised Lyapunov solve is capped at " +
                                        std::to_string(options.kronecker_max_sites) + " sites");
            }
            finish(solve_lyapunov_kronecker(h, rhs), LyapunovMethod::Kronecker);
            return result;
        case LyapunovMethod::Auto:
            break;
    }

    try {
        finish(solve_lyapunov_spectral(biorthogonal_eigensystem(generator), rhs),
               LyapunovMethod::Spectral);
        if (result.residual <= options.residual_tolerance) return result;
    } catch (const DefectiveEigensystem&) {
    }
    finish(solve_lyapunov_schur(h, rhs), LyapunovMethod::Schur);
    return result;
}

CorrelationState steady_state(const LatticeModel& model) {
    return solve_steady_state(model).state;
}

}  // namespace qmpemba
