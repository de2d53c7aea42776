#pragma once

#include "qmpemba/linalg.hpp"
#include "qmpemba/model.hpp"

#include <random>

namespace testing {

using namespace qmpemba;

inline LatticeModel reference_chain(int sites, Boundary boundary = Boundary::Open,
                                bool edge_compensation = true) {
    return build_chain_model(1.0, 0.2, 0.2, sites, boundary, edge_compensation);
}

inline Matrix random_matrix(int rows, int cols, std::mt19937_64& rng, double scale = 1.0) {
    std::normal_distribution<double> normal(0.0, scale);
    Matrix m(rows, cols);
    for (int j = 0; j < cols; ++j) {
        for (int i = 0; i < rows; ++i) m(i, j) = cplx{normal(rng), normal(rng)};
    }
    return m;
}

inline Matrix random_hermitian(int n, std::mt19937_64& rng, double scale = 1.0) {
    const Matrix a = random_matrix(n, n, rng, scale);
    return 0.5 * (a + a.adjoint());
}

// Random physical correlation matrix: U diag(n) U^dag with n in [0, 1].
inline Matrix random_correlation(int n, std::mt19937_64& rng) {
    Eigen::HouseholderQR<Matrix> qr(random_matrix(n, n, rng));
    const Matrix q = qr.householderQ();
    std::uniform_real_distribution<double> occ(0.0, 1.0);
    RealVector d(n);
    for (int i = 0; i < n; ++i) d(i) = occ(rng);
    return q * d.cast<cplx>().asDiagonal() * q.adjoint();
}

inline double max_abs_diff(const Matrix& a, const Matrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

}  // namespace testing
