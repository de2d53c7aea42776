#include "doctest.h"
#include "helpers.hpp"

#include "qmpemba/errors.hpp"

#include <Eigen/Eigenvalues>

using namespace testing;

namespace {

// -i H_HN - 2 Gamma I, H_HN with (J + Gamma) on c_j^dag c_{j+1} and (J - Gamma)
// on c_{j+1}^dag c_j.
Matrix hatano_nelson_generator(double j, double gamma, int sites) {
    Matrix h = Matrix::Zero(sites, sites);
    for (int s = 0; s + 1 < sites; ++s) {
        h(s, s + 1) = j + gamma;
        h(s + 1, s) = j - gamma;
    }
    return cplx{0.0, -1.0} * h - 2.0 * gamma * Matrix::Identity(sites, sites);
}

double min_eigenvalue(const Matrix& m) {
    Eigen::SelfAdjointEigenSolver<Matrix> s(linalg::hermitian_part(m), Eigen::EigenvaluesOnly);
    return s.eigenvalues().minCoeff();
}

}  // namespace

TEST_CASE("reference chain H_eff diagonal is uniformly -2 Gamma") {
    const auto h = effective_hamiltonian(reference_chain(40)).matrix;
    for (int i = 0; i < 40; ++i) CHECK(std::abs(h(i, i) - cplx{-0.4, 0.0}) < 1e-14);
}

TEST_CASE("reference chain H_eff equals the Hatano-Nelson generator") {
    const auto h = effective_hamiltonian(reference_chain(40)).matrix;
    CHECK(max_abs_diff(h, hatano_nelson_generator(1.0, 0.2, 40)) < 1e-12);
}

TEST_CASE("zero dissipation gives a purely unitary generator") {
    const auto model = build_chain_model(1.0, 0.0, 0.0, 4, Boundary::Open, true);
    const auto d = dissipator_matrices(model);
    CHECK(d.gain.cwiseAbs().maxCoeff() == 0.0);
    CHECK(d.loss.cwiseAbs().maxCoeff() == 0.0);
    const auto h = effective_hamiltonian(model).matrix;
    CHECK(max_abs_diff(h, cplx{0.0, 1.0} * model.hamiltonian().transpose()) < 1e-15);
    CHECK(max_abs_diff(h.adjoint(), -h) < 1e-15);
}

TEST_CASE("uncompensated OBC gain matrix") {
    const auto d = dissipator_matrices(build_chain_model(1.0, 0.2, 0.2, 4, Boundary::Open, false));
    CHECK(std::abs(d.gain(0, 0) - 0.1) < 1e-15);
    CHECK(std::abs(d.gain(3, 3) - 0.1) < 1e-15);
    CHECK(std::abs(d.gain(1, 1) - 0.2) < 1e-15);
    CHECK(std::abs(d.gain(2, 2) - 0.2) < 1e-15);
    for (int j = 0; j < 3; ++j) CHECK(std::abs(d.gain(j, j + 1) - cplx{0.0, 0.1}) < 1e-15);
    REQUIRE(d.decay_scale.has_value());
    CHECK(*d.decay_scale == doctest::Approx(0.2));
}

TEST_CASE("single jump row gives the hand-computed M_g") {
    Matrix dg(1, 2);
    dg << std::sqrt(0.1), cplx{0.0, std::sqrt(0.1)};
    const auto model = LatticeModel::custom(Matrix::Zero(2, 2), dg, Matrix(), Boundary::Open);
    const auto d = dissipator_matrices(model);
    Matrix expected(2, 2);
    expected << 0.1, cplx{0.0, 0.1}, cplx{0.0, -0.1}, 0.1;
    CHECK(max_abs_diff(d.gain, expected) < 1e-15);
    CHECK(!d.decay_scale.has_value());
    CHECK(d.loss.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("PBC dissipator diagonals are uniform") {
    const auto d = dissipator_matrices(build_chain_model(1.0, 0.3, 0.1, 4, Boundary::Periodic, true));
    for (int i = 0; i < 4; ++i) {
        CHECK(std::abs(d.gain(i, i) - 0.3) < 1e-15);
        CHECK(std::abs(d.loss(i, i) - 0.1) < 1e-15);
    }
}

TEST_CASE("two-site chain has asymmetric hopping magnitudes") {
    const auto h = effective_hamiltonian(reference_chain(2)).matrix;
    CHECK(std::abs(h(0, 1)) == doctest::Approx(1.2).epsilon(1e-14));
    CHECK(std::abs(h(1, 0)) == doctest::Approx(0.8).epsilon(1e-14));
}

TEST_CASE("invalid parameters are rejected") {
    CHECK_THROWS_AS(build_chain_model(1.0, 0.2, -0.1, 8, Boundary::Open, true), InvalidParameter);
    CHECK_THROWS_AS(build_chain_model(-1.0, 0.2, 0.1, 8, Boundary::Open, true), InvalidParameter);
    CHECK_THROWS_AS(build_chain_model(1.0, 0.2, 0.2, 1, Boundary::Open, true), InvalidParameter);
    CHECK_THROWS_AS(build_chain_model(1.0, 0.2, 0.2, 0, Boundary::Open, true), InvalidParameter);
    CHECK_THROWS_AS(build_chain_model(1.0, 0.2, 0.2, kDefaultMaxSites + 1, Boundary::Open, true),
                    SizeLimitExceeded);
    Matrix h(2, 2);
    h << 0.0, 1.0, 2.0, 0.0;
    CHECK_THROWS_AS(LatticeModel::custom(h, Matrix(), Matrix(), Boundary::Open), InvalidParameter);
    CHECK_THROWS_AS(LatticeModel::custom(Matrix::Zero(2, 2), Matrix::Ones(1, 3), Matrix(),
                                         Boundary::Open),
                    InvalidParameter);
}

TEST_CASE("dissipators are PSD and H_eff is dissipative") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 10; ++trial) {
        const int n = 2 + trial;
        const auto model = LatticeModel::custom(random_hermitian(n, rng), random_matrix(3, n, rng),
                                                random_matrix(2, n, rng), Boundary::Open);
        const auto d = dissipator_matrices(model);
        CHECK(min_eigenvalue(d.gain) >= -1e-12);
        CHECK(min_eigenvalue(d.loss) >= -1e-12);
        const Matrix h = effective_hamiltonian(model).matrix;
        CHECK(max_abs_diff(h + h.adjoint(), -(d.loss.transpose() + d.gain) -
                                                (d.loss.transpose() + d.gain).adjoint()) < 1e-12);
        Eigen::ComplexEigenSolver<Matrix> es(h, false);
        CHECK(es.eigenvalues().real().maxCoeff() <= 1e-12);
    }
}

TEST_CASE("dissipators are invariant under permuting jump rows") {
    std::mt19937_64 rng(12);
    const Matrix dg = random_matrix(5, 4, rng);
    const Matrix dl = random_matrix(3, 4, rng);
    Eigen::PermutationMatrix<Eigen::Dynamic> perm(5);
    perm.indices() << 3, 0, 4, 1, 2;
    const auto h = random_hermitian(4, rng);
    const auto a = dissipator_matrices(LatticeModel::custom(h, dg, dl, Boundary::Open));
    const auto b = dissipator_matrices(LatticeModel::custom(h, perm * dg, dl, Boundary::Open));
    CHECK(max_abs_diff(a.gain, b.gain) < 1e-14);
}

TEST_CASE("OBC and PBC generators differ only in the corners") {
    const int n = 10;
    const Matrix obc = effective_hamiltonian(reference_chain(n, Boundary::Open)).matrix;
    const Matrix pbc = effective_hamiltonian(reference_chain(n, Boundary::Periodic)).matrix;
    Eigen::MatrixXd diff = (obc - pbc).cwiseAbs();
    CHECK(diff(0, n - 1) > 0.5);
    CHECK(diff(n - 1, 0) > 0.1);
    diff(0, n - 1) = diff(n - 1, 0) = 0.0;
    CHECK(diff.maxCoeff() < 1e-15);
}

TEST_CASE("effective Hamiltonian is linear in H, M_g and M_l") {
    std::mt19937_64 rng(13);
    const int n = 5;
    const Matrix h1 = random_hermitian(n, rng), h2 = random_hermitian(n, rng);
    const Matrix g = random_matrix(2, n, rng), l = random_matrix(2, n, rng);
    const Matrix zero(0, n);
    auto heff = [&](const Matrix& h, const Matrix& dg, const Matrix& dl) {
        return effective_hamiltonian(LatticeModel::custom(h, dg, dl, Boundary::Open)).matrix;
    };
    const Matrix sum = heff(h1 + h2, g, l);
    const Matrix parts = heff(h1, zero, zero) + heff(h2, zero, zero) +
                         heff(Matrix::Zero(n, n), g, zero) + heff(Matrix::Zero(n, n), zero, l);
    CHECK(max_abs_diff(sum, parts) < 1e-13);
}

TEST_CASE("correlation-matrix physicality") {
    CHECK(validate_correlation_matrix(0.5 * Matrix::Identity(6, 6)).physical);
    Matrix bad = Matrix::Zero(2, 2);
    bad(0, 0) = 1.5;
    const auto report = validate_correlation_matrix(bad);
    CHECK(!report.physical);
    CHECK(report.max_eigenvalue == doctest::Approx(1.5));
    Matrix edge = 0.5 * Matrix::Identity(4, 4);
    edge(0, 0) += 0.5;
    edge(3, 3) -= 0.5;
    CHECK(validate_correlation_matrix(edge).physical);
    Matrix nonherm = 0.5 * Matrix::Identity(2, 2);
    nonherm(0, 1) = 0.1;
    CHECK(!validate_correlation_matrix(nonherm).physical);
    CHECK_THROWS_AS(validate_correlation_matrix(Matrix::Zero(2, 3)), InvalidParameter);
}

TEST_CASE("right skin conjugates the jump phases") {
    ChainParameters p;
    p.hopping = 1.0;
    p.gamma_gain = p.gamma_loss = 0.2;
    p.sites = 6;
    p.skin = SkinDirection::Right;
    const Matrix h = effective_hamiltonian(LatticeModel::chain(p)).matrix;
    CHECK(std::abs(h(0, 1)) == doctest::Approx(0.8));
    CHECK(std::abs(h(1, 0)) == doctest::Approx(1.2));
}
