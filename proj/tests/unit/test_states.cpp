#include "doctest.h"
#include "helpers.hpp"

#include "qmpemba/dynamics.hpp"
#include "qmpemba/errors.hpp"
#include "qmpemba/states.hpp"

#include <cmath>
#include <numbers>

using namespace testing;

namespace {

Matrix reversal(int n) {
    Matrix p = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i) p(i, n - 1 - i) = 1.0;
    return p;
}

}  // namespace

TEST_CASE("diagonal edge state distances") {
    const auto left = diagonal_edge_state(Side::Left, 4, 0.5, 40);
    CHECK(left.kind == StateKind::Deviation);
    CHECK(hs_distance(left) == doctest::Approx(1.0).epsilon(1e-15));
    for (int i = 0; i < 4; ++i) CHECK(left.matrix(i, i) == cplx{0.5, 0.0});
    CHECK(left.matrix(4, 4) == cplx{0.0, 0.0});

    const auto right = diagonal_edge_state(Side::Right, 1, -0.5, 40);
    CHECK(right.matrix(39, 39) == cplx{-0.5, 0.0});
    CHECK(right.matrix.cwiseAbs().sum() == doctest::Approx(0.5));
    CHECK(hs_distance(right) == doctest::Approx(0.5));
}

TEST_CASE("nearest-neighbour band distance") {
    const std::vector<Band> bands{{1, 0.2}};
    const auto d = offdiagonal_state(bands, 40);
    CHECK(hs_distance(d) == doctest::Approx(0.2 * std::sqrt(78.0)).epsilon(1e-14));
    CHECK(d.matrix(3, 4) == cplx{0.2, 0.0});
    CHECK(d.matrix(4, 3) == cplx{0.2, 0.0});
    CHECK(d.matrix(0, 39) == cplx{0.0, 0.0});
    const auto ring = offdiagonal_state(bands, 40, Boundary::Periodic);
    CHECK(ring.matrix(0, 39) == cplx{0.2, 0.0});
    CHECK(hs_distance(ring) == doctest::Approx(0.2 * std::sqrt(80.0)).epsilon(1e-14));
}

TEST_CASE("complex bands are mirrored as conjugates") {
    const cplx a{0.1, 0.15};
    const auto d = offdiagonal_state(std::vector<Band>{{1, a}}, 6);
    CHECK(d.matrix(2, 3) == a);
    CHECK(d.matrix(3, 2) == std::conj(a));
    CHECK(linalg::hermiticity_defect(d.matrix) == 0.0);
    const auto both = offdiagonal_state(std::vector<Band>{{1, a}, {-1, std::conj(a)}}, 6);
    CHECK(both.matrix == d.matrix);
}

TEST_CASE("band validation") {
    CHECK(offdiagonal_state(std::vector<Band>{}, 5).matrix.isZero());
    CHECK_THROWS_AS(offdiagonal_state(std::vector<Band>{{1, 0.1}, {-1, 0.2}}, 5), InvalidParameter);
    CHECK_THROWS_AS(offdiagonal_state(std::vector<Band>{{1, 0.1}, {1, 0.1}}, 5), InvalidParameter);
    CHECK_THROWS_AS(offdiagonal_state(std::vector<Band>{{0, cplx{0.1, 0.1}}}, 5), InvalidParameter);
    CHECK_THROWS_AS(offdiagonal_state(std::vector<Band>{{5, 0.1}}, 5), InvalidParameter);
    CHECK_THROWS_AS(offdiagonal_state(std::vector<Band>{{2, 0.1}}, 4, Boundary::Periodic),
                    InvalidParameter);
}

TEST_CASE("unphysical initial states are rejected") {
    // 1/2 + 2 a1 cos k exceeds 1 at k = 0 on a four-site ring.
    CHECK_THROWS_AS(offdiagonal_state(std::vector<Band>{{1, 0.3}}, 4, Boundary::Periodic),
                    PhysicalityError);
    CHECK_NOTHROW(offdiagonal_state(std::vector<Band>{{1, 0.2}}, 4, Boundary::Periodic));
    CHECK_THROWS_AS(diagonal_edge_state(Side::Left, 2, 0.6, 10), PhysicalityError);
    CHECK_THROWS_AS(uniform_state(-0.51, 10), PhysicalityError);
    CHECK_NOTHROW(uniform_state(0.5, 10));
    CHECK_THROWS_AS(diagonal_edge_state(Side::Left, 0, 0.1, 10), InvalidParameter);
    CHECK_THROWS_AS(diagonal_edge_state(Side::Left, 11, 0.1, 10), InvalidParameter);

    // Checked against the supplied steady state instead of I/2.
    const Matrix empty = Matrix::Zero(6, 6);
    CHECK_THROWS_AS(uniform_state(-0.1, 6, empty), PhysicalityError);
    CHECK_NOTHROW(uniform_state(0.9, 6, empty));
    CHECK_THROWS_AS(require_physical(Matrix::Identity(3, 3), 0.5 * Matrix::Identity(3, 3)),
                    PhysicalityError);
}

TEST_CASE("build_initial_state dispatches on the kind") {
    InitialStateSpec spec;
    spec.kind = InitialStateKind::DiagonalEdge;
    spec.side = Side::Right;
    spec.width = 2;
    spec.amplitude = 0.5;
    CHECK(build_initial_state(spec, 8, Boundary::Open).matrix ==
          diagonal_edge_state(Side::Right, 2, 0.5, 8).matrix);
    spec.kind = InitialStateKind::Uniform;
    spec.amplitude = 0.25;
    CHECK(build_initial_state(spec, 8, Boundary::Open).matrix == uniform_state(0.25, 8).matrix);
    spec.kind = InitialStateKind::OffDiagonalBand;
    spec.bands = {{1, 0.2}};
    CHECK(build_initial_state(spec, 8, Boundary::Periodic).matrix ==
          offdiagonal_state(spec.bands, 8, Boundary::Periodic).matrix);
}

TEST_CASE("left and right edge states are mirror images") {
    const int n = 12;
    const Matrix p = reversal(n);
    for (int w : {1, 3, 6}) {
        const Matrix left = diagonal_edge_state(Side::Left, w, 0.4, n).matrix;
        const Matrix right = diagonal_edge_state(Side::Right, w, 0.4, n).matrix;
        CHECK(p * left * p == right);
    }
}

TEST_CASE("Fourier components of banded ring states") {
    const int n = 16;
    const double a0 = 0.05;
    const double a1 = 0.2;
    const auto d = offdiagonal_state(std::vector<Band>{{0, a0}, {1, a1}}, n, Boundary::Periodic);
    const auto c = fourier_components(d);
    REQUIRE(c.size() == static_cast<std::size_t>(n));
    double power = 0.0;
    for (int m = 0; m < n; ++m) {
        const double k = 2.0 * std::numbers::pi * m / n;
        CHECK(std::abs(c[m] - cplx{a0 + 2.0 * a1 * std::cos(k), 0.0}) < 1e-14);
        power += std::norm(c[m]);
    }
    CHECK(power == doctest::Approx(d.matrix.squaredNorm()).epsilon(1e-13));

    const auto u = fourier_components(uniform_state(0.25, n));
    for (const cplx& x : u) CHECK(std::abs(x - cplx{0.25, 0.0}) < 1e-15);
    const auto z = fourier_components(Matrix(Matrix::Zero(n, n)));
    for (const cplx& x : z) CHECK(x == cplx{0.0, 0.0});

    CHECK_THROWS_AS(fourier_components(diagonal_edge_state(Side::Left, 2, 0.5, n)),
                    NotTranslationInvariant);
}

TEST_CASE("Parseval holds for complex bands") {
    const int n = 20;
    const auto d = offdiagonal_state(std::vector<Band>{{0, 0.02}, {1, cplx{0.05, 0.08}}, {3, cplx{0.0, -0.04}}},
                                     n, Boundary::Periodic);
    double power = 0.0;
    for (const cplx& x : fourier_components(d)) power += std::norm(x);
    CHECK(power == doctest::Approx(d.matrix.squaredNorm()).epsilon(1e-13));
}

TEST_CASE("ring modes decay at twice the real part of their eigenvalue") {
    const int n = 16;
    const double gamma = 0.2;
    const auto gen = effective_hamiltonian(reference_chain(n, Boundary::Periodic));
    const auto d = offdiagonal_state(std::vector<Band>{{0, 0.02}, {1, cplx{0.05, 0.08}}, {2, -0.03}}, n,
                                     Boundary::Periodic);
    const auto c0 = fourier_components(d);
    const auto p = make_propagator(gen, PropagatorMethod::Spectral);
    for (double t : {0.5, 3.0, 12.0}) {
        const auto ct = fourier_components(p->propagate(d.matrix, t));
        for (int m = 0; m < n; ++m) {
            const double k = 2.0 * std::numbers::pi * m / n;
            const cplx expected = c0[m] * std::exp(-4.0 * gamma * t + 4.0 * gamma * t * std::sin(k));
            CHECK_MESSAGE(std::abs(ct[m] - expected) < 1e-8, "m = ", m, " t = ", t);
        }
    }
}
