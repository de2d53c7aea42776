#pragma once

#include "qmpemba/dynamics.hpp"
#include "qmpemba/linalg.hpp"
#include "qmpemba/model.hpp"

#include <optional>
#include <span>
#include <vector>

namespace qmpemba {

enum class Side { Left, Right };

enum class InitialStateKind { DiagonalEdge, OffDiagonalBand, Uniform };

// One diagonal of the deviation matrix: dC(l, l + offset) = amplitude.
struct Band {
    int offset = 0;
    cplx amplitude{0.0, 0.0};
};

struct InitialStateSpec {
    InitialStateKind kind = InitialStateKind::DiagonalEdge;
    Side side = Side::Left;  // DiagonalEdge
    int width = 1;           // DiagonalEdge
    double amplitude = 0.0;  // DiagonalEdge, Uniform
    std::vector<Band> bands; // OffDiagonalBand
};

// Deviation with `amplitude` on the `width` sites nearest the chosen edge.
// Checked against the half-filled steady state I/2 unless another one is given.
CorrelationState diagonal_edge_state(Side side, int width, double amplitude, int sites,
                                     const std::optional<Matrix>& steady = std::nullopt);

CorrelationState uniform_state(double amplitude, int sites,
                               const std::optional<Matrix>& steady = std::nullopt);

// Banded Hermitian deviation. A band listed only for +d (or -d) gets its
// conjugate mirror filled in; listing both with non-conjugate amplitudes is an
// error. Periodic bands wrap around the ring and need 2|d| < L.
CorrelationState offdiagonal_state(std::span<const Band> bands, int sites,
                                   Boundary boundary = Boundary::Open,
                                   const std::optional<Matrix>& steady = std::nullopt);

CorrelationState build_initial_state(const InitialStateSpec& spec, int sites, Boundary boundary,
                                     const std::optional<Matrix>& steady = std::nullopt);

// Throws PhysicalityError unless steady + deviation is a valid correlation matrix.
void require_physical(const Matrix& deviation, const Matrix& steady);

// c_k = sum_d dC(0, d) e^{ikd}, k = 2 pi m / L, normalised so that
// sum_k |c_k|^2 = ||dC||_F^2. Throws NotTranslationInvariant for
// non-circulant input.
std::vector<cplx> fourier_components(const Matrix& deviation);
std::vector<cplx> fourier_components(const CorrelationState& deviation);

}  // namespace qmpemba
