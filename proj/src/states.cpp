#include "qmpemba/states.hpp"

#include "qmpemba/errors.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <string>

namespace qmpemba {

namespace {

constexpr double kAmplitudeLimit = 0.5;

Matrix half_filled(int sites) { return 0.5 * Matrix::Identity(sites, sites); }

void check_sites(int sites) {
    if (sites < 1) throw InvalidParameter("sites must be positive");
}

CorrelationState finish(Matrix deviation, const std::optional<Matrix>& steady) {
    const int n = static_cast<int>(deviation.rows());
    require_physical(deviation, steady ? *steady : half_filled(n));
    return CorrelationState{std::move(deviation), StateKind::Deviation, 0.0};
}

}  // namespace

void require_physical(const Matrix& deviation, const Matrix& steady) {
    if (deviation.rows() != steady.rows() || deviation.cols() != steady.cols()) {
        throw InvalidParameter("deviation and steady state differ in size");
    }
    const PhysicalityReport report = validate_correlation_matrix(steady + deviation);
    if (!report.physical) {
        throw PhysicalityError("initial correlation matrix is unphysical (spectrum [" +
                               std::to_string(report.min_eigenvalue) + ", " +
                               std::to_string(report.max_eigenvalue) + "], Hermiticity defect " +
                               std::to_string(report.hermiticity_defect) + ")");
    }
}

CorrelationState diagonal_edge_state(Side side, int width, double amplitude, int sites,
                                     const std::optional<Matrix>& steady) {
    check_sites(sites);
    if (width < 1 || width > sites) throw InvalidParameter("width must lie in [1, L]");
    if (!std::isfinite(amplitude) || std::abs(amplitude) > kAmplitudeLimit) {
        throw PhysicalityError("edge amplitude must satisfy |a| <= 0.5");
    }
    Matrix d = Matrix::Zero(sites, sites);
    for (int i = 0; i < width; ++i) {
        const int site = side == Side::Left ? i : sites - 1 - i;
        d(site, site) = amplitude;
    }
    return finish(std::move(d), steady);
}

CorrelationState uniform_state(double amplitude, int sites, const std::optional<Matrix>& steady) {
    check_sites(sites);
    if (!std::isfinite(amplitude)) throw InvalidParameter("amplitude must be finite");
    return finish(amplitude * Matrix::Identity(sites, sites), steady);
}

CorrelationState offdiagonal_state(std::span<const Band> bands, int sites, Boundary boundary,
                                   const std::optional<Matrix>& steady) {
    check_sites(sites);
    const bool periodic = boundary == Boundary::Periodic;
    std::map<int, cplx> by_offset;
    for (const Band& band : bands) {
        if (std::abs(band.offset) >= sites) {
            throw InvalidParameter("band offset " + std::to_string(band.offset) +
                                   " exceeds the chain");
        }
        if (periodic && band.offset != 0 && 2 * std::abs(band.offset) >= sites) {
            throw InvalidParameter("periodic band offset must satisfy 2|d| < L");
        }
        if (!std::isfinite(band.amplitude.real()) || !std::isfinite(band.amplitude.imag())) {
            throw InvalidParameter("band amplitude must be finite");
        }
        if (!by_offset.emplace(band.offset, band.amplitude).second) {
            throw InvalidParameter("band offset " + std::to_string(band.offset) + " listed twice");
        }
    }
    for (const auto& [offset, amplitude] : by_offset) {
        if (offset == 0 && std::abs(amplitude.imag()) > 1e-14) {
            throw InvalidParameter("diagonal band amplitude must be real");
        }
        auto mirror = by_offset.find(-offset);
        if (offset != 0 && mirror != by_offset.end() &&
            std::abs(mirror->second - std::conj(amplitude)) > 1e-14) {
            throw InvalidParameter("bands " + std::to_string(offset) + " and " +
                                   std::to_string(-offset) +
                                   " are not complex conjugates (non-Hermitian)");
        }
    }

    Matrix d = Matrix::Zero(sites, sites);
    for (const auto& [offset, amplitude] : by_offset) {
        const bool mirrored = offset != 0 && !by_offset.contains(-offset);
        for (int l = 0; l < sites; ++l) {
            int m = l + offset;
            if (periodic) {
                m = ((m % sites) + sites) % sites;
            } else if (m < 0 || m >= sites) {
                continue;
            }
            d(l, m) = offset == 0 ? cplx{amplitude.real(), 0.0} : amplitude;
            if (mirrored) d(m, l) = std::conj(amplitude);
        }
    }
    return finish(std::move(d), steady);
}

CorrelationState build_initial_state(const InitialStateSpec& spec, int sites, Boundary boundary,
                                     const std::optional<Matrix>& steady) {
    switch (spec.kind) {
        case InitialStateKind::DiagonalEdge:
            return diagonal_edge_state(spec.side, spec.width, spec.amplitude, sites, steady);
        case InitialStateKind::Uniform:
            return uniform_state(spec.amplitude, sites, steady);
        case InitialStateKind::OffDiagonalBand:
            return offdiagonal_state(spec.bands, sites, boundary, steady);
    }
    throw InvalidParameter("unknown initial state kind");
}

std::vector<cplx> fourier_components(const Matrix& deviation) {
    if (!is_circulant(deviation)) {
        throw NotTranslationInvariant("Fourier components need a circulant deviation");
    }
    const auto n = deviation.rows();
    std::vector<cplx> out(static_cast<std::size_t>(n), cplx{0.0, 0.0});
    for (Eigen::Index m = 0; m < n; ++m) {
        for (Eigen::Index d = 0; d < n; ++d) {
            const double angle = 2.0 * std::numbers::pi * static_cast<double>((m * d) % n) /
                                 static_cast<double>(n);
            out[static_cast<std::size_t>(m)] += deviation(0, d) * std::polar(1.0, angle);
        }
    }
    return out;
}

std::vector<cplx> fourier_components(const CorrelationState& deviation) {
    if (deviation.kind != StateKind::Deviation) {
        throw InvalidParameter("Fourier analysis applies to deviation states");
    }
    return fourier_components(deviation.matrix);
}

}  // namespace qmpemba
