#pragma once

#include "qmpemba/linalg.hpp"
#include "qmpemba/model.hpp"

#include <optional>
#include <vector>

namespace qmpemba {

// Biorthogonality defect above which an eigensystem is rejected as defective.
inline constexpr double kDefectThreshold = 1e-6;

// Right eigenvectors are unit-normalised columns; left eigenvectors are the
// columns of (R^-1)^dag, so <L_i|R_j> = delta_ij up to rounding. Skin-effect
// generators have exponentially conditioned eigenvectors, so the defects are
// always measured.
struct EigenSystem {
    Vector eigenvalues;
    Matrix right;
    Matrix left;
    double biorthogonality_defect = 0.0;  // max |L^dag R - I|
    double completeness_defect = 0.0;     // max |R L^dag - I|
    // max |R diag(lambda) L^dag - H| / max(1, max|H|). Catches numerically
    // defective matrices, where L = (R^-1)^dag is biorthogonal by construction.
    double reconstruction_defect = 0.0;
    double condition_estimate = 0.0;      // 2-norm condition number of R
    double residual = 0.0;                // max |H R - R diag(lambda)|
    std::optional<ChainParameters> chain;

    int size() const { return static_cast<int>(eigenvalues.size()); }
};

// Eigenvalues ordered by descending real part; real parts within a small
// relative band are treated as equal and ordered by ascending imaginary part.
// Throws DefectiveEigensystem when the defect exceeds kDefectThreshold.
EigenSystem biorthogonal_eigensystem(const EffectiveHamiltonian& generator);
EigenSystem biorthogonal_eigensystem(const Matrix& generator);

// -2*Gamma - 2i*sqrt((J-Gamma)(J+Gamma)) cos(pi m / (L+1)), m = 1..L.
// J < Gamma takes the imaginary branch of the square root.
std::vector<cplx> analytic_spectrum_obc(double hopping, double gamma_gain, double gamma_loss,
                                        int sites);

// -2*Gamma - 2iJ cos k - 2*Gamma sin k, k = 2 pi m / L, m = 0..L-1.
std::vector<cplx> analytic_spectrum_pbc(double hopping, double gamma_gain, double gamma_loss,
                                        int sites);

enum class EigenvectorSide { Right, Left };

struct LocalizationReport {
    std::vector<double> mean_position;   // sum_x x |psi(x)|^2 / sum_x |psi(x)|^2, x = 1..L
    std::vector<double> envelope_slope;  // least-squares slope of ln|psi(x)| over the bulk
    // Slope of (1/2) ln sum_i |psi_i(x)|^2 over the bulk. The nodes of the
    // individual standing waves average out in the sum.
    double aggregate_slope = 0.0;
    std::optional<double> theoretical_slope;  // chain models: +-ln r
};

LocalizationReport localization_profile(const EigenSystem& system,
                                        EigenvectorSide side = EigenvectorSide::Right);

// r = sqrt(|(J - Gamma) / (J + Gamma)|)
double gauge_ratio(double hopping, double decay_scale);

// Diagonal of the imaginary-gauge similarity S, S_jj = r^j for j = 1..L (left
// skin) or r^-j (right skin). S^-1 H_HN S is the uniform Hermitian chain with
// hopping sqrt((J-Gamma)(J+Gamma)) when J > Gamma. Throws GaugeUnavailable
// for J == Gamma.
RealVector gauge_transform(double hopping, double decay_scale, int sites,
                           SkinDirection skin = SkinDirection::Left);

double gauge_condition_number(const RealVector& diagonal);

}  // namespace qmpemba
