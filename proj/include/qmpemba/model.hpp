#pragma once

#include "qmpemba/linalg.hpp"

#include <optional>
#include <string_view>

namespace qmpemba {

enum class Boundary { Open, Periodic };

// Edge on which the right eigenvectors of the chain generator pile up. The
// right-skinned chain uses complex-conjugated jump phases.
enum class SkinDirection { Left, Right };

std::string_view to_string(Boundary b);
std::string_view to_string(SkinDirection s);

inline constexpr int kDefaultMaxSites = 512;

struct ChainParameters {
    double hopping = 1.0;     // J
    double gamma_gain = 0.0;  // gamma_g
    double gamma_loss = 0.0;  // gamma_l
    int sites = 2;
    Boundary boundary = Boundary::Open;
    // Adds single-site jumps on sites 1 and L (OBC only) so every site sees the
    // same on-site decay -2*Gamma.
    bool edge_compensation = true;
    SkinDirection skin = SkinDirection::Left;

    // Gamma = (gamma_l + gamma_g) / 2
    double decay_scale() const { return 0.5 * (gamma_gain + gamma_loss); }
};

// Quadratic Hamiltonian sum_ij c_i^dag H_ij c_j together with linear jump
// operators L_mu^g = sum_i Dg(mu, i) c_i^dag and L_mu^l = sum_i Dl(mu, i) c_i.
class LatticeModel {
public:
    static LatticeModel chain(const ChainParameters& params, int max_sites = kDefaultMaxSites);

    // Generic model. Jump coefficient matrices have one row per jump operator
    // and one column per site; an empty row count means no jumps of that kind.
    static LatticeModel custom(Matrix hamiltonian, Matrix gain_coeffs, Matrix loss_coeffs,
                               Boundary boundary = Boundary::Open,
                               int max_sites = kDefaultMaxSites);

    int size() const { return static_cast<int>(hamiltonian_.rows()); }
    const Matrix& hamiltonian() const { return hamiltonian_; }
    const Matrix& gain_coeffs() const { return gain_; }
    const Matrix& loss_coeffs() const { return loss_; }
    Boundary boundary() const { return boundary_; }
    bool edge_compensation() const { return chain_ && chain_->edge_compensation; }
    const std::optional<ChainParameters>& chain_parameters() const { return chain_; }

private:
    LatticeModel(Matrix h, Matrix g, Matrix l, Boundary b, std::optional<ChainParameters> chain);

    Matrix hamiltonian_;
    Matrix gain_;
    Matrix loss_;
    Boundary boundary_;
    std::optional<ChainParameters> chain_;
};

LatticeModel build_chain_model(double hopping, double gamma_gain, double gamma_loss, int sites,
                               Boundary boundary, bool edge_compensation);

struct DissipatorPair {
    Matrix gain;  // (M_g)_ij = sum_mu conj(Dg_mu,i) Dg_mu,j
    Matrix loss;  // (M_l)_ij = sum_mu conj(Dl_mu,i) Dl_mu,j
    std::optional<double> decay_scale;  // Gamma, chain models only
};

DissipatorPair dissipator_matrices(const LatticeModel& model);

// Generator of the deviation dynamics, i H^T - (M_l^T + M_g).
struct EffectiveHamiltonian {
    Matrix matrix;
    Boundary boundary = Boundary::Open;
    std::optional<ChainParameters> chain;

    int size() const { return static_cast<int>(matrix.rows()); }
};

EffectiveHamiltonian effective_hamiltonian(const LatticeModel& model);

struct PhysicalityReport {
    double hermiticity_defect = 0.0;
    double min_eigenvalue = 0.0;
    double max_eigenvalue = 0.0;
    bool physical = false;
};

// Fermionic correlation matrices must be Hermitian with spectrum in [0, 1].
PhysicalityReport validate_correlation_matrix(const Matrix& c);

}  // namespace qmpemba
