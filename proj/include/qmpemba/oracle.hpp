#pragma once

#include "qmpemba/dynamics.hpp"
#include "qmpemba/linalg.hpp"
#include "qmpemba/model.hpp"

#include <span>
#include <vector>

namespace qmpemba::oracle {

// Dense superoperators are 4^L x 4^L.
inline constexpr int kMaxSites = 7;

// Jordan-Wigner annihilators on the 2^L Fock space. Basis index bit
// (L - 1 - i) holds the occupation of site i, so site 0 is the most
// significant bit.
class FockOperators {
public:
    explicit FockOperators(int sites);

    int sites() const { return sites_; }
    Eigen::Index dimension() const { return Eigen::Index{1} << sites_; }

    const Matrix& annihilator(int site) const;
    Matrix creator(int site) const { return annihilator(site).adjoint(); }

    // max over pairs of |{c_i, c_j^dag} - delta_ij| and |{c_i, c_j}|
    double anticommutation_defect() const;

private:
    int sites_;
    std::vector<Matrix> annihilators_;
};

// Acts on row-major vectorised rho, vec(rho)[a * d + b] = rho_ab, so that
// vec(A rho B) = (A (x) B^T) vec(rho).
struct LiouvillianMatrix {
    Matrix superoperator;
    int sites = 0;

    Eigen::Index dimension() const { return Eigen::Index{1} << sites; }
};

// sum_ij H_ij c_i^dag c_j
Matrix many_body_hamiltonian(const LatticeModel& model, const FockOperators& fock);

// Gain rows become sum_j Dg_j c_j^dag, loss rows sum_j Dl_j c_j.
std::vector<Matrix> jump_operators(const LatticeModel& model, const FockOperators& fock);

// -i[H, rho] + sum_mu (2 L rho L^dag - {L^dag L, rho})
LiouvillianMatrix build_liouvillian(const LatticeModel& model);
LiouvillianMatrix build_liouvillian(const Matrix& hamiltonian, std::span<const Matrix> jumps,
                                    int sites);

Vector vectorize(const Matrix& rho);
Matrix unvectorize(const Vector& v, Eigen::Index dimension);

// max |Tr[L(X)]| over the basis X = |a><b|.
double trace_defect(const LiouvillianMatrix& liouvillian);

// Dense matrix exponential. Throws InvalidParameter for a non-Hermitian or
// unnormalised rho0, PhysicalityError for a negative one.
Matrix evolve_density_matrix(const Matrix& rho0, const LiouvillianMatrix& liouvillian, double t);

// rho at every grid time (non-negative, strictly increasing). Equal steps
// reuse one exponential.
std::vector<Matrix> evolve_trajectory(const Matrix& rho0, const LiouvillianMatrix& liouvillian,
                                      std::span<const double> t_grid);

CorrelationState correlation_from_rho(const Matrix& rho, const FockOperators& fock);

struct LiouvillianSpectrum {
    // Descending real part; equal real parts by ascending imaginary part.
    Vector eigenvalues;
    double gap = 0.0;  // |Re eps_2|
};

LiouvillianSpectrum liouvillian_spectrum(const LiouvillianMatrix& liouvillian);

// Null vector of the superoperator, trace-normalised and made Hermitian.
Matrix steady_state_rho(const LiouvillianMatrix& liouvillian);

double rho_hs_distance(const Matrix& rho, const Matrix& rho_ss);

// Uncorrelated product of single-site states with the given occupations in
// [0, 1]; 0/1 entries give Fock basis projectors. Its C is diag(occupations).
Matrix product_state(std::span<const double> occupations);

}  // namespace qmpemba::oracle
