#pragma once

#include "qmpemba/linalg.hpp"
#include "qmpemba/model.hpp"
#include "qmpemba/spectral.hpp"

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

namespace qmpemba {

enum class StateKind { Full, Deviation };

// C_ij = Tr[c_i^dag c_j rho], or its deviation from the steady state.
struct CorrelationState {
    Matrix matrix;
    StateKind kind = StateKind::Full;
    double time = 0.0;

    int size() const { return static_cast<int>(matrix.rows()); }
};

// ---------------------------------------------------------------------------
// Steady state: H_eff C + C H_eff^dag + 2 M_g = 0

enum class LyapunovMethod { Auto, Spectral, Schur, Kronecker };

std::string_view to_string(LyapunovMethod m);

struct SteadyStateOptions {
    LyapunovMethod method = LyapunovMethod::Auto;
    double residual_tolerance = 1e-10;
    // The vectorised solve is an L^2 x L^2 dense system.
    int kronecker_max_sites = 40;
};

struct SteadyStateResult {
    CorrelationState state;
    LyapunovMethod method = LyapunovMethod::Spectral;
    double residual = 0.0;
};

// Auto tries the biorthogonal spectral formula first and falls back to the
// Schur (Bartels-Stewart) solver when the spectral residual is too large.
// Throws NoUniqueSteadyState when some eigenvalue has Re >= -1e-12.
SteadyStateResult solve_steady_state(const LatticeModel& model,
                                     const SteadyStateOptions& options = {});

CorrelationState steady_state(const LatticeModel& model);

// Solvers for A X + X A^dag = Q.
Matrix solve_lyapunov_spectral(const EigenSystem& system, const Matrix& rhs);
Matrix solve_lyapunov_schur(const Matrix& a, const Matrix& rhs);
Matrix solve_lyapunov_kronecker(const Matrix& a, const Matrix& rhs);

// max |H C + C H^dag + 2 M_g|
double lyapunov_residual(const Matrix& generator, const Matrix& gain, const Matrix& c);

// ---------------------------------------------------------------------------
// Deviation propagation: dC(t) = e^{H t} dC(0) e^{H^dag t}

enum class PropagatorMethod {
    Spectral,   // biorthogonal eigen-expansion
    Gauge,      // imaginary-gauge similarity to a Hermitian chain (OBC chain only)
    Ode,        // direct RK4 integration
    Circulant,  // Fourier-diagonal fast path (PBC, circulant deviation only)
};

std::string_view to_string(PropagatorMethod m);

struct OdeOptions {
    // Step bound h * max|H_ij| <= max_norm_step ...
    double max_norm_step = 0.05;
    // ... and h * 2 ||H||_inf <= step_scale, which keeps the RK4 local error
    // of the two-sided generator near 1e-12 per step.
    double step_scale = 0.01;
    std::size_t max_steps = 20'000'000;
};

using DistanceFunction = std::function<double(double)>;

class Propagator {
public:
    virtual ~Propagator() = default;

    virtual PropagatorMethod method() const = 0;

    // Returns the Hermitian part of e^{Ht} dC e^{H^dag t}.
    virtual Matrix propagate(const Matrix& deviation, double t) const = 0;

    // Evaluator of D(t) = ||dC(t)||_F with per-state precomputation. The
    // returned function owns its data and is independent of other evaluators.
    virtual DistanceFunction distance_function(const Matrix& deviation) const = 0;
};

std::unique_ptr<Propagator> make_propagator(const EffectiveHamiltonian& generator,
                                            PropagatorMethod method,
                                            const OdeOptions& ode = {});

// Gauge for the open chain when applicable, otherwise Spectral, otherwise ODE.
std::unique_ptr<Propagator> make_default_propagator(const EffectiveHamiltonian& generator);

CorrelationState propagate(const CorrelationState& deviation,
                           const EffectiveHamiltonian& generator, double t,
                           PropagatorMethod method);

bool is_circulant(const Matrix& m, double tolerance = 1e-10);

// RK4 on dC/dt = H C + C H^dag + 2 M_g. The grid must start at 0 and be
// strictly increasing; one state is returned per grid point.
std::vector<CorrelationState> integrate_ode(const CorrelationState& initial,
                                            const LatticeModel& model,
                                            std::span<const double> t_grid,
                                            const OdeOptions& options = {});

// Frobenius norm. Throws InvalidParameter for a Full state.
double hs_distance(const CorrelationState& deviation);
double hs_distance(const Matrix& deviation);

}  // namespace qmpemba
