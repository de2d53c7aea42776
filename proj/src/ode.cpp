#include "qmpemba/dynamics.hpp"

#include "qmpemba/errors.hpp"

#include <cmath>
#include <limits>

namespace qmpemba {

namespace {

double step_bound(const Matrix& generator, const OdeOptions& options) {
    const double max_entry = linalg::max_abs(generator);
    const double inf_norm = generator.rows() ? generator.cwiseAbs().rowwise().sum().maxCoeff() : 0.0;
    double h = std::numeric_limits<double>::infinity();
    if (max_entry > 0.0) h = std::min(h, options.max_norm_step / max_entry);
    if (inf_norm > 0.0) h = std::min(h, options.step_scale / (2.0 * inf_norm));
    return h;
}

std::size_t step_count(double duration, double h_max, const OdeOptions& options) {
    if (!std::isfinite(h_max)) return 1;
    const double steps = std::ceil(duration / h_max);
    if (!(h_max > 0.0) || !std::isfinite(steps) ||
        steps > static_cast<double>(options.max_steps)) {
        throw StepSizeUnderflow("RK4 would need more than " + std::to_string(options.max_steps) +
                                " steps; generator norm too large for the requested span");
    }
    return std::max<std::size_t>(1, static_cast<std::size_t>(steps));
}

// Classical RK4 for X' = H X + X H^dag + source.
class Rk4 {
public:
    Rk4(const Matrix& generator, const Matrix* source)
        : h_(generator), h_adj_(generator.adjoint()), source_(source) {}

    void step(Matrix& x, double dt) {
        derivative(x, k1_);
        stage_ = x;
        linalg::axpy(0.5 * dt, k1_, stage_);
        derivative(stage_, k2_);
        stage_ = x;
        linalg::axpy(0.5 * dt, k2_, stage_);
        derivative(stage_, k3_);
        stage_ = x;
        linalg::axpy(dt, k3_, stage_);
        derivative(stage_, k4_);
        linalg::axpy(dt / 6.0, k1_, x);
        linalg::axpy(dt / 3.0, k2_, x);
        linalg::axpy(dt / 3.0, k3_, x);
        linalg::axpy(dt / 6.0, k4_, x);
        x = linalg::hermitian_part(x);
    }

    void advance(Matrix& x, double duration, const OdeOptions& options) {
        if (duration <= 0.0) return;
        const std::size_t n = step_count(duration, step_bound(h_, options), options);
        const double dt = duration / static_cast<double>(n);
        for (std::size_t i = 0; i < n; ++i) step(x, dt);
    }

private:
    void derivative(const Matrix& x, Matrix& out) const {
        linalg::multiply_into(h_, x, 1.0, 0.0, out);
        linalg::multiply_into(x, h_adj_, 1.0, 1.0, out);
        if (source_) out += *source_;
    }

    const Matrix& h_;
    Matrix h_adj_;
    const Matrix* source_;
    Matrix stage_, k1_, k2_, k3_, k4_;
};

}  // namespace

Matrix integrate_homogeneous(const Matrix& generator, const Matrix& start, double duration,
                             const OdeOptions& options) {
    Matrix x = start;
    Rk4 rk(generator, nullptr);
    rk.advance(x, duration, options);
    return x;
}

std::vector<CorrelationState> integrate_ode(const CorrelationState& initial,
                                            const LatticeModel& model,
                                            std::span<const double> t_grid,
                                            const OdeOptions& options) {
    if (t_grid.empty() || t_grid.front() != 0.0) {
        throw InvalidParameter("time grid must start at 0");
    }
    for (std::size_t i = 1; i < t_grid.size(); ++i) {
        if (!(t_grid[i] > t_grid[i - 1])) {
            throw InvalidParameter("time grid must be strictly increasing");
        }
    }
    if (initial.size() != model.size()) {
        throw InvalidParameter("initial state does not match the model size");
    }
    const EffectiveHamiltonian generator = effective_hamiltonian(model);
    const Matrix source = 2.0 * dissipator_matrices(model).gain;
    const bool full = initial.kind == StateKind::Full;
    Rk4 rk(generator.matrix, full ? &source : nullptr);

    std::vector<CorrelationState> out;
    out.reserve(t_grid.size());
    Matrix x = initial.matrix;
    out.push_back(CorrelationState{x, initial.kind, 0.0});
    for (std::size_t i = 1; i < t_grid.size(); ++i) {
        rk.advance(x, t_grid[i] - t_grid[i - 1], options);
        out.push_back(CorrelationState{x, initial.kind, t_grid[i]});
    }
    return out;
}

}  // namespace qmpemba
