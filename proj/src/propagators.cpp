#include "qmpemba/dynamics.hpp"

#include "qmpemba/errors.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>

namespace qmpemba {

std::string_view to_string(PropagatorMethod m) {
    switch (m) {
        case PropagatorMethod::Spectral: return "spectral";
        case PropagatorMethod::Gauge: return "gauge";
        case PropagatorMethod::Ode: return "ode";
        case PropagatorMethod::Circulant: return "circulant";
    }
    return "unknown";
}

// Defined in ode.cpp.
Matrix integrate_homogeneous(const Matrix& generator, const Matrix& start, double duration,
                             const OdeOptions& options);

namespace {

void require_time(double t) {
    if (!(t >= 0.0) || !std::isfinite(t)) throw InvalidParameter("time must be finite and >= 0");
}

void require_shape(const Matrix& deviation, Eigen::Index n) {
    if (deviation.rows() != n || deviation.cols() != n) {
        throw InvalidParameter("deviation matrix does not match the generator size");
    }
}

Vector exp_times(const Vector& rates, double t) {
    Vector out(rates.size());
    for (Eigen::Index i = 0; i < rates.size(); ++i) out[i] = std::exp(rates[i] * t);
    return out;
}

// ---------------------------------------------------------------------------

class SpectralPropagator final : public Propagator {
public:
    explicit SpectralPropagator(const EffectiveHamiltonian& generator)
        : data_(std::make_shared<Data>(biorthogonal_eigensystem(generator))) {}

    PropagatorMethod method() const override { return PropagatorMethod::Spectral; }

    Matrix propagate(const Matrix& deviation, double t) const override {
        require_time(t);
        require_shape(deviation, data_->system.right.rows());
        if (t == 0.0) return deviation;
        return linalg::hermitian_part(data_->evolve(data_->project(deviation), t));
    }

    DistanceFunction distance_function(const Matrix& deviation) const override {
        require_shape(deviation, data_->system.right.rows());
        auto data = data_;
        Matrix projected = data->project(deviation);
        const double initial = linalg::frobenius_norm(deviation);
        return [data, projected = std::move(projected), initial](double t) {
            require_time(t);
            if (t == 0.0) return initial;
            return linalg::frobenius_norm(data->evolve(projected, t));
        };
    }

private:
    struct Data {
        explicit Data(EigenSystem sys) : system(std::move(sys)) {}

        // <L_i| dC |L_j>
        Matrix project(const Matrix& deviation) const {
            return linalg::multiply(linalg::multiply(system.left.adjoint(), deviation),
                                    system.left);
        }

        Matrix evolve(const Matrix& projected, double t) const {
            const Vector w = exp_times(system.eigenvalues, t);
            const Matrix scaled = linalg::diag_scale(w, projected, w.conjugate());
            return linalg::multiply_adjoint(linalg::multiply(system.right, scaled),
                                            system.right);
        }

        EigenSystem system;
    };

    std::shared_ptr<const Data> data_;
};

// ---------------------------------------------------------------------------

// e^{Ht} = e^{-2 Gamma t} S V e^{-i eps t} V^dag S^-1, where V diag(eps) V^dag
// is the Hermitian chain obtained from the imaginary gauge S.
class GaugePropagator final : public Propagator {
public:
    explicit GaugePropagator(const EffectiveHamiltonian& generator) {
        if (!generator.chain) throw GaugeUnavailable("gauge propagator needs a chain model");
        if (generator.boundary != Boundary::Open) {
            throw GaugeUnavailable("gauge propagator is only defined for open boundaries");
        }
        const ChainParameters& chain = *generator.chain;
        const double gamma = chain.decay_scale();
        const auto n = generator.matrix.rows();
        const RealVector s = gauge_transform(chain.hopping, gamma, static_cast<int>(n), chain.skin);
        const Vector s_c = s.cast<cplx>();
        const Vector s_inv = s.cwiseInverse().cast<cplx>();

        // K = i (S^-1 H S + 2 Gamma) must be Hermitian.
        Matrix k = cplx{0.0, 1.0} * (s_inv.asDiagonal() * generator.matrix * s_c.asDiagonal());
        k.diagonal().array() += cplx{0.0, 2.0 * gamma};
        const double scale = std::max(1.0, linalg::max_abs(k));
        if (linalg::hermiticity_defect(k) > 1e-12 * scale) {
            throw GaugeUnavailable(
                "gauge-transformed generator is not Hermitian (needs J > Gamma and a uniform "
                "on-site decay)");
        }
        Eigen::SelfAdjointEigenSolver<Matrix> solver(linalg::hermitian_part(k));
        if (solver.info() != Eigen::Success) throw Error("Hermitian eigensolver failed");

        auto data = std::make_shared<Data>();
        data->gamma = gamma;
        data->phases = cplx{0.0, -1.0} * solver.eigenvalues().cast<cplx>();
        data->outer = s_c.asDiagonal() * solver.eigenvectors();
        data->inner = solver.eigenvectors().adjoint() * s_inv.asDiagonal();
        data_ = std::move(data);
    }

    PropagatorMethod method() const override { return PropagatorMethod::Gauge; }

    Matrix propagate(const Matrix& deviation, double t) const override {
        require_time(t);
        require_shape(deviation, data_->outer.rows());
        if (t == 0.0) return deviation;
        return linalg::hermitian_part(data_->evolve(data_->project(deviation), t));
    }

    DistanceFunction distance_function(const Matrix& deviation) const override {
        require_shape(deviation, data_->outer.rows());
        auto data = data_;
        Matrix projected = data->project(deviation);
        const double initial = linalg::frobenius_norm(deviation);
        return [data, projected = std::move(projected), initial](double t) {
            require_time(t);
            if (t == 0.0) return initial;
            return linalg::frobenius_norm(data->evolve(projected, t));
        };
    }

private:
    struct Data {
        Matrix project(const Matrix& deviation) const {
            return linalg::multiply_adjoint(linalg::multiply(inner, deviation), inner);
        }

        Matrix evolve(const Matrix& projected, double t) const {
            const Vector w = exp_times(phases, t);
            const Matrix scaled = linalg::diag_scale(w, projected, w.conjugate());
            return std::exp(-4.0 * gamma * t) *
                   linalg::multiply_adjoint(linalg::multiply(outer, scaled), outer);
        }

        double gamma = 0.0;
        Vector phases;
        Matrix outer;  // S V
        Matrix inner;  // V^dag S^-1
    };

    std::shared_ptr<const Data> data_;
};

// ---------------------------------------------------------------------------

class OdePropagator final : public Propagator {
public:
    OdePropagator(const EffectiveHamiltonian& generator, const OdeOptions& options)
        : generator_(std::make_shared<const Matrix>(generator.matrix)), options_(options) {}

    PropagatorMethod method() const override { return PropagatorMethod::Ode; }

    Matrix propagate(const Matrix& deviation, double t) const override {
        require_time(t);
        require_shape(deviation, generator_->rows());
        if (t == 0.0) return deviation;
        return integrate_homogeneous(*generator_, deviation, t, options_);
    }

    // Continues from the last evaluated time when called with increasing t.
    DistanceFunction distance_function(const Matrix& deviation) const override {
        require_shape(deviation, generator_->rows());
        struct Cursor {
            double time = 0.0;
            Matrix state;
        };
        auto cursor = std::make_shared<Cursor>(Cursor{0.0, deviation});
        return [generator = generator_, options = options_, initial = deviation,
                cursor](double t) {
            require_time(t);
            if (t < cursor->time) *cursor = Cursor{0.0, initial};
            if (t > cursor->time) {
                cursor->state =
                    integrate_homogeneous(*generator, cursor->state, t - cursor->time, options);
                cursor->time = t;
            }
            return linalg::frobenius_norm(cursor->state);
        };
    }

private:
    std::shared_ptr<const Matrix> generator_;
    OdeOptions options_;
};

// ---------------------------------------------------------------------------

// Circulant matrices share the plane-wave eigenvectors u_k(x) = e^{ikx}/sqrt(L);
// the component of A on u_k is a_k = sum_d A(0, d) e^{ikd}.
class CirculantPropagator final : public Propagator {
public:
    explicit CirculantPropagator(const EffectiveHamiltonian& generator) {
        if (generator.boundary != Boundary::Periodic || !is_circulant(generator.matrix)) {
            throw NotTranslationInvariant("circulant propagator needs a circulant generator");
        }
        auto data = std::make_shared<Data>();
        data->n = generator.matrix.rows();
        const Vector rates = data->components(generator.matrix.row(0).transpose());
        data->twice_real_rates = 2.0 * rates.real();
        data_ = std::move(data);
    }

    PropagatorMethod method() const override { return PropagatorMethod::Circulant; }

    Matrix propagate(const Matrix& deviation, double t) const override {
        require_time(t);
        require_shape(deviation, data_->n);
        if (t == 0.0) return deviation;
        const Vector evolved = data_->evolve(data_->checked_components(deviation), t);
        return linalg::hermitian_part(data_->rebuild(evolved));
    }

    DistanceFunction distance_function(const Matrix& deviation) const override {
        require_shape(deviation, data_->n);
        auto data = data_;
        Vector components = data->checked_components(deviation);
        const double initial = linalg::frobenius_norm(deviation);
        return [data, components = std::move(components), initial](double t) {
            require_time(t);
            if (t == 0.0) return initial;
            return data->evolve(components, t).norm();
        };
    }

private:
    struct Data {
        cplx phase(Eigen::Index m, Eigen::Index d) const {
            const Eigen::Index wrapped = ((m * d) % n + n) % n;
            const double angle = 2.0 * std::numbers::pi * static_cast<double>(wrapped) /
                                 static_cast<double>(n);
            return std::polar(1.0, angle);
        }

        Vector components(const Vector& first_row) const {
            Vector out = Vector::Zero(n);
            for (Eigen::Index m = 0; m < n; ++m) {
                for (Eigen::Index d = 0; d < n; ++d) out[m] += first_row[d] * phase(m, d);
            }
            return out;
        }

        Vector checked_components(const Matrix& deviation) const {
            if (!is_circulant(deviation)) {
                throw NotTranslationInvariant("deviation is not circulant");
            }
            return components(deviation.row(0).transpose());
        }

        Vector evolve(const Vector& c, double t) const {
            Vector out(n);
            for (Eigen::Index m = 0; m < n; ++m) out[m] = c[m] * std::exp(twice_real_rates[m] * t);
            return out;
        }

        Matrix rebuild(const Vector& c) const {
            Vector row = Vector::Zero(n);
            for (Eigen::Index d = 0; d < n; ++d) {
                for (Eigen::Index m = 0; m < n; ++m) row[d] += c[m] * std::conj(phase(m, d));
                row[d] /= static_cast<double>(n);
            }
            Matrix out(n, n);
            for (Eigen::Index l = 0; l < n; ++l) {
                for (Eigen::Index m = 0; m < n; ++m) out(l, m) = row[((m - l) % n + n) % n];
            }
            return out;
        }

        Eigen::Index n = 0;
        RealVector twice_real_rates;
    };

    std::shared_ptr<const Data> data_;
};

}  // namespace

bool is_circulant(const Matrix& m, double tolerance) {
    const auto n = m.rows();
    if (m.cols() != n) return false;
    for (Eigen::Index l = 1; l < n; ++l) {
        for (Eigen::Index c = 0; c < n; ++c) {
            if (std::abs(m(l, c) - m(0, ((c - l) % n + n) % n)) > tolerance) return false;
        }
    }
    return true;
}

std::unique_ptr<Propagator> make_propagator(const EffectiveHamiltonian& generator,
                                            PropagatorMethod method, const OdeOptions& ode) {
    switch (method) {
        case PropagatorMethod::Spectral: return std::make_unique<SpectralPropagator>(generator);
        case PropagatorMethod::Gauge: return std::make_unique<GaugePropagator>(generator);
        case PropagatorMethod::Ode: return std::make_unique<OdePropagator>(generator, ode);
        case PropagatorMethod::Circulant: return std::make_unique<CirculantPropagator>(generator);
    }
    throw InvalidParameter("unknown propagator method");
}

std::unique_ptr<Propagator> make_default_propagator(const EffectiveHamiltonian& generator) {
    if (generator.boundary == Boundary::Open && generator.chain) {
        try {
            return std::make_unique<GaugePropagator>(generator);
        } catch (const GaugeUnavailable&) {
        }
    }
    try {
        return std::make_unique<SpectralPropagator>(generator);
    } catch (const DefectiveEigensystem&) {
    }
    return std::make_unique<OdePropagator>(generator, OdeOptions{});
}

CorrelationState propagate(const CorrelationState& deviation,
                           const EffectiveHamiltonian& generator, double t,
                           PropagatorMethod method) {
    if (deviation.kind != StateKind::Deviation) {
        throw InvalidParameter("propagate expects a deviation state");
    }
    if (linalg::hermiticity_defect(deviation.matrix) > 1e-10) {
        throw InvalidParameter("deviation matrix is not Hermitian");
    }
    const auto propagator = make_propagator(generator, method);
    return CorrelationState{propagator->propagate(deviation.matrix, t), StateKind::Deviation,
                            deviation.time + t};
}

double hs_distance(const Matrix& deviation) { return linalg::frobenius_norm(deviation); }

double hs_distance(const CorrelationState& deviation) {
    if (deviation.kind != StateKind::Deviation) {
        throw InvalidParameter("distance is defined for deviation states");
    }
    return hs_distance(deviation.matrix);
}

}  // namespace qmpemba
