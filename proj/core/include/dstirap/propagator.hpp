#pragma once

#include <optional>
#include <vector>

#include "dstirap/adiabatic_basis.hpp"
#include "dstirap/hamiltonian.hpp"
#include "dstirap/types.hpp"

namespace dstirap {

struct IntegratorOptions {
    double rtol = 1e-10;
    double atol = 1e-12;
    double initial_step = 0.0;  // 0: pick automatically
    long max_steps = 2'000'000;
    int output_samples = 601;
};

struct IntegratorStats {
    long accepted = 0;
    long rejected = 0;
    long rhs_evaluations = 0;
};

/// Per-manifold populations (P_g, P_e, P_f).
struct Populations {
    double g = 0.0;
    double e = 0.0;
    double f = 0.0;
    double total() const { return g + e + f; }
};

/// Result of a time-dependent propagation. Pure states carry amplitudes;
/// mixed states carry density matrices evolved through the unitary
/// propagator, so positivity is preserved exactly.
struct Trajectory {
    std::vector<double> times;
    std::vector<Vector> states;        // pure runs
    std::vector<Matrix> density;       // mixed runs
    std::vector<Populations> populations;
    IntegratorStats stats;
    bool mixed = false;

    const Vector& final_state() const { return states.back(); }
    const Matrix& final_density() const { return density.back(); }
    double norm_drift() const;  // max deviation of norm (trace) from the start
};

Populations populations(const Vector& state, const ManifoldDims& dims);
Populations populations(const Matrix& density, const ManifoldDims& dims);

/// Integrates i d/dt C = H(t) C with an adaptive embedded Runge-Kutta 5(4)
/// pair and fourth-order dense output on the sampling grid.
/// The initial state must be normalized. Throws std::runtime_error when the
/// tolerance cannot be met within the step budget.
Trajectory integrate(const RwaHamiltonian& hamiltonian, const Vector& initial,
                     double t0, double t1, const IntegratorOptions& options = {});

/// Mixed-state version: integrates the propagator V(t, t0) and applies
/// rho(t) = V rho0 V+.
Trajectory integrate(const RwaHamiltonian& hamiltonian, const Matrix& initial_density,
                     double t0, double t1, const IntegratorOptions& options = {});

/// Adiabatic evolution operator restricted to the dark subspace,
///   U(t1, t0) = sum_l |Phi0_l(t1)><Phi0_l(t0)| .
/// Valid only for initial states inside the dark subspace at t0; apply()
/// reports the projection residual of whatever it is given.
class TransferOperator {
public:
    TransferOperator(Matrix op, Matrix initial_projector, ManifoldDims dims);

    const Matrix& matrix() const { return op_; }
    const Matrix& initial_dark_projector() const { return projector_; }

    /// Residual norm^2 of the component outside the initial dark subspace.
    double bright_residual(const Vector& state) const;
    double bright_residual(const Matrix& density) const;

    Vector apply(const Vector& state) const { return op_ * state; }
    Matrix apply(const Matrix& density) const { return op_ * density * op_.adjoint(); }

private:
    Matrix op_;
    Matrix projector_;
    ManifoldDims dims_;
};

/// Builds the transfer operator from the dark family at the envelope values
/// of the two times.
TransferOperator adiabatic_transfer(const DarkStateFamily& family,
                                    const RwaHamiltonian& hamiltonian, double t0,
                                    double t1);

}  // namespace dstirap
