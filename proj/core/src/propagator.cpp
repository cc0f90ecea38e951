#include "dstirap/propagator.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dstirap {
namespace {

// Dormand-Prince 5(4) pair with the standard fourth-order dense output.
struct Dopri5Coefficients {
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                            a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                            a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                            a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
    static constexpr double d1 = -12715105075.0 / 11282082432.0;
    static constexpr double d3 = 87487479700.0 / 32700410799.0;
    static constexpr double d4 = -10690763975.0 / 1880347072.0;
    static constexpr double d5 = 701980252875.0 / 199316789632.0;
    static constexpr double d6 = -1453857185.0 / 822651844.0;
    static constexpr double d7 = 69997945.0 / 29380423.0;
};

using C = Dopri5Coefficients;

struct DenseSegment {
    double t = 0.0;
    double h = 0.0;
    Matrix r1, r2, r3, r4, r5;

    Matrix at(double time) const {
        const double theta = (time - t) / h;
        const double theta1 = 1.0 - theta;
        return r1 + theta * (r2 + theta1 * (r3 + theta * (r4 + theta1 * r5)));
    }
};

class Dopri5 {
public:
    Dopri5(const RwaHamiltonian& h, const IntegratorOptions& opt) : h_(h), opt_(opt) {}

    // Integrates dY/dt = -i H(t) Y, sampling on the given times (ascending,
    // within [t0, t1]).
    template <typename Emit>
    IntegratorStats run(Matrix y, double t0, double t1,
                        const std::vector<double>& samples, Emit&& emit) {
        IntegratorStats stats;
        std::size_t next_sample = 0;
        while (next_sample < samples.size() && samples[next_sample] <= t0) {
            emit(samples[next_sample], y);
            ++next_sample;
        }
        if (t1 <= t0) return stats;

        double t = t0;
        double step = opt_.initial_step > 0.0 ? opt_.initial_step : 1e-4 * (t1 - t0);
        Matrix k1 = rhs(t, y, stats);
        Matrix k2, k3, k4, k5, k6, k7, y_new, err;
        while (t < t1) {
            if (stats.accepted + stats.rejected >= opt_.max_steps) {
                throw std::runtime_error(
                    "integrate: step budget exhausted before reaching the tolerance");
            }
            step = std::min(step, t1 - t);
            k2 = rhs(t + C::c2 * step, y + step * (C::a21 * k1), stats);
            k3 = rhs(t + C::c3 * step, y + step * (C::a31 * k1 + C::a32 * k2), stats);
            k4 = rhs(t + C::c4 * step,
                     y + step * (C::a41 * k1 + C::a42 * k2 + C::a43 * k3), stats);
            k5 = rhs(t + C::c5 * step,
                     y + step * (C::a51 * k1 + C::a52 * k2 + C::a53 * k3 + C::a54 * k4),
                     stats);
            k6 = rhs(t + step,
                     y + step * (C::a61 * k1 + C::a62 * k2 + C::a63 * k3 + C::a64 * k4 +
                                 C::a65 * k5),
                     stats);
            y_new = y + step * (C::b1 * k1 + C::b3 * k3 + C::b4 * k4 + C::b5 * k5 +
                                C::b6 * k6);
            k7 = rhs(t + step, y_new, stats);
            err = step * (C::e1 * k1 + C::e3 * k3 + C::e4 * k4 + C::e5 * k5 +
                          C::e6 * k6 + C::e7 * k7);

            double err_norm = 0.0;
            for (Eigen::Index idx = 0; idx < err.size(); ++idx) {
                const double scale =
                    opt_.atol + opt_.rtol * std::max(std::abs(y(idx)), std::abs(y_new(idx)));
                const double q = std::abs(err(idx)) / scale;
                err_norm += q * q;
            }
            err_norm = std::sqrt(err_norm / static_cast<double>(err.size()));

            if (err_norm <= 1.0) {
                DenseSegment seg;
                const bool need_dense =
                    next_sample < samples.size() && samples[next_sample] <= t + step;
                if (need_dense) {
                    seg.t = t;
                    seg.h = step;
                    seg.r1 = y;
                    seg.r2 = y_new - y;
                    seg.r3 = step * k1 - seg.r2;
                    seg.r4 = seg.r2 - step * k7 - seg.r3;
                    seg.r5 = step * (C::d1 * k1 + C::d3 * k3 + C::d4 * k4 + C::d5 * k5 +
                                     C::d6 * k6 + C::d7 * k7);
                }
                t += step;
                y = y_new;
                k1 = k7;  // FSAL
                ++stats.accepted;
                while (next_sample < samples.size() && samples[next_sample] <= t) {
                    emit(samples[next_sample],
                         samples[next_sample] == t ? y : seg.at(samples[next_sample]));
                    ++next_sample;
                }
                const double factor =
                    err_norm == 0.0 ? 5.0
                                    : std::clamp(0.9 * std::pow(err_norm, -0.2), 0.2, 5.0);
                step *= factor;
            } else {
                ++stats.rejected;
                step *= std::clamp(0.9 * std::pow(err_norm, -0.2), 0.1, 1.0);
                if (!(step > 0.0) || t + step == t) {
                    throw std::runtime_error(
                        "integrate: step size underflow; tolerance unreachable");
                }
            }
        }
        // Any samples numerically beyond t1 (rounding) map to the final state.
        while (next_sample < samples.size()) {
            emit(samples[next_sample], y);
            ++next_sample;
        }
        return stats;
    }

private:
    Matrix rhs(double t, const Matrix& y, IntegratorStats& stats) {
        ++stats.rhs_evaluations;
        return Complex{0.0, -1.0} * (h_.evaluate(t) * y);
    }

    const RwaHamiltonian& h_;
    const IntegratorOptions& opt_;
};

std::vector<double> sample_grid(double t0, double t1, int samples) {
    const int n = std::max(samples, 2);
    std::vector<double> grid(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        grid[static_cast<std::size_t>(i)] =
            t0 + (t1 - t0) * static_cast<double>(i) / static_cast<double>(n - 1);
    }
    grid.back() = t1;
    return grid;
}

}  // namespace

double Trajectory::norm_drift() const {
    double drift = 0.0;
    if (mixed) {
        const double trace0 = density.front().trace().real();
        for (const auto& rho : density) {
            drift = std::max(drift, std::abs(rho.trace().real() - trace0));
        }
    } else {
        const double norm0 = states.front().norm();
        for (const auto& c : states) {
            drift = std::max(drift, std::abs(c.norm() - norm0));
        }
    }
    return drift;
}

Populations populations(const Vector& state, const ManifoldDims& dims) {
    if (state.size() != dims.total()) {
        throw std::invalid_argument("populations: state size does not match dims");
    }
    Populations p;
    p.g = state.head(dims.ng).squaredNorm();
    p.e = state.segment(dims.ng, dims.ne).squaredNorm();
    p.f = state.tail(dims.nf).squaredNorm();
    return p;
}

Populations populations(const Matrix& density, const ManifoldDims& dims) {
    if (density.rows() != dims.total() || density.cols() != dims.total()) {
        throw std::invalid_argument("populations: density size does not match dims");
    }
    Populations p;
    p.g = density.topLeftCorner(dims.ng, dims.ng).trace().real();
    p.e = density.block(dims.ng, dims.ng, dims.ne, dims.ne).trace().real();
    p.f = density.bottomRightCorner(dims.nf, dims.nf).trace().real();
    return p;
}

Trajectory integrate(const RwaHamiltonian& hamiltonian, const Vector& initial, double t0,
                     double t1, const IntegratorOptions& options) {
    if (initial.size() != hamiltonian.size()) {
        throw std::invalid_argument("integrate: initial state size does not match H");
    }
    if (std::abs(initial.norm() - 1.0) > 1e-8) {
        throw std::invalid_argument("integrate: initial state must be normalized");
    }
    if (t1 < t0) {
        throw std::invalid_argument("integrate: window must run forward in time");
    }
    Trajectory traj;
    traj.mixed = false;
    const auto grid = sample_grid(t0, t1, options.output_samples);
    traj.times.reserve(grid.size());
    traj.states.reserve(grid.size());
    Dopri5 stepper(hamiltonian, options);
    traj.stats = stepper.run(initial, t0, t1, grid, [&](double t, const Matrix& y) {
        traj.times.push_back(t);
        traj.states.emplace_back(y.col(0));
        traj.populations.push_back(populations(traj.states.back(), hamiltonian.dims()));
    });
    return traj;
}

Trajectory integrate(const RwaHamiltonian& hamiltonian, const Matrix& initial_density,
                     double t0, double t1, const IntegratorOptions& options) {
    const int n = hamiltonian.size();
    if (initial_density.rows() != n || initial_density.cols() != n) {
        throw std::invalid_argument("integrate: density size does not match H");
    }
    if (std::abs(initial_density.trace().real() - 1.0) > 1e-8) {
        throw std::invalid_argument("integrate: initial density must have unit trace");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> eig(initial_density);
    if (eig.eigenvalues().minCoeff() < -1e-10) {
        throw std::invalid_argument("integrate: initial density must be positive");
    }
    if ((initial_density - initial_density.adjoint()).norm() >
        1e-10 * std::max(initial_density.norm(), 1.0)) {
        throw std::invalid_argument("integrate: initial density must be Hermitian");
    }

    Trajectory traj;
    traj.mixed = true;
    const auto grid = sample_grid(t0, t1, options.output_samples);
    Dopri5 stepper(hamiltonian, options);
    // Evolve the propagator and conjugate; positivity of rho is then exact.
    traj.stats = stepper.run(Matrix::Identity(n, n), t0, t1, grid,
                             [&](double t, const Matrix& v) {
                                 traj.times.push_back(t);
                                 traj.density.emplace_back(v * initial_density *
                                                           v.adjoint());
                                 traj.populations.push_back(
                                     populations(traj.density.back(), hamiltonian.dims()));
                             });
    return traj;
}

TransferOperator::TransferOperator(Matrix op, Matrix initial_projector, ManifoldDims dims)
    : op_(std::move(op)), projector_(std::move(initial_projector)), dims_(dims) {}

double TransferOperator::bright_residual(const Vector& state) const {
    const Vector outside = state - projector_ * state;
    return outside.squaredNorm();
}

double TransferOperator::bright_residual(const Matrix& density) const {
    const Matrix complement = Matrix::Identity(projector_.rows(), projector_.cols()) -
                              projector_;
    return (complement * density).trace().real();
}

TransferOperator adiabatic_transfer(const DarkStateFamily& family,
                                    const RwaHamiltonian& hamiltonian, double t0,
                                    double t1) {
    const Matrix frame0 =
        family.frame(hamiltonian.pump_value(t0), hamiltonian.stokes_value(t0));
    const Matrix frame1 =
        family.frame(hamiltonian.pump_value(t1), hamiltonian.stokes_value(t1));
    return TransferOperator(frame1 * frame0.adjoint(), frame0 * frame0.adjoint(),
                            family.dims());
}

}  // namespace dstirap
