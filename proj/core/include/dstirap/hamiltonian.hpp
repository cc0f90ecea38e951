#pragma once

#include "dstirap/linkage.hpp"
#include "dstirap/pulse.hpp"
#include "dstirap/types.hpp"

namespace dstirap {

/// Time-dependent block RWA Hamiltonian (hbar = 1):
///
///   H(t) = [ 0        p(t) P    0      ]
///          [ p(t) P+  Delta     s(t) S ]
///          [ 0        s(t) S+   0      ]
///
/// The zero g-g, f-f and g-f blocks encode maintained two-photon resonance.
/// All time dependence sits in the two scalar envelopes.
class RwaHamiltonian {
public:
    RwaHamiltonian(CouplingPair couplings, double detuning, PulseEnvelope pump,
                   PulseEnvelope stokes);
    /// Per-state detunings over the e manifold. A non-uniform vector is
    /// accepted but sits outside the two-detuning reduction; analysis code
    /// flags it.
    RwaHamiltonian(CouplingPair couplings, RealVector detunings, PulseEnvelope pump,
                   PulseEnvelope stokes);

    Matrix evaluate(double t) const;
    /// Evaluates the block matrix at explicit envelope values.
    Matrix evaluate_ps(double p, double s) const;

    double pump_value(double t) const { return pump_.value(t); }
    double stokes_value(double t) const { return stokes_.value(t); }
    double pump_derivative(double t) const { return pump_.derivative(t); }
    double stokes_derivative(double t) const { return stokes_.derivative(t); }

    const CouplingPair& couplings() const { return couplings_; }
    const PulseEnvelope& pump_envelope() const { return pump_; }
    const PulseEnvelope& stokes_envelope() const { return stokes_; }
    const RealVector& detunings() const { return detunings_; }
    bool uniform_detuning() const { return uniform_detuning_; }
    /// Scalar detuning; only meaningful when uniform_detuning() holds.
    double detuning() const { return detunings_.size() > 0 ? detunings_[0] : 0.0; }

    ManifoldDims dims() const { return dims_; }
    int size() const { return dims_.total(); }

private:
    CouplingPair couplings_;
    RealVector detunings_;
    bool uniform_detuning_ = true;
    PulseEnvelope pump_;
    PulseEnvelope stokes_;
    ManifoldDims dims_;
};

/// U H U^dagger for an N x N unitary respecting the manifold blocks.
/// Throws std::invalid_argument on dimension mismatch.
Matrix transform(const Matrix& hamiltonian, const Matrix& unitary);

}  // namespace dstirap
