#include "dstirap/hamiltonian.hpp"

#include <stdexcept>
#include <utility>

namespace dstirap {

namespace {
RealVector uniform_vector(int n, double value) { return RealVector::Constant(n, value); }
}  // namespace

RwaHamiltonian::RwaHamiltonian(CouplingPair couplings, double detuning, PulseEnvelope pump,
                               PulseEnvelope stokes)
    : RwaHamiltonian(CouplingPair{couplings.p, couplings.s},
                     uniform_vector(couplings.dims().ne, detuning), std::move(pump),
                     std::move(stokes)) {}

RwaHamiltonian::RwaHamiltonian(CouplingPair couplings, RealVector detunings,
                               PulseEnvelope pump, PulseEnvelope stokes)
    : couplings_(std::move(couplings)),
      detunings_(std::move(detunings)),
      pump_(std::move(pump)),
      stokes_(std::move(stokes)),
      dims_(couplings_.dims()) {
    if (detunings_.size() != dims_.ne) {
        throw std::invalid_argument("RwaHamiltonian: detuning vector size must equal Ne");
    }
    uniform_detuning_ =
        detunings_.size() == 0 ||
        (detunings_.array() == detunings_[0]).all();
}

Matrix RwaHamiltonian::evaluate_ps(double p, double s) const {
    const int n = dims_.total();
    Matrix h = Matrix::Zero(n, n);
    const int g0 = 0;
    const int e0 = dims_.ng;
    const int f0 = dims_.ng + dims_.ne;
    h.block(g0, e0, dims_.ng, dims_.ne) = p * couplings_.p;
    h.block(e0, g0, dims_.ne, dims_.ng) = p * couplings_.p.adjoint();
    h.block(e0, f0, dims_.ne, dims_.nf) = s * couplings_.s;
    h.block(f0, e0, dims_.nf, dims_.ne) = s * couplings_.s.adjoint();
    h.block(e0, e0, dims_.ne, dims_.ne) = detunings_.cast<Complex>().asDiagonal();
    return h;
}

Matrix RwaHamiltonian::evaluate(double t) const {
    return evaluate_ps(pump_.value(t), stokes_.value(t));
}

Matrix transform(const Matrix& hamiltonian, const Matrix& unitary) {
    if (hamiltonian.rows() != hamiltonian.cols() || unitary.rows() != unitary.cols() ||
        hamiltonian.rows() != unitary.rows()) {
        throw std::invalid_argument("transform: dimension mismatch");
    }
    return unitary * hamiltonian * unitary.adjoint();
}

}  // namespace dstirap
