#pragma once

#include <string>
#include <vector>

#include "dstirap/morris_shore.hpp"
#include "dstirap/types.hpp"

namespace dstirap {

/// Degeneracy ordering of the three manifolds.
enum class DarkCase {
    A,  // ng <= ne <= nf
    B,  // ng > ne > nf
    C,  // ng, nf < ne
};

enum class DarkKind {
    Transfer,   // parameterized (s x0, 0, -p f0)/N; moves population g -> f
    TrappedG,   // constant vector in the g set; pump-decoupled
    ConstantF,  // constant vector in the uncoupled part of the f set
};

/// One dark state. Transfer states interpolate between their g and f parts
/// as the envelopes evolve; the other kinds are time independent.
struct DarkState {
    DarkKind kind = DarkKind::Transfer;
    Vector g_part;  // bare g coordinates (generator of the s-proportional part)
    Vector f_part;  // bare f coordinates (generator of the p-proportional part)
    double metric_eigenvalue = 0.0;
};

/// The zero-eigenvalue adiabatic subspace, held as closures over the two
/// envelope values. Vectors have structurally zero e components and are
/// mutually orthonormal at every (p, s).
class DarkStateFamily {
public:
    DarkStateFamily(ManifoldDims dims, DarkCase case_tag, std::vector<DarkState> states)
        : dims_(dims), case_(case_tag), states_(std::move(states)) {}

    int count() const { return static_cast<int>(states_.size()); }
    int transfer_count() const;
    int trapped_count() const;
    DarkCase case_tag() const { return case_; }
    const ManifoldDims& dims() const { return dims_; }
    const std::vector<DarkState>& states() const { return states_; }

    /// Full-space dark vector l at envelope values (p, s), unit norm.
    Vector vector_at(int l, double p, double s) const;
    std::vector<Vector> vectors(double p, double s) const;
    /// Columns are the orthonormal dark vectors.
    Matrix frame(double p, double s) const;
    /// Projector (within the g block) onto the trapped constant-g directions.
    Matrix trapped_projector_g() const;

private:
    ManifoldDims dims_;
    DarkCase case_;
    std::vector<DarkState> states_;
};

/// N_D = max(ng + nf - ne, 0) under the generic-rank assumption. Callers
/// reconcile with the actual null counts of the MS decompositions.
int dark_count(int ng, int ne, int nf);

/// M = P (S S+)^-1 P+, the Hermitian matrix whose eigenvectors are the
/// constant g parts of the transfer dark states. Requires S S+ invertible;
/// throws std::invalid_argument when it is singular (use the general
/// dark_states path in that case).
Matrix metric_matrix(const Matrix& p, const Matrix& s);

/// Dark states via the Stokes-side construction. Handles every degeneracy
/// ordering and rank-deficient S (the singular-Sigma reordering plus the
/// second transformation are applied internally when needed).
DarkStateFamily dark_states(const Matrix& p, const Matrix& s,
                            double zero_tol = kDefaultZeroTol);

/// ng <= ne <= nf with the supplied (reordered) first-stage decomposition.
DarkStateFamily dark_states_case_A(const Matrix& p, const Matrix& s,
                                   const MsDecomposition& dec,
                                   double zero_tol = kDefaultZeroTol);

/// ng > ne > nf via the pump-side transformation: nf parameterized states
/// whose constant f parts are eigenvectors of S~+ Pi^-1 Pi+^-1 S~, plus
/// ng - ne trapped g states. Rank-deficient Pi is handled by restricting
/// the admissible f vectors.
DarkStateFamily dark_states_case_B(const Matrix& p, const Matrix& s,
                                   double zero_tol = kDefaultZeroTol);

/// ng, nf < ne with both transformation stages supplied. The constant parts
/// satisfy Pi x0' = 0; zero dark states is a valid outcome.
DarkStateFamily dark_states_case_C(const Matrix& p, const Matrix& s,
                                   const MsDecomposition& dec, const SecondStageMs& second,
                                   double zero_tol = kDefaultZeroTol);

/// One adiabatic state with nonzero eigenvalue.
struct BrightState {
    Vector vector;   // bare basis, unit norm
    double epsilon;  // adiabatic eigenvalue
    Vector y;        // unit e-manifold generator, bare coordinates
    double mu;       // eigenvalue of the reduced e-space problem
    double norm;     // normalization factor of the unnormalized form
};

/// Bright adiabatic states: for each eigenpair (mu_k, y_k) of
///   [p^2 P~+ P~ + s^2 Sigma Sigma+] y = mu y
/// the two eigenvalues solve eps(eps - Delta) = mu_k. Fully uncoupled e
/// states (mu ~ 0 at the given envelopes) come back as a single state with
/// eps = Delta. Requires a uniform detuning.
class BrightStateFamily {
public:
    BrightStateFamily(const Matrix& p, const Matrix& s, double delta,
                      double zero_tol = kDefaultZeroTol);

    std::vector<BrightState> evaluate(double p, double s) const;
    /// Ordering and global phases matched to a previous sample by maximal
    /// overlap, so finite-difference derivatives across samples make sense.
    std::vector<BrightState> evaluate_aligned(double p, double s,
                                              const std::vector<BrightState>& previous) const;

    const ManifoldDims& dims() const { return dims_; }
    const Matrix& p_coupling() const { return p_; }
    double delta() const { return delta_; }

private:
    ManifoldDims dims_;
    Matrix p_;        // bare pump coupling
    Matrix p_tilde_;  // P B+
    Matrix b_;        // e unitary of the Stokes MS decomposition
    Matrix a_;        // f unitary
    RealVector sigma_;
    double delta_ = 0.0;
    double zero_tol_ = kDefaultZeroTol;
};

/// Whether the fields can empty the g set by adiabatic passage.
///
/// A nondecreasing degeneracy sequence ng <= ne <= nf is necessary but not
/// sufficient on its own: equal-J angular-momentum linkages satisfy it yet
/// null one MS Rabi frequency through a selection rule, which blocks a
/// transfer channel. The verdict therefore also demands a full set of ng
/// transfer dark states (equivalently, at least ng nonvanishing MS Rabi
/// frequencies on both transitions and a full-rank pump coupling).
enum class TransferVerdict { CompleteAnyInitial, Partial, Conditional, None };

struct FeasibilityVerdict {
    TransferVerdict verdict = TransferVerdict::Partial;
    int n_dark = 0;               // all dark states, constant ones included
    int transfer_dark_count = 0;  // parameterized, pump-coupled
    int uncoupled_g_count = 0;    // ng - rank(P)
    int null_sigma_count = 0;     // vanishing Stokes-side MS Rabi frequencies
    bool case_c = false;
    bool condition_satisfied = false;  // case C: Pi block fully vanishing
    std::string notes;
};

std::string to_string(TransferVerdict verdict);

FeasibilityVerdict feasibility(const Matrix& p, const Matrix& s,
                               double zero_tol = kDefaultZeroTol);

/// Independent three-state chain form of a case-A system (nonsingular
/// Sigma): orthonormal chain bases for the g and f sets, the linearly
/// independent (not orthogonal) e set with its dual, and the chain-basis
/// Hamiltonian whose pump and Stokes blocks couple each g state through a
/// single e state to a single f state.
struct ChainDecomposition {
    Matrix g_basis;  // ng columns x0
    Matrix e_basis;  // ne columns; first ng from P~+ x0, completed to a basis
    Matrix e_dual;   // columns biorthogonal to e_basis
    Matrix f_basis;  // nf columns; first ng from Sigma^-1 P~+ x0, completed
    RealVector q2;       // diagonal e<-g couplings, size ng
    RealVector sigma1;   // diagonal e<-f couplings, size ng
    Matrix q1;           // g<-e block, ng x ne
    Matrix sigma2;       // f<-e block, nf x ne
    Matrix he_f_rest;    // couplings of the completion e states to f
    double cross_residual = 0.0;  // largest forbidden matrix element

    /// Hamiltonian in the (non-orthogonal) chain basis at envelope values.
    Matrix chain_hamiltonian(double p, double s) const;

    ManifoldDims dims;
    double delta = 0.0;
};

ChainDecomposition linearize_chains(const Matrix& p, const Matrix& s,
                                    const MsDecomposition& dec,
                                    const DarkStateFamily& family, double delta = 0.0);

}  // namespace dstirap
