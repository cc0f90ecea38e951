#pragma once

#include <vector>

#include "dstirap/types.hpp"

namespace dstirap {

/// Shape of the quasi-diagonal coupling after the transformation, relative
/// to the decomposed matrix (rows = e side for the Stokes transition,
/// rows = g side for the pump transition).
enum class MsStructure { ColumnsPadded, Square, RowsPadded };

/// Which transition the decomposition acted on.
enum class MsSide { Stokes, Pump };

/// Morris-Shore decomposition of one coupling matrix X (rows x cols):
/// unitaries reduce X to a rectangular diagonal with nonnegative entries,
/// i.e. independent two-state pairs plus uncoupled states.
///
/// Stokes side (X = S, ne x nf): B S A^dagger = quasi-diagonal, with B acting
/// on the e manifold and A on the f manifold. Pump side (X = P, ng x ne):
/// A P B^dagger is quasi-diagonal, with A on g and B on e. In both cases A is
/// the far-manifold unitary and B the e-manifold one.
struct MsDecomposition {
    MsSide side = MsSide::Stokes;
    Matrix a;             // far-manifold unitary (f for Stokes, g for pump)
    Matrix b;             // e-manifold unitary
    RealVector sigma;     // min(ne, n_far) singular values, descending
    MsStructure structure = MsStructure::Square;
    /// MS states with no coupling partner: structural padding plus null
    /// singular values flagged by reorder_singular.
    std::vector<int> uncoupled_e;
    std::vector<int> uncoupled_far;
    int null_count = 0;   // sigma entries treated as vanishing

    /// Rows of the quasi-diagonal product (ne for Stokes, ng for pump).
    int rows() const {
        return static_cast<int>(side == MsSide::Stokes ? b.rows() : a.rows());
    }
    int cols() const {
        return static_cast<int>(side == MsSide::Stokes ? a.rows() : b.rows());
    }
    /// Number of singular values above the vanishing threshold.
    int coupled_count() const { return static_cast<int>(sigma.size()) - null_count; }

    /// The rectangular diagonal B X A^dagger (Stokes) or A X B^dagger (pump).
    Matrix quasi_diagonal() const;
};

/// MS transformation of the Stokes coupling matrix S (ne x nf). Handles
/// rank-deficient input; null singular values are sorted to the end but not
/// classified until reorder_singular is applied.
MsDecomposition ms_decompose(const Matrix& s);

/// MS transformation of the pump coupling matrix P (ng x ne); same contract
/// with the roles of the manifolds exchanged.
MsDecomposition pump_side_ms(const Matrix& p);

/// Classifies vanishing singular values (sigma < zero_tol * sigma_max) and
/// marks the corresponding MS states on both sides as uncoupled, so the
/// nonzero block leads and all padding trails.
MsDecomposition reorder_singular(MsDecomposition dec, double zero_tol = kDefaultZeroTol);

/// Relation of ne - nc (uncoupled e count) to ng in the second transformation.
enum class SecondStageCase { FewerThanNg, EqualNg, MoreThanNg };

/// Second MS transformation for the ng, nf < ne configuration: rotates the
/// g set (A') and the uncoupled-e subspace (B') so that the coupling from g
/// to the uncoupled e states becomes [0; Pi] (or Pi / [Pi 0] when
/// ne - nf >= ng) with Pi diagonal and real nonnegative.
struct SecondStageMs {
    Matrix a_prime;        // ng x ng unitary on the g set
    Matrix b_prime;        // k x k unitary on the uncoupled-e subspace
    Matrix p_tilde;        // (ng - k) x nc rows coupled only to active e; empty when k >= ng
    Matrix p_tilde_prime;  // min(k, ng) x nc rows that also see uncoupled e
    RealVector pi;         // diagonal of Pi, ascending, size min(k, ng)
    SecondStageCase case_tag = SecondStageCase::FewerThanNg;

    Matrix pi_matrix() const;  // the full min(k,ng) x k (or ng x k) block
};

/// p_active: ng x nc couplings from g to the active (coupled) e MS states.
/// p_uncoupled: ng x k couplings from g to the uncoupled e MS states, with
/// k = ne - nc from a rows-padded (or singular) first-stage decomposition.
/// Throws std::invalid_argument when k == 0 (nothing to transform).
SecondStageMs second_stage_ms(const Matrix& p_active, const Matrix& p_uncoupled);

/// Full-space block unitary diag(I, B, A) (Stokes) or diag(A, B, I) (pump)
/// acting on the g + e + f ordering.
Matrix ms_unitary(const MsDecomposition& dec, const ManifoldDims& dims);

/// Full-space unitary of the second transformation in the first-MS frame:
/// diag(A', [I_nc 0; 0 B'], I_nf).
Matrix second_stage_unitary(const SecondStageMs& second, const ManifoldDims& dims, int nc);

}  // namespace dstirap
