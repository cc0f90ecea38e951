#pragma once

#include <array>
#include <vector>

#include "dstirap/angular.hpp"
#include "dstirap/types.hpp"

namespace dstirap {

/// One laser field: a peak Rabi frequency (angular-frequency units, hbar = 1)
/// and a unit-normalized spherical polarization vector (eps_{-1}, eps_0, eps_{+1}).
struct FieldSpec {
    double peak_rabi = 0.0;
    std::array<Complex, 3> spherical_components{};  // q = -1, 0, +1

    /// Two-angle parameterization with sigma+/- components only:
    ///   eps_{+1} = e^{i phi} cos(angle),  eps_{-1} = e^{i psi} sin(angle).
    static FieldSpec from_angles(double peak_rabi, double angle, double phi, double psi);

    /// General three-component form; the weights are normalized on entry.
    static FieldSpec from_components(double peak_rabi, Complex eps_minus,
                                     Complex eps_pi, Complex eps_plus);

    Complex component(int q) const { return spherical_components[static_cast<std::size_t>(q + 1)]; }
};

/// Declarative description of a three-manifold angular-momentum linkage.
struct LinkageSpec {
    HalfInt j_g;
    HalfInt j_e;
    HalfInt j_f;
    FieldSpec pump_field;
    FieldSpec stokes_field;
    Complex pump_reduced_element{1.0, 0.0};
    Complex stokes_reduced_element{1.0, 0.0};

    /// Validates the dipole selection rules |Jg-Je| <= 1 and |Je-Jf| <= 1.
    /// Throws std::invalid_argument on violation.
    static LinkageSpec make(double j_g, double j_e, double j_f,
                            FieldSpec pump, FieldSpec stokes,
                            Complex pump_reduced = {1.0, 0.0},
                            Complex stokes_reduced = {1.0, 0.0});

    ManifoldDims dims() const {
        return {j_g.multiplicity(), j_e.multiplicity(), j_f.multiplicity()};
    }
};

/// The constant half-Rabi coupling matrices of the block Hamiltonian:
/// P is ng x ne (pump, g-e) and S is ne x nf (Stokes, e-f). Sublevels are
/// ordered by ascending magnetic quantum number within each manifold.
struct CouplingPair {
    Matrix p;
    Matrix s;

    ManifoldDims dims() const {
        return {static_cast<int>(p.rows()), static_cast<int>(p.cols()),
                static_cast<int>(s.cols())};
    }
};

/// Builds P and S from Clebsch-Gordan coefficients:
///   P_ij = (Omega_P/2) (g|mu|e) sum_q eps_q <Jg M_i, 1 q | Je M_j> / sqrt(2Jg+1)
/// and analogously for S with the 1/sqrt(2Je+1) weight. Entries whose products
/// of snapped factors vanish are exact zeros.
CouplingPair build_couplings(const LinkageSpec& spec);

/// One connected component of the tripartite coupling graph.
struct Subsystem {
    std::vector<int> g_indices;  // indices into the parent manifolds, ascending
    std::vector<int> e_indices;
    std::vector<int> f_indices;
    CouplingPair couplings;     // restriction of P, S to this component

    ManifoldDims dims() const {
        return {static_cast<int>(g_indices.size()), static_cast<int>(e_indices.size()),
                static_cast<int>(f_indices.size())};
    }
};

/// Splits a coupling pair into independent connected subsystems. Nonzero
/// matrix entries are graph edges; states with no couplings come back as
/// singleton components. The components partition the state indices.
std::vector<Subsystem> decompose_subsystems(const CouplingPair& pair);

}  // namespace dstirap
