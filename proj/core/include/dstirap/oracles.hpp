#pragma once

#include <array>
#include <string>
#include <vector>

#include "dstirap/linkage.hpp"
#include "dstirap/types.hpp"

namespace dstirap {

/// Closed-form reference results for the two analytically solvable
/// sigma+/sigma- linkages, kept independent of the numeric decomposition
/// pipeline so the two routes can cross-validate each other.
namespace oracles {

/// Field phases entering the analytic transformation matrices.
struct Phases {
    double phi_p = 0.0;  // sigma+ pump phase
    double psi_p = 0.0;  // sigma- pump phase
    double phi_s = 0.0;  // sigma+ Stokes phase
    double psi_s = 0.0;  // sigma- Stokes phase
};

/// J = 1-2-3 linkage, (2,3,4) subsystem: the three eigenvalues of S S+ in
/// units of (hbar Omega_S)^2, from the cotangent form of the cubic roots.
std::array<double, 3> eigvals_123(double theta);

/// The analytic Stokes-side transformation matrices A (4x4, f set) and
/// B (3x3, e set) for the same subsystem. Degenerate polarization angles
/// (vanishing normalizations) throw std::domain_error; keep a guard band of
/// about 1e-3 rad around theta = 0 and pi/2.
struct Matrices123 {
    Matrix a;  // 4x4
    Matrix b;  // 3x3
};
Matrices123 ms_matrices_123(double theta, const Phases& phases);

/// Constant g parts of the two transfer dark states, as unit 2-vectors.
struct DarkVectors123 {
    Vector x0_1;
    Vector x0_2;
    double chi = 0.0;
    double xi = 0.0;
};
DarkVectors123 dark_vectors_123(double eta, double theta, const Phases& phases);

/// J = 1-2-1 twin diamond, (2,3,2) subsystem: the two eigenvalues
/// 7/100 +- sqrt(24 cos^2(2 theta) + 1)/100 of S S+ in (hbar Omega_S)^2 units.
std::array<double, 2> eigvals_121(double theta);

/// Analytic transformation matrices for the twin diamond: A (2x2, f set),
/// B = [B_a; B_b] with B_a (2x3) the coupled e rows and B_b (1x3) the
/// uncoupled one.
struct Matrices121 {
    Matrix a;    // 2x2
    Matrix b_a;  // 2x3
    Matrix b_b;  // 1x3
    Matrix b() const;  // assembled 3x3
};
Matrices121 ms_matrices_121(double theta, const Phases& phases);

/// The scalar coupling between the rotated g set and the uncoupled e state,
/// and the polarization/phase condition that nullifies it:
///   psi_S - phi_S + phi_P - psi_P = k pi   and   theta + (-1)^k eta = pi/2.
struct PiCondition {
    Complex pi;
    bool condition_met = false;
};
PiCondition pi_and_condition_121(double eta, double theta, const Phases& phases,
                                 double omega_p = 1.0, double angle_tol = 1e-12);

/// The sigma+/sigma- coupled (2,3,4) subsystem of the J = 1-2-3 linkage,
/// built through the generic coupling pipeline (rows ascending in M).
CouplingPair subsystem_123(double eta, double theta, const Phases& phases,
                           double omega_p = 1.0, double omega_s = 1.0);

/// The twin-diamond (2,3,2) subsystem of the J = 1-2-1 linkage.
CouplingPair subsystem_121(double eta, double theta, const Phases& phases,
                           double omega_p = 1.0, double omega_s = 1.0);

/// One analytic-vs-numeric comparison.
struct SelfCheckLine {
    std::string name;
    bool pass = false;
    double worst = 0.0;  // worst deviation observed
    double tolerance = 0.0;
};

struct SelfCheckReport {
    std::vector<SelfCheckLine> lines;
    bool all_pass = true;
};

/// Cross-validates every closed form against the numeric decomposition
/// pipeline over polarization-angle grids (guard band of 1e-3 rad around
/// the degenerate angles).
SelfCheckReport self_check(int theta_grid = 100);

}  // namespace oracles
}  // namespace dstirap
