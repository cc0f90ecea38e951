#pragma once

#include <vector>

#include "dstirap/adiabatic_basis.hpp"
#include "dstirap/hamiltonian.hpp"
#include "dstirap/types.hpp"

namespace dstirap {

/// Nonadiabatic coupling of one (dark, bright) pair along the pulses:
/// r(t) = |<dark | d/dt bright>| / |eps(t)|.
struct AdiabaticityRatio {
    int dark_index = 0;
    int bright_index = 0;
    double max_ratio = 0.0;              // over the scanned window
    double max_ratio_closed_form = 0.0;  // envelope-Wronskian evaluation
    std::vector<double> ratio;           // finite-difference route, per grid point
    std::vector<double> ratio_closed_form;
};

struct AdiabaticityReport {
    std::vector<double> time_grid;
    std::vector<AdiabaticityRatio> pairs;
    double max_ratio = 0.0;
    double max_ratio_closed_form = 0.0;
    double threshold = 0.1;
    bool adiabatic = false;  // max_ratio below the threshold
    /// Bright states whose |eps| fell below the zero tolerance somewhere on
    /// the grid; their ratios are excluded rather than divided by ~0.
    std::vector<int> excluded_bright;
};

struct AdiabaticityOptions {
    double threshold = 0.1;       // operational reading of "much less than 1"
    double zero_tol = kDefaultZeroTol;
    double derivative_step = 0.0;  // 0: use the grid spacing
    /// Grid points where both envelopes fall below this value lie outside
    /// the transfer window: the ratios still appear in the curves but are
    /// left out of the maxima and the verdict (with everything off, the
    /// bright gaps close and the ratio diverges harmlessly).
    double envelope_floor = 1e-2;
};

/// Scans the separation between the dark subspace and every bright state
/// over the given time grid. Evaluates both the direct finite-difference
/// coupling (with phase-aligned neighbors) and the closed form
///   |s p' - p s'| |<x0| P |y_k>| / (N0 Nk |eps_k|),
/// which agree to finite-difference accuracy.
///
/// Throws std::invalid_argument when the grid is too coarse for a stable
/// derivative estimate (the message suggests a refinement).
AdiabaticityReport adiabaticity_scan(const DarkStateFamily& darks,
                                     const BrightStateFamily& brights,
                                     const RwaHamiltonian& hamiltonian,
                                     const std::vector<double>& time_grid,
                                     const AdiabaticityOptions& options = {});

/// Scalar three-state criterion curves for the nondegenerate reduction.
struct ConventionalCriterion {
    std::vector<double> time_grid;
    std::vector<double> mixing_angle;     // phi with tan(2 phi) = Omega0 / Delta
    std::vector<double> lhs_sin, lhs_cos; // the two bracket branches
    std::vector<double> rhs_cot, rhs_tan;
    std::vector<double> ratio_strict;     // stricter branch of lhs/rhs
    double max_ratio = 0.0;
};

/// peak_p, peak_s are the scalar couplings (half Rabi frequencies) of the
/// reduced three-state system; Delta = 0 is handled through phi = pi/4.
ConventionalCriterion conventional_adiabaticity(double peak_p, double peak_s,
                                                const PulseEnvelope& pump,
                                                const PulseEnvelope& stokes, double delta,
                                                const std::vector<double>& time_grid);

}  // namespace dstirap
