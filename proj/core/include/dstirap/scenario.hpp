#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dstirap/adiabaticity.hpp"
#include "dstirap/linkage.hpp"
#include "dstirap/propagator.hpp"
#include "dstirap/pulse.hpp"

namespace dstirap {

/// Raised on malformed or inconsistent scenario files; the message carries
/// the offending field path (and parser position for syntax errors).
class ScenarioError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct InitialState {
    bool mixed = false;
    Vector amplitudes;  // pure runs
    Matrix density;     // mixed runs
};

/// A fully validated declarative simulation setup.
struct Scenario {
    std::string name;
    std::optional<LinkageSpec> linkage;  // empty when couplings were explicit
    CouplingPair couplings;
    RealVector detunings;  // size ne
    bool uniform_detuning = true;
    PulseEnvelope pump_envelope = PulseEnvelope::gaussian(0.0, 1.0);
    PulseEnvelope stokes_envelope = PulseEnvelope::gaussian(0.0, 1.0);
    InitialState initial;
    double window_start = 0.0;
    double window_end = 0.0;
    IntegratorOptions integrator;
    double zero_tol = kDefaultZeroTol;
    double adiabaticity_threshold = 0.1;
    int adiabaticity_samples = 201;
    bool want_trajectory = true;
    bool want_feasibility = true;
    bool want_ms_summary = true;
    bool want_adiabaticity = true;

    ManifoldDims dims() const { return couplings.dims(); }
    RwaHamiltonian hamiltonian() const;
};

Scenario load_scenario(const std::string& path);
Scenario parse_scenario(const std::string& text, const std::string& origin = "<string>");

/// Static analysis: feasibility, MS decompositions, subsystem split, dark
/// counts. No integration.
struct AnalysisResult {
    FeasibilityVerdict verdict;
    MsDecomposition stokes_dec;
    MsDecomposition pump_dec;
    std::vector<Subsystem> subsystems;
    int dark_total = 0;
    int dark_transfer = 0;
    int dark_trapped = 0;
    int dark_constant_f = 0;
    int generic_dark_count = 0;  // counting rule ng + nf - ne, clamped at 0
};

AnalysisResult analyze_scenario(const Scenario& scenario);

/// Full pipeline: analysis, propagation, adiabaticity scan, and the
/// dark-subspace transfer prediction.
struct RunResult {
    AnalysisResult analysis;
    Trajectory trajectory;
    std::optional<AdiabaticityReport> adiabaticity;
    Populations predicted_final;
    double prediction_fidelity = -1.0;  // pure runs only
    double initial_bright_residual = 0.0;
};

RunResult run_scenario(const Scenario& scenario);

enum class OutputFormat { Json, Csv, Both };

/// Writes <name>.analysis.json / <name>.run.json / <name>.trajectory.csv
/// under outdir and returns the paths. Output bytes depend only on the
/// scenario content and the library version.
std::vector<std::string> write_analysis_outputs(const Scenario& scenario,
                                                const AnalysisResult& analysis,
                                                const std::string& outdir,
                                                OutputFormat format = OutputFormat::Json);
std::vector<std::string> write_run_outputs(const Scenario& scenario,
                                           const RunResult& result,
                                           const std::string& outdir,
                                           OutputFormat format = OutputFormat::Both);

/// In-memory JSON serializations (stable key order, round-trip doubles).
std::string analysis_json(const Scenario& scenario, const AnalysisResult& analysis);
std::string run_json(const Scenario& scenario, const RunResult& result);
std::string trajectory_csv(const Scenario& scenario, const Trajectory& trajectory);
/// Time-major series: t, per-state amplitudes (re/im) or the density
/// diagonal, and the per-manifold populations.
std::string trajectory_json(const Scenario& scenario, const Trajectory& trajectory);

}  // namespace dstirap
