#include "dstirap/scenario.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace dstirap {
namespace {

using OrderedJson = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
    throw ScenarioError(where + ": " + what);
}

double require_number(const OrderedJson& node, const std::string& where) {
    if (!node.is_number()) fail(where, "expected a number");
    return node.get<double>();
}

double get_number(const OrderedJson& obj, const std::string& key, const std::string& where,
                  std::optional<double> fallback = std::nullopt) {
    if (!obj.contains(key)) {
        if (fallback) return *fallback;
        fail(where, "missing required key '" + key + "'");
    }
    return require_number(obj.at(key), where + "." + key);
}

Complex get_complex(const OrderedJson& node, const std::string& where) {
    if (node.is_number()) return Complex{node.get<double>(), 0.0};
    if (node.is_array() && node.size() == 2 && node[0].is_number() && node[1].is_number()) {
        return Complex{node[0].get<double>(), node[1].get<double>()};
    }
    fail(where, "expected a real number or an [re, im] pair");
}

FieldSpec parse_field(const OrderedJson& obj, const std::string& where) {
    const double rabi = get_number(obj, "rabi", where);
    if (!obj.contains("polarization")) fail(where, "missing required key 'polarization'");
    const auto& pol = obj.at("polarization");
    if (pol.contains("angle")) {
        const double angle = get_number(pol, "angle", where + ".polarization");
        const double phi = get_number(pol, "sigma_plus_phase", where + ".polarization", 0.0);
        const double psi = get_number(pol, "sigma_minus_phase", where + ".polarization", 0.0);
        return FieldSpec::from_angles(rabi, angle, phi, psi);
    }
    if (pol.contains("components")) {
        const auto& comp = pol.at("components");
        const auto grab = [&](const char* key) {
            return comp.contains(key) ? get_complex(comp.at(key), where + ".polarization."
                                                                       + key)
                                      : Complex{0.0, 0.0};
        };
        try {
            return FieldSpec::from_components(rabi, grab("sigma_minus"), grab("pi"),
                                              grab("sigma_plus"));
        } catch (const std::invalid_argument& err) {
            fail(where + ".polarization", err.what());
        }
    }
    fail(where + ".polarization", "need either an 'angle' form or 'components'");
}

Matrix parse_matrix(const OrderedJson& node, const std::string& where) {
    if (!node.is_array() || node.empty()) fail(where, "expected a non-empty 2-D array");
    const std::size_t rows = node.size();
    const std::size_t cols = node[0].is_array() ? node[0].size() : 0;
    if (cols == 0) fail(where, "expected a non-empty 2-D array");
    Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (std::size_t i = 0; i < rows; ++i) {
        if (!node[i].is_array() || node[i].size() != cols) {
            fail(where, "ragged rows in matrix");
        }
        for (std::size_t j = 0; j < cols; ++j) {
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                get_complex(node[i][j], where);
        }
    }
    return m;
}

PulseEnvelope parse_envelope(const OrderedJson& obj, const std::string& where) {
    const std::string shape = obj.value("shape", "gaussian");
    if (shape == "gaussian") {
        return PulseEnvelope::gaussian(get_number(obj, "center", where),
                                       get_number(obj, "width", where));
    }
    if (shape == "tabulated") {
        if (!obj.contains("times") || !obj.contains("values")) {
            fail(where, "tabulated shape needs 'times' and 'values'");
        }
        try {
            return PulseEnvelope::tabulated(obj.at("times").get<std::vector<double>>(),
                                            obj.at("values").get<std::vector<double>>());
        } catch (const std::exception& err) {
            fail(where, err.what());
        }
    }
    fail(where, "unknown envelope shape '" + shape + "'");
}

// Maps a sublevel reference (m quantum number or plain index) to an offset
// within its manifold.
int sublevel_index(const OrderedJson& obj, const std::string& manifold,
                   const Scenario& scenario, const std::string& where) {
    const auto dims = scenario.dims();
    const int size = manifold == "g" ? dims.ng : manifold == "e" ? dims.ne : dims.nf;
    if (obj.contains("index")) {
        const int idx = static_cast<int>(get_number(obj, "index", where));
        if (idx < 0 || idx >= size) fail(where, "sublevel index out of range");
        return idx;
    }
    if (obj.contains("m")) {
        if (!scenario.linkage) {
            fail(where, "'m' requires a J-based linkage; use 'index' instead");
        }
        const double m = get_number(obj, "m", where);
        const HalfInt j = manifold == "g"   ? scenario.linkage->j_g
                          : manifold == "e" ? scenario.linkage->j_e
                                            : scenario.linkage->j_f;
        const int two_m = static_cast<int>(std::llround(2.0 * m));
        if (std::abs(2.0 * m - two_m) > 1e-9) fail(where, "m must be a half-integer");
        const int idx = (two_m + j.twice()) / 2;
        if ((two_m + j.twice()) % 2 != 0 || idx < 0 || idx >= size) {
            fail(where, "no sublevel with this m in the " + manifold + " manifold");
        }
        return idx;
    }
    fail(where, "sublevel reference needs 'm' or 'index'");
}

int manifold_offset(const std::string& manifold, const ManifoldDims& dims,
                    const std::string& where) {
    if (manifold == "g") return 0;
    if (manifold == "e") return dims.ng;
    if (manifold == "f") return dims.ng + dims.ne;
    fail(where, "manifold must be one of g, e, f");
}

InitialState parse_initial(const OrderedJson& obj, const Scenario& scenario,
                           const std::string& where) {
    const auto dims = scenario.dims();
    const int n = dims.total();
    InitialState state;
    const std::string type = obj.value("type", "pure");
    if (type == "pure") {
        if (!obj.contains("amplitudes") || !obj.at("amplitudes").is_array()) {
            fail(where, "pure state needs an 'amplitudes' array");
        }
        state.amplitudes = Vector::Zero(n);
        int i = 0;
        for (const auto& entry : obj.at("amplitudes")) {
            const std::string at = where + ".amplitudes[" + std::to_string(i++) + "]";
            const std::string manifold = entry.value("manifold", "g");
            const int offset = manifold_offset(manifold, dims, at);
            const int idx = sublevel_index(entry, manifold, scenario, at);
            state.amplitudes[offset + idx] +=
                Complex{entry.value("re", 0.0), entry.value("im", 0.0)};
        }
        const double norm = state.amplitudes.norm();
        if (std::abs(norm - 1.0) > 1e-8) {
            fail(where, "initial amplitudes are not normalized (|psi| = " +
                            std::to_string(norm) + ")");
        }
        return state;
    }
    if (type == "mixed") {
        state.mixed = true;
        state.density = Matrix::Zero(n, n);
        if (!obj.contains("populations") || !obj.at("populations").is_array()) {
            fail(where, "mixed state needs a 'populations' array");
        }
        int i = 0;
        for (const auto& entry : obj.at("populations")) {
            const std::string at = where + ".populations[" + std::to_string(i++) + "]";
            const std::string manifold = entry.value("manifold", "g");
            const int offset = manifold_offset(manifold, dims, at);
            const int idx = sublevel_index(entry, manifold, scenario, at);
            const double p = get_number(entry, "p", at);
            if (p < 0.0) fail(at, "populations must be nonnegative");
            state.density(offset + idx, offset + idx) += p;
        }
        i = 0;
        for (const auto& entry :
             obj.contains("coherences") ? obj.at("coherences") : OrderedJson::array()) {
            const std::string at = where + ".coherences[" + std::to_string(i++) + "]";
            const std::string manifold = entry.value("manifold", "g");
            const int offset = manifold_offset(manifold, dims, at);
            OrderedJson first = entry, second = entry;
            if (!entry.contains("m1") && !entry.contains("index1")) {
                fail(at, "coherence needs m1/m2 or index1/index2");
            }
            if (entry.contains("m1")) first["m"] = entry.at("m1");
            if (entry.contains("index1")) first["index"] = entry.at("index1");
            if (entry.contains("m2")) second["m"] = entry.at("m2");
            if (entry.contains("index2")) second["index"] = entry.at("index2");
            const int a = offset + sublevel_index(first, manifold, scenario, at);
            const int b = offset + sublevel_index(second, manifold, scenario, at);
            const Complex value{entry.value("re", 0.0), entry.value("im", 0.0)};
            state.density(a, b) += value;
            state.density(b, a) += std::conj(value);
        }
        const double trace = state.density.trace().real();
        if (std::abs(trace - 1.0) > 1e-8) {
            fail(where, "mixed-state populations must sum to 1");
        }
        Eigen::SelfAdjointEigenSolver<Matrix> eig(state.density);
        if (eig.eigenvalues().minCoeff() < -1e-10) {
            fail(where, "density matrix is not positive semidefinite");
        }
        return state;
    }
    fail(where, "initial_state.type must be 'pure' or 'mixed'");
}

std::string format_double(double v) {
    char buffer[40];
    std::snprintf(buffer, sizeof(buffer), "%.17g", v);
    return buffer;
}

OrderedJson populations_json(const Populations& p) {
    return OrderedJson{{"g", p.g}, {"e", p.e}, {"f", p.f}};
}

OrderedJson feasibility_json(const FeasibilityVerdict& v) {
    return OrderedJson{{"verdict", to_string(v.verdict)},
                       {"n_dark", v.n_dark},
                       {"transfer_dark_count", v.transfer_dark_count},
                       {"uncoupled_g_count", v.uncoupled_g_count},
                       {"null_sigma_count", v.null_sigma_count},
                       {"case_c", v.case_c},
                       {"condition_satisfied", v.condition_satisfied},
                       {"notes", v.notes}};
}

OrderedJson ms_json(const AnalysisResult& analysis) {
    OrderedJson subsystems = OrderedJson::array();
    for (const auto& sub : analysis.subsystems) {
        subsystems.push_back(OrderedJson{{"g", sub.g_indices},
                                         {"e", sub.e_indices},
                                         {"f", sub.f_indices}});
    }
    std::vector<double> stokes_sigma(analysis.stokes_dec.sigma.begin(),
                                     analysis.stokes_dec.sigma.end());
    std::vector<double> pump_sigma(analysis.pump_dec.sigma.begin(),
                                   analysis.pump_dec.sigma.end());
    return OrderedJson{{"stokes_sigma", stokes_sigma},
                       {"pump_sigma", pump_sigma},
                       {"stokes_null_count", analysis.stokes_dec.null_count},
                       {"pump_null_count", analysis.pump_dec.null_count},
                       {"stokes_uncoupled_e", analysis.stokes_dec.uncoupled_e},
                       {"stokes_uncoupled_f", analysis.stokes_dec.uncoupled_far},
                       {"pump_uncoupled_g", analysis.pump_dec.uncoupled_far},
                       {"subsystems", subsystems}};
}

OrderedJson dark_json(const AnalysisResult& analysis) {
    return OrderedJson{{"count", analysis.dark_total},
                       {"transfer", analysis.dark_transfer},
                       {"trapped", analysis.dark_trapped},
                       {"constant_f", analysis.dark_constant_f},
                       {"counting_rule", analysis.generic_dark_count}};
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file " + path);
    out << text;
}

}  // namespace

RwaHamiltonian Scenario::hamiltonian() const {
    return RwaHamiltonian(couplings, detunings, pump_envelope, stokes_envelope);
}

Scenario parse_scenario(const std::string& text, const std::string& origin) {
    OrderedJson root;
    try {
        root = OrderedJson::parse(text, nullptr, true, true);
    } catch (const nlohmann::json::parse_error& err) {
        throw ScenarioError(origin + ": " + err.what());
    }
    if (!root.is_object()) throw ScenarioError(origin + ": top level must be an object");

    Scenario scenario;
    scenario.name = root.value("name", "scenario");

    if (!root.contains("linkage")) throw ScenarioError(origin + ": missing 'linkage'");
    const auto& linkage = root.at("linkage");
    if (linkage.contains("p") || linkage.contains("s")) {
        scenario.couplings.p = parse_matrix(linkage.at("p"), "linkage.p");
        scenario.couplings.s = parse_matrix(linkage.at("s"), "linkage.s");
        if (scenario.couplings.p.cols() != scenario.couplings.s.rows()) {
            fail("linkage", "P columns must equal S rows");
        }
    } else {
        const double jg = get_number(linkage, "jg", "linkage");
        const double je = get_number(linkage, "je", "linkage");
        const double jf = get_number(linkage, "jf", "linkage");
        if (!linkage.contains("pump") || !linkage.contains("stokes")) {
            fail("linkage", "J-based linkage needs 'pump' and 'stokes' fields");
        }
        try {
            auto spec = LinkageSpec::make(jg, je, jf,
                                          parse_field(linkage.at("pump"), "linkage.pump"),
                                          parse_field(linkage.at("stokes"),
                                                      "linkage.stokes"));
            if (linkage.contains("pump_reduced_element")) {
                spec.pump_reduced_element = get_complex(
                    linkage.at("pump_reduced_element"), "linkage.pump_reduced_element");
            }
            if (linkage.contains("stokes_reduced_element")) {
                spec.stokes_reduced_element =
                    get_complex(linkage.at("stokes_reduced_element"),
                                "linkage.stokes_reduced_element");
            }
            scenario.linkage = spec;
            scenario.couplings = build_couplings(spec);
        } catch (const std::invalid_argument& err) {
            fail("linkage", err.what());
        }
    }
    const auto dims = scenario.dims();

    if (root.contains("detuning") && root.at("detuning").is_array()) {
        const auto values = root.at("detuning").get<std::vector<double>>();
        if (static_cast<int>(values.size()) != dims.ne) {
            fail("detuning", "per-state detuning must have ne entries");
        }
        scenario.detunings =
            Eigen::Map<const RealVector>(values.data(), static_cast<Eigen::Index>(values.size()));
        scenario.uniform_detuning =
            (scenario.detunings.array() == scenario.detunings[0]).all();
    } else {
        scenario.detunings =
            RealVector::Constant(dims.ne, root.value("detuning", 0.0));
    }

    if (!root.contains("pulses")) throw ScenarioError(origin + ": missing 'pulses'");
    const auto& pulses = root.at("pulses");
    if (!pulses.contains("pump") || !pulses.contains("stokes")) {
        fail("pulses", "need 'pump' and 'stokes' envelopes");
    }
    scenario.pump_envelope = parse_envelope(pulses.at("pump"), "pulses.pump");
    scenario.stokes_envelope = parse_envelope(pulses.at("stokes"), "pulses.stokes");

    if (root.contains("window")) {
        const auto& window = root.at("window");
        scenario.window_start = get_number(window, "start", "window");
        scenario.window_end = get_number(window, "end", "window");
        scenario.integrator.output_samples =
            static_cast<int>(get_number(window, "samples", "window", 601.0));
        if (scenario.window_end <= scenario.window_start) {
            fail("window", "end must exceed start");
        }
    } else if (scenario.pump_envelope.is_gaussian() &&
               scenario.stokes_envelope.is_gaussian()) {
        const auto& pe = scenario.pump_envelope;
        const auto& se = scenario.stokes_envelope;
        scenario.window_start = std::min(pe.center() - 4.0 * pe.width(),
                                         se.center() - 4.0 * se.width());
        scenario.window_end = std::max(pe.center() + 4.0 * pe.width(),
                                       se.center() + 4.0 * se.width());
    } else {
        throw ScenarioError(origin + ": non-Gaussian envelopes need an explicit window");
    }

    if (root.contains("integrator")) {
        const auto& integrator = root.at("integrator");
        scenario.integrator.rtol = get_number(integrator, "rtol", "integrator", 1e-10);
        scenario.integrator.atol = get_number(integrator, "atol", "integrator", 1e-12);
        if (integrator.contains("max_steps")) {
            scenario.integrator.max_steps =
                static_cast<long>(get_number(integrator, "max_steps", "integrator"));
        }
    }
    if (root.contains("tolerances")) {
        const auto& tol = root.at("tolerances");
        scenario.zero_tol = get_number(tol, "zero_singular", "tolerances", kDefaultZeroTol);
        scenario.adiabaticity_threshold =
            get_number(tol, "adiabaticity_threshold", "tolerances", 0.1);
    }
    if (root.contains("outputs")) {
        if (!root.at("outputs").is_array()) fail("outputs", "must be an array");
        scenario.want_trajectory = false;
        scenario.want_feasibility = false;
        scenario.want_ms_summary = false;
        scenario.want_adiabaticity = false;
        for (const auto& entry : root.at("outputs")) {
            const std::string name = entry.get<std::string>();
            if (name == "trajectory") scenario.want_trajectory = true;
            else if (name == "feasibility") scenario.want_feasibility = true;
            else if (name == "ms") scenario.want_ms_summary = true;
            else if (name == "adiabaticity") scenario.want_adiabaticity = true;
            else fail("outputs", "unknown output '" + name + "'");
        }
    }

    if (!root.contains("initial_state")) {
        throw ScenarioError(origin + ": missing 'initial_state'");
    }
    scenario.initial = parse_initial(root.at("initial_state"), scenario, "initial_state");
    return scenario;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ScenarioError(path + ": cannot open scenario file");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_scenario(buffer.str(), path);
}

AnalysisResult analyze_scenario(const Scenario& scenario) {
    const auto& pair = scenario.couplings;
    AnalysisResult analysis;
    analysis.verdict = feasibility(pair.p, pair.s, scenario.zero_tol);
    analysis.stokes_dec = reorder_singular(ms_decompose(pair.s), scenario.zero_tol);
    analysis.pump_dec = reorder_singular(pump_side_ms(pair.p), scenario.zero_tol);
    analysis.subsystems = decompose_subsystems(pair);
    const auto family = dark_states(pair.p, pair.s, scenario.zero_tol);
    analysis.dark_total = family.count();
    analysis.dark_transfer = family.transfer_count();
    analysis.dark_trapped = family.trapped_count();
    analysis.dark_constant_f = analysis.dark_total - analysis.dark_transfer -
                               analysis.dark_trapped;
    const auto d = scenario.dims();
    analysis.generic_dark_count = dark_count(d.ng, d.ne, d.nf);
    return analysis;
}

RunResult run_scenario(const Scenario& scenario) {
    RunResult result;
    result.analysis = analyze_scenario(scenario);
    const RwaHamiltonian h = scenario.hamiltonian();
    const auto& pair = scenario.couplings;

    if (scenario.initial.mixed) {
        result.trajectory = integrate(h, scenario.initial.density, scenario.window_start,
                                      scenario.window_end, scenario.integrator);
    } else {
        result.trajectory = integrate(h, scenario.initial.amplitudes,
                                      scenario.window_start, scenario.window_end,
                                      scenario.integrator);
    }

    const auto family = dark_states(pair.p, pair.s, scenario.zero_tol);
    const auto transfer =
        adiabatic_transfer(family, h, scenario.window_start, scenario.window_end);
    if (scenario.initial.mixed) {
        result.initial_bright_residual =
            transfer.bright_residual(scenario.initial.density);
        const Matrix predicted = transfer.apply(scenario.initial.density);
        result.predicted_final = populations(predicted, scenario.dims());
    } else {
        result.initial_bright_residual =
            transfer.bright_residual(scenario.initial.amplitudes);
        const Vector predicted = transfer.apply(scenario.initial.amplitudes);
        result.predicted_final = populations(predicted, scenario.dims());
        const Vector& final_state = result.trajectory.final_state();
        const double pn = predicted.norm();
        if (pn > 0.0) {
            result.prediction_fidelity =
                std::norm(predicted.dot(final_state)) / (pn * pn);
        }
    }

    if (scenario.want_adiabaticity && scenario.uniform_detuning) {
        const BrightStateFamily brights(pair.p, pair.s, scenario.detunings[0],
                                        scenario.zero_tol);
        std::vector<double> grid(static_cast<std::size_t>(scenario.adiabaticity_samples));
        for (std::size_t i = 0; i < grid.size(); ++i) {
            grid[i] = scenario.window_start +
                      (scenario.window_end - scenario.window_start) *
                          static_cast<double>(i) / static_cast<double>(grid.size() - 1);
        }
        AdiabaticityOptions options;
        options.threshold = scenario.adiabaticity_threshold;
        options.zero_tol = scenario.zero_tol;
        result.adiabaticity = adiabaticity_scan(family, brights, h, grid, options);
    }
    return result;
}

std::string analysis_json(const Scenario& scenario, const AnalysisResult& analysis) {
    const auto d = scenario.dims();
    OrderedJson doc{{"schema", "dstirap.analysis/1"},
                    {"name", scenario.name},
                    {"dims", {{"ng", d.ng}, {"ne", d.ne}, {"nf", d.nf}}}};
    if (scenario.want_feasibility) doc["feasibility"] = feasibility_json(analysis.verdict);
    if (scenario.want_ms_summary) doc["ms"] = ms_json(analysis);
    doc["dark_states"] = dark_json(analysis);
    if (!scenario.uniform_detuning) {
        doc["warnings"] = OrderedJson::array(
            {"per-state detuning is outside the two-detuning reduction"});
    }
    return doc.dump(2) + "\n";
}

std::string run_json(const Scenario& scenario, const RunResult& result) {
    const auto d = scenario.dims();
    OrderedJson doc{{"schema", "dstirap.run/1"},
                    {"name", scenario.name},
                    {"dims", {{"ng", d.ng}, {"ne", d.ne}, {"nf", d.nf}}}};
    if (scenario.want_feasibility) {
        doc["feasibility"] = feasibility_json(result.analysis.verdict);
    }
    if (scenario.want_ms_summary) doc["ms"] = ms_json(result.analysis);
    doc["dark_states"] = dark_json(result.analysis);
    const auto& traj = result.trajectory;
    doc["trajectory"] = OrderedJson{
        {"mixed", traj.mixed},
        {"samples", traj.times.size()},
        {"final_populations", populations_json(traj.populations.back())},
        {"norm_drift", traj.norm_drift()},
        {"stats",
         {{"accepted", traj.stats.accepted},
          {"rejected", traj.stats.rejected},
          {"rhs_evaluations", traj.stats.rhs_evaluations}}}};
    doc["adiabatic_prediction"] =
        OrderedJson{{"final_populations", populations_json(result.predicted_final)},
                    {"initial_bright_residual", result.initial_bright_residual}};
    if (result.prediction_fidelity >= 0.0) {
        doc["adiabatic_prediction"]["fidelity"] = result.prediction_fidelity;
    }
    if (result.adiabaticity) {
        const auto& rep = *result.adiabaticity;
        doc["adiabaticity"] = OrderedJson{
            {"max_ratio", rep.max_ratio},
            {"max_ratio_closed_form", rep.max_ratio_closed_form},
            {"threshold", rep.threshold},
            {"adiabatic", rep.adiabatic},
            {"excluded_bright", rep.excluded_bright}};
    }
    if (!scenario.uniform_detuning) {
        doc["warnings"] = OrderedJson::array(
            {"per-state detuning is outside the two-detuning reduction"});
    }
    return doc.dump(2) + "\n";
}

std::string trajectory_csv(const Scenario& scenario, const Trajectory& trajectory) {
    const auto d = scenario.dims();
    std::ostringstream out;
    out << "t";
    if (trajectory.mixed) {
        for (int i = 0; i < d.total(); ++i) out << ",rho_" << i << "_" << i;
    } else {
        for (int i = 0; i < d.total(); ++i) out << ",re_" << i << ",im_" << i;
    }
    out << ",P_g,P_e,P_f\n";
    for (std::size_t row = 0; row < trajectory.times.size(); ++row) {
        out << format_double(trajectory.times[row]);
        if (trajectory.mixed) {
            const auto& rho = trajectory.density[row];
            for (int i = 0; i < d.total(); ++i) {
                out << "," << format_double(rho(i, i).real());
            }
        } else {
            const auto& state = trajectory.states[row];
            for (int i = 0; i < d.total(); ++i) {
                out << "," << format_double(state[i].real()) << ","
                    << format_double(state[i].imag());
            }
        }
        const auto& p = trajectory.populations[row];
        out << "," << format_double(p.g) << "," << format_double(p.e) << ","
            << format_double(p.f) << "\n";
    }
    return out.str();
}

std::string trajectory_json(const Scenario& scenario, const Trajectory& trajectory) {
    const auto d = scenario.dims();
    OrderedJson doc{{"schema", "dstirap.trajectory/1"},
                    {"name", scenario.name},
                    {"mixed", trajectory.mixed},
                    {"t", trajectory.times}};
    if (trajectory.mixed) {
        OrderedJson diag = OrderedJson::array();
        for (const auto& rho : trajectory.density) {
            std::vector<double> row(static_cast<std::size_t>(d.total()));
            for (int i = 0; i < d.total(); ++i) {
                row[static_cast<std::size_t>(i)] = rho(i, i).real();
            }
            diag.push_back(row);
        }
        doc["rho_diag"] = std::move(diag);
    } else {
        OrderedJson re = OrderedJson::array(), im = OrderedJson::array();
        for (const auto& state : trajectory.states) {
            std::vector<double> re_row(static_cast<std::size_t>(d.total()));
            std::vector<double> im_row(static_cast<std::size_t>(d.total()));
            for (int i = 0; i < d.total(); ++i) {
                re_row[static_cast<std::size_t>(i)] = state[i].real();
                im_row[static_cast<std::size_t>(i)] = state[i].imag();
            }
            re.push_back(re_row);
            im.push_back(im_row);
        }
        doc["re"] = std::move(re);
        doc["im"] = std::move(im);
    }
    std::vector<double> pg, pe, pf;
    for (const auto& pops : trajectory.populations) {
        pg.push_back(pops.g);
        pe.push_back(pops.e);
        pf.push_back(pops.f);
    }
    doc["populations"] = OrderedJson{{"g", pg}, {"e", pe}, {"f", pf}};
    return doc.dump(2) + "\n";
}

std::vector<std::string> write_analysis_outputs(const Scenario& scenario,
                                                const AnalysisResult& analysis,
                                                const std::string& outdir,
                                                OutputFormat) {
    std::filesystem::create_directories(outdir);
    const std::string path =
        (std::filesystem::path(outdir) / (scenario.name + ".analysis.json")).string();
    write_text(path, analysis_json(scenario, analysis));
    return {path};
}

std::vector<std::string> write_run_outputs(const Scenario& scenario,
                                           const RunResult& result,
                                           const std::string& outdir,
                                           OutputFormat format) {
    std::filesystem::create_directories(outdir);
    std::vector<std::string> files;
    const auto base = std::filesystem::path(outdir) / scenario.name;
    if (format != OutputFormat::Csv) {
        const std::string path = base.string() + ".run.json";
        write_text(path, run_json(scenario, result));
        files.push_back(path);
        if (scenario.want_trajectory) {
            const std::string series = base.string() + ".trajectory.json";
            write_text(series, trajectory_json(scenario, result.trajectory));
            files.push_back(series);
        }
    }
    if (format != OutputFormat::Json && scenario.want_trajectory) {
        const std::string path = base.string() + ".trajectory.csv";
        write_text(path, trajectory_csv(scenario, result.trajectory));
        files.push_back(path);
    }
    return files;
}

}  // namespace dstirap
