#include "dstirap/adiabaticity.hpp"

#include <cmath>
#include <stdexcept>

namespace dstirap {
namespace {

struct GridSample {
    double t = 0.0;
    double p = 0.0;
    double s = 0.0;
    std::vector<BrightState> brights;
};

std::vector<Vector> bright_derivatives(const BrightStateFamily& family,
                                       const RwaHamiltonian& h, double t, double step,
                                       const std::vector<BrightState>& base) {
    const auto plus = family.evaluate_aligned(h.pump_value(t + step),
                                              h.stokes_value(t + step), base);
    const auto minus = family.evaluate_aligned(h.pump_value(t - step),
                                               h.stokes_value(t - step), base);
    std::vector<Vector> ddt;
    if (plus.size() != base.size() || minus.size() != base.size()) {
        return ddt;  // count changed across the step; caller skips this point
    }
    ddt.reserve(base.size());
    for (std::size_t k = 0; k < base.size(); ++k) {
        ddt.push_back((plus[k].vector - minus[k].vector) / (2.0 * step));
    }
    return ddt;
}

// Richardson-style stability probe: halving the step must not change the
// derivative estimate materially.
void check_grid_resolution(const BrightStateFamily& family, const RwaHamiltonian& h,
                           const std::vector<double>& grid, double step) {
    const std::size_t probes[] = {grid.size() / 4, grid.size() / 2, 3 * grid.size() / 4};
    for (std::size_t idx : probes) {
        const double t = grid[idx];
        const auto base = family.evaluate(h.pump_value(t), h.stokes_value(t));
        const auto d1 = bright_derivatives(family, h, t, step, base);
        const auto d2 = bright_derivatives(family, h, t, 0.5 * step, base);
        if (d1.empty() || d2.empty()) continue;
        double norm1 = 0.0, diff = 0.0;
        for (std::size_t k = 0; k < d1.size(); ++k) {
            norm1 += d1[k].squaredNorm();
            diff += (d1[k] - d2[k]).squaredNorm();
        }
        if (norm1 > 1e-12 && diff > 0.09 * norm1) {
            throw std::invalid_argument(
                "adiabaticity_scan: time grid too coarse for stable derivatives; "
                "refine the grid (or pass a smaller derivative_step) by at least 4x");
        }
    }
}

}  // namespace

AdiabaticityReport adiabaticity_scan(const DarkStateFamily& darks,
                                     const BrightStateFamily& brights,
                                     const RwaHamiltonian& hamiltonian,
                                     const std::vector<double>& time_grid,
                                     const AdiabaticityOptions& options) {
    if (time_grid.size() < 5) {
        throw std::invalid_argument("adiabaticity_scan: need at least 5 grid points");
    }
    if (darks.dims().total() != hamiltonian.dims().total()) {
        throw std::invalid_argument("adiabaticity_scan: dark family does not match H");
    }
    double spacing = time_grid[1] - time_grid[0];
    for (std::size_t i = 1; i + 1 < time_grid.size(); ++i) {
        spacing = std::min(spacing, time_grid[i + 1] - time_grid[i]);
    }
    if (spacing <= 0.0) {
        throw std::invalid_argument("adiabaticity_scan: grid must be strictly ascending");
    }
    const double step = options.derivative_step > 0.0 ? options.derivative_step
                                                      : 0.5 * spacing;
    check_grid_resolution(brights, hamiltonian, time_grid, step);

    // Probe a generic interior point to size the report.
    const double t_mid = time_grid[time_grid.size() / 2];
    auto base = brights.evaluate(hamiltonian.pump_value(t_mid),
                                 hamiltonian.stokes_value(t_mid));
    const int n_dark = darks.count();
    const int n_bright = static_cast<int>(base.size());
    const int n_t = static_cast<int>(time_grid.size());

    AdiabaticityReport report;
    report.time_grid = time_grid;
    report.threshold = options.threshold;
    report.pairs.reserve(static_cast<std::size_t>(n_dark * n_bright));
    for (int l = 0; l < n_dark; ++l) {
        for (int k = 0; k < n_bright; ++k) {
            AdiabaticityRatio r;
            r.dark_index = l;
            r.bright_index = k;
            r.ratio.assign(static_cast<std::size_t>(n_t), 0.0);
            r.ratio_closed_form.assign(static_cast<std::size_t>(n_t), 0.0);
            report.pairs.push_back(std::move(r));
        }
    }
    std::vector<bool> excluded(static_cast<std::size_t>(n_bright), false);

    std::vector<bool> in_window(static_cast<std::size_t>(n_t), true);
    std::vector<BrightState> previous;
    for (int i = 0; i < n_t; ++i) {
        const double t = time_grid[static_cast<std::size_t>(i)];
        const double p = hamiltonian.pump_value(t);
        const double s = hamiltonian.stokes_value(t);
        in_window[static_cast<std::size_t>(i)] =
            std::max(p, s) >= options.envelope_floor;
        auto states = brights.evaluate_aligned(p, s, previous);
        if (static_cast<int>(states.size()) != n_bright) continue;  // count change
        previous = states;

        double eps_scale = 0.0;
        for (const auto& st : states) eps_scale = std::max(eps_scale, std::abs(st.epsilon));
        const double eps_cut = options.zero_tol * std::max(eps_scale, 1e-300);

        const auto dark_vectors = darks.vectors(p, s);
        const auto ddt = bright_derivatives(brights, hamiltonian, t, step, states);
        const double wronskian = s * hamiltonian.pump_derivative(t) -
                                 p * hamiltonian.stokes_derivative(t);

        for (int k = 0; k < n_bright; ++k) {
            const auto& bright = states[static_cast<std::size_t>(k)];
            if (std::abs(bright.epsilon) <= eps_cut) {
                excluded[static_cast<std::size_t>(k)] = true;
                continue;
            }
            for (int l = 0; l < n_dark; ++l) {
                auto& pair = report.pairs[static_cast<std::size_t>(l * n_bright + k)];
                if (!ddt.empty()) {
                    const double coupling =
                        std::abs(dark_vectors[static_cast<std::size_t>(l)].dot(
                            ddt[static_cast<std::size_t>(k)]));
                    pair.ratio[static_cast<std::size_t>(i)] =
                        coupling / std::abs(bright.epsilon);
                }
                // Closed form from the envelope Wronskian.
                const auto& dark = darks.states()[static_cast<std::size_t>(l)];
                const double n0 = std::sqrt(s * s * dark.g_part.squaredNorm() +
                                            p * p * dark.f_part.squaredNorm());
                if (n0 > 0.0 && bright.norm > 0.0) {
                    const double g_elem =
                        std::abs(dark.g_part.dot(brights.p_coupling() * bright.y));
                    pair.ratio_closed_form[static_cast<std::size_t>(i)] =
                        std::abs(wronskian) * g_elem /
                        (n0 * bright.norm * std::abs(bright.epsilon));
                }
            }
        }
    }

    for (auto& pair : report.pairs) {
        for (int i = 0; i < n_t; ++i) {
            if (!in_window[static_cast<std::size_t>(i)]) continue;
            pair.max_ratio =
                std::max(pair.max_ratio, pair.ratio[static_cast<std::size_t>(i)]);
            pair.max_ratio_closed_form =
                std::max(pair.max_ratio_closed_form,
                         pair.ratio_closed_form[static_cast<std::size_t>(i)]);
        }
        report.max_ratio = std::max(report.max_ratio, pair.max_ratio);
        report.max_ratio_closed_form =
            std::max(report.max_ratio_closed_form, pair.max_ratio_closed_form);
    }
    for (int k = 0; k < n_bright; ++k) {
        if (excluded[static_cast<std::size_t>(k)]) report.excluded_bright.push_back(k);
    }
    report.adiabatic = report.max_ratio < options.threshold;
    return report;
}

ConventionalCriterion conventional_adiabaticity(double peak_p, double peak_s,
                                                const PulseEnvelope& pump,
                                                const PulseEnvelope& stokes, double delta,
                                                const std::vector<double>& time_grid) {
    ConventionalCriterion out;
    out.time_grid = time_grid;
    const std::size_t n = time_grid.size();
    out.mixing_angle.resize(n);
    out.lhs_sin.resize(n);
    out.lhs_cos.resize(n);
    out.rhs_cot.resize(n);
    out.rhs_tan.resize(n);
    out.ratio_strict.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = time_grid[i];
        const double pv = peak_p * pump.value(t);
        const double sv = peak_s * stokes.value(t);
        const double pd = peak_p * pump.derivative(t);
        const double sd = peak_s * stokes.derivative(t);
        const double omega0 = std::hypot(pv, sv);
        const double phi = 0.5 * std::atan2(omega0, delta);
        out.mixing_angle[i] = phi;
        if (omega0 < 1e-300) {
            out.lhs_sin[i] = out.lhs_cos[i] = 0.0;
            out.rhs_cot[i] = out.rhs_tan[i] = 0.0;
            out.ratio_strict[i] = 0.0;
            continue;
        }
        const double lhs = std::abs(sv * pd - pv * sd) / (omega0 * omega0);
        out.lhs_sin[i] = lhs * std::abs(std::sin(phi));
        out.lhs_cos[i] = lhs * std::abs(std::cos(phi));
        out.rhs_cot[i] = omega0 * std::abs(std::cos(phi) / std::sin(phi));
        out.rhs_tan[i] = omega0 * std::abs(std::tan(phi));
        const double branch1 = out.rhs_cot[i] > 0.0 ? out.lhs_sin[i] / out.rhs_cot[i] : 0.0;
        const double branch2 = out.rhs_tan[i] > 0.0 ? out.lhs_cos[i] / out.rhs_tan[i] : 0.0;
        out.ratio_strict[i] = std::max(branch1, branch2);
        out.max_ratio = std::max(out.max_ratio, out.ratio_strict[i]);
    }
    return out;
}

}  // namespace dstirap
