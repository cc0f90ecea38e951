#include "dstirap/linkage.hpp"

#include <cmath>
#include <numeric>
#include <queue>
#include <stdexcept>

namespace dstirap {
namespace {

void normalize_components(std::array<Complex, 3>& eps) {
    double norm2 = 0.0;
    for (const auto& c : eps) norm2 += std::norm(c);
    if (norm2 <= 0.0) {
        throw std::invalid_argument("FieldSpec: polarization vector must be nonzero");
    }
    const double inv = 1.0 / std::sqrt(norm2);
    for (auto& c : eps) c *= inv;
}

// P_ij-style block for one transition. Rows run over the lower manifold
// sublevels (ascending M), columns over the upper one.
Matrix coupling_block(HalfInt j_low, HalfInt j_up, const FieldSpec& field,
                      Complex reduced) {
    const int n_low = j_low.multiplicity();
    const int n_up = j_up.multiplicity();
    Matrix block = Matrix::Zero(n_low, n_up);
    const double weight = 1.0 / std::sqrt(static_cast<double>(j_low.multiplicity()));
    for (int i = 0; i < n_low; ++i) {
        const int two_mi = -j_low.twice() + 2 * i;
        for (int j = 0; j < n_up; ++j) {
            const int two_mj = -j_up.twice() + 2 * j;
            const int two_q = two_mj - two_mi;
            if (std::abs(two_q) > 2 || two_q % 2 != 0) continue;
            const Complex eps = field.component(two_q / 2);
            if (eps == Complex{0.0, 0.0}) continue;
            const double cg =
                clebsch_gordan_2(j_low.twice(), two_mi, 2, two_q, j_up.twice(), two_mj);
            if (cg == 0.0) continue;
            block(i, j) = 0.5 * field.peak_rabi * reduced * eps * (cg * weight);
        }
    }
    return block;
}

}  // namespace

FieldSpec FieldSpec::from_angles(double peak_rabi, double angle, double phi, double psi) {
    if (peak_rabi < 0.0) {
        throw std::invalid_argument("FieldSpec: peak Rabi frequency must be nonnegative");
    }
    FieldSpec f;
    f.peak_rabi = peak_rabi;
    f.spherical_components = {std::polar(std::sin(angle), psi), Complex{0.0, 0.0},
                              std::polar(std::cos(angle), phi)};
    normalize_components(f.spherical_components);
    return f;
}

FieldSpec FieldSpec::from_components(double peak_rabi, Complex eps_minus, Complex eps_pi,
                                     Complex eps_plus) {
    if (peak_rabi < 0.0) {
        throw std::invalid_argument("FieldSpec: peak Rabi frequency must be nonnegative");
    }
    FieldSpec f;
    f.peak_rabi = peak_rabi;
    f.spherical_components = {eps_minus, eps_pi, eps_plus};
    normalize_components(f.spherical_components);
    return f;
}

LinkageSpec LinkageSpec::make(double j_g, double j_e, double j_f, FieldSpec pump,
                              FieldSpec stokes, Complex pump_reduced,
                              Complex stokes_reduced) {
    LinkageSpec spec;
    spec.j_g = HalfInt::from(j_g);
    spec.j_e = HalfInt::from(j_e);
    spec.j_f = HalfInt::from(j_f);
    if (std::abs(spec.j_g.twice() - spec.j_e.twice()) > 2) {
        throw std::invalid_argument("LinkageSpec: |Jg - Je| > 1 violates the dipole rule");
    }
    if (std::abs(spec.j_e.twice() - spec.j_f.twice()) > 2) {
        throw std::invalid_argument("LinkageSpec: |Je - Jf| > 1 violates the dipole rule");
    }
    spec.pump_field = pump;
    spec.stokes_field = stokes;
    spec.pump_reduced_element = pump_reduced;
    spec.stokes_reduced_element = stokes_reduced;
    return spec;
}

CouplingPair build_couplings(const LinkageSpec& spec) {
    CouplingPair pair;
    pair.p = coupling_block(spec.j_g, spec.j_e, spec.pump_field, spec.pump_reduced_element);
    pair.s = coupling_block(spec.j_e, spec.j_f, spec.stokes_field, spec.stokes_reduced_element);
    return pair;
}

std::vector<Subsystem> decompose_subsystems(const CouplingPair& pair) {
    const auto dims = pair.dims();
    const int total = dims.total();
    // Global node ids: g states, then e, then f.
    const auto g_id = [](int i) { return i; };
    const auto e_id = [&](int j) { return dims.ng + j; };
    const auto f_id = [&](int k) { return dims.ng + dims.ne + k; };

    std::vector<std::vector<int>> adj(static_cast<std::size_t>(total));
    const auto link = [&](int a, int b) {
        adj[static_cast<std::size_t>(a)].push_back(b);
        adj[static_cast<std::size_t>(b)].push_back(a);
    };
    for (int i = 0; i < dims.ng; ++i) {
        for (int j = 0; j < dims.ne; ++j) {
            if (pair.p(i, j) != Complex{0.0, 0.0}) link(g_id(i), e_id(j));
        }
    }
    for (int j = 0; j < dims.ne; ++j) {
        for (int k = 0; k < dims.nf; ++k) {
            if (pair.s(j, k) != Complex{0.0, 0.0}) link(e_id(j), f_id(k));
        }
    }

    std::vector<int> component(static_cast<std::size_t>(total), -1);
    int n_components = 0;
    for (int start = 0; start < total; ++start) {
        if (component[static_cast<std::size_t>(start)] >= 0) continue;
        std::queue<int> frontier;
        frontier.push(start);
        component[static_cast<std::size_t>(start)] = n_components;
        while (!frontier.empty()) {
            const int node = frontier.front();
            frontier.pop();
            for (int next : adj[static_cast<std::size_t>(node)]) {
                if (component[static_cast<std::size_t>(next)] < 0) {
                    component[static_cast<std::size_t>(next)] = n_components;
                    frontier.push(next);
                }
            }
        }
        ++n_components;
    }

    std::vector<Subsystem> result(static_cast<std::size_t>(n_components));
    for (int i = 0; i < dims.ng; ++i) {
        result[static_cast<std::size_t>(component[static_cast<std::size_t>(g_id(i))])]
            .g_indices.push_back(i);
    }
    for (int j = 0; j < dims.ne; ++j) {
        result[static_cast<std::size_t>(component[static_cast<std::size_t>(e_id(j))])]
            .e_indices.push_back(j);
    }
    for (int k = 0; k < dims.nf; ++k) {
        result[static_cast<std::size_t>(component[static_cast<std::size_t>(f_id(k))])]
            .f_indices.push_back(k);
    }
    for (auto& sub : result) {
        const auto sd = sub.dims();
        sub.couplings.p = Matrix::Zero(sd.ng, sd.ne);
        sub.couplings.s = Matrix::Zero(sd.ne, sd.nf);
        for (int a = 0; a < sd.ng; ++a) {
            for (int b = 0; b < sd.ne; ++b) {
                sub.couplings.p(a, b) = pair.p(sub.g_indices[static_cast<std::size_t>(a)],
                                               sub.e_indices[static_cast<std::size_t>(b)]);
            }
        }
        for (int b = 0; b < sd.ne; ++b) {
            for (int c = 0; c < sd.nf; ++c) {
                sub.couplings.s(b, c) = pair.s(sub.e_indices[static_cast<std::size_t>(b)],
                                               sub.f_indices[static_cast<std::size_t>(c)]);
            }
        }
    }
    return result;
}

}  // namespace dstirap
