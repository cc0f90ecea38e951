#include "dstirap/adiabatic_basis.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dstirap {
namespace {

ManifoldDims dims_of(const Matrix& p, const Matrix& s) {
    if (p.cols() != s.rows()) {
        throw std::invalid_argument("coupling pair: P columns must equal S rows");
    }
    return {static_cast<int>(p.rows()), static_cast<int>(p.cols()),
            static_cast<int>(s.cols())};
}

DarkCase classify_case(const ManifoldDims& d) {
    if (d.ng <= d.ne && d.ne <= d.nf) return DarkCase::A;
    if (d.ng < d.ne && d.nf < d.ne) return DarkCase::C;
    return DarkCase::B;
}

// Stokes-side dark construction, Hamiltonian frame:
//   g rows:      s * x0                       (x0 in the allowed subspace)
//   e rows:      0
//   f rows:      -p * A+ [Sigma_C^-1 Pc+ x0 ; 0]
// The allowed subspace excludes g directions coupled to uncoupled e states
// through the second-stage diagonal Pi.
DarkStateFamily build_stokes_family(const Matrix& p, const Matrix& s,
                                    MsDecomposition dec, const SecondStageMs* second_in,
                                    double zero_tol) {
    const ManifoldDims d = dims_of(p, s);
    dec = reorder_singular(std::move(dec), zero_tol);
    const int nc = dec.coupled_count();
    const int k = d.ne - nc;
    const Matrix p_tilde = p * dec.b.adjoint();
    const Matrix p_active = p_tilde.leftCols(nc);
    const RealVector sigma_c = dec.sigma.head(nc);
    const double p_scale = p.norm();

    // Rotation of the g set and the basis of its admissible subspace.
    Matrix a_prime = Matrix::Identity(d.ng, d.ng);
    std::vector<int> allowed;
    SecondStageMs second_local;
    if (k > 0) {
        if (second_in != nullptr) {
            second_local = *second_in;
        } else {
            second_local = second_stage_ms(p_active, p_tilde.rightCols(k));
        }
        a_prime = second_local.a_prime;
        const int t = std::min(k, d.ng);
        for (int i = 0; i < d.ng - t; ++i) allowed.push_back(i);
        for (int i = 0; i < t; ++i) {
            if (second_local.pi[i] <= zero_tol * p_scale) allowed.push_back(d.ng - t + i);
        }
    } else {
        for (int i = 0; i < d.ng; ++i) allowed.push_back(i);
    }

    std::vector<DarkState> states;
    const int n_allowed = static_cast<int>(allowed.size());
    if (n_allowed > 0 && nc > 0) {
        const Matrix pc_rot = a_prime * p_active;  // couplings of rotated g to active e
        Matrix q = Matrix::Zero(d.ng, n_allowed);
        for (int i = 0; i < n_allowed; ++i) q(allowed[static_cast<std::size_t>(i)], i) = 1.0;
        const Matrix pc_allowed = pc_rot.adjoint() * q;  // nc x n_allowed
        Matrix w = Matrix::Zero(n_allowed, n_allowed);
        {
            const Matrix scaled = sigma_c.cwiseInverse().cast<Complex>().asDiagonal() * pc_allowed;
            w = scaled.adjoint() * scaled;  // restricted orthogonality metric
        }
        Eigen::SelfAdjointEigenSolver<Matrix> eig(w);
        for (int m = n_allowed - 1; m >= 0; --m) {  // descending eigenvalue
            const Vector coeff = eig.eigenvectors().col(m);
            const Vector c = q * coeff;                     // A'-frame g vector
            const Vector x0 = a_prime.adjoint() * c;        // bare g coords
            const Vector pc = pc_allowed * coeff;           // Pc+ x0, active e coords
            DarkState state;
            state.metric_eigenvalue = std::max(eig.eigenvalues()[m], 0.0);
            if (pc.norm() <= zero_tol * p_scale) {
                state.kind = DarkKind::TrappedG;
                state.g_part = x0;
                state.f_part = Vector::Zero(d.nf);
            } else {
                state.kind = DarkKind::Transfer;
                state.g_part = x0;
                Vector f_ms = Vector::Zero(d.nf);
                f_ms.head(nc) = sigma_c.cwiseInverse().cast<Complex>().asDiagonal() * pc;
                state.f_part = dec.a.adjoint() * f_ms;
            }
            states.push_back(std::move(state));
        }
    } else if (n_allowed > 0) {
        // No active Stokes channels at all: every admissible g direction is trapped.
        for (int i = 0; i < n_allowed; ++i) {
            DarkState state;
            state.kind = DarkKind::TrappedG;
            Vector c = Vector::Zero(d.ng);
            c[allowed[static_cast<std::size_t>(i)]] = 1.0;
            state.g_part = a_prime.adjoint() * c;
            state.f_part = Vector::Zero(d.nf);
            states.push_back(std::move(state));
        }
    }
    // Trapped states sort after the transfer ones.
    std::stable_partition(states.begin(), states.end(),
                          [](const DarkState& st) { return st.kind == DarkKind::Transfer; });

    for (int j = nc; j < d.nf; ++j) {
        DarkState state;
        state.kind = DarkKind::ConstantF;
        state.g_part = Vector::Zero(d.ng);
        state.f_part = dec.a.adjoint().col(j);
        states.push_back(std::move(state));
    }

    return DarkStateFamily(d, classify_case(d), std::move(states));
}

// Kernel of a matrix as orthonormal columns, at a relative tolerance.
Matrix kernel_basis(const Matrix& m, double zero_tol) {
    if (m.rows() == 0 || m.cols() == 0) return Matrix::Identity(m.cols(), m.cols());
    Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double cut = sv.size() > 0 ? zero_tol * sv[0] : 0.0;
    int rank = 0;
    for (int i = 0; i < sv.size(); ++i) rank += sv[i] > cut ? 1 : 0;
    return svd.matrixV().rightCols(m.cols() - rank);
}

}  // namespace

int DarkStateFamily::transfer_count() const {
    int n = 0;
    for (const auto& st : states_) n += st.kind == DarkKind::Transfer ? 1 : 0;
    return n;
}

int DarkStateFamily::trapped_count() const {
    int n = 0;
    for (const auto& st : states_) n += st.kind == DarkKind::TrappedG ? 1 : 0;
    return n;
}

Vector DarkStateFamily::vector_at(int l, double p, double s) const {
    const auto& st = states_.at(static_cast<std::size_t>(l));
    Vector v = Vector::Zero(dims_.total());
    switch (st.kind) {
        case DarkKind::Transfer: {
            const double norm =
                std::sqrt(s * s * st.g_part.squaredNorm() + p * p * st.f_part.squaredNorm());
            if (norm == 0.0) {
                v.head(dims_.ng) = st.g_part.normalized();
                return v;
            }
            v.head(dims_.ng) = (s / norm) * st.g_part;
            v.tail(dims_.nf) = (-p / norm) * st.f_part;
            return v;
        }
        case DarkKind::TrappedG:
            v.head(dims_.ng) = st.g_part.normalized();
            return v;
        case DarkKind::ConstantF:
            v.tail(dims_.nf) = st.f_part.normalized();
            return v;
    }
    return v;
}

std::vector<Vector> DarkStateFamily::vectors(double p, double s) const {
    std::vector<Vector> out;
    out.reserve(states_.size());
    for (int l = 0; l < count(); ++l) out.push_back(vector_at(l, p, s));
    return out;
}

Matrix DarkStateFamily::frame(double p, double s) const {
    Matrix f(dims_.total(), count());
    for (int l = 0; l < count(); ++l) f.col(l) = vector_at(l, p, s);
    return f;
}

Matrix DarkStateFamily::trapped_projector_g() const {
    Matrix proj = Matrix::Zero(dims_.ng, dims_.ng);
    for (const auto& st : states_) {
        if (st.kind == DarkKind::TrappedG) {
            const Vector g = st.g_part.normalized();
            proj += g * g.adjoint();
        }
    }
    return proj;
}

int dark_count(int ng, int ne, int nf) {
    if (ng < 0 || ne < 0 || nf < 0) {
        throw std::invalid_argument("dark_count: negative manifold size");
    }
    return std::max(ng + nf - ne, 0);
}

Matrix metric_matrix(const Matrix& p, const Matrix& s) {
    dims_of(p, s);
    const Matrix ss = s * s.adjoint();
    Eigen::SelfAdjointEigenSolver<Matrix> eig(ss);
    const double max_ev = eig.eigenvalues().size() > 0 ? eig.eigenvalues().maxCoeff() : 0.0;
    if (eig.eigenvalues().size() == 0 ||
        eig.eigenvalues().minCoeff() <= kDefaultZeroTol * kDefaultZeroTol * max_ev) {
        throw std::invalid_argument(
            "metric_matrix: S S+ is singular; use the general dark_states path");
    }
    const Matrix m = p * ss.inverse() * p.adjoint();
    return 0.5 * (m + Matrix(m.adjoint()));
}

DarkStateFamily dark_states(const Matrix& p, const Matrix& s, double zero_tol) {
    return build_stokes_family(p, s, ms_decompose(s), nullptr, zero_tol);
}

DarkStateFamily dark_states_case_A(const Matrix& p, const Matrix& s,
                                   const MsDecomposition& dec, double zero_tol) {
    const ManifoldDims d = dims_of(p, s);
    if (!(d.ng <= d.ne && d.ne <= d.nf)) {
        throw std::invalid_argument("dark_states_case_A: requires ng <= ne <= nf");
    }
    return build_stokes_family(p, s, dec, nullptr, zero_tol);
}

DarkStateFamily dark_states_case_C(const Matrix& p, const Matrix& s,
                                   const MsDecomposition& dec, const SecondStageMs& second,
                                   double zero_tol) {
    const ManifoldDims d = dims_of(p, s);
    if (!(d.ng < d.ne && d.nf < d.ne)) {
        throw std::invalid_argument("dark_states_case_C: requires ng, nf < ne");
    }
    if (dec.structure != MsStructure::RowsPadded && dec.null_count == 0) {
        throw std::invalid_argument(
            "dark_states_case_C: first stage must leave uncoupled e states");
    }
    return build_stokes_family(p, s, dec, &second, zero_tol);
}

DarkStateFamily dark_states_case_B(const Matrix& p, const Matrix& s, double zero_tol) {
    const ManifoldDims d = dims_of(p, s);
    if (!(d.ng > d.ne && d.ne > d.nf)) {
        throw std::invalid_argument("dark_states_case_B: requires ng > ne > nf");
    }
    const MsDecomposition pdec = reorder_singular(pump_side_ms(p), zero_tol);
    const int npc = pdec.coupled_count();
    const Matrix s_tilde = pdec.b * s;  // Stokes couplings in the e MS frame
    const Matrix s_top = s_tilde.topRows(npc);
    const RealVector pi_c = pdec.sigma.head(npc);
    const double s_scale = s.norm();

    // f vectors must avoid rows of S~ that belong to pump-uncoupled e states.
    const Matrix constraint = s_tilde.bottomRows(d.ne - npc);
    const Matrix nullbasis = kernel_basis(constraint, zero_tol);

    std::vector<DarkState> states;
    const int n_allowed = static_cast<int>(nullbasis.cols());
    if (n_allowed > 0) {
        const Matrix reach = pi_c.cwiseInverse().cast<Complex>().asDiagonal() *
                             (s_top * nullbasis);  // npc x n_allowed
        const Matrix w = reach.adjoint() * reach;
        Eigen::SelfAdjointEigenSolver<Matrix> eig(w);
        for (int m = n_allowed - 1; m >= 0; --m) {
            const Vector coeff = eig.eigenvectors().col(m);
            const Vector z0 = nullbasis * coeff;
            DarkState state;
            state.metric_eigenvalue = std::max(eig.eigenvalues()[m], 0.0);
            if ((s_top * z0).norm() <= zero_tol * s_scale) {
                state.kind = DarkKind::ConstantF;
                state.g_part = Vector::Zero(d.ng);
                state.f_part = z0;
            } else {
                state.kind = DarkKind::Transfer;
                Vector g_ms = Vector::Zero(d.ng);
                g_ms.head(npc) = reach * coeff;
                state.g_part = pdec.a.adjoint() * g_ms;
                state.f_part = z0;
            }
            states.push_back(std::move(state));
        }
    }
    std::stable_partition(states.begin(), states.end(),
                          [](const DarkState& st) { return st.kind == DarkKind::Transfer; });
    for (int j = npc; j < d.ng; ++j) {
        DarkState state;
        state.kind = DarkKind::TrappedG;
        state.g_part = pdec.a.adjoint().col(j);
        state.f_part = Vector::Zero(d.nf);
        states.push_back(std::move(state));
    }
    return DarkStateFamily(d, DarkCase::B, std::move(states));
}

BrightStateFamily::BrightStateFamily(const Matrix& p, const Matrix& s, double delta,
                                     double zero_tol)
    : dims_(dims_of(p, s)), p_(p), delta_(delta), zero_tol_(zero_tol) {
    const MsDecomposition dec = reorder_singular(ms_decompose(s), zero_tol);
    b_ = dec.b;
    a_ = dec.a;
    sigma_ = dec.sigma;
    p_tilde_ = p * b_.adjoint();
}

std::vector<BrightState> BrightStateFamily::evaluate(double p, double s) const {
    RealVector stokes2 = RealVector::Zero(dims_.ne);
    stokes2.head(sigma_.size()) = sigma_.array().square().matrix();
    const Matrix kmat = p * p * (p_tilde_.adjoint() * p_tilde_) +
                        s * s * Matrix(stokes2.cast<Complex>().asDiagonal());
    Eigen::SelfAdjointEigenSolver<Matrix> eig(kmat);
    const double scale = std::max(kmat.norm(), 0.0);
    std::vector<BrightState> out;
    for (int k = 0; k < dims_.ne; ++k) {
        const double mu = std::max(eig.eigenvalues()[k], 0.0);
        const Vector y_tilde = eig.eigenvectors().col(k);
        const Vector y_bare = b_.adjoint() * y_tilde;
        if (mu <= zero_tol_ * scale) {
            // Fully uncoupled e state at these envelopes: a single adiabatic
            // state pinned at the detuning.
            BrightState st;
            st.epsilon = delta_;
            st.mu = mu;
            st.y = y_bare;
            st.norm = 1.0;
            st.vector = Vector::Zero(dims_.total());
            st.vector.segment(dims_.ng, dims_.ne) = y_bare;
            out.push_back(std::move(st));
            continue;
        }
        const double disc = std::sqrt(delta_ * delta_ + 4.0 * mu);
        for (const double eps : {0.5 * (delta_ - disc), 0.5 * (delta_ + disc)}) {
            BrightState st;
            st.epsilon = eps;
            st.mu = mu;
            st.y = y_bare;
            Vector g_comp = p * (p_tilde_ * y_tilde);
            Vector f_ms = Vector::Zero(dims_.nf);
            f_ms.head(sigma_.size()) =
                sigma_.cast<Complex>().asDiagonal() * y_tilde.head(sigma_.size());
            Vector f_comp = s * (a_.adjoint() * f_ms);
            const double norm = std::sqrt(g_comp.squaredNorm() + eps * eps +
                                          f_comp.squaredNorm());
            st.norm = norm;
            st.vector = Vector::Zero(dims_.total());
            st.vector.head(dims_.ng) = g_comp / norm;
            st.vector.segment(dims_.ng, dims_.ne) = (eps / norm) * y_bare;
            st.vector.tail(dims_.nf) = f_comp / norm;
            out.push_back(std::move(st));
        }
    }
    return out;
}

std::vector<BrightState> BrightStateFamily::evaluate_aligned(
    double p, double s, const std::vector<BrightState>& previous) const {
    std::vector<BrightState> raw = evaluate(p, s);
    if (previous.empty() || previous.size() != raw.size()) return raw;
    const std::size_t n = raw.size();
    std::vector<bool> taken(n, false);
    std::vector<BrightState> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        double best = -1.0;
        std::size_t pick = 0;
        for (std::size_t j = 0; j < n; ++j) {
            if (taken[j]) continue;
            const double overlap = std::abs(previous[i].vector.dot(raw[j].vector));
            if (overlap > best) {
                best = overlap;
                pick = j;
            }
        }
        taken[pick] = true;
        out[i] = raw[pick];
        const Complex phase = previous[i].vector.dot(out[i].vector);
        if (std::abs(phase) > 0.0) {
            const Complex rot = std::conj(phase) / std::abs(phase);
            out[i].vector *= rot;
            out[i].y *= rot;
        }
    }
    return out;
}

std::string to_string(TransferVerdict verdict) {
    switch (verdict) {
        case TransferVerdict::CompleteAnyInitial: return "complete_any_initial";
        case TransferVerdict::Partial: return "partial";
        case TransferVerdict::Conditional: return "conditional";
        case TransferVerdict::None: return "none";
    }
    return "unknown";
}

FeasibilityVerdict feasibility(const Matrix& p, const Matrix& s, double zero_tol) {
    const ManifoldDims d = dims_of(p, s);
    const MsDecomposition dec = reorder_singular(ms_decompose(s), zero_tol);
    const MsDecomposition pdec = reorder_singular(pump_side_ms(p), zero_tol);
    const DarkStateFamily family = dark_states(p, s, zero_tol);

    FeasibilityVerdict v;
    v.n_dark = family.count();
    v.transfer_dark_count = family.transfer_count();
    v.uncoupled_g_count = d.ng - pdec.coupled_count();
    v.null_sigma_count = dec.null_count;
    v.case_c = d.ng < d.ne && d.nf < d.ne;

    if (v.case_c && d.nf > 0) {
        v.verdict = TransferVerdict::Conditional;
        const int nc = dec.coupled_count();
        const Matrix p_tilde = p * dec.b.adjoint();
        const SecondStageMs second =
            second_stage_ms(p_tilde.leftCols(nc), p_tilde.rightCols(d.ne - nc));
        const double pi_max = second.pi.size() > 0 ? second.pi.maxCoeff() : 0.0;
        v.condition_satisfied = pi_max <= zero_tol * p.norm();
        v.notes = v.condition_satisfied
                      ? "condition satisfied: uncoupled e states decouple from g"
                      : "condition violated: g couples to uncoupled e states (|Pi| > 0)";
    } else if (d.ng <= d.ne && d.ne <= d.nf && v.transfer_dark_count == d.ng) {
        v.verdict = TransferVerdict::CompleteAnyInitial;
        v.notes = "nondecreasing degeneracies with a full set of transfer dark states";
    } else if (v.transfer_dark_count == 0) {
        v.verdict = TransferVerdict::None;
        v.notes = "no transfer dark states; population cannot be moved adiabatically";
    } else {
        v.verdict = TransferVerdict::Partial;
        v.notes = "transfer dark states cover only part of the g set";
    }
    return v;
}

Matrix ChainDecomposition::chain_hamiltonian(double p, double s) const {
    const int n = dims.total();
    Matrix h = Matrix::Zero(n, n);
    const int e0 = dims.ng;
    const int f0 = dims.ng + dims.ne;
    h.block(0, e0, dims.ng, dims.ne) = p * q1;
    for (int l = 0; l < q2.size(); ++l) {
        h(e0 + l, l) = p * q2[l];
        h(e0 + l, f0 + l) = s * sigma1[l];
    }
    h.block(f0, e0, dims.nf, dims.ne) = s * sigma2;
    for (int j = 0; j < dims.ne; ++j) h(e0 + j, e0 + j) += delta;
    // Chains beyond the first ng couple e and f completion states only.
    h.block(e0 + dims.ng, f0, dims.ne - dims.ng, dims.nf) =
        s * he_f_rest;
    return h;
}

ChainDecomposition linearize_chains(const Matrix& p, const Matrix& s,
                                    const MsDecomposition& dec,
                                    const DarkStateFamily& family, double delta) {
    const ManifoldDims d = dims_of(p, s);
    if (!(d.ng <= d.ne && d.ne <= d.nf)) {
        throw std::invalid_argument("linearize_chains: requires ng <= ne <= nf");
    }
    MsDecomposition rdec = reorder_singular(dec, kDefaultZeroTol);
    if (rdec.null_count > 0) {
        throw std::invalid_argument("linearize_chains: requires nonsingular Sigma");
    }
    if (family.transfer_count() != d.ng) {
        throw std::invalid_argument(
            "linearize_chains: requires a full set of transfer dark states");
    }

    const Matrix p_tilde = p * rdec.b.adjoint();
    const Matrix sigma_rect = rdec.quasi_diagonal();
    const RealVector sigma_c = rdec.sigma;

    ChainDecomposition chain;
    chain.dims = d;
    chain.delta = delta;
    chain.g_basis = Matrix(d.ng, d.ng);
    Matrix e_cols(d.ne, d.ng);
    Matrix f_cols(d.nf, d.ng);
    RealVector ne_norm(d.ng), nf_norm(d.ng);
    int col = 0;
    for (const auto& st : family.states()) {
        if (st.kind != DarkKind::Transfer) continue;
        const Vector x0 = st.g_part.normalized();
        chain.g_basis.col(col) = x0;
        const Vector pe = p_tilde.adjoint() * x0;  // e MS coordinates
        ne_norm[col] = pe.norm();
        e_cols.col(col) = pe / ne_norm[col];
        Vector fe = Vector::Zero(d.nf);
        fe.head(d.ne) = sigma_c.cwiseInverse().cast<Complex>().asDiagonal() * pe;
        nf_norm[col] = fe.norm();
        f_cols.col(col) = fe / nf_norm[col];
        ++col;
    }

    const auto orthocomplement = [](const Matrix& lead) {
        Eigen::HouseholderQR<Matrix> qr(lead);
        const Matrix q = qr.householderQ();
        return Matrix(q.rightCols(lead.rows() - lead.cols()));
    };
    // The completion of the e set must be orthogonal to the dual chain
    // vectors (not to the chain states themselves, which are not mutually
    // orthogonal); only then do the extra e states decouple from the chains.
    Matrix dual_lead(d.ne, d.ng);
    for (int l = 0; l < d.ng; ++l) {
        const Vector pe = ne_norm[l] * e_cols.col(l);
        dual_lead.col(l) = (ne_norm[l] / (nf_norm[l] * nf_norm[l])) *
                           (sigma_c.array().square().inverse().matrix()
                                .cast<Complex>()
                                .asDiagonal() *
                            pe);
    }
    chain.e_basis = Matrix(d.ne, d.ne);
    chain.e_basis.leftCols(d.ng) = e_cols;
    chain.e_basis.rightCols(d.ne - d.ng) = orthocomplement(dual_lead);
    chain.f_basis = Matrix(d.nf, d.nf);
    chain.f_basis.leftCols(d.ng) = f_cols;
    chain.f_basis.rightCols(d.nf - d.ng) = orthocomplement(f_cols);
    const Matrix e_inv = chain.e_basis.inverse();
    chain.e_dual = e_inv.adjoint();

    const Matrix he_g = e_inv * p_tilde.adjoint() * chain.g_basis;      // ne x ng
    const Matrix he_f = e_inv * sigma_rect * chain.f_basis;             // ne x nf
    chain.q1 = chain.g_basis.adjoint() * p_tilde * chain.e_basis;       // ng x ne
    chain.sigma2 = chain.f_basis.adjoint() * sigma_rect.adjoint() * chain.e_basis;
    chain.q2 = RealVector(d.ng);
    chain.sigma1 = RealVector(d.ng);
    double residual = 0.0;
    for (int l = 0; l < d.ng; ++l) {
        chain.q2[l] = he_g(l, l).real();
        chain.sigma1[l] = he_f(l, l).real();
        residual = std::max(residual, std::abs(std::abs(he_g(l, l)) - ne_norm[l]));
    }
    // Forbidden couplings: completion e states must not reach the g set or
    // the first ng chain f states.
    for (int krow = d.ng; krow < d.ne; ++krow) {
        for (int l = 0; l < d.ng; ++l) {
            residual = std::max(residual, std::abs(he_g(krow, l)));
            residual = std::max(residual, std::abs(he_f(krow, l)));
        }
    }
    // Off-diagonal leakage out of the leading chain rows.
    for (int krow = 0; krow < d.ng; ++krow) {
        for (int l = 0; l < d.ng; ++l) {
            if (krow == l) continue;
            residual = std::max(residual, std::abs(he_g(krow, l)));
        }
        for (int m = 0; m < d.nf; ++m) {
            if (krow == m) continue;
            residual = std::max(residual, std::abs(he_f(krow, m)));
        }
    }
    chain.cross_residual = residual;
    chain.he_f_rest = he_f.bottomRows(d.ne - d.ng);
    return chain;
}

}  // namespace dstirap
