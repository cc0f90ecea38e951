#include "dstirap/morris_shore.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <stdexcept>

namespace dstirap {
namespace {

MsStructure classify(int rows, int cols) {
    if (cols > rows) return MsStructure::ColumnsPadded;
    if (cols < rows) return MsStructure::RowsPadded;
    return MsStructure::Square;
}

// Reverses row order; used to move the diagonal block of the second
// transformation to the bottom, as the zero rows must lead.
Matrix flip_rows(const Matrix& m) {
    return m.colwise().reverse();
}

}  // namespace

Matrix MsDecomposition::quasi_diagonal() const {
    Matrix q = Matrix::Zero(rows(), cols());
    for (int i = 0; i < sigma.size(); ++i) q(i, i) = sigma[i];
    return q;
}

namespace {

// Eigen's SVD does not accept empty matrices; an empty axis means every
// state on the other axis is uncoupled.
bool empty_decomposition(const Matrix& x, MsDecomposition& dec) {
    if (x.rows() > 0 && x.cols() > 0) return false;
    dec.b = Matrix::Identity(x.rows(), x.rows());
    dec.a = Matrix::Identity(x.cols(), x.cols());
    dec.sigma = RealVector::Zero(0);
    return true;
}

}  // namespace

MsDecomposition ms_decompose(const Matrix& s) {
    MsDecomposition dec;
    dec.side = MsSide::Stokes;
    if (empty_decomposition(s, dec)) {
        dec.structure = classify(static_cast<int>(s.rows()), static_cast<int>(s.cols()));
        for (int i = 0; i < s.rows(); ++i) dec.uncoupled_e.push_back(i);
        for (int i = 0; i < s.cols(); ++i) dec.uncoupled_far.push_back(i);
        return dec;
    }
    Eigen::JacobiSVD<Matrix> svd(s, Eigen::ComputeFullU | Eigen::ComputeFullV);
    dec.b = svd.matrixU().adjoint();
    dec.a = svd.matrixV().adjoint();
    dec.sigma = svd.singularValues();
    dec.structure = classify(static_cast<int>(s.rows()), static_cast<int>(s.cols()));
    const int ne = static_cast<int>(s.rows());
    const int nf = static_cast<int>(s.cols());
    for (int i = nf; i < ne; ++i) dec.uncoupled_e.push_back(i);
    for (int i = ne; i < nf; ++i) dec.uncoupled_far.push_back(i);
    return dec;
}

MsDecomposition pump_side_ms(const Matrix& p) {
    MsDecomposition dec;
    dec.side = MsSide::Pump;
    if (p.rows() == 0 || p.cols() == 0) {
        dec.a = Matrix::Identity(p.rows(), p.rows());
        dec.b = Matrix::Identity(p.cols(), p.cols());
        dec.sigma = RealVector::Zero(0);
        dec.structure = classify(static_cast<int>(p.rows()), static_cast<int>(p.cols()));
        for (int i = 0; i < p.cols(); ++i) dec.uncoupled_e.push_back(i);
        for (int i = 0; i < p.rows(); ++i) dec.uncoupled_far.push_back(i);
        return dec;
    }
    Eigen::JacobiSVD<Matrix> svd(p, Eigen::ComputeFullU | Eigen::ComputeFullV);
    dec.a = svd.matrixU().adjoint();  // g side
    dec.b = svd.matrixV().adjoint();  // e side
    dec.sigma = svd.singularValues();
    dec.structure = classify(static_cast<int>(p.rows()), static_cast<int>(p.cols()));
    const int ng = static_cast<int>(p.rows());
    const int ne = static_cast<int>(p.cols());
    for (int i = ng; i < ne; ++i) dec.uncoupled_e.push_back(i);
    for (int i = ne; i < ng; ++i) dec.uncoupled_far.push_back(i);
    return dec;
}

MsDecomposition reorder_singular(MsDecomposition dec, double zero_tol) {
    const double sigma_max = dec.sigma.size() > 0 ? dec.sigma[0] : 0.0;
    const double cut = zero_tol * sigma_max;
    dec.null_count = 0;
    for (int i = 0; i < dec.sigma.size(); ++i) {
        // Descending order: the first vanishing value marks the tail.
        if (dec.sigma[i] <= cut) {
            dec.null_count = static_cast<int>(dec.sigma.size()) - i;
            break;
        }
    }
    const int nc = dec.coupled_count();
    const auto mark = [nc](std::vector<int>& list, int limit) {
        for (int i = nc; i < limit; ++i) {
            bool present = false;
            for (int existing : list) present = present || existing == i;
            if (!present) list.push_back(i);
        }
        std::sort(list.begin(), list.end());
    };
    mark(dec.uncoupled_e, static_cast<int>(dec.b.rows()));
    mark(dec.uncoupled_far, static_cast<int>(dec.a.rows()));
    return dec;
}

Matrix SecondStageMs::pi_matrix() const {
    const int rows = static_cast<int>(pi.size());
    const int cols = static_cast<int>(b_prime.rows());
    Matrix m = Matrix::Zero(rows, cols);
    for (int i = 0; i < rows; ++i) m(i, i) = pi[i];
    return m;
}

SecondStageMs second_stage_ms(const Matrix& p_active, const Matrix& p_uncoupled) {
    const int ng = static_cast<int>(p_uncoupled.rows());
    const int k = static_cast<int>(p_uncoupled.cols());
    if (k == 0) {
        throw std::invalid_argument(
            "second_stage_ms: first stage left no uncoupled e states");
    }
    if (p_active.rows() != ng) {
        throw std::invalid_argument("second_stage_ms: row mismatch between blocks");
    }

    Eigen::JacobiSVD<Matrix> svd(p_uncoupled, Eigen::ComputeFullU | Eigen::ComputeFullV);
    SecondStageMs second;
    const int t = std::min(k, ng);
    // Reversing the factor rows turns U+ X V = diag(descending) into the
    // required form: zero rows on top, ascending diagonal coupling below.
    second.a_prime = flip_rows(svd.matrixU().adjoint());
    second.pi = svd.singularValues().reverse();
    const Matrix vdag = svd.matrixV().adjoint();
    if (k <= ng) {
        second.b_prime = flip_rows(vdag);
        second.case_tag =
            k < ng ? SecondStageCase::FewerThanNg : SecondStageCase::EqualNg;
    } else {
        // [Pi 0] shape: only the t coupled columns are reversed, so the
        // e states with no g partner at all stay trailing.
        Matrix bp(k, k);
        bp.topRows(t) = vdag.topRows(t).colwise().reverse();
        bp.bottomRows(k - t) = vdag.bottomRows(k - t);
        second.b_prime = bp;
        second.case_tag = SecondStageCase::MoreThanNg;
    }

    const Matrix rotated = second.a_prime * p_active;
    second.p_tilde = rotated.topRows(ng - t);
    second.p_tilde_prime = rotated.bottomRows(t);
    return second;
}

Matrix ms_unitary(const MsDecomposition& dec, const ManifoldDims& dims) {
    const int n = dims.total();
    Matrix u = Matrix::Identity(n, n);
    if (dec.side == MsSide::Stokes) {
        if (dec.b.rows() != dims.ne || dec.a.rows() != dims.nf) {
            throw std::invalid_argument("ms_unitary: decomposition does not match dims");
        }
        u.block(dims.ng, dims.ng, dims.ne, dims.ne) = dec.b;
        u.block(dims.ng + dims.ne, dims.ng + dims.ne, dims.nf, dims.nf) = dec.a;
    } else {
        if (dec.a.rows() != dims.ng || dec.b.rows() != dims.ne) {
            throw std::invalid_argument("ms_unitary: decomposition does not match dims");
        }
        u.block(0, 0, dims.ng, dims.ng) = dec.a;
        u.block(dims.ng, dims.ng, dims.ne, dims.ne) = dec.b;
    }
    return u;
}

Matrix second_stage_unitary(const SecondStageMs& second, const ManifoldDims& dims, int nc) {
    const int n = dims.total();
    const int k = static_cast<int>(second.b_prime.rows());
    if (nc + k != dims.ne || second.a_prime.rows() != dims.ng) {
        throw std::invalid_argument("second_stage_unitary: blocks do not match dims");
    }
    Matrix u = Matrix::Identity(n, n);
    u.block(0, 0, dims.ng, dims.ng) = second.a_prime;
    u.block(dims.ng + nc, dims.ng + nc, k, k) = second.b_prime;
    return u;
}

}  // namespace dstirap
