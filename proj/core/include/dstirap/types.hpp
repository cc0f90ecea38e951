#pragma once

#include <complex>
#include <Eigen/Dense>

namespace dstirap {

using Real = double;
using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// Relative threshold below which a singular value counts as vanishing.
/// The physics branches discontinuously on rank, so the cut is explicit
/// and overridable per call site.
inline constexpr double kDefaultZeroTol = 1e-10;

/// Sizes of the three degenerate manifolds, in chain order g, e, f.
struct ManifoldDims {
    int ng = 0;
    int ne = 0;
    int nf = 0;

    int total() const { return ng + ne + nf; }
    bool operator==(const ManifoldDims&) const = default;
};

}  // namespace dstirap
