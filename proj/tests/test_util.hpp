#pragma once

#include <complex>
#include <random>

#include "dstirap/linkage.hpp"
#include "dstirap/types.hpp"

namespace dstirap::testing {

inline Matrix random_complex(int rows, int cols, std::mt19937& rng) {
    std::normal_distribution<double> dist(0.0, 1.0);
    Matrix m(rows, cols);
    for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < cols; ++j) m(i, j) = Complex{dist(rng), dist(rng)};
    }
    return m;
}

inline Vector random_state(int n, std::mt19937& rng) {
    std::normal_distribution<double> dist(0.0, 1.0);
    Vector v(n);
    for (int i = 0; i < n; ++i) v[i] = Complex{dist(rng), dist(rng)};
    v.normalize();
    return v;
}

inline Matrix random_unitary(int n, std::mt19937& rng) {
    const Matrix m = random_complex(n, n, rng);
    Eigen::HouseholderQR<Matrix> qr(m);
    Matrix q = qr.householderQ();
    // Fix the Householder phase ambiguity so the distribution is Haar-like.
    const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int i = 0; i < n; ++i) {
        const Complex d = r(i, i);
        q.col(i) *= std::abs(d) > 0 ? d / std::abs(d) : Complex{1.0, 0.0};
    }
    return q;
}

inline CouplingPair random_pair(int ng, int ne, int nf, std::mt19937& rng) {
    return CouplingPair{random_complex(ng, ne, rng), random_complex(ne, nf, rng)};
}

/// Paper phase sets reused across suites.
struct Fig4Angles {
    static constexpr double eta = 1.3376;
    static constexpr double theta = 0.4636;
    static constexpr double phi_p = 1.1814;
    static constexpr double psi_p = 0.0;
    static constexpr double phi_s = 1.8925;
    static constexpr double psi_s = 2.8198;
};

}  // namespace dstirap::testing
