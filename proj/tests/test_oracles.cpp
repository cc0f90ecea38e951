#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "dstirap/adiabatic_basis.hpp"
#include "dstirap/morris_shore.hpp"
#include "dstirap/oracles.hpp"
#include "test_util.hpp"

using namespace dstirap;
using namespace dstirap::oracles;
using dstirap::testing::Fig4Angles;

namespace {
const Phases kFig4{Fig4Angles::phi_p, Fig4Angles::psi_p, Fig4Angles::phi_s,
                   Fig4Angles::psi_s};
}

TEST_CASE("cubic roots: positivity, trace identity and symmetry") {
    double min_lambda = 1.0;
    for (int i = 0; i <= 200; ++i) {
        const double theta = 1e-3 + (M_PI / 2 - 2e-3) * i / 200.0;
        auto lambda = eigvals_123(theta);
        for (double l : lambda) min_lambda = std::min(min_lambda, l);
        // Trace of S S+ in (hbar Omega_S)^2 units is theta independent: 22/105.
        CHECK(lambda[0] + lambda[1] + lambda[2] ==
              doctest::Approx(22.0 / 105.0).epsilon(1e-12));
        // sigma+ <-> sigma- exchange maps theta to pi/2 - theta and permutes
        // the eigenvalue set.
        auto mirrored = eigvals_123(M_PI / 2 - theta);
        std::sort(lambda.begin(), lambda.end());
        std::sort(mirrored.begin(), mirrored.end());
        for (int k = 0; k < 3; ++k) {
            CHECK(lambda[static_cast<std::size_t>(k)] ==
                  doctest::Approx(mirrored[static_cast<std::size_t>(k)]).epsilon(1e-10));
        }
    }
    CHECK(min_lambda > 0.0);
}

TEST_CASE("cubic roots match the numeric singular values with the 7/20 weight") {
    for (int i = 0; i < 25; ++i) {
        const double theta = 0.05 + (M_PI / 2 - 0.1) * i / 24.0;
        auto lambda = eigvals_123(theta);
        std::sort(lambda.begin(), lambda.end());
        const auto pair = subsystem_123(0.9, theta, kFig4, 1.0, 1.0);
        const auto dec = ms_decompose(pair.s);
        for (int k = 0; k < 3; ++k) {
            const double numeric = dec.sigma[2 - k] * dec.sigma[2 - k] * 20.0 / 7.0;
            CHECK(numeric ==
                  doctest::Approx(lambda[static_cast<std::size_t>(k)]).epsilon(1e-9));
        }
    }
}

TEST_CASE("analytic 123 matrices: unitarity, d-row value, B normalization") {
    {
        const auto m = ms_matrices_123(M_PI / 4, {});
        // At theta = pi/4 with zero phases the uncoupled-f row reduces to
        // (-1, sqrt15, -sqrt15, 1)/sqrt32.
        const double s32 = std::sqrt(32.0);
        CHECK(std::abs(m.a(3, 0) - Complex{-1.0 / s32}) < 1e-12);
        CHECK(std::abs(m.a(3, 1) - Complex{std::sqrt(15.0) / s32}) < 1e-12);
        CHECK(std::abs(m.a(3, 2) - Complex{-std::sqrt(15.0) / s32}) < 1e-12);
        CHECK(std::abs(m.a(3, 3) - Complex{1.0 / s32}) < 1e-12);
    }
    for (int i = 0; i < 50; ++i) {
        const double theta = 0.03 + (M_PI / 2 - 0.06) * i / 49.0;
        const auto m = ms_matrices_123(theta, kFig4);
        CHECK((m.a * m.a.adjoint() - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff() <
              1e-10);
        CHECK((m.b * m.b.adjoint() - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff() <
              1e-10);
        // Rows of B are normalized by construction.
        for (int r = 0; r < 3; ++r) {
            CHECK(m.b.row(r).norm() == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
    CHECK_THROWS_AS(ms_matrices_123(0.0, kFig4), std::domain_error);
}

TEST_CASE("analytic 123 matrices match the numeric decomposition up to phases") {
    for (const double theta : {0.1, 0.4636, 0.9, 1.3}) {
        const auto analytic = ms_matrices_123(theta, kFig4);
        const auto pair = subsystem_123(0.9, theta, kFig4, 1.0, 1.0);
        const auto dec = ms_decompose(pair.s);
        const Matrix cross_a = analytic.a * dec.a.adjoint();
        const Matrix cross_b = analytic.b * dec.b.adjoint();
        for (const Matrix* cross : {&cross_a, &cross_b}) {
            for (int r = 0; r < cross->rows(); ++r) {
                double row_max = 0.0, row_sum = 0.0;
                for (int c = 0; c < cross->cols(); ++c) {
                    row_max = std::max(row_max, std::abs((*cross)(r, c)));
                    row_sum += std::norm((*cross)(r, c));
                }
                CHECK(row_max == doctest::Approx(1.0).epsilon(1e-9));
                CHECK(row_sum == doctest::Approx(1.0).epsilon(1e-9));
            }
        }
    }
}

TEST_CASE("dark mixing angles reproduce the metric eigenvectors") {
    for (const double eta : {0.0, 0.4, Fig4Angles::eta}) {
        for (const double theta : {0.2, Fig4Angles::theta, 1.1}) {
            const auto vecs = dark_vectors_123(eta, theta, kFig4);
            CHECK(std::abs(vecs.x0_1.norm() - 1.0) < 1e-12);
            CHECK(std::abs(vecs.x0_2.norm() - 1.0) < 1e-12);
            CHECK(std::abs(vecs.x0_1.dot(vecs.x0_2)) < 1e-12);
            const auto pair = subsystem_123(eta, theta, kFig4, 1.0, 1.0);
            const Matrix m = metric_matrix(pair.p, pair.s);
            // Each analytic vector is an eigenvector: M x0 is parallel to x0.
            for (const Vector* x0 : {&vecs.x0_1, &vecs.x0_2}) {
                const Vector mx = m * *x0;
                const Complex lambda = x0->dot(mx);
                CHECK((mx - lambda * *x0).norm() < 1e-9 * std::max(1.0, m.norm()));
            }
        }
    }
}

TEST_CASE("quadratic roots and the analytic twin-diamond matrices") {
    {
        const auto at_zero = eigvals_121(0.0);
        CHECK(at_zero[0] == doctest::Approx(0.12).epsilon(1e-15));
        CHECK(at_zero[1] == doctest::Approx(0.02).epsilon(1e-15));
        const auto at_quarter = eigvals_121(M_PI / 4);
        CHECK(at_quarter[0] == doctest::Approx(0.08).epsilon(1e-14));
        CHECK(at_quarter[1] == doctest::Approx(0.06).epsilon(1e-14));
    }
    for (int i = 0; i < 50; ++i) {
        const double theta = 0.03 + (M_PI / 2 - 0.06) * i / 49.0;
        const auto m = ms_matrices_121(theta, kFig4);
        const Matrix b = m.b();
        CHECK((b * b.adjoint() - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-10);
        CHECK((m.a * m.a.adjoint() - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() <
              1e-10);
        // The uncoupled row annihilates the Stokes couplings.
        const auto pair = subsystem_121(0.9, theta, kFig4, 1.0, 1.0);
        CHECK((m.b_b * pair.s).norm() < 1e-10 * pair.s.norm());
        // lambda grid against the numeric singular values.
        auto lambda = eigvals_121(theta);
        const auto dec = ms_decompose(pair.s);
        CHECK(4.0 * dec.sigma[0] * dec.sigma[0] ==
              doctest::Approx(lambda[0]).epsilon(1e-10));
        CHECK(4.0 * dec.sigma[1] * dec.sigma[1] ==
              doctest::Approx(lambda[1]).epsilon(1e-10));
    }
}

TEST_CASE("twin-diamond sign factors keep the rows consistent across quadrants") {
    // B_a rows must stay genuine left singular vectors on both sides of
    // theta = pi/4 (where sin 4 theta switches sign).
    for (const double theta : {0.5, 0.7, 0.9, 1.2}) {
        const auto m = ms_matrices_121(theta, kFig4);
        const auto pair = subsystem_121(0.9, theta, kFig4, 1.0, 1.0);
        const Matrix ss = pair.s * pair.s.adjoint();
        const auto lambda = eigvals_121(theta);
        for (int r = 0; r < 2; ++r) {
            const Vector v = m.b_a.row(r).adjoint();  // ket of the bra row
            const double ev = 0.25 * lambda[static_cast<std::size_t>(r)];
            CHECK((ss * v - ev * v).norm() < 1e-10);
        }
    }
}

TEST_CASE("Pi scalar and the complete-transfer condition") {
    {
        // Fig. 10 polarizations: theta + eta = pi/2, zero phases.
        const auto cond = pi_and_condition_121(2.0 * M_PI / 5.0, M_PI / 10.0, {});
        CHECK(std::abs(cond.pi) < 1e-15);
        CHECK(cond.condition_met);
    }
    {
        // Fig. 9 polarizations violate it.
        const auto cond = pi_and_condition_121(2.0 * M_PI / 5.0, -M_PI / 7.0, {});
        CHECK(std::abs(cond.pi) > 1e-3);
        CHECK_FALSE(cond.condition_met);
    }
    {
        // Odd-k branch: phase sum pi with theta - eta = pi/2.
        // psi_S - phi_S + phi_P - psi_P = pi.
        const Phases phases{0.7, 0.2, 1.1, M_PI + 1.1 - 0.7 + 0.2};
        const double eta = 0.3;
        const double theta = M_PI / 2 + eta;
        const auto cond = pi_and_condition_121(eta, theta, phases);
        CHECK(std::abs(cond.pi) < 1e-12);
        CHECK(cond.condition_met);
    }
    // |Pi| equivalence against the pipeline over a 2-D grid plus random
    // phase quadruples.
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> angle(0.05, 1.5);
    std::uniform_real_distribution<double> ph(-3.0, 3.0);
    for (int trial = 0; trial < 40; ++trial) {
        const double eta = angle(rng);
        const double theta = angle(rng);
        const Phases phases{ph(rng), ph(rng), ph(rng), ph(rng)};
        const auto cond = pi_and_condition_121(eta, theta, phases, 30.0);
        const auto pair = subsystem_121(eta, theta, phases, 30.0, 30.0);
        const auto dec = reorder_singular(ms_decompose(pair.s));
        const Matrix p_tilde = pair.p * dec.b.adjoint();
        const auto second = second_stage_ms(p_tilde.leftCols(2), p_tilde.rightCols(1));
        CHECK(second.pi[0] == doctest::Approx(std::abs(cond.pi)).epsilon(1e-10));
    }
}

TEST_CASE("self check is green") {
    const auto report = self_check(60);
    for (const auto& line : report.lines) {
        INFO(line.name, " worst=", line.worst, " tol=", line.tolerance);
        CHECK(line.pass);
    }
    CHECK(report.all_pass);
}
