#include <doctest.h>

#include <cmath>
#include <set>

#include "dstirap/linkage.hpp"
#include "test_util.hpp"

using namespace dstirap;
using dstirap::testing::Fig4Angles;

namespace {

LinkageSpec sigma_pm_linkage(double jg, double je, double jf, double omega_p = 1.0,
                             double omega_s = 1.0) {
    return LinkageSpec::make(
        jg, je, jf,
        FieldSpec::from_angles(omega_p, Fig4Angles::eta, Fig4Angles::phi_p,
                               Fig4Angles::psi_p),
        FieldSpec::from_angles(omega_s, Fig4Angles::theta, Fig4Angles::phi_s,
                               Fig4Angles::psi_s));
}

}  // namespace

TEST_CASE("spec validation") {
    CHECK_THROWS_AS(sigma_pm_linkage(1, 3, 2), std::invalid_argument);
    CHECK_THROWS_AS(sigma_pm_linkage(1, 2, 4), std::invalid_argument);
    CHECK_THROWS_AS(FieldSpec::from_components(1.0, 0.0, 0.0, 0.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(FieldSpec::from_angles(-1.0, 0.3, 0, 0), std::invalid_argument);
    const auto f = FieldSpec::from_components(2.0, {0.3, 0.1}, 0.0, {1.0, -2.0});
    double norm2 = 0.0;
    for (const auto& c : f.spherical_components) norm2 += std::norm(c);
    CHECK(norm2 == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("pump block of the 1-2-3 linkage matches the closed-form 2x3 matrix") {
    const auto pair = build_couplings(sigma_pm_linkage(1, 2, 3, 52.0, 42.0));
    const auto subs = decompose_subsystems(pair);
    const Subsystem* big = nullptr;
    for (const auto& sub : subs) {
        if (sub.dims() == ManifoldDims{2, 3, 4}) big = &sub;
    }
    REQUIRE(big != nullptr);

    const Complex omega_plus = std::polar(52.0 * std::cos(Fig4Angles::eta),
                                          Fig4Angles::phi_p);
    const Complex omega_minus = std::polar(52.0 * std::sin(Fig4Angles::eta),
                                           Fig4Angles::psi_p);
    Matrix expected(2, 3);
    const double c = 0.5 * std::sqrt(1.0 / 3.0);
    expected << c * omega_minus, c * std::sqrt(1.0 / 6.0) * omega_plus, 0.0, 0.0,
        c * std::sqrt(1.0 / 6.0) * omega_minus, c * omega_plus;
    CHECK((big->couplings.p - expected).cwiseAbs().maxCoeff() < 1e-14 * 52.0);
}

TEST_CASE("equal-J linkage zeroes the 0-0 element") {
    const auto spec = LinkageSpec::make(
        1, 1, 1, FieldSpec::from_components(30.0, {0.5, 0.1}, {0.6, 0.0}, {0.4, -0.2}),
        FieldSpec::from_components(30.0, 0.5, 0.5, {0.5, 0.5}));
    const auto pair = build_couplings(spec);
    CHECK(pair.p(1, 1) == Complex{0.0, 0.0});
    CHECK(pair.s(1, 1) == Complex{0.0, 0.0});
    // Signed 1-1-1 pattern: entries proportional to (-pi, -plus / minus, ...).
    const auto equal = build_couplings(LinkageSpec::make(
        1, 1, 1, FieldSpec::from_components(std::sqrt(6.0) * 2.0, 1, 1, 1),
        FieldSpec::from_components(std::sqrt(6.0) * 2.0, 1, 1, 1)));
    const double w = 1.0 / std::sqrt(3.0);  // normalized equal weights
    Matrix expected(3, 3);
    expected << -w, -w, 0.0, w, 0.0, -w, 0.0, w, w;
    CHECK((equal.p - expected).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("zero amplitude builds an all-zero matrix") {
    const auto spec = LinkageSpec::make(
        1, 2, 3, FieldSpec::from_angles(0.0, 0.3, 0.1, 0.2),
        FieldSpec::from_angles(1.0, 0.3, 0.1, 0.2));
    const auto pair = build_couplings(spec);
    CHECK(pair.p.cwiseAbs().maxCoeff() == 0.0);
    CHECK(pair.s.cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("sigma +/- fields split 1-2-3 into the (1,2,3) and (2,3,4) systems") {
    const auto pair = build_couplings(sigma_pm_linkage(1, 2, 3));
    const auto subs = decompose_subsystems(pair);
    REQUIRE(subs.size() == 2);
    std::multiset<int> sizes;
    for (const auto& sub : subs) sizes.insert(sub.dims().total());
    CHECK(sizes == std::multiset<int>{6, 9});
    for (const auto& sub : subs) {
        if (sub.dims().total() == 9) {
            CHECK(sub.g_indices == std::vector<int>{0, 2});   // M = -1, +1
            CHECK(sub.e_indices == std::vector<int>{0, 2, 4});
            CHECK(sub.f_indices == std::vector<int>{0, 2, 4, 6});
        } else {
            CHECK(sub.g_indices == std::vector<int>{1});  // M = 0
        }
    }
}

TEST_CASE("twin diamond split of 1-2-1") {
    const auto pair = build_couplings(sigma_pm_linkage(1, 2, 1));
    const auto subs = decompose_subsystems(pair);
    REQUIRE(subs.size() == 2);
    std::multiset<int> sizes;
    for (const auto& sub : subs) sizes.insert(sub.dims().total());
    CHECK(sizes == std::multiset<int>{4, 7});
}

TEST_CASE("all-zero couplings decompose into singletons") {
    CouplingPair pair{Matrix::Zero(2, 3), Matrix::Zero(3, 4)};
    const auto subs = decompose_subsystems(pair);
    CHECK(subs.size() == 9);
    for (const auto& sub : subs) CHECK(sub.dims().total() == 1);
}

TEST_CASE("decomposition is a partition of the state indices") {
    std::mt19937 rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        auto pair = dstirap::testing::random_pair(3, 4, 5, rng);
        // Sparsify to create structure.
        for (int i = 0; i < pair.p.rows(); ++i) {
            for (int j = 0; j < pair.p.cols(); ++j) {
                if ((i + 2 * j + trial) % 3 != 0) pair.p(i, j) = 0.0;
            }
        }
        for (int i = 0; i < pair.s.rows(); ++i) {
            for (int j = 0; j < pair.s.cols(); ++j) {
                if ((2 * i + j + trial) % 4 == 1) pair.s(i, j) = 0.0;
            }
        }
        const auto subs = decompose_subsystems(pair);
        std::multiset<int> g_seen, e_seen, f_seen;
        for (const auto& sub : subs) {
            for (int i : sub.g_indices) g_seen.insert(i);
            for (int i : sub.e_indices) e_seen.insert(i);
            for (int i : sub.f_indices) f_seen.insert(i);
        }
        CHECK(g_seen == std::multiset<int>{0, 1, 2});
        CHECK(e_seen == std::multiset<int>{0, 1, 2, 3});
        CHECK(f_seen == std::multiset<int>{0, 1, 2, 3, 4});
    }
}
