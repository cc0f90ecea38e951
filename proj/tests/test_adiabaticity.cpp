#include <doctest.h>

#include <cmath>

#include "dstirap/adiabaticity.hpp"
#include "dstirap/oracles.hpp"
#include "test_util.hpp"

using namespace dstirap;
using dstirap::testing::Fig4Angles;

namespace {

std::vector<double> uniform_grid(double a, double b, int n) {
    std::vector<double> grid(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        grid[static_cast<std::size_t>(i)] = a + (b - a) * i / (n - 1.0);
    }
    return grid;
}

struct Fig4System {
    CouplingPair pair;
    RwaHamiltonian h;
    DarkStateFamily darks;
    BrightStateFamily brights;

    static Fig4System make(double rabi_scale = 1.0) {
        const auto pair = oracles::subsystem_123(
            Fig4Angles::eta, Fig4Angles::theta,
            {Fig4Angles::phi_p, Fig4Angles::psi_p, Fig4Angles::phi_s,
             Fig4Angles::psi_s},
            52.0 * rabi_scale, 42.0 * rabi_scale);
        return Fig4System{pair,
                          RwaHamiltonian(pair, 0.0, PulseEnvelope::gaussian(3.0, 6.0),
                                         PulseEnvelope::gaussian(-3.0, 6.0)),
                          dark_states(pair.p, pair.s),
                          BrightStateFamily(pair.p, pair.s, 0.0)};
    }
};

}  // namespace

TEST_CASE("identical envelopes zero the Wronskian and all ratios") {
    const auto pair = oracles::subsystem_123(0.7, 0.5, {}, 20.0, 20.0);
    RwaHamiltonian h(pair, 0.0, PulseEnvelope::gaussian(0.0, 5.0),
                     PulseEnvelope::gaussian(0.0, 5.0));
    const auto darks = dark_states(pair.p, pair.s);
    const BrightStateFamily brights(pair.p, pair.s, 0.0);
    const auto report =
        adiabaticity_scan(darks, brights, h, uniform_grid(-10.0, 10.0, 201), {});
    CHECK(report.max_ratio_closed_form < 1e-12);
    CHECK(report.max_ratio < 1e-7);  // finite-difference noise only
    CHECK(report.adiabatic);
}

TEST_CASE("fig-4 scenario is comfortably adiabatic over the transfer window") {
    const auto sys = Fig4System::make();
    const auto report = adiabaticity_scan(sys.darks, sys.brights, sys.h,
                                          uniform_grid(-27.0, 27.0, 301), {});
    CHECK(report.max_ratio < 0.1);
    CHECK(report.max_ratio > 0.0);
    CHECK(report.adiabatic);
    // The closed form and the finite-difference route agree.
    CHECK(report.max_ratio ==
          doctest::Approx(report.max_ratio_closed_form).epsilon(1e-3));
}

TEST_CASE("scaling the Rabi frequencies down by 100 scales the ratio up by 100") {
    const auto big = Fig4System::make(1.0);
    const auto small = Fig4System::make(0.01);
    const auto grid = uniform_grid(-20.0, 20.0, 241);
    const auto report_big =
        adiabaticity_scan(big.darks, big.brights, big.h, grid, {});
    const auto report_small =
        adiabaticity_scan(small.darks, small.brights, small.h, grid, {});
    CHECK(report_small.max_ratio_closed_form ==
          doctest::Approx(100.0 * report_big.max_ratio_closed_form).epsilon(1e-9));
    CHECK(report_small.max_ratio ==
          doctest::Approx(100.0 * report_big.max_ratio).epsilon(1e-6));
}

TEST_CASE("ratios are invariant under global phase rotation of the couplings") {
    const auto base = Fig4System::make();
    CouplingPair rotated = base.pair;
    rotated.p *= std::polar(1.0, 0.83);
    rotated.s *= std::polar(1.0, -1.2);
    RwaHamiltonian h(rotated, 0.0, PulseEnvelope::gaussian(3.0, 6.0),
                     PulseEnvelope::gaussian(-3.0, 6.0));
    const auto darks = dark_states(rotated.p, rotated.s);
    const BrightStateFamily brights(rotated.p, rotated.s, 0.0);
    const auto grid = uniform_grid(-15.0, 15.0, 201);
    const auto a = adiabaticity_scan(base.darks, base.brights, base.h, grid, {});
    const auto b = adiabaticity_scan(darks, brights, h, grid, {});
    CHECK(a.max_ratio_closed_form ==
          doctest::Approx(b.max_ratio_closed_form).epsilon(1e-10));
}

TEST_CASE("coarse grids are rejected with a refinement hint") {
    const auto sys = Fig4System::make();
    CHECK_THROWS_WITH_AS(adiabaticity_scan(sys.darks, sys.brights, sys.h,
                                           uniform_grid(-27.0, 27.0, 7), {}),
                         doctest::Contains("refine the grid"), std::invalid_argument);
    CHECK_THROWS_AS(adiabaticity_scan(sys.darks, sys.brights, sys.h,
                                      uniform_grid(-27.0, 27.0, 3), {}),
                    std::invalid_argument);
}

TEST_CASE("conventional criterion") {
    const PulseEnvelope pump = PulseEnvelope::gaussian(3.0, 6.0);
    const PulseEnvelope stokes = PulseEnvelope::gaussian(-3.0, 6.0);
    const auto grid = uniform_grid(-15.0, 15.0, 401);
    {
        // Delta = 0: phi = pi/4 and both branches coincide.
        const auto crit = conventional_adiabaticity(26.0, 21.0, pump, stokes, 0.0, grid);
        for (std::size_t i = 100; i < 300; ++i) {
            CHECK(crit.mixing_angle[i] == doctest::Approx(M_PI / 4).epsilon(1e-12));
            CHECK(crit.rhs_cot[i] == doctest::Approx(crit.rhs_tan[i]).epsilon(1e-12));
        }
        CHECK(crit.max_ratio > 0.0);
        CHECK(crit.max_ratio < 0.1);
    }
    {
        // Scalar reduction of the full scan matches the conventional formula.
        CouplingPair pair{Matrix::Constant(1, 1, Complex{26.0, 0.0}),
                          Matrix::Constant(1, 1, Complex{21.0, 0.0})};
        RwaHamiltonian h(pair, 0.0, pump, stokes);
        const auto darks = dark_states(pair.p, pair.s);
        const BrightStateFamily brights(pair.p, pair.s, 0.0);
        const auto report = adiabaticity_scan(darks, brights, h, grid, {});
        const auto crit = conventional_adiabaticity(26.0, 21.0, pump, stokes, 0.0, grid);
        // Both bright states sit at |eps| = Omega0 and the scan ratio equals
        // |S P' - P S'| / (sqrt2 Omega0^3), which is exactly the strict branch.
        double worst = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            double scan = 0.0;
            for (const auto& pr : report.pairs) {
                scan = std::max(scan, pr.ratio_closed_form[i]);
            }
            const double conv = crit.ratio_strict[i];
            if (std::max(h.pump_value(grid[i]), h.stokes_value(grid[i])) < 0.01) continue;
            worst = std::max(worst, std::abs(scan - conv));
        }
        CHECK(worst < 1e-9);
    }
    {
        // Large detuning: both branches stay finite.
        const auto crit =
            conventional_adiabaticity(26.0, 21.0, pump, stokes, 5000.0, grid);
        for (double r : crit.ratio_strict) CHECK(std::isfinite(r));
        CHECK(crit.max_ratio > 0.0);
    }
}
