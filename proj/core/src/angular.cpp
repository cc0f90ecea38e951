#include "dstirap/angular.hpp"

#include <array>
#include <cmath>
#include <cstdint>

namespace dstirap {
namespace {

// Factorials 0!..20! are exactly representable in 64-bit integers; the
// long-double recurrence keeps full precision for every argument the
// Racah sum can produce with j <= 8.
constexpr int kMaxFactorial = 80;

const std::array<long double, kMaxFactorial + 1>& factorial_table() {
    static const auto table = [] {
        std::array<long double, kMaxFactorial + 1> f{};
        std::uint64_t exact = 1;
        f[0] = 1.0L;
        for (int n = 1; n <= kMaxFactorial; ++n) {
            if (n <= 20) {
                exact *= static_cast<std::uint64_t>(n);
                f[n] = static_cast<long double>(exact);
            } else {
                f[n] = f[n - 1] * static_cast<long double>(n);
            }
        }
        return f;
    }();
    return table;
}

long double fact(int n) {
    if (n < 0 || n > kMaxFactorial) {
        throw std::invalid_argument("clebsch_gordan: factorial argument out of range");
    }
    return factorial_table()[static_cast<std::size_t>(n)];
}

constexpr double kSnapTol = 1e-14;

}  // namespace

HalfInt HalfInt::from(double value) {
    const double doubled = 2.0 * value;
    const double rounded = std::round(doubled);
    if (std::abs(doubled - rounded) > 1e-9) {
        throw std::invalid_argument("HalfInt: value is not a half-integer");
    }
    return HalfInt(static_cast<int>(rounded));
}

double clebsch_gordan_2(int two_j1, int two_m1, int two_j2, int two_m2,
                        int two_J, int two_M) {
    if (two_j1 < 0 || two_j2 < 0 || two_J < 0) {
        throw std::invalid_argument("clebsch_gordan: negative angular momentum");
    }
    if ((two_j1 + two_m1) % 2 != 0 || (two_j2 + two_m2) % 2 != 0 ||
        (two_J + two_M) % 2 != 0) {
        throw std::invalid_argument("clebsch_gordan: j - m must be an integer");
    }
    if (two_m1 + two_m2 != two_M) return 0.0;
    if (std::abs(two_m1) > two_j1 || std::abs(two_m2) > two_j2 ||
        std::abs(two_M) > two_J) {
        return 0.0;
    }
    // Triangle rule, including integer perimeter.
    if (two_J < std::abs(two_j1 - two_j2) || two_J > two_j1 + two_j2) return 0.0;
    if ((two_j1 + two_j2 + two_J) % 2 != 0) return 0.0;

    // All of these are integers once the checks above pass.
    const int j1pm1 = (two_j1 + two_m1) / 2;
    const int j1mm1 = (two_j1 - two_m1) / 2;
    const int j2pm2 = (two_j2 + two_m2) / 2;
    const int j2mm2 = (two_j2 - two_m2) / 2;
    const int JpM = (two_J + two_M) / 2;
    const int JmM = (two_J - two_M) / 2;
    const int j12J = (two_j1 + two_j2 - two_J) / 2;
    const int j1Jj2 = (two_j1 - two_j2 + two_J) / 2;
    const int j2Jj1 = (two_j2 - two_j1 + two_J) / 2;
    const int perim1 = (two_j1 + two_j2 + two_J) / 2 + 1;

    const long double pre =
        std::sqrt(static_cast<long double>(two_J + 1) * fact(j12J) * fact(j1Jj2) *
                  fact(j2Jj1) / fact(perim1) * fact(j1pm1) * fact(j1mm1) *
                  fact(j2pm2) * fact(j2mm2) * fact(JpM) * fact(JmM));

    const int k_min = std::max({0, -(j1Jj2 - j1mm1), -(j2Jj1 - j2pm2)});
    const int k_max = std::min({j12J, j1mm1, j2pm2});

    long double sum = 0.0L;
    for (int k = k_min; k <= k_max; ++k) {
        const long double term = fact(k) * fact(j12J - k) * fact(j1mm1 - k) *
                                 fact(j2pm2 - k) * fact(j1Jj2 - j1mm1 + k) *
                                 fact(j2Jj1 - j2pm2 + k);
        sum += (k % 2 == 0 ? 1.0L : -1.0L) / term;
    }

    const double result = static_cast<double>(pre * sum);
    return std::abs(result) < kSnapTol ? 0.0 : result;
}

double clebsch_gordan(double j1, double m1, double j2, double m2, double J, double M) {
    const auto tj1 = HalfInt::from(j1);
    const auto tj2 = HalfInt::from(j2);
    const auto tJ = HalfInt::from(J);
    const int two_m1 = static_cast<int>(std::round(2.0 * m1));
    const int two_m2 = static_cast<int>(std::round(2.0 * m2));
    const int two_M = static_cast<int>(std::round(2.0 * M));
    if (std::abs(2.0 * m1 - two_m1) > 1e-9 || std::abs(2.0 * m2 - two_m2) > 1e-9 ||
        std::abs(2.0 * M - two_M) > 1e-9) {
        throw std::invalid_argument("clebsch_gordan: projection is not a half-integer");
    }
    return clebsch_gordan_2(tj1.twice(), two_m1, tj2.twice(), two_m2, tJ.twice(), two_M);
}

}  // namespace dstirap
