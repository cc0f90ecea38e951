#pragma once

#include <stdexcept>

namespace dstirap {

/// Nonnegative half-integer angular momentum (or projection), stored as 2j.
class HalfInt {
public:
    HalfInt() = default;
    constexpr explicit HalfInt(int twice) : twice_(twice) {}

    /// Converts a floating-point value that must be an exact multiple of 1/2.
    static HalfInt from(double value);

    constexpr int twice() const { return twice_; }
    double value() const { return 0.5 * twice_; }
    /// 2j+1, the number of magnetic sublevels.
    constexpr int multiplicity() const { return twice_ + 1; }

    constexpr auto operator<=>(const HalfInt&) const = default;

private:
    int twice_ = 0;
};

/// Clebsch-Gordan coefficient <j1 m1, j2 m2 | J M> in the Condon-Shortley
/// convention, evaluated with the Racah algebraic sum. Returns exact zero
/// when M != m1+m2, when the triangle rule fails, or when any |m| exceeds
/// its j. Values below 1e-14 are snapped to zero so that selection rules
/// produce structural zeros in coupling matrices.
///
/// Throws std::invalid_argument for negative or non-half-integer j, or when
/// j-m is not an integer.
double clebsch_gordan(double j1, double m1, double j2, double m2, double J, double M);

/// Same, on pre-validated doubled quantum numbers.
double clebsch_gordan_2(int two_j1, int two_m1, int two_j2, int two_m2,
                        int two_J, int two_M);

}  // namespace dstirap
