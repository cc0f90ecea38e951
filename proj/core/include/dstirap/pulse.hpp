#pragma once

#include <functional>
#include <stdexcept>
#include <vector>

namespace dstirap {

/// Dimensionless pulse envelope with unit peak. Gaussian shapes evaluate
/// analytically everywhere (no truncation at the window edges), so adaptive
/// integrators may probe slightly beyond the declared grid. Tabulated shapes
/// interpolate linearly and are zero outside their sample range.
class PulseEnvelope {
public:
    static PulseEnvelope gaussian(double center, double width);
    static PulseEnvelope tabulated(std::vector<double> times, std::vector<double> values);
    static PulseEnvelope custom(std::function<double(double)> shape);

    double value(double t) const;
    /// Time derivative; analytic for Gaussian shapes, central differences otherwise.
    double derivative(double t) const;

    bool is_gaussian() const { return kind_ == Kind::Gaussian; }
    double center() const { return center_; }
    double width() const { return width_; }

private:
    enum class Kind { Gaussian, Tabulated, Custom };
    Kind kind_ = Kind::Gaussian;
    double center_ = 0.0;
    double width_ = 1.0;
    std::vector<double> times_;
    std::vector<double> values_;
    std::function<double(double)> shape_;
};

}  // namespace dstirap
