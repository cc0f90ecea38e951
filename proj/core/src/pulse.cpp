#include "dstirap/pulse.hpp"

#include <algorithm>
#include <cmath>

namespace dstirap {

PulseEnvelope PulseEnvelope::gaussian(double center, double width) {
    if (width <= 0.0) {
        throw std::invalid_argument("PulseEnvelope: Gaussian width must be positive");
    }
    PulseEnvelope p;
    p.kind_ = Kind::Gaussian;
    p.center_ = center;
    p.width_ = width;
    return p;
}

PulseEnvelope PulseEnvelope::tabulated(std::vector<double> times, std::vector<double> values) {
    if (times.size() != values.size() || times.size() < 2) {
        throw std::invalid_argument("PulseEnvelope: need at least two matching samples");
    }
    if (!std::is_sorted(times.begin(), times.end())) {
        throw std::invalid_argument("PulseEnvelope: sample times must be ascending");
    }
    for (double v : values) {
        if (v < 0.0 || v > 1.0) {
            throw std::invalid_argument("PulseEnvelope: samples must lie in [0, 1]");
        }
    }
    PulseEnvelope p;
    p.kind_ = Kind::Tabulated;
    p.times_ = std::move(times);
    p.values_ = std::move(values);
    return p;
}

PulseEnvelope PulseEnvelope::custom(std::function<double(double)> shape) {
    if (!shape) {
        throw std::invalid_argument("PulseEnvelope: empty closure");
    }
    PulseEnvelope p;
    p.kind_ = Kind::Custom;
    p.shape_ = std::move(shape);
    return p;
}

double PulseEnvelope::value(double t) const {
    switch (kind_) {
        case Kind::Gaussian: {
            const double u = (t - center_) / width_;
            return std::exp(-u * u);
        }
        case Kind::Tabulated: {
            if (t <= times_.front() || t >= times_.back()) {
                return t == times_.front() ? values_.front()
                     : t == times_.back()  ? values_.back()
                                           : 0.0;
            }
            const auto it = std::upper_bound(times_.begin(), times_.end(), t);
            const std::size_t hi = static_cast<std::size_t>(it - times_.begin());
            const std::size_t lo = hi - 1;
            const double w = (t - times_[lo]) / (times_[hi] - times_[lo]);
            return values_[lo] + w * (values_[hi] - values_[lo]);
        }
        case Kind::Custom:
            return shape_(t);
    }
    return 0.0;
}

double PulseEnvelope::derivative(double t) const {
    if (kind_ == Kind::Gaussian) {
        const double u = (t - center_) / width_;
        return -2.0 * u / width_ * std::exp(-u * u);
    }
    const double h = 1e-6 * std::max(1.0, std::abs(t));
    return (value(t + h) - value(t - h)) / (2.0 * h);
}

}  // namespace dstirap
