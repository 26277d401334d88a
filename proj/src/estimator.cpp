#include "sidebandit/estimator.hpp"

#include <algorithm>
#include <cmath>

#include "sidebandit/environment.hpp"

namespace sidebandit {

void ArmEstimator::update(double x, double sigma) {
    ++sample_count;
    if (sigma == kInf) return;
    const double w = 1.0 / (sigma * sigma);
    weighted_sum += x * w;
    weighted_count += w;
}

double ArmEstimator::mean() const {
    if (!has_information()) throw NoInformation();
    return weighted_sum / weighted_count;
}

double confidence_radius(double weighted_count, double t, double alpha) {
    if (!(weighted_count > 0.0)) throw NoInformation();
    return std::sqrt(2.0 * alpha * std::log(t) / weighted_count);
}

double confidence_radius(const ArmEstimator& est, double t, double alpha) {
    return confidence_radius(est.weighted_count, t, alpha);
}

double anytime_tail_bound(std::uint64_t t, double alpha) {
    if (t < 2) throw std::invalid_argument("anytime_tail_bound requires t >= 2");
    // One interval at t = 2 even though ceil(log2(1)) = 0.
    const double intervals = std::max(1.0, std::ceil(std::log2(static_cast<double>(t - 1))));
    const double b = 2.0 * intervals * std::pow(static_cast<double>(t), -alpha / 2.0);
    return std::clamp(b, 0.0, 1.0);
}

double anytime_tail_bound_loose(std::uint64_t t, double alpha) {
    if (t < 2) throw std::invalid_argument("anytime_tail_bound requires t >= 2");
    const double b = 2.0 * std::pow(static_cast<double>(t), 1.0 - alpha / 2.0);
    return std::clamp(b, 0.0, 1.0);
}

}  // namespace sidebandit
