#pragma once

#include <cstdint>
#include <stdexcept>

namespace sidebandit {

class NoInformation : public std::domain_error {
public:
    NoInformation() : std::domain_error("estimator has zero weighted sample count") {}
};

/// Inverse-variance weighted mean of heteroscedastic Gaussian samples of one
/// arm. Keeps only the sufficient statistics (weighted sum, weighted count).
struct ArmEstimator {
    double weighted_sum = 0.0;
    double weighted_count = 0.0;
    std::uint64_t sample_count = 0;

    /// Adds sample x observed at noise level sigma in (0, inf]. Infinite sigma
    /// only bumps sample_count.
    void update(double x, double sigma);

    double mean() const;

    bool has_information() const noexcept { return weighted_count > 0.0; }
};

/// sqrt(2 alpha ln t / weighted_count).
double confidence_radius(const ArmEstimator& est, double t, double alpha);
double confidence_radius(double weighted_count, double t, double alpha);

/// Anytime tail bound on P(|mean - mu| > radius), the form with the
/// ceil(log2(t-1)) interval count. Clamped to [0, 1].
double anytime_tail_bound(std::uint64_t t, double alpha);

/// Looser form 2 t^(1 - alpha/2) used when summing over rounds. Clamped.
double anytime_tail_bound_loose(std::uint64_t t, double alpha);

}  // namespace sidebandit
