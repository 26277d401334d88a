#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sidebandit/rng.hpp"

namespace sidebandit {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Information carried by one observation with noise level `sigma`:
/// 1/sigma^2, and exactly 0 for the no-observation sentinel.
inline double precision(double sigma) noexcept {
    return sigma == kInf ? 0.0 : 1.0 / (sigma * sigma);
}

enum class ValidationCode {
    NonSquare,
    TooFewArms,
    NonPositiveSigma,
    UnidentifiableArm,
    GraphMissingSelfLoop,
    ArmNotSuboptimal,
    DifferInMoreThanOneArm,
    FeedbackMismatch,
    BadMeans,
};

/// Raised for malformed instances or arguments that violate an instance-level
/// contract. `arm()` is the 0-based offending arm when one applies.
class ValidationError : public std::invalid_argument {
public:
    ValidationError(ValidationCode code, const std::string& what,
                    std::optional<std::size_t> arm = std::nullopt)
        : std::invalid_argument(what), code_(code), arm_(arm) {}

    ValidationCode code() const noexcept { return code_; }
    std::optional<std::size_t> arm() const noexcept { return arm_; }

private:
    ValidationCode code_;
    std::optional<std::size_t> arm_;
};

/// K x K grid of noise standard deviations. Row i is the pulled arm, column j
/// the observed arm; kInf means arm i reveals nothing about arm j.
class FeedbackMatrix {
public:
    FeedbackMatrix() = default;

    /// Builds from rows without checking entry values; throws NonSquare when
    /// the rows do not form a square grid.
    static FeedbackMatrix from_rows(const std::vector<std::vector<double>>& rows);

    std::size_t k() const noexcept { return k_; }
    double operator()(std::size_t row, std::size_t col) const { return sigma_[row * k_ + col]; }
    double weight(std::size_t row, std::size_t col) const { return precision((*this)(row, col)); }

    /// min_j sigma_{j,i}: best noise level at which arm i can be observed.
    double sigma_min(std::size_t arm) const;
    /// max_i sigma_min(i).
    double sigma_bar() const;
    /// Smallest-index row minimizing sigma_{row, arm}.
    std::size_t best_source(std::size_t arm) const;

    std::vector<std::vector<double>> rows() const;

    /// Same grid with every entry multiplied by `factor` (> 0).
    FeedbackMatrix scaled(double factor) const;

    bool operator==(const FeedbackMatrix&) const = default;

private:
    std::size_t k_ = 0;
    std::vector<double> sigma_;
};

struct GapInfo {
    std::size_t i_star = 0;
    std::vector<double> deltas;
    std::optional<double> delta_min;  // empty when all means tie
    double delta_max = 0.0;
};

/// Smallest-index maximizer, per-arm gaps, minimum positive gap, maximum gap.
GapInfo gaps(const std::vector<double>& means);

struct Instance {
    std::vector<double> means;
    FeedbackMatrix feedback;

    std::size_t k() const noexcept { return means.size(); }
};

/// Throws ValidationError unless the instance is well formed and identifiable.
void validate(const Instance& instance);

/// Checks the matrix alone (square, K >= 2, entries in (0, inf], every column
/// observable).
void validate(const FeedbackMatrix& feedback);

struct Observation {
    std::size_t arm_pulled = 0;
    std::vector<std::optional<double>> values;
    double pseudo_regret_increment = 0.0;
};

/// Draws one round of feedback for pulling `arm`. `deltas` must be the gaps
/// of `instance.means` (passed in to keep the hot loop allocation-light).
Observation pull(const Instance& instance, const std::vector<double>& deltas,
                 std::size_t arm, Rng& rng);
Observation pull(const Instance& instance, std::size_t arm, Rng& rng);

/// Copy of `instance` with arm k raised to mu* + eps.
Instance perturbed_instance(const Instance& instance, std::size_t k, double eps);

/// KL divergence between the interaction laws of two instances that differ
/// only in one arm's mean, given expected pull counts under `nu`.
double kl_divergence(const Instance& nu, const Instance& nu_prime,
                     const std::vector<double>& expected_counts);

// Feedback matrix generators.
FeedbackMatrix make_standard(std::size_t k, double sigma);
FeedbackMatrix make_full(std::size_t k, double sigma);
FeedbackMatrix make_graph(const std::vector<std::vector<bool>>& adjacency, double sigma);

struct RandomMatrixConfig {
    double sigma_lo = 0.5;
    double sigma_hi = 2.0;
    double p_inf = 0.5;
};

/// Entries uniform on [sigma_lo, sigma_hi) or kInf with probability p_inf;
/// each all-infinite column i then gets a finite draw at (i, i).
FeedbackMatrix make_random(std::size_t k, Rng& rng, const RandomMatrixConfig& config = {});

}  // namespace sidebandit
