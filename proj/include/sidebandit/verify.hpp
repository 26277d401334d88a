#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <optional>
#include <vector>

#include "sidebandit/rng.hpp"

namespace sidebandit {

// Monte-Carlo checks of the estimator's tail bounds under adaptively chosen
// noise levels. Every sample is drawn around a true mean of 0 from one of two
// sources, a precise one (sigma_lo) and a noisy one (sigma_hi), and the
// source for the next sample may depend on everything observed so far.

enum class SourceRule {
    Fixed,           // deterministic: precise on every third sample, noisy otherwise
    ChaseDeviation,  // noisy source while the running estimate sits more than one sd from 0
    SignAdaptive,    // noisy source while the weighted sum is positive
    RandomAdaptive,  // noisy with probability depending on the sign of the weighted sum
};

std::string_view to_string(SourceRule rule);
std::optional<SourceRule> parse_source_rule(std::string_view name);

struct McResult {
    std::uint64_t trials = 0;
    std::uint64_t hits = 0;       // trials in which the deviation event occurred
    double empirical_rate = 0.0;  // NaN when trials = 0
    double bound = 0.0;
    double band = 0.0;  // bound + 3 * sqrt(bound (1 - bound) / trials)
    bool ran = false;
    bool pass = false;
};

/// Finishes a result from trial and hit counts.
McResult make_result(std::uint64_t trials, std::uint64_t hits, double bound);

/// Event |mean(t) - mu| > sqrt(2 alpha ln t / n~(t)) after t - 1 samples whose
/// first draw comes from the precise source (so n~ >= 1/sigma_min^2). Bound is
/// the loose anytime form 2 t^(1 - alpha/2).
McResult verify_anytime_concentration(double sigma_min, SourceRule rule, std::uint64_t t, double alpha,
                                      std::uint64_t trials, Rng& rng, double noisy_ratio = 3.0);

class InvalidInterval : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct StoppingSetup {
    double sigma_lo = 1.0;
    double sigma_hi = 2.0;
    SourceRule rule = SourceRule::SignAdaptive;
};

/// Interval stopping time: phi is the first round whose weighted count lies in
/// [L, H] (else t + 1). Event |W_phi| > sqrt(2 alpha n~_phi ln t) with phi <= t.
/// Bound 2 t^(-alpha L / H).
McResult verify_stopping_interval(double lo, double hi, std::uint64_t t, double alpha, std::uint64_t trials,
                                  Rng& rng, const StoppingSetup& setup = {});

/// Threshold stopping time: psi is the first round with weighted count >= r
/// (else t + 1). Event |W_psi| > n~_psi eps with psi <= t. Bound 2 exp(-r eps^2 / 2).
McResult verify_stopping_threshold(double r, double eps, std::uint64_t t, std::uint64_t trials, Rng& rng,
                                   const StoppingSetup& setup = {});

/// Fixed schedule, no adaptivity: event |mean - mu| > eps for a schedule with
/// known weighted count. Bound 2 exp(-n~ eps^2 / 2).
McResult verify_fixed_schedule(const std::vector<double>& sigmas, double eps, std::uint64_t trials, Rng& rng);

/// One row of a verification grid.
struct VerifyCase {
    std::string lemma;  // "2a", "2b" or "3"
    std::string params;
    McResult result;
};

struct VerifyGrid {
    std::uint64_t trials = 10'000;
    std::uint64_t seed = 1;
};

/// Anytime grid: sigma_min in {0.5, 1, 2}, alpha in {4.5, 6}, t in {100, 1000},
/// with the ChaseDeviation and RandomAdaptive rules.
std::vector<VerifyCase> run_anytime_grid(const VerifyGrid& grid);

/// Stopping grid: interval (L, H) in {(1, 2), (4, 5)}, alpha in {1, 2, 4},
/// t in {100, 1000}; threshold r in {2, 8}, eps in {0.5, 1}, t = 1000.
std::vector<VerifyCase> run_stopping_grid(const VerifyGrid& grid);

}  // namespace sidebandit
