#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "sidebandit/environment.hpp"
#include "sidebandit/estimator.hpp"
#include "sidebandit/lp.hpp"

namespace sidebandit {

enum class CaseLabel : std::uint8_t { Init = 0, GreedyA = 1, UniformB = 2, LpC = 3 };
inline constexpr std::size_t kNumCaseLabels = 4;

std::string_view to_string(CaseLabel label);

struct PolicyParams {
    double alpha = 4.5;
    double gamma = 0.5;
    double gap_floor = kDefaultGapFloor;
};

/// Throws std::invalid_argument unless alpha > 4, gamma in (0, 1), gap_floor > 0.
void validate_alg1_params(const PolicyParams& params);

struct PolicyState {
    std::uint64_t t = 1;  // 1-based index of the upcoming round
    std::vector<std::uint64_t> pull_counts;
    std::vector<ArmEstimator> estimators;
    std::uint64_t n_e = 0;
    PolicyParams params;

    static PolicyState fresh(std::size_t k, const PolicyParams& params = {});

    std::size_t k() const noexcept { return pull_counts.size(); }
    /// Throws NoInformation if any arm is still unobserved.
    std::vector<double> estimated_means() const;
    std::vector<double> weighted_counts() const;
};

struct Decision {
    std::size_t arm = 0;
    CaseLabel label = CaseLabel::Init;
};

/// Case C found no arm below its LP target. Unreachable when the LP solution is
/// feasible, so this signals a bug rather than a recoverable condition.
class NoLpDeficitArm : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Uniform-exploration threshold x^gamma / (2 sigma_bar^2).
double beta(double x, double gamma, double sigma_bar);

/// One decision of the side-observation algorithm.
///
///  * rounds 1..K: play the most informative source for arm t;
///  * A: if N / (4 alpha ln t) satisfies the constraints at the current
///    estimates, play the empirical best arm;
///  * B: else if min_i n~_i < beta(n_e) / K, play the best source of the least
///    observed arm;
///  * C: else solve the LP at the estimates and play the arm with the largest
///    deficit 4 alpha c*_i ln t - N_i among arms with positive deficit.
///
/// All ties go to the smallest index.
Decision select_arm(const PolicyState& state, const FeedbackMatrix& feedback);

/// Folds one round's feedback into the state: t and N_arm advance, every
/// present value updates its arm's estimator at sigma_{arm, j}, n_e advances
/// on UniformB and LpC rounds.
void observe(PolicyState& state, const Observation& obs, CaseLabel label, const FeedbackMatrix& feedback);

/// Same bookkeeping, but only the pulled arm's own value is kept.
void observe_own_only(PolicyState& state, const Observation& obs, const FeedbackMatrix& feedback);

/// argmax_i mu^_i + sqrt(2 alpha ln t / n~_i), ties to the smallest index.
/// Requires every estimator to carry information.
std::size_t ucb_select(const PolicyState& state);

/// Throws std::logic_error describing the first violated bookkeeping
/// invariant (pull counts sum, weighted counts vs. pull counts, coverage
/// after initialization).
void check_state_invariants(const PolicyState& state, const FeedbackMatrix& feedback);

struct EtcSchedule {
    std::vector<std::uint64_t> explore_counts;  // ceil(c*_i ln T) per arm
    std::vector<double> c_star;
    std::size_t commit_arm = 0;
    std::uint64_t horizon = 0;
    bool truncated = false;  // exploration alone exceeds the horizon

    /// Arm to pull in 1-based round t: arm 1's block first, then arm 2's, and
    /// so on, then the commit arm.
    std::size_t arm_at(std::uint64_t t) const;
    std::uint64_t exploration_length() const;
};

/// Explore-then-commit with oracle access to the true means.
EtcSchedule etc_oracle_schedule(const Instance& instance, std::uint64_t horizon,
                                double gap_floor = kDefaultGapFloor);
/// As above with an explicit log-horizon (ln T) in place of ln(horizon).
EtcSchedule etc_oracle_schedule(const Instance& instance, std::uint64_t horizon, double log_horizon,
                                double gap_floor);

enum class PolicyKind { Alg1, Ucb, UcbBlind, EtcOracle, Uniform };

std::string_view to_string(PolicyKind kind);
std::optional<PolicyKind> parse_policy_kind(std::string_view name);

/// Stateful policy driven by the harness, one instance per replication.
class Policy {
public:
    virtual ~Policy() = default;
    virtual Decision select() = 0;
    virtual void observe(const Observation& obs, const Decision& decision) = 0;
    virtual const PolicyState& state() const = 0;
};

std::unique_ptr<Policy> make_policy(PolicyKind kind, const Instance& instance, const PolicyParams& params,
                                    std::uint64_t horizon);

}  // namespace sidebandit
