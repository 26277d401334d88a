#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "sidebandit/environment.hpp"
#include "sidebandit/policy.hpp"

namespace sidebandit {

struct RunConfig {
    Instance instance;
    PolicyKind policy = PolicyKind::Alg1;
    PolicyParams params;
    std::uint64_t horizon = 1 << 17;
    std::uint64_t replications = 1;
    std::uint64_t base_seed = 0;
    std::vector<std::uint64_t> checkpoints;  // empty: default_checkpoints(horizon)
    bool record_labels = false;              // keep the run-length-encoded label sequence
    bool check_invariants = true;            // per-round state checks (Alg1 only)
    double diag_eps = 0.1;                   // accuracy radius for the per-arm LP budget diagnostic
};

/// {2^7, 2^8, ...} up to the horizon, with the horizon itself appended when it
/// is not a power of two.
std::vector<std::uint64_t> default_checkpoints(std::uint64_t horizon);

/// Throws std::invalid_argument on a malformed config.
void validate(const RunConfig& config);

struct LabelRun {
    CaseLabel label;
    std::uint64_t length;
    bool operator==(const LabelRun&) const = default;
};

struct RegretTrace {
    std::uint64_t rep_index = 0;
    std::uint64_t seed = 0;
    std::vector<std::uint64_t> checkpoints;
    std::vector<double> regret;  // cumulative pseudo-regret after each checkpoint round
    std::vector<LabelRun> labels;
    std::array<std::uint64_t, kNumCaseLabels> label_counts{};
    std::vector<std::uint64_t> final_pull_counts;
    std::uint64_t final_n_e = 0;

    // Alg1 diagnostics, gathered with knowledge of the true means.
    std::uint64_t greedy_rounds_accurate = 0;  // Case A rounds where every error is within its radius
    std::uint64_t greedy_rounds_accurate_optimal = 0;
    std::uint64_t lp_rounds = 0;
    std::vector<std::uint64_t> lp_pulls_accurate;  // Case C pulls per arm while all errors are within radius and diag_eps

    std::uint64_t count(CaseLabel label) const { return label_counts[static_cast<std::size_t>(label)]; }
    bool operator==(const RegretTrace&) const = default;
};

/// Episode failure with the round and a short state snapshot in the message.
class EpisodeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Seed of replication `rep_index` under `base_seed`.
std::uint64_t replication_seed(std::uint64_t base_seed, std::uint64_t rep_index);

RegretTrace run_episode(const RunConfig& config, std::uint64_t rep_index);

/// All replications, in rep-index order. `threads` = 0 picks the hardware
/// concurrency; each worker owns its streams and results are placed by index.
std::vector<RegretTrace> run_replications(const RunConfig& config, unsigned threads = 0);

/// Worker count from BANDIT_SIM_THREADS (unset or 0 means automatic).
unsigned threads_from_env();

struct AggregateRow {
    std::uint64_t t = 0;
    double mean_regret = 0.0;
    double stderr_regret = 0.0;
    double regret_over_logt = 0.0;
    bool operator==(const AggregateRow&) const = default;
};

class MismatchedCheckpoints : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Per-checkpoint sample mean, standard error (sample sd / sqrt(n)) and
/// mean / ln t. Needs at least two traces sharing one checkpoint grid.
std::vector<AggregateRow> aggregate(const std::vector<RegretTrace>& traces);

/// #B <= (#B + #C)^gamma / 2 + 1
bool check_counting_invariant(std::uint64_t uniform_rounds, std::uint64_t lp_rounds, double gamma);
bool check_counting_invariant(const RegretTrace& trace, double gamma);

/// Sum_i N_i * Delta_i, the pseudo-regret implied by final pull counts.
double gap_weighted_counts(const std::vector<std::uint64_t>& counts, const std::vector<double>& deltas);

}  // namespace sidebandit
