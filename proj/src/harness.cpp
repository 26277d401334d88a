#include "sidebandit/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "sidebandit/rng.hpp"

namespace sidebandit {

std::vector<std::uint64_t> default_checkpoints(std::uint64_t horizon) {
    std::vector<std::uint64_t> grid;
    for (std::uint64_t t = 128; t <= horizon; t *= 2) grid.push_back(t);
    if (grid.empty() || grid.back() != horizon) grid.push_back(horizon);
    return grid;
}

void validate(const RunConfig& config) {
    validate(config.instance);
    if (config.horizon < config.instance.k()) throw std::invalid_argument("horizon must be at least K");
    if (config.replications < 1) throw std::invalid_argument("replications must be at least 1");
    const auto& cps = config.checkpoints;
    if (!std::is_sorted(cps.begin(), cps.end()) || std::adjacent_find(cps.begin(), cps.end()) != cps.end()) {
        throw std::invalid_argument("checkpoints must be strictly increasing");
    }
    if (!cps.empty() && (cps.front() < 1 || cps.back() > config.horizon)) {
        throw std::invalid_argument("checkpoints must lie in [1, horizon]");
    }
    if (config.policy == PolicyKind::Alg1) validate_alg1_params(config.params);
    if (!(config.params.alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
}

std::uint64_t replication_seed(std::uint64_t base_seed, std::uint64_t rep_index) {
    return splitmix64(splitmix64(base_seed) + 0x632BE59BD9B4E019ULL * (rep_index + 1));
}

double gap_weighted_counts(const std::vector<std::uint64_t>& counts, const std::vector<double>& deltas) {
    double total = 0.0;
    for (std::size_t i = 0; i < counts.size(); ++i) total += static_cast<double>(counts[i]) * deltas[i];
    return total;
}

namespace {

struct Accuracy {
    bool within_radius = true;
    bool within_eps = true;
};

Accuracy accuracy(const PolicyState& s, const std::vector<double>& means, double eps) {
    Accuracy a;
    const double log_t = std::log(static_cast<double>(s.t));
    for (std::size_t i = 0; i < s.k(); ++i) {
        const auto& e = s.estimators[i];
        const double err = std::abs(e.mean() - means[i]);
        if (err > std::sqrt(2.0 * s.params.alpha * log_t / e.weighted_count)) a.within_radius = false;
        if (err > eps) a.within_eps = false;
    }
    return a;
}

std::string snapshot(const PolicyState& s) {
    std::ostringstream out;
    out << "t=" << s.t << " n_e=" << s.n_e << " N=(";
    for (std::size_t i = 0; i < s.k(); ++i) out << (i ? "," : "") << s.pull_counts[i];
    out << ") mu_hat=(";
    for (std::size_t i = 0; i < s.k(); ++i) {
        out << (i ? "," : "");
        if (s.estimators[i].has_information()) {
            out << s.estimators[i].mean();
        } else {
            out << "?";
        }
    }
    out << ")";
    return out.str();
}

}  // namespace

RegretTrace run_episode(const RunConfig& config, std::uint64_t rep_index) {
    validate(config);
    const Instance& inst = config.instance;
    const std::vector<double> deltas = gaps(inst.means).deltas;
    const bool is_alg1 = config.policy == PolicyKind::Alg1;

    RegretTrace trace;
    trace.rep_index = rep_index;
    trace.seed = replication_seed(config.base_seed, rep_index);
    trace.checkpoints = config.checkpoints.empty() ? default_checkpoints(config.horizon) : config.checkpoints;
    trace.regret.reserve(trace.checkpoints.size());
    trace.lp_pulls_accurate.assign(inst.k(), 0);

    Rng rng(trace.seed);
    auto policy = make_policy(config.policy, inst, config.params, config.horizon);
    std::size_t next_cp = 0;

    for (std::uint64_t t = 1; t <= config.horizon; ++t) {
        Decision d;
        try {
            const PolicyState& s = policy->state();
            d = policy->select();
            if (is_alg1 && (d.label == CaseLabel::GreedyA || d.label == CaseLabel::LpC)) {
                const Accuracy acc = accuracy(s, inst.means, config.diag_eps);
                if (d.label == CaseLabel::GreedyA && acc.within_radius) {
                    ++trace.greedy_rounds_accurate;
                    if (deltas[d.arm] == 0.0) ++trace.greedy_rounds_accurate_optimal;
                }
                if (d.label == CaseLabel::LpC && acc.within_radius && acc.within_eps) {
                    ++trace.lp_pulls_accurate[d.arm];
                }
            }
            const Observation obs = pull(inst, deltas, d.arm, rng);
            policy->observe(obs, d);
            if (is_alg1 && config.check_invariants) {
                check_state_invariants(policy->state(), inst.feedback);
                const auto explored = trace.count(CaseLabel::UniformB) + trace.count(CaseLabel::LpC) +
                                      (d.label == CaseLabel::UniformB || d.label == CaseLabel::LpC ? 1 : 0);
                if (policy->state().n_e != explored) throw std::logic_error("n_e out of step with B/C rounds");
            }
        } catch (const std::exception& e) {
            std::ostringstream msg;
            msg << "replication " << rep_index << ", round " << t << ": " << e.what() << " ["
                << snapshot(policy->state()) << "]";
            throw EpisodeError(msg.str());
        }

        ++trace.label_counts[static_cast<std::size_t>(d.label)];
        if (d.label == CaseLabel::LpC) ++trace.lp_rounds;
        if (config.record_labels) {
            if (!trace.labels.empty() && trace.labels.back().label == d.label) {
                ++trace.labels.back().length;
            } else {
                trace.labels.push_back({d.label, 1});
            }
        }
        if (next_cp < trace.checkpoints.size() && trace.checkpoints[next_cp] == t) {
            trace.regret.push_back(gap_weighted_counts(policy->state().pull_counts, deltas));
            ++next_cp;
        }
    }
    trace.final_pull_counts = policy->state().pull_counts;
    trace.final_n_e = policy->state().n_e;
    return trace;
}

unsigned threads_from_env() {
    const char* v = std::getenv("BANDIT_SIM_THREADS");
    if (v == nullptr || *v == '\0') return 0;
    char* end = nullptr;
    const unsigned long n = std::strtoul(v, &end, 10);
    if (end == v || *end != '\0') throw std::invalid_argument("BANDIT_SIM_THREADS must be a nonnegative integer");
    return static_cast<unsigned>(n);
}

std::vector<RegretTrace> run_replications(const RunConfig& config, unsigned threads) {
    validate(config);
    const std::uint64_t reps = config.replications;
    unsigned workers = threads == 0 ? std::max(1U, std::thread::hardware_concurrency()) : threads;
    workers = static_cast<unsigned>(std::min<std::uint64_t>(workers, reps));

    std::vector<RegretTrace> traces(reps);
    std::atomic<std::uint64_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto work = [&] {
        while (true) {
            const std::uint64_t rep = next.fetch_add(1);
            if (rep >= reps) return;
            try {
                traces[rep] = run_episode(config, rep);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next.store(reps);
                return;
            }
        }
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    }
    if (failure) std::rethrow_exception(failure);
    return traces;
}

std::vector<AggregateRow> aggregate(const std::vector<RegretTrace>& traces) {
    if (traces.size() < 2) throw std::invalid_argument("aggregate needs at least two traces");
    const auto& grid = traces.front().checkpoints;
    for (const auto& tr : traces) {
        if (tr.checkpoints != grid || tr.regret.size() != grid.size()) {
            throw MismatchedCheckpoints("traces do not share a checkpoint grid");
        }
    }
    const double n = static_cast<double>(traces.size());
    std::vector<AggregateRow> rows;
    rows.reserve(grid.size());
    for (std::size_t c = 0; c < grid.size(); ++c) {
        double sum = 0.0;
        for (const auto& tr : traces) sum += tr.regret[c];
        const double mean = sum / n;
        double ss = 0.0;
        for (const auto& tr : traces) ss += (tr.regret[c] - mean) * (tr.regret[c] - mean);
        AggregateRow row;
        row.t = grid[c];
        row.mean_regret = mean;
        row.stderr_regret = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
        row.regret_over_logt = grid[c] > 1 ? mean / std::log(static_cast<double>(grid[c]))
                                            : std::numeric_limits<double>::quiet_NaN();
        rows.push_back(row);
    }
    return rows;
}

bool check_counting_invariant(std::uint64_t uniform_rounds, std::uint64_t lp_rounds, double gamma) {
    const double explored = static_cast<double>(uniform_rounds + lp_rounds);
    return static_cast<double>(uniform_rounds) <= 0.5 * std::pow(explored, gamma) + 1.0;
}

bool check_counting_invariant(const RegretTrace& trace, double gamma) {
    return check_counting_invariant(trace.count(CaseLabel::UniformB), trace.count(CaseLabel::LpC), gamma);
}

}  // namespace sidebandit
