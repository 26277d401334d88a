#include "sidebandit/policy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace sidebandit {

std::string_view to_string(CaseLabel label) {
    switch (label) {
        case CaseLabel::Init: return "init";
        case CaseLabel::GreedyA: return "A";
        case CaseLabel::UniformB: return "B";
        case CaseLabel::LpC: return "C";
    }
    return "?";
}

void validate_alg1_params(const PolicyParams& params) {
    if (!(params.alpha > 4.0)) throw std::invalid_argument("alpha must be > 4");
    if (!(params.gamma > 0.0 && params.gamma < 1.0)) throw std::invalid_argument("gamma must be in (0, 1)");
    if (!(params.gap_floor > 0.0)) throw std::invalid_argument("gap_floor must be positive");
}

PolicyState PolicyState::fresh(std::size_t k, const PolicyParams& params) {
    PolicyState s;
    s.pull_counts.assign(k, 0);
    s.estimators.assign(k, ArmEstimator{});
    s.params = params;
    return s;
}

std::vector<double> PolicyState::estimated_means() const {
    std::vector<double> m(k());
    for (std::size_t i = 0; i < k(); ++i) m[i] = estimators[i].mean();
    return m;
}

std::vector<double> PolicyState::weighted_counts() const {
    std::vector<double> w(k());
    for (std::size_t i = 0; i < k(); ++i) w[i] = estimators[i].weighted_count;
    return w;
}

double beta(double x, double gamma, double sigma_bar) {
    return std::pow(x, gamma) / (2.0 * sigma_bar * sigma_bar);
}

Decision select_arm(const PolicyState& state, const FeedbackMatrix& feedback) {
    const std::size_t k = state.k();
    const std::uint64_t t = state.t;
    if (t <= k) return {feedback.best_source(static_cast<std::size_t>(t - 1)), CaseLabel::Init};

    const PolicyParams& p = state.params;
    const double log_t = std::log(static_cast<double>(t));
    const std::vector<double> mu_hat = state.estimated_means();
    const ConstraintSet cs = build_constraints(mu_hat, feedback, p.gap_floor);
    const GapInfo g = gaps(mu_hat);

    const double budget_scale = 4.0 * p.alpha * log_t;
    std::vector<double> scaled(k);
    for (std::size_t i = 0; i < k; ++i) scaled[i] = static_cast<double>(state.pull_counts[i]) / budget_scale;
    if (membership(scaled, cs)) return {g.i_star, CaseLabel::GreedyA};

    std::size_t least = 0;
    for (std::size_t i = 1; i < k; ++i) {
        if (state.estimators[i].weighted_count < state.estimators[least].weighted_count) least = i;
    }
    const double threshold = beta(static_cast<double>(state.n_e), p.gamma, feedback.sigma_bar()) /
                             static_cast<double>(k);
    if (state.estimators[least].weighted_count < threshold) {
        return {feedback.best_source(least), CaseLabel::UniformB};
    }

    const LpSolution sol = solve(cs, g.deltas);
    if (sol.status != LpStatus::Optimal) throw std::runtime_error("exploration LP infeasible at current estimates");
    std::optional<std::size_t> pick;
    double best_deficit = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        const double target = budget_scale * sol.c[i];
        const double n = static_cast<double>(state.pull_counts[i]);
        if (n < target && (!pick || target - n > best_deficit)) {
            pick = i;
            best_deficit = target - n;
        }
    }
    if (!pick) {
        std::ostringstream msg;
        msg << "no arm below its LP target at round " << t;
        throw NoLpDeficitArm(msg.str());
    }
    return {*pick, CaseLabel::LpC};
}

void observe(PolicyState& state, const Observation& obs, CaseLabel label, const FeedbackMatrix& feedback) {
    const std::size_t arm = obs.arm_pulled;
    for (std::size_t j = 0; j < state.k(); ++j) {
        if (obs.values[j]) state.estimators[j].update(*obs.values[j], feedback(arm, j));
    }
    ++state.pull_counts[arm];
    ++state.t;
    if (label == CaseLabel::UniformB || label == CaseLabel::LpC) ++state.n_e;
}

void observe_own_only(PolicyState& state, const Observation& obs, const FeedbackMatrix& feedback) {
    const std::size_t arm = obs.arm_pulled;
    if (obs.values[arm]) state.estimators[arm].update(*obs.values[arm], feedback(arm, arm));
    ++state.pull_counts[arm];
    ++state.t;
}

std::size_t ucb_select(const PolicyState& state) {
    const double log_t = std::log(static_cast<double>(std::max<std::uint64_t>(state.t, 2)));
    std::size_t best = 0;
    double best_index = -kInf;
    for (std::size_t i = 0; i < state.k(); ++i) {
        const auto& e = state.estimators[i];
        const double index = e.mean() + std::sqrt(2.0 * state.params.alpha * log_t / e.weighted_count);
        if (index > best_index) {
            best_index = index;
            best = i;
        }
    }
    return best;
}

void check_state_invariants(const PolicyState& state, const FeedbackMatrix& feedback) {
    const std::size_t k = state.k();
    const std::uint64_t pulls = std::accumulate(state.pull_counts.begin(), state.pull_counts.end(), std::uint64_t{0});
    if (pulls != state.t - 1) {
        throw std::logic_error("pull counts sum to " + std::to_string(pulls) + " at round " + std::to_string(state.t));
    }
    for (std::size_t i = 0; i < k; ++i) {
        double expected = 0.0;
        for (std::size_t j = 0; j < k; ++j) expected += static_cast<double>(state.pull_counts[j]) * feedback.weight(j, i);
        const double got = state.estimators[i].weighted_count;
        if (std::abs(got - expected) > 1e-9 * std::max(1.0, expected)) {
            std::ostringstream msg;
            msg << "weighted count of arm " << i + 1 << " is " << got << ", pull counts give " << expected;
            throw std::logic_error(msg.str());
        }
        if (state.t > k) {
            const double floor = precision(feedback.sigma_min(i));
            if (got < floor * (1.0 - 1e-12)) {
                throw std::logic_error("arm " + std::to_string(i + 1) + " lacks a best-source sample after initialization");
            }
        }
    }
}

std::size_t EtcSchedule::arm_at(std::uint64_t t) const {
    std::uint64_t offset = t - 1;
    for (std::size_t i = 0; i < explore_counts.size(); ++i) {
        if (offset < explore_counts[i]) return i;
        offset -= explore_counts[i];
    }
    return commit_arm;
}

std::uint64_t EtcSchedule::exploration_length() const {
    return std::accumulate(explore_counts.begin(), explore_counts.end(), std::uint64_t{0});
}

EtcSchedule etc_oracle_schedule(const Instance& instance, std::uint64_t horizon, double log_horizon,
                                double gap_floor) {
    if (horizon < instance.k()) throw std::invalid_argument("horizon must be at least K");
    const auto cs = build_constraints(instance.means, instance.feedback, gap_floor);
    const GapInfo g = gaps(instance.means);
    const auto sol = solve(cs, g.deltas);
    if (sol.status != LpStatus::Optimal) throw std::runtime_error("exploration LP is infeasible");
    EtcSchedule s;
    s.c_star = sol.c;
    s.commit_arm = g.i_star;
    s.horizon = horizon;
    for (double c : sol.c) s.explore_counts.push_back(static_cast<std::uint64_t>(std::ceil(c * log_horizon)));
    s.truncated = s.exploration_length() > horizon;
    return s;
}

EtcSchedule etc_oracle_schedule(const Instance& instance, std::uint64_t horizon, double gap_floor) {
    return etc_oracle_schedule(instance, horizon, std::log(static_cast<double>(horizon)), gap_floor);
}

std::string_view to_string(PolicyKind kind) {
    switch (kind) {
        case PolicyKind::Alg1: return "alg1";
        case PolicyKind::Ucb: return "ucb";
        case PolicyKind::UcbBlind: return "ucb-blind";
        case PolicyKind::EtcOracle: return "etc-oracle";
        case PolicyKind::Uniform: return "uniform";
    }
    return "?";
}

std::optional<PolicyKind> parse_policy_kind(std::string_view name) {
    for (auto kind : {PolicyKind::Alg1, PolicyKind::Ucb, PolicyKind::UcbBlind, PolicyKind::EtcOracle,
                      PolicyKind::Uniform}) {
        if (name == to_string(kind)) return kind;
    }
    return std::nullopt;
}

namespace {

class Alg1Policy final : public Policy {
public:
    Alg1Policy(const Instance& inst, const PolicyParams& params)
        : feedback_(inst.feedback), state_(PolicyState::fresh(inst.k(), params)) {
        validate_alg1_params(params);
    }
    Decision select() override { return select_arm(state_, feedback_); }
    void observe(const Observation& obs, const Decision& d) override {
        sidebandit::observe(state_, obs, d.label, feedback_);
    }
    const PolicyState& state() const override { return state_; }

private:
    FeedbackMatrix feedback_;
    PolicyState state_;
};

class UcbPolicy final : public Policy {
public:
    UcbPolicy(const Instance& inst, const PolicyParams& params, bool side_information)
        : feedback_(inst.feedback), state_(PolicyState::fresh(inst.k(), params)), side_(side_information) {
        if (!side_) {
            for (std::size_t i = 0; i < inst.k(); ++i) {
                if (feedback_(i, i) == kInf) {
                    throw std::invalid_argument("ucb-blind needs every arm to observe its own reward");
                }
            }
        }
    }
    Decision select() override {
        const std::size_t k = state_.k();
        if (state_.t <= k) {
            const auto target = static_cast<std::size_t>(state_.t - 1);
            return {side_ ? feedback_.best_source(target) : target, CaseLabel::Init};
        }
        return {ucb_select(state_), CaseLabel::GreedyA};
    }
    void observe(const Observation& obs, const Decision& d) override {
        if (side_) {
            sidebandit::observe(state_, obs, d.label, feedback_);
        } else {
            observe_own_only(state_, obs, feedback_);
        }
    }
    const PolicyState& state() const override { return state_; }

private:
    FeedbackMatrix feedback_;
    PolicyState state_;
    bool side_;
};

class EtcPolicy final : public Policy {
public:
    EtcPolicy(const Instance& inst, const PolicyParams& params, std::uint64_t horizon)
        : feedback_(inst.feedback),
          state_(PolicyState::fresh(inst.k(), params)),
          schedule_(etc_oracle_schedule(inst, horizon, params.gap_floor)) {}
    Decision select() override {
        const std::size_t arm = schedule_.arm_at(state_.t);
        const bool exploring = state_.t <= schedule_.exploration_length();
        return {arm, exploring ? CaseLabel::LpC : CaseLabel::GreedyA};
    }
    void observe(const Observation& obs, const Decision& d) override {
        sidebandit::observe(state_, obs, d.label, feedback_);
    }
    const PolicyState& state() const override { return state_; }

private:
    FeedbackMatrix feedback_;
    PolicyState state_;
    EtcSchedule schedule_;
};

class UniformPolicy final : public Policy {
public:
    UniformPolicy(const Instance& inst, const PolicyParams& params)
        : feedback_(inst.feedback), state_(PolicyState::fresh(inst.k(), params)) {}
    Decision select() override {
        return {static_cast<std::size_t>((state_.t - 1) % state_.k()), CaseLabel::UniformB};
    }
    void observe(const Observation& obs, const Decision& d) override {
        sidebandit::observe(state_, obs, d.label, feedback_);
    }
    const PolicyState& state() const override { return state_; }

private:
    FeedbackMatrix feedback_;
    PolicyState state_;
};

}  // namespace

std::unique_ptr<Policy> make_policy(PolicyKind kind, const Instance& instance, const PolicyParams& params,
                                    std::uint64_t horizon) {
    switch (kind) {
        case PolicyKind::Alg1: return std::make_unique<Alg1Policy>(instance, params);
        case PolicyKind::Ucb: return std::make_unique<UcbPolicy>(instance, params, true);
        case PolicyKind::UcbBlind: return std::make_unique<UcbPolicy>(instance, params, false);
        case PolicyKind::EtcOracle: return std::make_unique<EtcPolicy>(instance, params, horizon);
        case PolicyKind::Uniform: return std::make_unique<UniformPolicy>(instance, params);
    }
    throw std::invalid_argument("unknown policy kind");
}

}  // namespace sidebandit
