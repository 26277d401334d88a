#include <doctest.h>

#include <cmath>

#include "sidebandit/policy.hpp"

using namespace sidebandit;

namespace {

// Estimator holding one sample-equivalent of `mean` at weighted count `n`.
ArmEstimator at(double mean, double n) {
    ArmEstimator e;
    e.weighted_sum = mean * n;
    e.weighted_count = n;
    e.sample_count = 1;
    return e;
}

Observation obs_for(std::size_t arm, std::vector<std::optional<double>> values) {
    return {arm, std::move(values), 0.0};
}

}  // namespace

TEST_CASE("beta") {
    CHECK(beta(0.0, 0.5, 1.0) == 0.0);
    CHECK(beta(4.0, 0.5, 1.0) == doctest::Approx(1.0));
    CHECK(beta(4.0, 0.5, 2.0) == doctest::Approx(0.25));
}

TEST_CASE("parameter validation") {
    CHECK_NOTHROW(validate_alg1_params({}));
    CHECK_THROWS_AS(validate_alg1_params({4.0, 0.5, 1e-6}), std::invalid_argument);
    CHECK_THROWS_AS(validate_alg1_params({4.5, 1.0, 1e-6}), std::invalid_argument);
    CHECK_THROWS_AS(validate_alg1_params({4.5, 0.0, 1e-6}), std::invalid_argument);
    CHECK_THROWS_AS(validate_alg1_params({4.5, 0.5, 0.0}), std::invalid_argument);
}

TEST_CASE("initialization plays the best source of each arm in turn") {
    const auto fb = make_standard(2, 1.0);
    auto s = PolicyState::fresh(2);
    auto d = select_arm(s, fb);
    CHECK(d.arm == 0);
    CHECK(d.label == CaseLabel::Init);

    const auto cross = FeedbackMatrix::from_rows({{1.0, 0.5, 2.0}, {kInf, 1.0, kInf}, {kInf, 0.5, 1.0}});
    s = PolicyState::fresh(3);
    CHECK(select_arm(s, cross).arm == 0);
    s.t = 2;
    CHECK(select_arm(s, cross).arm == 0);  // row 1 and row 3 tie at 0.5 for arm 2
    s.t = 3;
    CHECK(select_arm(s, cross).arm == 2);
}

TEST_CASE("Case A plays the empirical best once the scaled counts are feasible") {
    const auto fb = make_standard(2, 1.0);
    auto s = PolicyState::fresh(2);
    s.estimators = {at(1.0, 400.0), at(0.0, 400.0)};
    s.t = 801;
    s.pull_counts = {400, 400};  // 400 / (18 ln 801) > 2 on both rows
    auto d = select_arm(s, fb);
    CHECK(d.label == CaseLabel::GreedyA);
    CHECK(d.arm == 0);

    s.pull_counts = {700, 100};
    d = select_arm(s, fb);
    CHECK(d.label != CaseLabel::GreedyA);
}

TEST_CASE("Case B plays the best source of the least observed arm") {
    const auto fb = FeedbackMatrix::from_rows({{3.0, 1.0}, {1.0, 1.0}});
    auto s = PolicyState::fresh(2);
    s.t = 3;
    s.pull_counts = {1, 1};
    s.n_e = 100;
    s.estimators = {at(1.0, 0.1), at(0.0, 5.0)};
    const auto d = select_arm(s, fb);
    CHECK(d.label == CaseLabel::UniformB);
    CHECK(d.arm == 1);
}

TEST_CASE("Case C plays the arm with the largest deficit") {
    const auto fb = make_standard(3, 1.0);
    auto s = PolicyState::fresh(3);
    s.t = 31;
    s.pull_counts = {20, 5, 5};
    s.n_e = 0;
    s.estimators = {at(1.0, 20.0), at(0.5, 5.0), at(0.0, 5.0)};
    const auto d = select_arm(s, fb);
    CHECK(d.label == CaseLabel::LpC);
    CHECK(d.arm == 1);  // c* = (8, 8, 2): arm 2 lags the most
}

TEST_CASE("observe bookkeeping") {
    const auto fb = make_standard(2, 1.0);
    auto s = PolicyState::fresh(2);
    observe(s, obs_for(0, {0.3, std::nullopt}), CaseLabel::Init, fb);
    CHECK(s.pull_counts == std::vector<std::uint64_t>{1, 0});
    CHECK(s.estimators[0].weighted_count == 1.0);
    CHECK_FALSE(s.estimators[1].has_information());
    CHECK(s.t == 2);

    observe(s, obs_for(1, {std::nullopt, 0.1}), CaseLabel::GreedyA, fb);
    CHECK(s.n_e == 0);
    observe(s, obs_for(1, {std::nullopt, 0.1}), CaseLabel::UniformB, fb);
    observe(s, obs_for(0, {0.2, std::nullopt}), CaseLabel::LpC, fb);
    CHECK(s.n_e == 2);
    CHECK_NOTHROW(check_state_invariants(s, fb));

    const auto full = make_full(3, 2.0);
    auto f = PolicyState::fresh(3);
    observe(f, obs_for(2, {1.0, 2.0, 3.0}), CaseLabel::Init, full);
    for (const auto& e : f.estimators) CHECK(e.weighted_count == doctest::Approx(0.25));
}

TEST_CASE("state invariants catch inconsistent bookkeeping") {
    const auto fb = make_standard(2, 1.0);
    auto s = PolicyState::fresh(2);
    observe(s, obs_for(0, {0.3, std::nullopt}), CaseLabel::Init, fb);
    auto broken = s;
    broken.t = 5;
    CHECK_THROWS_AS(check_state_invariants(broken, fb), std::logic_error);
    broken = s;
    broken.estimators[0].weighted_count = 3.0;
    CHECK_THROWS_AS(check_state_invariants(broken, fb), std::logic_error);
}

TEST_CASE("ucb_select") {
    auto s = PolicyState::fresh(2);
    s.t = 10;
    s.estimators = {at(0.5, 1.0), at(0.5, 2.0)};
    CHECK(ucb_select(s) == 0);
    s.estimators = {at(1.0, 1e6), at(0.0, 1e6)};
    CHECK(ucb_select(s) == 0);
    s.estimators = {at(1.0, 1e6), at(0.0, 0.01)};
    s.t = 1000;
    CHECK(ucb_select(s) == 1);
    s.estimators = {at(0.5, 3.0), at(0.5, 3.0)};
    CHECK(ucb_select(s) == 0);
}

TEST_CASE("oracle explore-then-commit schedule") {
    const Instance std2{{1.0, 0.0}, make_standard(2, 1.0)};
    auto s = etc_oracle_schedule(std2, 100, 4.0, kDefaultGapFloor);
    CHECK(s.explore_counts == std::vector<std::uint64_t>{8, 8});
    CHECK_FALSE(s.truncated);
    CHECK(s.arm_at(1) == 0);
    CHECK(s.arm_at(8) == 0);
    CHECK(s.arm_at(9) == 1);
    CHECK(s.arm_at(16) == 1);
    CHECK(s.arm_at(17) == 0);
    CHECK(s.arm_at(100) == 0);

    const Instance full2{{1.0, 0.0}, make_full(2, 1.0)};
    s = etc_oracle_schedule(full2, 1000, kDefaultGapFloor);
    CHECK(s.explore_counts[0] == static_cast<std::uint64_t>(std::ceil(2.0 * std::log(1000.0))));
    CHECK(s.explore_counts[1] == 0);
    for (std::uint64_t t = 1; t <= 1000; ++t) CHECK(s.arm_at(t) == 0);

    s = etc_oracle_schedule(std2, 10, 4.0, kDefaultGapFloor);
    CHECK(s.truncated);
    CHECK_THROWS_AS(etc_oracle_schedule(std2, 1, kDefaultGapFloor), std::invalid_argument);
}

TEST_CASE("policy names round-trip") {
    for (auto k : {PolicyKind::Alg1, PolicyKind::Ucb, PolicyKind::UcbBlind, PolicyKind::EtcOracle,
                   PolicyKind::Uniform}) {
        CHECK(parse_policy_kind(to_string(k)) == k);
    }
    CHECK_FALSE(parse_policy_kind("greedy").has_value());
}

TEST_CASE("ucb-blind needs self observations") {
    const Instance inst{{1.0, 0.0}, FeedbackMatrix::from_rows({{1.0, 1.0}, {1.0, kInf}})};
    CHECK_THROWS_AS(make_policy(PolicyKind::UcbBlind, inst, {}, 100), std::invalid_argument);
    CHECK_NOTHROW(make_policy(PolicyKind::Ucb, inst, {}, 100));
}
