#include <doctest.h>

#include <cmath>

#include "lp_oracle.hpp"
#include "sidebandit/lp.hpp"

using namespace sidebandit;
using sidebandit::testing::brute_force_lp;

namespace {

Instance standard2() { return {{1.0, 0.0}, make_standard(2, 1.0)}; }
Instance full2() { return {{1.0, 0.0}, make_full(2, 1.0)}; }

Instance random_instance(Rng& rng, std::size_t k) {
    Instance inst;
    inst.feedback = make_random(k, rng, {0.3, 3.0, 0.5});
    inst.means.resize(k);
    for (double& m : inst.means) m = rng.uniform(0.0, 1.0);
    return inst;
}

}  // namespace

TEST_CASE("constraint rows use the observed arm's column of sigma") {
    auto cs = build_constraints({1.0, 0.0}, make_standard(2, 1.0));
    CHECK(cs.coeff == std::vector<double>{1.0, 0.0, 0.0, 1.0});
    CHECK(cs.rhs == std::vector<double>{2.0, 2.0});

    cs = build_constraints({1.0, 0.0}, make_full(2, 1.0));
    CHECK(cs.coeff == std::vector<double>{1.0, 1.0, 1.0, 1.0});
    CHECK(cs.rhs == std::vector<double>{2.0, 2.0});

    cs = build_constraints({1.0, 1.0}, make_full(2, 1.0), 1e-3);
    CHECK(cs.rhs[0] == doctest::Approx(2e6));
    CHECK(cs.rhs[1] == doctest::Approx(2e6));

    // row i, column j holds 1 / sigma_{j,i}^2
    cs = build_constraints({1.0, 0.0}, FeedbackMatrix::from_rows({{1.0, 0.5}, {kInf, 2.0}}));
    CHECK(cs(1, 0) == doctest::Approx(4.0));
    CHECK(cs(1, 1) == doctest::Approx(0.25));
    CHECK(cs(0, 1) == 0.0);
}

TEST_CASE("solve: two-arm examples") {
    auto sol = solve(build_constraints({1.0, 0.0}, make_standard(2, 1.0)), {0.0, 1.0});
    REQUIRE(sol.status == LpStatus::Optimal);
    CHECK(sol.c[0] == doctest::Approx(2.0));
    CHECK(sol.c[1] == doctest::Approx(2.0));
    CHECK(sol.objective == doctest::Approx(2.0));

    sol = solve(build_constraints({1.0, 0.0}, make_full(2, 1.0)), {0.0, 1.0});
    REQUIRE(sol.status == LpStatus::Optimal);
    CHECK(sol.c[0] == doctest::Approx(2.0));
    CHECK(sol.c[1] == doctest::Approx(0.0));
    CHECK(sol.objective == 0.0);
}

TEST_CASE("solve: three-arm chain instance matches the enumerated vertex") {
    const auto fb = FeedbackMatrix::from_rows({{1.0, 1.0, kInf}, {kInf, 1.0, kInf}, {kInf, kInf, 1.0}});
    const std::vector<double> mu{1.0, 0.5, 0.5};
    const auto cs = build_constraints(mu, fb);
    const auto deltas = gaps(mu).deltas;
    const auto oracle = brute_force_lp(cs, deltas);
    // frozen from the enumeration: arm 1 covers arm 2 for free
    CHECK(oracle.objective == doctest::Approx(4.0));
    REQUIRE(oracle.c.size() == 3);
    CHECK(oracle.c[0] == doctest::Approx(8.0));
    CHECK(oracle.c[1] == doctest::Approx(0.0));
    CHECK(oracle.c[2] == doctest::Approx(8.0));

    const auto sol = solve(cs, deltas);
    REQUIRE(sol.status == LpStatus::Optimal);
    CHECK(sol.objective == doctest::Approx(4.0));
    CHECK(sol.c[0] == doctest::Approx(8.0));
    CHECK(sol.c[1] == doctest::Approx(0.0));
    CHECK(sol.c[2] == doctest::Approx(8.0));
}

TEST_CASE("solve reports an all-zero row as infeasible") {
    ConstraintSet cs;
    cs.k = 2;
    cs.coeff = {1.0, 0.0, 0.0, 0.0};
    cs.rhs = {1.0, 1.0};
    CHECK(solve(cs, {0.0, 1.0}).status == LpStatus::Infeasible);
}

TEST_CASE("simplex agrees with vertex enumeration on random small instances") {
    Rng rng(31337);
    for (int rep = 0; rep < 300; ++rep) {
        const std::size_t k = 2 + static_cast<std::size_t>(rep % 3);
        const auto inst = random_instance(rng, k);
        const auto cs = build_constraints(inst.means, inst.feedback);
        const auto deltas = gaps(inst.means).deltas;
        const auto sol = solve(cs, deltas);
        const auto oracle = brute_force_lp(cs, deltas);
        REQUIRE(sol.status == LpStatus::Optimal);
        const double scale = std::max(1.0, std::abs(oracle.objective));
        CHECK(std::abs(sol.objective - oracle.objective) <= 1e-8 * scale);
        for (std::size_t i = 0; i < k; ++i) {
            CHECK(sol.c[i] >= 0.0);
            CHECK(cs.row_dot(i, sol.c) >= cs.rhs[i] - 1e-9);
        }
    }
}

TEST_CASE("scaling the gaps scales the objective and keeps the vertex") {
    Rng rng(77);
    for (int rep = 0; rep < 50; ++rep) {
        const auto inst = random_instance(rng, 3);
        const auto cs = build_constraints(inst.means, inst.feedback);
        auto deltas = gaps(inst.means).deltas;
        const auto base = solve(cs, deltas);
        for (double& d : deltas) d *= 4.0;
        const auto scaled = solve(cs, deltas);
        CHECK(scaled.objective == doctest::Approx(4.0 * base.objective).epsilon(1e-9));
        for (std::size_t i = 0; i < 3; ++i) CHECK(scaled.c[i] == doctest::Approx(base.c[i]).epsilon(1e-9));
    }
}

TEST_CASE("diagonal feedback has the closed form 2 sigma_ii^2 / Delta_i^2") {
    Rng rng(5);
    for (std::size_t k : {2u, 3u, 5u}) {
        for (int rep = 0; rep < 20; ++rep) {
            std::vector<std::vector<double>> rows(k, std::vector<double>(k, kInf));
            for (std::size_t i = 0; i < k; ++i) rows[i][i] = rng.uniform(0.5, 2.0);
            Instance inst{std::vector<double>(k), FeedbackMatrix::from_rows(rows)};
            for (double& m : inst.means) m = rng.uniform(0.0, 1.0);
            const auto g = gaps(inst.means);
            const auto sol = solve(build_constraints(inst.means, inst.feedback), g.deltas);
            for (std::size_t i = 0; i < k; ++i) {
                if (g.deltas[i] == 0.0) continue;
                const double expect = 2.0 * rows[i][i] * rows[i][i] / (g.deltas[i] * g.deltas[i]);
                CHECK(std::abs(sol.c[i] - expect) <= 1e-9 * std::max(1.0, expect));
            }
        }
    }
}

TEST_CASE("lower_bound_value") {
    CHECK(lower_bound_value(standard2()) == doctest::Approx(2.0));
    CHECK(lower_bound_value(full2()) == 0.0);
    Instance three{{1.0, 0.5, 0.0}, make_standard(3, 1.0)};
    CHECK(lower_bound_value(three) == doctest::Approx(6.0));

    Rng rng(9);
    for (int rep = 0; rep < 20; ++rep) {
        const auto inst = random_instance(rng, 3);
        Instance wide{inst.means, inst.feedback.scaled(1.5)};
        CHECK(lower_bound_value(wide) == doctest::Approx(2.25 * lower_bound_value(inst)).epsilon(1e-9));
    }
}

TEST_CASE("membership is an exact comparison") {
    const auto cs = build_constraints({1.0, 0.0}, make_standard(2, 1.0));
    CHECK(membership({2.0, 2.0}, cs));
    CHECK_FALSE(membership({2.0, 1.999}, cs));
    CHECK_FALSE(membership({0.0, 0.0}, cs));
    CHECK_FALSE(membership({2.0, std::nextafter(2.0, 0.0)}, cs));
}

TEST_CASE("active constraints") {
    const auto cs = build_constraints({1.0, 0.0}, make_full(2, 1.0));
    CHECK(active_constraints(cs, {2.0, 0.0}) == std::vector<std::size_t>{0, 1});
    CHECK(active_constraints(cs, {3.0, 0.0}).empty());
}

TEST_CASE("epsilon_worst_case") {
    Rng rng(1);
    const auto inst = standard2();
    const auto center = solve(build_constraints(inst.means, inst.feedback), gaps(inst.means).deltas).c;
    const auto zero = epsilon_worst_case(inst, 0.0, 20, rng);
    CHECK(zero[0] == doctest::Approx(center[0]));
    CHECK(zero[1] == doctest::Approx(center[1]));

    const auto wide = epsilon_worst_case(inst, 0.1, 50, rng);
    CHECK(wide[0] >= center[0]);
    CHECK(wide[1] >= 3.125 - 1e-9);

    Rng a(3);
    Rng b(3);
    const auto few = epsilon_worst_case(Instance{{1.0, 0.6, 0.2}, make_full(3, 1.0)}, 0.05, 5, a);
    const auto many = epsilon_worst_case(Instance{{1.0, 0.6, 0.2}, make_full(3, 1.0)}, 0.05, 50, b);
    for (std::size_t i = 0; i < 3; ++i) CHECK(many[i] >= few[i]);
}
