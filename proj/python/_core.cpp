#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "sidebandit/environment.hpp"
#include "sidebandit/estimator.hpp"
#include "sidebandit/harness.hpp"
#include "sidebandit/lp.hpp"
#include "sidebandit/policy.hpp"
#include "sidebandit/verify.hpp"

namespace py = pybind11;
using namespace pybind11::literals;
using namespace sidebandit;

namespace {

Instance make_instance(const std::vector<double>& means, const std::vector<std::vector<double>>& sigma) {
    Instance inst{means, FeedbackMatrix::from_rows(sigma)};
    validate(inst);
    return inst;
}

py::dict lp_dict(const ConstraintSet& cs, const LpSolution& sol) {
    std::vector<std::size_t> active;
    for (auto i : active_constraints(cs, sol.c)) active.push_back(i + 1);
    return py::dict("status"_a = sol.status == LpStatus::Optimal ? "optimal" : "infeasible", "c_star"_a = sol.c,
                    "objective"_a = sol.objective, "rhs"_a = cs.rhs, "active_constraints"_a = active);
}

py::dict mc_dict(const McResult& r) {
    return py::dict("trials"_a = r.trials, "hits"_a = r.hits, "empirical_rate"_a = r.empirical_rate,
                    "bound"_a = r.bound, "band"_a = r.band, "ran"_a = r.ran, "passed"_a = r.pass);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Gaussian bandits with side observations";

    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<EpisodeError>(m, "EpisodeError", PyExc_RuntimeError);

    py::class_<Instance>(m, "Instance")
        .def(py::init(&make_instance), "means"_a, "sigma"_a)
        .def_readonly("means", &Instance::means)
        .def_property_readonly("sigma", [](const Instance& i) { return i.feedback.rows(); })
        .def_property_readonly("k", &Instance::k);

    m.def("standard", [](const std::vector<double>& means, double sigma) {
        return make_instance(means, make_standard(means.size(), sigma).rows());
    }, "means"_a, "sigma"_a = 1.0);
    m.def("full", [](const std::vector<double>& means, double sigma) {
        return make_instance(means, make_full(means.size(), sigma).rows());
    }, "means"_a, "sigma"_a = 1.0);

    m.def("gaps", [](const std::vector<double>& means) {
        const auto g = gaps(means);
        return py::dict("i_star"_a = g.i_star, "deltas"_a = g.deltas, "delta_min"_a = g.delta_min,
                        "delta_max"_a = g.delta_max);
    }, "means"_a);

    m.def("solve_lp", [](const Instance& inst, double gap_floor) {
        const auto cs = build_constraints(inst.means, inst.feedback, gap_floor);
        return lp_dict(cs, solve(cs, gaps(inst.means).deltas));
    }, "instance"_a, "gap_floor"_a = kDefaultGapFloor);
    m.def("lower_bound_value", &lower_bound_value, "instance"_a, "gap_floor"_a = kDefaultGapFloor);
    m.def("epsilon_worst_case", [](const Instance& inst, double eps, std::size_t trials, std::uint64_t seed) {
        Rng rng(seed);
        return epsilon_worst_case(inst, eps, trials, rng);
    }, "instance"_a, "eps"_a, "trials"_a = 1000, "seed"_a = 0);

    m.def("confidence_radius", py::overload_cast<double, double, double>(&confidence_radius), "weighted_count"_a,
          "t"_a, "alpha"_a);
    m.def("anytime_tail_bound", &anytime_tail_bound, "t"_a, "alpha"_a);
    m.def("anytime_tail_bound_loose", &anytime_tail_bound_loose, "t"_a, "alpha"_a);

    m.def("etc_schedule", [](const Instance& inst, std::uint64_t horizon) {
        const auto s = etc_oracle_schedule(inst, horizon);
        return py::dict("explore_counts"_a = s.explore_counts, "c_star"_a = s.c_star, "commit_arm"_a = s.commit_arm,
                        "truncated"_a = s.truncated);
    }, "instance"_a, "horizon"_a);

    m.def("run", [](const Instance& inst, const std::string& policy, std::uint64_t horizon, std::uint64_t reps,
                    std::uint64_t seed, double alpha, double gamma, std::vector<std::uint64_t> checkpoints,
                    unsigned threads) {
        const auto kind = parse_policy_kind(policy);
        if (!kind) throw py::value_error("unknown policy " + policy);
        RunConfig cfg;
        cfg.instance = inst;
        cfg.policy = *kind;
        cfg.params.alpha = alpha;
        cfg.params.gamma = gamma;
        cfg.horizon = horizon;
        cfg.replications = reps;
        cfg.base_seed = seed;
        cfg.checkpoints = std::move(checkpoints);
        std::vector<RegretTrace> traces;
        {
            py::gil_scoped_release release;
            traces = run_replications(cfg, threads);
        }
        py::list table;
        if (traces.size() >= 2) {
            for (const auto& r : aggregate(traces)) {
                table.append(py::dict("t"_a = r.t, "mean_regret"_a = r.mean_regret, "stderr"_a = r.stderr_regret,
                                      "regret_over_logt"_a = r.regret_over_logt));
            }
        }
        py::list out;
        for (const auto& tr : traces) {
            out.append(py::dict("seed"_a = tr.seed, "checkpoints"_a = tr.checkpoints, "regret"_a = tr.regret,
                                "pull_counts"_a = tr.final_pull_counts, "n_e"_a = tr.final_n_e,
                                "label_counts"_a = tr.label_counts,
                                "counting_invariant"_a = check_counting_invariant(tr, gamma)));
        }
        return py::dict("table"_a = table, "traces"_a = out);
    }, "instance"_a, "policy"_a = "alg1", "horizon"_a = 1 << 17, "reps"_a = 2, "seed"_a = 0, "alpha"_a = 4.5,
       "gamma"_a = 0.5, "checkpoints"_a = std::vector<std::uint64_t>{}, "threads"_a = 0);

    m.def("verify_anytime", [](double sigma_min, const std::string& rule, std::uint64_t t, double alpha,
                               std::uint64_t trials, std::uint64_t seed) {
        const auto r = parse_source_rule(rule);
        if (!r) throw py::value_error("unknown source rule " + rule);
        Rng rng(seed);
        return mc_dict(verify_anytime_concentration(sigma_min, *r, t, alpha, trials, rng));
    }, "sigma_min"_a, "rule"_a = "chase", "t"_a = 100, "alpha"_a = 4.5, "trials"_a = 10000, "seed"_a = 1);
    m.def("verify_stopping_interval", [](double lo, double hi, std::uint64_t t, double alpha, std::uint64_t trials,
                                         std::uint64_t seed) {
        Rng rng(seed);
        return mc_dict(verify_stopping_interval(lo, hi, t, alpha, trials, rng));
    }, "L"_a, "H"_a, "t"_a, "alpha"_a, "trials"_a = 10000, "seed"_a = 1);
    m.def("verify_stopping_threshold", [](double r, double eps, std::uint64_t t, std::uint64_t trials,
                                          std::uint64_t seed) {
        Rng rng(seed);
        return mc_dict(verify_stopping_threshold(r, eps, t, trials, rng));
    }, "r"_a, "eps"_a, "t"_a = 1000, "trials"_a = 10000, "seed"_a = 1);
}
