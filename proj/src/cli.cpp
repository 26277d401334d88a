#include "sidebandit/cli.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "sidebandit/environment.hpp"
#include "sidebandit/harness.hpp"
#include "sidebandit/instance_io.hpp"
#include "sidebandit/lp.hpp"
#include "sidebandit/policy.hpp"
#include "sidebandit/results_io.hpp"
#include "sidebandit/verify.hpp"

namespace sidebandit::cli {

namespace {

using nlohmann::json;

/// Bad user input; maps to exit code 2.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string json_scalar_to_arg(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number()) return v.dump();
    throw UsageError("config values must be strings, numbers, booleans or arrays of those");
}

// Fills options absent from the command line with values from a JSON config
// whose keys are flag names without the leading dashes.
void apply_config(CLI::App& sub, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open config file " + path);
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw UsageError("config " + path + ": " + e.what());
    }
    if (!doc.is_object()) throw UsageError("config " + path + " must be a JSON object");
    for (const auto& [key, value] : doc.items()) {
        if (key == "config") throw UsageError("config files cannot nest --config");
        CLI::Option* opt = sub.get_option_no_throw("--" + key);
        if (opt == nullptr) throw UsageError("unknown config key \"" + key + "\"");
        if (opt->count() > 0) continue;
        if (value.is_array()) {
            for (const auto& v : value) opt->add_result(json_scalar_to_arg(v));
        } else {
            opt->add_result(json_scalar_to_arg(value));
        }
        opt->run_callback();
    }
}

Instance load_instance_or_usage(const std::string& path) {
    try {
        return load_instance(path);
    } catch (const std::exception& e) {
        throw UsageError(e.what());
    }
}

// ---------------------------------------------------------------- run

struct RunSettings {
    std::string config;
    std::string instance;
    std::size_t random_k = 0;
    std::uint64_t gen_seed = 0;
    std::string policy = "alg1";
    double alpha = 4.5;
    double gamma = 0.5;
    double gap_floor = kDefaultGapFloor;
    std::uint64_t horizon = 0;
    std::uint64_t reps = 32;
    std::uint64_t seed = 0;
    std::vector<std::uint64_t> checkpoints;
    std::string out;
    bool labels = false;
    int threads = -1;
};

constexpr std::uint64_t kDefaultHorizon = 1ULL << 17;

void add_run(CLI::App& app, RunSettings& s) {
    app.add_option("--config", s.config, "JSON config file; command-line flags take precedence");
    app.add_option("--instance", s.instance, "instance JSON file");
    app.add_option("--random-k", s.random_k, "generate a random K-arm instance instead of --instance");
    app.add_option("--gen-seed", s.gen_seed, "seed for --random-k");
    app.add_option("--policy", s.policy, "alg1 | ucb | ucb-blind | etc-oracle | uniform");
    app.add_option("--alpha", s.alpha, "confidence parameter (alg1 needs > 4)");
    app.add_option("--gamma", s.gamma, "uniform exploration exponent in (0, 1)");
    app.add_option("--gap-floor", s.gap_floor, "gap used when all estimated means tie");
    app.add_option("--horizon", s.horizon, "rounds per replication (required for etc-oracle)");
    app.add_option("--reps", s.reps, "replications (>= 2)");
    app.add_option("--seed", s.seed, "base seed");
    app.add_option("--checkpoints", s.checkpoints, "rounds at which regret is recorded");
    app.add_option("--out", s.out, "results directory (default out/<policy>-seed<seed>)");
    app.add_flag("--labels", s.labels, "store run-length-encoded case labels in the traces");
    app.add_option("--threads", s.threads, "worker threads (default: BANDIT_SIM_THREADS, 0 = auto)");
}

int cmd_run(const CLI::App& app, const RunSettings& s, std::ostream& out) {
    const auto kind = parse_policy_kind(s.policy);
    if (!kind) throw UsageError("unknown policy \"" + s.policy + "\"");
    if (s.instance.empty() == (s.random_k == 0)) throw UsageError("give exactly one of --instance or --random-k");
    if (s.reps < 2) throw UsageError("--reps must be at least 2");

    RunConfig cfg;
    if (!s.instance.empty()) {
        cfg.instance = load_instance_or_usage(s.instance);
    } else {
        Rng rng(s.gen_seed);
        cfg.instance.feedback = make_random(s.random_k, rng);
        for (std::size_t i = 0; i < s.random_k; ++i) cfg.instance.means.push_back(rng.uniform(0.0, 1.0));
    }
    const bool horizon_given = app.get_option("--horizon")->count() > 0;
    if (*kind == PolicyKind::EtcOracle && !horizon_given) throw UsageError("etc-oracle needs --horizon");
    cfg.policy = *kind;
    cfg.params = {s.alpha, s.gamma, s.gap_floor};
    cfg.horizon = horizon_given ? s.horizon : kDefaultHorizon;
    cfg.replications = s.reps;
    cfg.base_seed = s.seed;
    cfg.checkpoints = s.checkpoints;
    cfg.record_labels = s.labels;
    try {
        validate(cfg);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }

    const unsigned threads = s.threads >= 0 ? static_cast<unsigned>(s.threads) : threads_from_env();
    const auto traces = run_replications(cfg, threads);
    const auto rows = aggregate(traces);
    const std::string dir = s.out.empty() ? "out/" + s.policy + "-seed" + std::to_string(s.seed) : s.out;
    write_results_dir(cfg, traces, rows, dir);

    out << "policy " << s.policy << ", " << s.reps << " replications, horizon " << cfg.horizon << "\n";
    out << std::setw(10) << "t" << std::setw(16) << "mean_regret" << std::setw(14) << "stderr" << std::setw(18)
        << "regret/ln t" << "\n";
    for (const auto& r : rows) {
        out << std::setw(10) << r.t << std::setw(16) << r.mean_regret << std::setw(14) << r.stderr_regret
            << std::setw(18) << r.regret_over_logt << "\n";
    }
    out << "results written to " << dir << "\n";
    return kExitOk;
}

// ---------------------------------------------------------------- lp

struct LpSettings {
    std::string config;
    std::string instance;
    double gap_floor = kDefaultGapFloor;
    double epsilon = 0.0;
    std::uint64_t trials = 1000;
    std::uint64_t seed = 0;
};

void add_lp(CLI::App& app, LpSettings& s) {
    app.add_option("--config", s.config, "JSON config file; command-line flags take precedence");
    app.add_option("--instance", s.instance, "instance JSON file (required)");
    app.add_option("--gap-floor", s.gap_floor, "gap used when all means tie");
    app.add_option("--epsilon", s.epsilon, "also estimate the worst-case solution over this l-inf ball");
    app.add_option("--trials", s.trials, "random perturbations for --epsilon");
    app.add_option("--seed", s.seed, "seed for --epsilon sampling");
}

int cmd_lp(const CLI::App& app, const LpSettings& s, std::ostream& out) {
    if (s.instance.empty()) throw UsageError("lp needs --instance");
    const Instance inst = load_instance_or_usage(s.instance);
    if (!(s.gap_floor > 0.0)) throw UsageError("--gap-floor must be positive");
    const auto cs = build_constraints(inst.means, inst.feedback, s.gap_floor);
    const auto sol = solve(cs, gaps(inst.means).deltas);
    json doc;
    doc["status"] = sol.status == LpStatus::Optimal ? "optimal" : "infeasible";
    doc["c_star"] = sol.c;
    doc["objective"] = sol.objective;
    doc["rhs"] = cs.rhs;
    std::vector<std::size_t> active;
    for (auto i : active_constraints(cs, sol.c)) active.push_back(i + 1);
    doc["active_constraints"] = active;
    if (app.get_option("--epsilon")->count() > 0) {
        if (!(s.epsilon >= 0.0)) throw UsageError("--epsilon must be nonnegative");
        Rng rng(s.seed);
        doc["epsilon"] = s.epsilon;
        doc["trials"] = s.trials;
        doc["c_star_epsilon"] = epsilon_worst_case(inst, s.epsilon, s.trials, rng, s.gap_floor);
    }
    out << doc.dump(2) << "\n";
    return sol.status == LpStatus::Optimal ? kExitOk : kExitFailure;
}

// ---------------------------------------------------------------- verify

struct VerifySettings {
    std::string config;
    std::string lemma = "all";
    double lo = 1.0;
    double hi = 2.0;
    std::uint64_t t = 0;
    double alpha = 0.0;
    double r = 8.0;
    double eps = 1.0;
    double sigma_min = 1.0;
    std::string rule = "chase";
    std::uint64_t trials = 10'000;
    std::uint64_t seed = 1;
};

void add_verify(CLI::App& app, VerifySettings& s) {
    app.add_option("--config", s.config, "JSON config file; command-line flags take precedence");
    app.add_option("--lemma", s.lemma, "all | 2a | 2b | 3");
    app.add_option("--L", s.lo, "2a: lower end of the weighted-count interval");
    app.add_option("--H", s.hi, "2a: upper end of the weighted-count interval");
    app.add_option("--t", s.t, "round index");
    app.add_option("--alpha", s.alpha, "confidence parameter");
    app.add_option("--r", s.r, "2b: weighted-count threshold");
    app.add_option("--eps", s.eps, "2b: deviation");
    app.add_option("--sigma-min", s.sigma_min, "3: precise source noise level");
    app.add_option("--rule", s.rule, "source rule: fixed | chase | sign | random");
    app.add_option("--trials", s.trials, "Monte-Carlo trials per case");
    app.add_option("--seed", s.seed, "seed");
}

void print_cases(const std::vector<VerifyCase>& cases, std::ostream& out) {
    out << std::left << std::setw(7) << "lemma" << std::setw(46) << "params" << std::right << std::setw(8)
        << "trials" << std::setw(7) << "hits" << std::setw(13) << "rate" << std::setw(13) << "bound"
        << std::setw(13) << "band" << "  result\n";
    for (const auto& c : cases) {
        out << std::left << std::setw(7) << c.lemma << std::setw(46) << c.params << std::right << std::setw(8)
            << c.result.trials << std::setw(7) << c.result.hits << std::setw(13) << c.result.empirical_rate
            << std::setw(13) << c.result.bound << std::setw(13) << c.result.band << "  "
            << (!c.result.ran ? "not-run" : c.result.pass ? "PASS" : "FAIL") << "\n";
    }
}

int cmd_verify(const CLI::App& app, const VerifySettings& s, std::ostream& out) {
    auto given = [&](const char* name) { return app.get_option(name)->count() > 0; };
    if (given("--alpha") && !(s.alpha > 0.0)) throw UsageError("--alpha must be positive");
    if (given("--t") && s.t < 2) throw UsageError("--t must be at least 2");
    const bool single = given("--L") || given("--H") || given("--t") || given("--alpha") || given("--r") ||
                        given("--eps") || given("--sigma-min") || given("--rule");
    const auto rule = parse_source_rule(s.rule);
    if (!rule) throw UsageError("unknown source rule \"" + s.rule + "\"");

    std::vector<VerifyCase> cases;
    const VerifyGrid grid{s.trials, s.seed};
    Rng rng = Rng::for_stream(s.seed, 0);
    auto fmt = [](std::initializer_list<std::pair<const char*, double>> kv) {
        std::ostringstream o;
        bool first = true;
        for (const auto& [k, v] : kv) {
            o << (first ? "" : " ") << k << "=" << v;
            first = false;
        }
        return o.str();
    };

    if (s.lemma == "all") {
        if (single) throw UsageError("case parameters need --lemma 2a, 2b or 3");
        cases = run_stopping_grid(grid);
        auto more = run_anytime_grid(grid);
        cases.insert(cases.end(), more.begin(), more.end());
    } else if (s.lemma == "2a") {
        if (!single) {
            for (auto& c : run_stopping_grid(grid)) {
                if (c.lemma == "2a") cases.push_back(c);
            }
        } else {
            const std::uint64_t t = given("--t") ? s.t : 100;
            const double alpha = given("--alpha") ? s.alpha : 4.0;
            try {
                cases.push_back({"2a", fmt({{"L", s.lo}, {"H", s.hi}, {"alpha", alpha}, {"t", double(t)}}),
                                 verify_stopping_interval(s.lo, s.hi, t, alpha, s.trials, rng)});
            } catch (const InvalidInterval& e) {
                throw UsageError(e.what());
            }
        }
    } else if (s.lemma == "2b") {
        if (!single) {
            for (auto& c : run_stopping_grid(grid)) {
                if (c.lemma == "2b") cases.push_back(c);
            }
        } else {
            const std::uint64_t t = given("--t") ? s.t : 1000;
            if (!(s.r >= 0.0) || !(s.eps > 0.0)) throw UsageError("2b needs --r >= 0 and --eps > 0");
            cases.push_back({"2b", fmt({{"r", s.r}, {"eps", s.eps}, {"t", double(t)}}),
                             verify_stopping_threshold(s.r, s.eps, t, s.trials, rng)});
        }
    } else if (s.lemma == "3") {
        if (!single) {
            cases = run_anytime_grid(grid);
        } else {
            const std::uint64_t t = given("--t") ? s.t : 100;
            const double alpha = given("--alpha") ? s.alpha : 4.5;
            if (!(s.sigma_min > 0.0) || !std::isfinite(s.sigma_min)) throw UsageError("--sigma-min must be positive");
            cases.push_back({"3", fmt({{"sigma_min", s.sigma_min}, {"alpha", alpha}, {"t", double(t)}}) +
                                      " rule=" + std::string(to_string(*rule)),
                             verify_anytime_concentration(s.sigma_min, *rule, t, alpha, s.trials, rng)});
        }
    } else {
        throw UsageError("unknown lemma \"" + s.lemma + "\" (expected all, 2a, 2b or 3)");
    }

    print_cases(cases, out);
    bool all_pass = true;
    for (const auto& c : cases) all_pass = all_pass && (!c.result.ran || c.result.pass);
    out << (all_pass ? "all checks passed" : "some checks FAILED") << "\n";
    return all_pass ? kExitOk : kExitFailure;
}

// ---------------------------------------------------------------- gen

struct GenSettings {
    std::string config;
    std::string kind = "standard";
    std::size_t k = 3;
    double sigma = 1.0;
    std::vector<double> means;
    std::string edges;
    std::uint64_t seed = 0;
    double p_inf = 0.5;
    double sigma_lo = 0.5;
    double sigma_hi = 2.0;
    std::string out;
};

void add_gen(CLI::App& app, GenSettings& s) {
    app.add_option("--config", s.config, "JSON config file; command-line flags take precedence");
    app.add_option("--kind", s.kind, "standard | full | graph | random");
    app.add_option("--k", s.k, "number of arms");
    app.add_option("--sigma", s.sigma, "noise level of every finite entry (standard, full, graph)");
    app.add_option("--means", s.means, "mean rewards (default: evenly spaced from 1 down to 0)");
    app.add_option("--edges", s.edges, "graph: comma-separated 1-based pairs such as 1-2,2-3 (undirected)");
    app.add_option("--seed", s.seed, "random: seed");
    app.add_option("--p-inf", s.p_inf, "random: probability of an unobservable pair");
    app.add_option("--sigma-lo", s.sigma_lo, "random: smallest finite noise level");
    app.add_option("--sigma-hi", s.sigma_hi, "random: largest finite noise level");
    app.add_option("--out", s.out, "write to this file instead of stdout");
}

std::vector<std::vector<bool>> parse_edges(const std::string& text, std::size_t k) {
    std::vector<std::vector<bool>> adj(k, std::vector<bool>(k, false));
    for (std::size_t i = 0; i < k; ++i) adj[i][i] = true;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        const auto dash = item.find('-');
        std::size_t a = 0;
        std::size_t b = 0;
        try {
            if (dash == std::string::npos) throw std::invalid_argument(item);
            a = std::stoul(item.substr(0, dash));
            b = std::stoul(item.substr(dash + 1));
        } catch (const std::exception&) {
            throw UsageError("bad edge \"" + item + "\"");
        }
        if (a < 1 || b < 1 || a > k || b > k) throw UsageError("edge \"" + item + "\" out of range");
        adj[a - 1][b - 1] = adj[b - 1][a - 1] = true;
    }
    return adj;
}

int cmd_gen(const GenSettings& s, std::ostream& out) {
    if (s.k < 2) throw UsageError("--k must be at least 2");
    Instance inst;
    if (s.means.empty()) {
        for (std::size_t i = 0; i < s.k; ++i) inst.means.push_back(1.0 - static_cast<double>(i) / static_cast<double>(s.k - 1));
    } else {
        if (s.means.size() != s.k) throw UsageError("--means needs exactly K values");
        inst.means = s.means;
    }
    if (s.kind == "standard") {
        inst.feedback = make_standard(s.k, s.sigma);
    } else if (s.kind == "full") {
        inst.feedback = make_full(s.k, s.sigma);
    } else if (s.kind == "graph") {
        inst.feedback = make_graph(parse_edges(s.edges, s.k), s.sigma);
    } else if (s.kind == "random") {
        Rng rng(s.seed);
        inst.feedback = make_random(s.k, rng, {s.sigma_lo, s.sigma_hi, s.p_inf});
    } else {
        throw UsageError("unknown --kind \"" + s.kind + "\"");
    }
    validate(inst);
    const std::string text = instance_to_json(inst).dump(2);
    if (s.out.empty()) {
        out << text << "\n";
    } else {
        std::ofstream f(s.out);
        if (!f) throw std::runtime_error("cannot write " + s.out);
        f << text << "\n";
    }
    return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Gaussian bandits with side observations: simulation, LP diagnostics and bound checks",
                 "bandit_sim"};
    app.require_subcommand(1);

    RunSettings run_s;
    LpSettings lp_s;
    VerifySettings verify_s;
    GenSettings gen_s;
    auto* run_cmd = app.add_subcommand("run", "simulate a policy over seeded replications");
    auto* lp_cmd = app.add_subcommand("lp", "solve the exploration LP for an instance");
    auto* verify_cmd = app.add_subcommand("verify", "Monte-Carlo checks of the estimator tail bounds");
    auto* gen_cmd = app.add_subcommand("gen", "write an instance file");
    add_run(*run_cmd, run_s);
    add_lp(*lp_cmd, lp_s);
    add_verify(*verify_cmd, verify_s);
    add_gen(*gen_cmd, gen_s);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        // Subcommand-level --help lands here too.
        if (e.get_exit_code() == static_cast<int>(CLI::ExitCodes::Success)) {
            app.exit(e, out, err);
            return kExitOk;
        }
        err << "error: " << e.what() << "\n";
        return kExitInvalid;
    }

    try {
        if (run_cmd->parsed()) {
            if (!run_s.config.empty()) apply_config(*run_cmd, run_s.config);
            return cmd_run(*run_cmd, run_s, out);
        }
        if (lp_cmd->parsed()) {
            if (!lp_s.config.empty()) apply_config(*lp_cmd, lp_s.config);
            return cmd_lp(*lp_cmd, lp_s, out);
        }
        if (verify_cmd->parsed()) {
            if (!verify_s.config.empty()) apply_config(*verify_cmd, verify_s.config);
            return cmd_verify(*verify_cmd, verify_s, out);
        }
        if (gen_cmd->parsed()) {
            if (!gen_s.config.empty()) apply_config(*gen_cmd, gen_s.config);
            return cmd_gen(gen_s, out);
        }
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const std::exception& e) {
        err << "failure: " << e.what() << "\n";
        return kExitFailure;
    }
    return kExitInvalid;
}

}  // namespace sidebandit::cli
