#include "sidebandit/verify.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "sidebandit/environment.hpp"
#include "sidebandit/estimator.hpp"

namespace sidebandit {

std::string_view to_string(SourceRule rule) {
    switch (rule) {
        case SourceRule::Fixed: return "fixed";
        case SourceRule::ChaseDeviation: return "chase";
        case SourceRule::SignAdaptive: return "sign";
        case SourceRule::RandomAdaptive: return "random";
    }
    return "?";
}

std::optional<SourceRule> parse_source_rule(std::string_view name) {
    for (auto r : {SourceRule::Fixed, SourceRule::ChaseDeviation, SourceRule::SignAdaptive,
                   SourceRule::RandomAdaptive}) {
        if (name == to_string(r)) return r;
    }
    return std::nullopt;
}

McResult make_result(std::uint64_t trials, std::uint64_t hits, double bound) {
    McResult r;
    r.trials = trials;
    r.hits = hits;
    r.bound = bound;
    if (trials == 0) {
        r.empirical_rate = std::numeric_limits<double>::quiet_NaN();
        return r;
    }
    r.ran = true;
    r.empirical_rate = static_cast<double>(hits) / static_cast<double>(trials);
    r.band = bound + 3.0 * std::sqrt(bound * (1.0 - bound) / static_cast<double>(trials));
    r.pass = r.empirical_rate <= r.band;
    return r;
}

namespace {

// true: take the noisy source for sample number `step` (1-based).
bool choose_noisy(SourceRule rule, std::uint64_t step, double w, double ntilde, Rng& rng) {
    switch (rule) {
        case SourceRule::Fixed: return step % 3 != 1;
        case SourceRule::ChaseDeviation:
            return ntilde > 0.0 && std::abs(w / ntilde) * std::sqrt(ntilde) > 1.0;
        case SourceRule::SignAdaptive: return w > 0.0;
        case SourceRule::RandomAdaptive: return rng.bernoulli(w > 0.0 ? 0.8 : 0.2);
    }
    return false;
}

std::string fmt_params(std::initializer_list<std::pair<const char*, double>> kv, std::string_view extra = {}) {
    std::ostringstream out;
    bool first = true;
    for (const auto& [k, v] : kv) {
        out << (first ? "" : " ") << k << "=" << v;
        first = false;
    }
    if (!extra.empty()) out << " rule=" << extra;
    return out.str();
}

}  // namespace

McResult verify_anytime_concentration(double sigma_min, SourceRule rule, std::uint64_t t, double alpha,
                                      std::uint64_t trials, Rng& rng, double noisy_ratio) {
    if (!(sigma_min > 0.0) || !std::isfinite(sigma_min)) throw std::invalid_argument("sigma_min must be finite and positive");
    if (t < 2) throw std::invalid_argument("t must be at least 2");
    if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
    const double sigma_hi = sigma_min * noisy_ratio;
    const double log_t = std::log(static_cast<double>(t));
    std::uint64_t hits = 0;
    for (std::uint64_t trial = 0; trial < trials; ++trial) {
        ArmEstimator est;
        for (std::uint64_t step = 1; step + 1 <= t; ++step) {
            const bool noisy = step > 1 && choose_noisy(rule, step, est.weighted_sum, est.weighted_count, rng);
            const double s = noisy ? sigma_hi : sigma_min;
            est.update(rng.normal(0.0, s), s);
        }
        if (std::abs(est.mean()) > std::sqrt(2.0 * alpha * log_t / est.weighted_count)) ++hits;
    }
    return make_result(trials, hits, anytime_tail_bound_loose(t, alpha));
}

McResult verify_stopping_interval(double lo, double hi, std::uint64_t t, double alpha, std::uint64_t trials,
                                  Rng& rng, const StoppingSetup& setup) {
    if (!(lo > 0.0 && hi > lo)) throw InvalidInterval("interval needs 0 < L < H");
    if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
    const double log_t = std::log(static_cast<double>(t));
    std::uint64_t hits = 0;
    for (std::uint64_t trial = 0; trial < trials; ++trial) {
        double w = 0.0;
        double n = 0.0;
        for (std::uint64_t step = 1; step <= t; ++step) {
            const double s = choose_noisy(setup.rule, step, w, n, rng) ? setup.sigma_hi : setup.sigma_lo;
            const double prec = 1.0 / (s * s);
            w += rng.normal(0.0, s) * prec;
            n += prec;
            if (n >= lo && n <= hi) {
                if (std::abs(w) > std::sqrt(2.0 * alpha * n * log_t)) ++hits;
                break;
            }
            if (n > hi) break;  // the weighted count only grows, so phi = t + 1
        }
    }
    const double bound = std::min(1.0, 2.0 * std::pow(static_cast<double>(t), -alpha * lo / hi));
    return make_result(trials, hits, bound);
}

McResult verify_stopping_threshold(double r, double eps, std::uint64_t t, std::uint64_t trials, Rng& rng,
                                   const StoppingSetup& setup) {
    if (!(r >= 0.0)) throw std::invalid_argument("threshold r must be nonnegative");
    if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
    std::uint64_t hits = 0;
    for (std::uint64_t trial = 0; trial < trials; ++trial) {
        double w = 0.0;
        double n = 0.0;
        for (std::uint64_t step = 1; step <= t; ++step) {
            const double s = choose_noisy(setup.rule, step, w, n, rng) ? setup.sigma_hi : setup.sigma_lo;
            const double prec = 1.0 / (s * s);
            w += rng.normal(0.0, s) * prec;
            n += prec;
            if (n >= r) {
                if (std::abs(w) > n * eps) ++hits;
                break;
            }
        }
    }
    const double bound = std::min(1.0, 2.0 * std::exp(-r * eps * eps / 2.0));
    return make_result(trials, hits, bound);
}

McResult verify_fixed_schedule(const std::vector<double>& sigmas, double eps, std::uint64_t trials, Rng& rng) {
    double ntilde = 0.0;
    for (double s : sigmas) ntilde += precision(s);
    if (!(ntilde > 0.0)) throw NoInformation();
    std::uint64_t hits = 0;
    for (std::uint64_t trial = 0; trial < trials; ++trial) {
        ArmEstimator est;
        for (double s : sigmas) est.update(s == kInf ? 0.0 : rng.normal(0.0, s), s);
        if (std::abs(est.mean()) > eps) ++hits;
    }
    return make_result(trials, hits, std::min(1.0, 2.0 * std::exp(-ntilde * eps * eps / 2.0)));
}

std::vector<VerifyCase> run_anytime_grid(const VerifyGrid& grid) {
    std::vector<VerifyCase> out;
    std::uint64_t stream = 0;
    for (double sigma_min : {0.5, 1.0, 2.0}) {
        for (double alpha : {4.5, 6.0}) {
            for (std::uint64_t t : {100ULL, 1000ULL}) {
                for (auto rule : {SourceRule::ChaseDeviation, SourceRule::RandomAdaptive}) {
                    Rng rng = Rng::for_stream(grid.seed, stream++);
                    out.push_back({"3",
                                   fmt_params({{"sigma_min", sigma_min}, {"alpha", alpha}, {"t", double(t)}},
                                              to_string(rule)),
                                   verify_anytime_concentration(sigma_min, rule, t, alpha, grid.trials, rng)});
                }
            }
        }
    }
    return out;
}

std::vector<VerifyCase> run_stopping_grid(const VerifyGrid& grid) {
    std::vector<VerifyCase> out;
    std::uint64_t stream = 1000;
    const std::pair<double, double> intervals[] = {{1.0, 2.0}, {4.0, 5.0}};
    for (const auto& [lo, hi] : intervals) {
        for (double alpha : {1.0, 2.0, 4.0}) {
            for (std::uint64_t t : {100ULL, 1000ULL}) {
                Rng rng = Rng::for_stream(grid.seed, stream++);
                out.push_back({"2a", fmt_params({{"L", lo}, {"H", hi}, {"alpha", alpha}, {"t", double(t)}}),
                               verify_stopping_interval(lo, hi, t, alpha, grid.trials, rng)});
            }
        }
    }
    for (double r : {2.0, 8.0}) {
        for (double eps : {0.5, 1.0}) {
            Rng rng = Rng::for_stream(grid.seed, stream++);
            out.push_back({"2b", fmt_params({{"r", r}, {"eps", eps}, {"t", 1000.0}}),
                           verify_stopping_threshold(r, eps, 1000, grid.trials, rng)});
        }
    }
    return out;
}

}  // namespace sidebandit
