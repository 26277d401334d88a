#include "sidebandit/environment.hpp"

#include <algorithm>
#include <cmath>

namespace sidebandit {

FeedbackMatrix FeedbackMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
    FeedbackMatrix m;
    m.k_ = rows.size();
    m.sigma_.reserve(m.k_ * m.k_);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != m.k_) {
            throw ValidationError(ValidationCode::NonSquare,
                                  "feedback row " + std::to_string(i) + " has " +
                                      std::to_string(rows[i].size()) + " entries, expected " +
                                      std::to_string(m.k_));
        }
        m.sigma_.insert(m.sigma_.end(), rows[i].begin(), rows[i].end());
    }
    return m;
}

double FeedbackMatrix::sigma_min(std::size_t arm) const {
    double best = kInf;
    for (std::size_t row = 0; row < k_; ++row) best = std::min(best, (*this)(row, arm));
    return best;
}

double FeedbackMatrix::sigma_bar() const {
    double worst = 0.0;
    for (std::size_t arm = 0; arm < k_; ++arm) worst = std::max(worst, sigma_min(arm));
    return worst;
}

std::size_t FeedbackMatrix::best_source(std::size_t arm) const {
    std::size_t best = 0;
    for (std::size_t row = 1; row < k_; ++row) {
        if ((*this)(row, arm) < (*this)(best, arm)) best = row;
    }
    return best;
}

std::vector<std::vector<double>> FeedbackMatrix::rows() const {
    std::vector<std::vector<double>> out(k_);
    for (std::size_t i = 0; i < k_; ++i) {
        out[i].assign(sigma_.begin() + static_cast<std::ptrdiff_t>(i * k_),
                      sigma_.begin() + static_cast<std::ptrdiff_t>((i + 1) * k_));
    }
    return out;
}

FeedbackMatrix FeedbackMatrix::scaled(double factor) const {
    FeedbackMatrix m = *this;
    for (double& s : m.sigma_) s *= factor;
    return m;
}

GapInfo gaps(const std::vector<double>& means) {
    GapInfo g;
    const std::size_t k = means.size();
    g.deltas.assign(k, 0.0);
    if (k == 0) return g;
    for (std::size_t i = 1; i < k; ++i) {
        if (means[i] > means[g.i_star]) g.i_star = i;
    }
    const double best = means[g.i_star];
    for (std::size_t i = 0; i < k; ++i) {
        const double d = best - means[i];
        g.deltas[i] = d;
        g.delta_max = std::max(g.delta_max, d);
        if (d > 0.0 && (!g.delta_min || d < *g.delta_min)) g.delta_min = d;
    }
    return g;
}

void validate(const FeedbackMatrix& feedback) {
    const std::size_t k = feedback.k();
    if (k < 2) {
        throw ValidationError(ValidationCode::TooFewArms,
                              "need at least 2 arms, got " + std::to_string(k));
    }
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
            const double s = feedback(i, j);
            if (std::isnan(s) || s <= 0.0) {
                throw ValidationError(ValidationCode::NonPositiveSigma,
                                      "sigma[" + std::to_string(i) + "][" + std::to_string(j) +
                                          "] must be in (0, inf]");
            }
        }
    }
    for (std::size_t j = 0; j < k; ++j) {
        if (feedback.sigma_min(j) == kInf) {
            throw ValidationError(ValidationCode::UnidentifiableArm,
                                  "arm " + std::to_string(j + 1) + " is never observed", j);
        }
    }
}

void validate(const Instance& instance) {
    if (instance.feedback.k() != instance.means.size()) {
        throw ValidationError(ValidationCode::NonSquare,
                              "means has " + std::to_string(instance.means.size()) +
                                  " entries but feedback is " +
                                  std::to_string(instance.feedback.k()) + "x" +
                                  std::to_string(instance.feedback.k()));
    }
    for (double m : instance.means) {
        if (!std::isfinite(m)) throw ValidationError(ValidationCode::BadMeans, "means must be finite");
    }
    validate(instance.feedback);
}

Observation pull(const Instance& instance, const std::vector<double>& deltas,
                 std::size_t arm, Rng& rng) {
    const std::size_t k = instance.k();
    Observation obs;
    obs.arm_pulled = arm;
    obs.values.resize(k);
    for (std::size_t j = 0; j < k; ++j) {
        const double s = instance.feedback(arm, j);
        if (s != kInf) obs.values[j] = rng.normal(instance.means[j], s);
    }
    obs.pseudo_regret_increment = deltas[arm];
    return obs;
}

Observation pull(const Instance& instance, std::size_t arm, Rng& rng) {
    return pull(instance, gaps(instance.means).deltas, arm, rng);
}

Instance perturbed_instance(const Instance& instance, std::size_t k, double eps) {
    const GapInfo g = gaps(instance.means);
    if (k >= instance.k() || !(g.deltas[k] > 0.0)) {
        throw ValidationError(ValidationCode::ArmNotSuboptimal,
                              "arm " + std::to_string(k + 1) + " is not suboptimal", k);
    }
    Instance out = instance;
    out.means[k] = instance.means[g.i_star] + eps;
    return out;
}

double kl_divergence(const Instance& nu, const Instance& nu_prime,
                     const std::vector<double>& expected_counts) {
    if (!(nu.feedback == nu_prime.feedback) || nu.k() != nu_prime.k()) {
        throw ValidationError(ValidationCode::FeedbackMismatch,
                              "instances must share the feedback matrix");
    }
    if (expected_counts.size() != nu.k()) {
        throw std::invalid_argument("expected_counts must have one entry per arm");
    }
    std::optional<std::size_t> differing;
    for (std::size_t i = 0; i < nu.k(); ++i) {
        if (nu.means[i] != nu_prime.means[i]) {
            if (differing) {
                throw ValidationError(ValidationCode::DifferInMoreThanOneArm,
                                      "instances differ in more than one arm");
            }
            differing = i;
        }
    }
    if (!differing) return 0.0;
    const std::size_t k = *differing;
    const double diff = nu.means[k] - nu_prime.means[k];
    double total = 0.0;
    for (std::size_t i = 0; i < nu.k(); ++i) {
        total += expected_counts[i] * diff * diff * nu.feedback.weight(i, k) / 2.0;
    }
    return total;
}

FeedbackMatrix make_standard(std::size_t k, double sigma) {
    std::vector<std::vector<double>> rows(k, std::vector<double>(k, kInf));
    for (std::size_t i = 0; i < k; ++i) rows[i][i] = sigma;
    return FeedbackMatrix::from_rows(rows);
}

FeedbackMatrix make_full(std::size_t k, double sigma) {
    return FeedbackMatrix::from_rows(std::vector<std::vector<double>>(k, std::vector<double>(k, sigma)));
}

FeedbackMatrix make_graph(const std::vector<std::vector<bool>>& adjacency, double sigma) {
    const std::size_t k = adjacency.size();
    std::vector<std::vector<double>> rows(k);
    for (std::size_t i = 0; i < k; ++i) {
        if (adjacency[i].size() != k) {
            throw ValidationError(ValidationCode::NonSquare, "adjacency must be square");
        }
        if (!adjacency[i][i]) {
            throw ValidationError(ValidationCode::GraphMissingSelfLoop,
                                  "arm " + std::to_string(i + 1) + " lacks a self loop", i);
        }
        rows[i].resize(k);
        for (std::size_t j = 0; j < k; ++j) rows[i][j] = adjacency[i][j] ? sigma : kInf;
    }
    return FeedbackMatrix::from_rows(rows);
}

FeedbackMatrix make_random(std::size_t k, Rng& rng, const RandomMatrixConfig& config) {
    if (!(config.sigma_lo > 0.0) || !(config.sigma_hi >= config.sigma_lo)) {
        throw std::invalid_argument("random sigma range must satisfy 0 < lo <= hi");
    }
    std::vector<std::vector<double>> rows(k, std::vector<double>(k));
    for (auto& row : rows) {
        for (double& s : row) {
            s = rng.bernoulli(config.p_inf) ? kInf : rng.uniform(config.sigma_lo, config.sigma_hi);
        }
    }
    for (std::size_t j = 0; j < k; ++j) {
        bool observed = false;
        for (std::size_t i = 0; i < k; ++i) observed = observed || rows[i][j] != kInf;
        if (!observed) rows[j][j] = rng.uniform(config.sigma_lo, config.sigma_hi);
    }
    return FeedbackMatrix::from_rows(rows);
}

}  // namespace sidebandit
