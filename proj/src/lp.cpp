#include "sidebandit/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>

namespace sidebandit {

double ConstraintSet::row_dot(std::size_t row, const std::vector<double>& c) const {
    double s = 0.0;
    for (std::size_t j = 0; j < k; ++j) s += (*this)(row, j) * c[j];
    return s;
}

ConstraintSet build_constraints(const std::vector<double>& means, const FeedbackMatrix& feedback,
                                double gap_floor) {
    if (means.size() != feedback.k()) throw std::invalid_argument("means and feedback sizes differ");
    if (!(gap_floor > 0.0)) throw std::invalid_argument("gap_floor must be positive");
    const std::size_t k = means.size();
    const GapInfo g = gaps(means);

    ConstraintSet cs;
    cs.k = k;
    cs.coeff.resize(k * k);
    cs.rhs.resize(k);
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) cs.coeff[i * k + j] = feedback.weight(j, i);
    }
    for (std::size_t i = 0; i < k; ++i) {
        double gap = 0.0;
        if (!g.delta_min) {
            gap = gap_floor;
        } else if (i == g.i_star || g.deltas[i] == 0.0) {
            gap = *g.delta_min;
        } else {
            gap = g.deltas[i];
        }
        cs.rhs[i] = 2.0 / (gap * gap);
    }
    return cs;
}

namespace {

// Dense tableau over columns [c (k) | surplus (k) | artificial (k) | rhs].
// Columns and then rows are scaled so their largest coefficient is 1; c is
// mapped back in primal(). Without this, rhs values like 2 / floor^2 push
// every coefficient below the pivot tolerance.
class Tableau {
public:
    Tableau(const ConstraintSet& cs) : m_(cs.k), n_(3 * cs.k), rows_(cs.k, std::vector<double>(3 * cs.k + 1, 0.0)),
                                       obj_(3 * cs.k + 1, 0.0), basis_(cs.k), col_scale_(cs.k, 1.0) {
        const std::size_t k = cs.k;
        for (std::size_t j = 0; j < k; ++j) {
            double big = 0.0;
            for (std::size_t i = 0; i < k; ++i) big = std::max(big, cs(i, j));
            if (big > 0.0) col_scale_[j] = big;
        }
        for (std::size_t i = 0; i < k; ++i) {
            double big = 0.0;
            for (std::size_t j = 0; j < k; ++j) big = std::max(big, cs(i, j) / col_scale_[j]);
            for (std::size_t j = 0; j < k; ++j) rows_[i][j] = cs(i, j) / col_scale_[j] / big;
            rows_[i][k + i] = -1.0;
            rows_[i][2 * k + i] = 1.0;
            rows_[i][n_] = cs.rhs[i] / big;
            rhs_total_ += rows_[i][n_];
            basis_[i] = 2 * k + i;
        }
    }

    double rhs_total() const { return rhs_total_; }

    // Phase 1 minimizes the sum of artificials. Returns the optimum value.
    double phase_one() {
        std::fill(obj_.begin(), obj_.end(), 0.0);
        for (const auto& row : rows_) {
            for (std::size_t j = 0; j < 2 * m_; ++j) obj_[j] -= row[j];
            obj_[n_] -= row[n_];
        }
        iterate(2 * m_, 1e-12);
        return -obj_[n_];
    }

    void drive_out_artificials() {
        for (std::size_t r = 0; r < m_; ++r) {
            if (basis_[r] < 2 * m_) continue;
            for (std::size_t j = 0; j < 2 * m_; ++j) {
                if (std::abs(rows_[r][j]) > kPivotTol) {
                    pivot(r, j);
                    break;
                }
            }
        }
    }

    void phase_two(const std::vector<double>& deltas) {
        const double scale = std::max(1.0, *std::max_element(deltas.begin(), deltas.end()));
        std::vector<double> cost(n_, 0.0);
        for (std::size_t j = 0; j < m_; ++j) cost[j] = deltas[j] / col_scale_[j];
        std::fill(obj_.begin(), obj_.end(), 0.0);
        for (std::size_t j = 0; j < 2 * m_; ++j) obj_[j] = cost[j];
        for (std::size_t r = 0; r < m_; ++r) {
            const double cb = cost[basis_[r]];
            if (cb == 0.0) continue;
            for (std::size_t j = 0; j <= n_; ++j) obj_[j] -= cb * rows_[r][j];
        }
        iterate(2 * m_, 1e-12 * scale);
    }

    std::vector<double> primal() const {
        std::vector<double> c(m_, 0.0);
        for (std::size_t r = 0; r < m_; ++r) {
            if (basis_[r] < m_) c[basis_[r]] = std::max(0.0, rows_[r][n_]) / col_scale_[basis_[r]];
        }
        return c;
    }

    std::size_t pivots() const { return pivots_; }
    const std::vector<std::size_t>& basis() const { return basis_; }

private:
    static constexpr double kPivotTol = 1e-12;
    static constexpr std::size_t kMaxPivots = 1'000'000;

    // Both phases are bounded below (nonnegative costs, or a sum of
    // artificials), so a column with negative reduced cost and no positive
    // entry is rounding noise; it is skipped until the next pivot.
    void iterate(std::size_t allowed_cols, double rc_tol) {
        std::vector<bool> skip(allowed_cols, false);
        while (true) {
            std::size_t enter = allowed_cols;
            for (std::size_t j = 0; j < allowed_cols; ++j) {
                if (skip[j]) continue;
                // Reduced costs carry rounding noise proportional to the column's size.
                double col_scale = 1.0;
                for (const auto& row : rows_) col_scale = std::max(col_scale, std::abs(row[j]));
                if (obj_[j] < -rc_tol * col_scale) {
                    enter = j;
                    break;
                }
            }
            if (enter == allowed_cols) return;

            std::size_t leave = m_;
            double best_ratio = std::numeric_limits<double>::infinity();
            for (std::size_t r = 0; r < m_; ++r) {
                const double a = rows_[r][enter];
                if (a <= kPivotTol) continue;
                const double ratio = rows_[r][n_] / a;
                if (ratio < best_ratio || (ratio == best_ratio && basis_[r] < basis_[leave])) {
                    best_ratio = ratio;
                    leave = r;
                }
            }
            if (leave == m_) {
                skip[enter] = true;
                continue;
            }
            pivot(leave, enter);
            std::fill(skip.begin(), skip.end(), false);
            if (pivots_ > kMaxPivots) throw std::logic_error("simplex pivot limit exceeded");
        }
    }

    void pivot(std::size_t r, std::size_t col) {
        ++pivots_;
        auto& pr = rows_[r];
        const double p = pr[col];
        for (double& v : pr) v /= p;
        pr[col] = 1.0;
        auto eliminate = [&](std::vector<double>& row) {
            const double f = row[col];
            if (f == 0.0) return;
            for (std::size_t j = 0; j <= n_; ++j) row[j] -= f * pr[j];
            row[col] = 0.0;
        };
        for (std::size_t i = 0; i < m_; ++i) {
            if (i != r) eliminate(rows_[i]);
        }
        eliminate(obj_);
        basis_[r] = col;
    }

    std::size_t m_;
    std::size_t n_;
    std::vector<std::vector<double>> rows_;
    std::vector<double> obj_;
    std::vector<std::size_t> basis_;
    std::vector<double> col_scale_;
    double rhs_total_ = 0.0;
    std::size_t pivots_ = 0;
};

// Recomputes the vertex of `basis` from the unscaled constraints in extended
// precision: the tableau's copy of it drifts on badly scaled rows. Columns
// below k are c, k..2k-1 surplus, anything else an artificial left at zero.
std::optional<std::vector<double>> basic_solution(const ConstraintSet& cs, const std::vector<std::size_t>& basis) {
    const std::size_t k = cs.k;
    using ld = long double;
    std::vector<std::vector<ld>> a(k, std::vector<ld>(k + 1, 0.0L));
    for (std::size_t r = 0; r < k; ++r) {
        for (std::size_t b = 0; b < k; ++b) {
            const std::size_t col = basis[b];
            if (col < k) {
                a[r][b] = cs(r, col);
            } else if (col < 2 * k) {
                a[r][b] = (col - k == r) ? -1.0L : 0.0L;
            } else {
                a[r][b] = (col - 2 * k == r) ? 1.0L : 0.0L;
            }
        }
        a[r][k] = cs.rhs[r];
    }
    for (std::size_t col = 0; col < k; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < k; ++r) {
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        }
        if (a[piv][col] == 0.0L) return std::nullopt;
        std::swap(a[piv], a[col]);
        for (std::size_t r = 0; r < k; ++r) {
            if (r == col || a[r][col] == 0.0L) continue;
            const ld f = a[r][col] / a[col][col];
            for (std::size_t j = col; j <= k; ++j) a[r][j] -= f * a[col][j];
        }
    }
    std::vector<double> c(k, 0.0);
    for (std::size_t b = 0; b < k; ++b) {
        if (basis[b] < k) c[basis[b]] = std::max(0.0, static_cast<double>(a[b][k] / a[b][b]));
    }
    return c;
}

// Scales c up until every row holds without tolerance.
void restore_feasibility(const ConstraintSet& cs, std::vector<double>& c) {
    for (int attempt = 0; attempt < 8; ++attempt) {
        double worst = 1.0;
        for (std::size_t i = 0; i < cs.k; ++i) {
            const double lhs = cs.row_dot(i, c);
            if (lhs < cs.rhs[i]) worst = std::max(worst, cs.rhs[i] / lhs);
        }
        if (worst <= 1.0) return;
        const double f = worst * (1.0 + 4.0 * std::numeric_limits<double>::epsilon());
        for (double& v : c) v *= f;
    }
}

}  // namespace

LpSolution solve(const ConstraintSet& cs, const std::vector<double>& deltas) {
    if (deltas.size() != cs.k) throw std::invalid_argument("deltas size must equal K");
    for (double d : deltas) {
        if (!(d >= 0.0) || !std::isfinite(d)) throw std::invalid_argument("deltas must be finite and nonnegative");
    }
    LpSolution sol;
    sol.c.assign(cs.k, 0.0);
    for (std::size_t i = 0; i < cs.k; ++i) {
        bool any = false;
        for (std::size_t j = 0; j < cs.k; ++j) any = any || cs(i, j) > 0.0;
        if (!any || !(cs.rhs[i] > 0.0) || !std::isfinite(cs.rhs[i])) return sol;
    }

    Tableau tab(cs);
    if (tab.phase_one() > 1e-9 * std::max(1.0, tab.rhs_total())) {
        sol.pivots = tab.pivots();
        return sol;
    }
    tab.drive_out_artificials();
    tab.phase_two(deltas);

    sol.c = basic_solution(cs, tab.basis()).value_or(tab.primal());
    restore_feasibility(cs, sol.c);
    sol.status = LpStatus::Optimal;
    sol.pivots = tab.pivots();
    sol.objective = 0.0;
    for (std::size_t i = 0; i < cs.k; ++i) sol.objective += sol.c[i] * deltas[i];
    return sol;
}

double lower_bound_value(const Instance& instance, double gap_floor) {
    const auto cs = build_constraints(instance.means, instance.feedback, gap_floor);
    const auto sol = solve(cs, gaps(instance.means).deltas);
    if (sol.status != LpStatus::Optimal) throw std::runtime_error("exploration LP is infeasible");
    return sol.objective;
}

bool membership(const std::vector<double>& scaled_counts, const ConstraintSet& cs) {
    for (std::size_t i = 0; i < cs.k; ++i) {
        if (!(cs.row_dot(i, scaled_counts) >= cs.rhs[i])) return false;
    }
    return true;
}

std::vector<std::size_t> active_constraints(const ConstraintSet& cs, const std::vector<double>& c, double tol) {
    std::vector<std::size_t> active;
    for (std::size_t i = 0; i < cs.k; ++i) {
        if (cs.row_dot(i, c) - cs.rhs[i] <= tol * std::max(1.0, cs.rhs[i])) active.push_back(i);
    }
    return active;
}

std::vector<double> epsilon_worst_case(const Instance& instance, double eps, std::size_t trials, Rng& rng,
                                       double gap_floor) {
    if (!(eps >= 0.0)) throw std::invalid_argument("eps must be nonnegative");
    const std::size_t k = instance.k();
    const auto& mu = instance.means;

    auto lp_at = [&](const std::vector<double>& m) {
        const auto sol = solve(build_constraints(m, instance.feedback, gap_floor), gaps(m).deltas);
        if (sol.status != LpStatus::Optimal) throw std::runtime_error("exploration LP is infeasible");
        return sol.c;
    };

    std::vector<double> worst = lp_at(mu);
    auto absorb = [&](const std::vector<double>& m) {
        const auto c = lp_at(m);
        for (std::size_t j = 0; j < k; ++j) worst[j] = std::max(worst[j], c[j]);
    };
    if (eps == 0.0) return worst;

    std::vector<double> p(k);
    for (std::size_t i = 0; i < k; ++i) {
        for (double sign : {-1.0, 1.0}) {
            p = mu;
            p[i] += sign * eps;
            absorb(p);
        }
    }
    if (k <= kMaxCornerArms) {
        for (std::size_t mask = 0; mask < (std::size_t{1} << k); ++mask) {
            for (std::size_t i = 0; i < k; ++i) p[i] = mu[i] + (((mask >> i) & 1U) ? eps : -eps);
            absorb(p);
        }
    } else {
        for (std::size_t j = 0; j < k; ++j) {
            for (std::size_t i = 0; i < k; ++i) p[i] = mu[i] + (i == j ? eps : -eps);
            absorb(p);
        }
    }
    for (std::size_t s = 0; s < trials; ++s) {
        for (std::size_t i = 0; i < k; ++i) p[i] = rng.uniform(mu[i] - eps, mu[i] + eps);
        absorb(p);
    }
    return worst;
}

}  // namespace sidebandit
