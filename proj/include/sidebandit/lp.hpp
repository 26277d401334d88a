#pragma once

#include <cstddef>
#include <vector>

#include "sidebandit/environment.hpp"
#include "sidebandit/rng.hpp"

namespace sidebandit {

inline constexpr double kDefaultGapFloor = 1e-6;

/// Information requirements for telling each arm's gap apart.
/// Row i reads sum_j coeff(i, j) * c_j >= rhs[i], coeff(i, j) = 1 / sigma_{j,i}^2.
struct ConstraintSet {
    std::size_t k = 0;
    std::vector<double> coeff;  // row-major k x k
    std::vector<double> rhs;

    double operator()(std::size_t row, std::size_t col) const { return coeff[row * k + col]; }
    /// sum_j coeff(row, j) * c_j
    double row_dot(std::size_t row, const std::vector<double>& c) const;
};

/// rhs[i] = 2 / Delta_i^2 for suboptimal arms and 2 / Delta_min^2 for the
/// optimal arm. Arms tied with the optimum get the optimal arm's rhs; if every
/// mean ties, every gap is taken to be `gap_floor`.
ConstraintSet build_constraints(const std::vector<double>& means, const FeedbackMatrix& feedback,
                                double gap_floor = kDefaultGapFloor);

enum class LpStatus { Optimal, Infeasible };

struct LpSolution {
    std::vector<double> c;
    double objective = 0.0;
    LpStatus status = LpStatus::Infeasible;
    std::size_t pivots = 0;
};

/// min sum_i c_i * deltas[i]  s.t.  coeff * c >= rhs, c >= 0.
///
/// Two-phase dense tableau simplex with Bland's rule: entering variable is the
/// lowest-index column with negative reduced cost, ratio-test ties go to the
/// lowest-index basic variable. The returned vertex therefore depends only on
/// the inputs. Rows are normalized to unit rhs before pivoting and the final
/// point is rescaled onto the feasible side if rounding left it short.
/// `deltas` must be nonnegative.
LpSolution solve(const ConstraintSet& cs, const std::vector<double>& deltas);

/// Objective of the exploration LP at the true means: the asymptotic regret
/// constant no consistent policy can beat (per unit of log T).
double lower_bound_value(const Instance& instance, double gap_floor = kDefaultGapFloor);

/// True iff coeff * scaled_counts >= rhs row by row. Exact comparison.
bool membership(const std::vector<double>& scaled_counts, const ConstraintSet& cs);

/// Rows whose slack is within tol * max(1, rhs).
std::vector<std::size_t> active_constraints(const ConstraintSet& cs, const std::vector<double>& c,
                                            double tol = 1e-9);

/// Lower estimate of the worst-case LP solution over the l-infinity ball of
/// radius eps around the means: component-wise max of c*(mu') over the
/// center, the 2K axis points mu +- eps e_i, the ball corners (all 2^K of them
/// when K <= kMaxCornerArms, otherwise the K corners that shrink one arm's gap
/// the most), then `trials` uniform draws from the ball.
inline constexpr std::size_t kMaxCornerArms = 10;
std::vector<double> epsilon_worst_case(const Instance& instance, double eps, std::size_t trials,
                                       Rng& rng, double gap_floor = kDefaultGapFloor);

}  // namespace sidebandit
