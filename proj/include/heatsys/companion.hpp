#pragma once

#include <array>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "heatsys/coeffs.hpp"

namespace heatsys::companion {

/// The four coupling powers p_ij >= 0 plus the derived quantities of the
/// theory. Derived values are recomputed on every call, never stored.
struct ExponentMatrix {
    double p11 = 0, p12 = 0, p21 = 0, p22 = 0;

    /// p(i, j) with 1-based component indices.
    double p(int i, int j) const {
        return i == 1 ? (j == 1 ? p11 : p12) : (j == 2 ? p22 : p21);
    }
    /// a_i = p_ji - p_ii + 1 (j the other index).
    double a(int i) const { return p(3 - i, i) - p(i, i) + 1.0; }
    /// alpha_i = p_ii + p_ij * a_i / a_j; requires a_j != 0.
    double alpha(int i) const {
        const int j = 3 - i;
        return p(i, i) + p(i, j) * a(i) / a(j);
    }
    bool valid() const { return p11 >= 0 && p12 >= 0 && p21 >= 0 && p22 >= 0; }
};

struct CompanionProblem {
    ExponentMatrix exponents;
    coeffs::TimeCoefficient h1, h2;
    double y1_0 = 1.0, y2_0 = 1.0;  // the uniform norms of the initial data; > 0

    const coeffs::TimeCoefficient& h(int i) const { return i == 1 ? h1 : h2; }
    double y0(int i) const { return i == 1 ? y1_0 : y2_0; }
};

struct TrajectorySample {
    double t, y1, y2;
    double y(int i) const { return i == 1 ? y1 : y2; }
};

enum class RunStatus { Completed, BlowUp, BudgetExceeded };

struct CompanionTrajectory {
    std::vector<TrajectorySample> samples;  // strictly increasing t
    RunStatus status = RunStatus::Completed;
    double t_end = 0.0;       // last time reached
    double bracket_lo = 0.0;  // BlowUp only: last time with max y <= escape
    double bracket_hi = 0.0;  // BlowUp only: rigorous upper bound on tau

    /// Hermite interpolation between samples; slopes come from the ODE
    /// right-hand side, so the dense output keeps the solver's accuracy.
    double value_at(double t, int component) const;
    std::shared_ptr<const CompanionProblem> problem;  // kept for value_at
};

struct SolveControls {
    double rel_tol = 1e-10;
    double escape_threshold = 1e12;          // Y_max
    long max_steps = 10'000'000;
    double dt_max = std::numeric_limits<double>::infinity();
    std::vector<double> record_times;        // hit exactly; must be sorted
};

/// Adaptive Dormand-Prince 5(4) integration of the companion system in the
/// log variables l_i = log y_i. Stops at T_end, at the escape threshold, or
/// on budget/step-size underflow.
CompanionTrajectory solve(const CompanionProblem& prob, double T_end,
                          const SolveControls& controls = {});

struct BracketOptions {
    double horizon = 1e4;
    bool certified_global = false;  // caller-provided (e.g. a bounds verdict)
    SolveControls controls;
};

struct BracketResult {
    enum class Kind { Bracket, Global, Inconclusive };
    Kind kind = Kind::Inconclusive;
    double t_lo = 0.0, t_hi = 0.0;  // Bracket
    double horizon = 0.0;           // Global/Inconclusive: горizon reached
    std::array<double, 2> y_final{0.0, 0.0};
    std::string note;
};

/// Bracket the blow-up time: t_lo is the last time with max y <= Y_max and
/// t_hi adds a rigorous tail bound (frozen-slow-component scalar bound
/// and/or the min-component composite bound; see implementation notes).
/// Without an escape the result is Global when the caller certifies it,
/// Inconclusive otherwise.
BracketResult blow_up_bracket(const CompanionProblem& prob,
                              const BracketOptions& opts = {});

/// Both sides of the power-product identity
///   a^p b^q - c^p d^q = p(a-c) I1 + q(b-d) I2
/// with I1, I2 the unit-interval quadratures over the interpolation
/// segments. Returns {lhs, rhs}.
std::pair<double, double> power_product_identity(double a, double b, double c, double d,
                                                 double p, double q,
                                                 double rel_tol = 1e-10);

enum class Direction { Super, Sub };

struct ComparisonReport {
    bool hypothesis_ok = false;
    bool conclusion_ok = false;
    double worst_hypothesis_margin = 0.0;  // most negative margin observed
    double worst_conclusion_gap = 0.0;
    bool pass() const { return hypothesis_ok && conclusion_ok; }
};

/// Consistency harness for the comparison principle: perturb the solved
/// trajectory multiplicatively by delta(t) = delta_scale * t / (1 + t),
/// verify the integral inequality in the chosen direction by quadrature,
/// then check the pointwise ordering. Violations beyond 1e-8 signal a
/// pipeline bug.
ComparisonReport comparison_check(const CompanionProblem& prob, Direction dir,
                                  double horizon, double delta_scale = 0.01);

/// CSV columns t,y1,y2 at 17 significant digits.
void write_csv(const CompanionTrajectory& traj, std::ostream& out);

}  // namespace heatsys::companion
