#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "heatsys/companion.hpp"
#include "heatsys/osgood.hpp"

namespace heatsys::bounds {

/// Comparison constant linking the two components along a trajectory.
/// For the pair (i, j):
///  - power form (a_i > 0, a_j != 0):
///    M = max{a_j/a_i, h~_i(0) y_j(0)^{a_j} / y_i(0)^{a_i}}, c = M^{-1/a_i},
///    and y_i >= c h~_i(t)^{1/a_i} y_j(t)^{a_j/a_i} holds for all t;
///  - log form (a_i > 0, a_j == 0):
///    M = max{1/a_i, log(y_j(0)) h~_i(0) / y_i(0)^{a_i}}, c = 1/M,
///    and y_i^{a_i} >= c h~_i(t) log y_j(t) holds for all t.
/// Equality in M (instead of a strict bound) still yields a valid
/// nonnegative certificate; the invariant suite validates the resulting c
/// along simulated trajectories.
struct Constants {
    double M;
    double c;
};

Constants power_comparison_constant(const companion::CompanionProblem& prob, int i);
Constants log_comparison_constant(const companion::CompanionProblem& prob, int i);

enum class Case { A, B, C, Unsupported };

struct CaseInfo {
    Case label = Case::Unsupported;
    double a1 = 0, a2 = 0;
    /// Admissible (i, j) role assignments for the case's hypotheses.
    std::vector<std::pair<int, int>> roles;
};

/// Identify which family of bound hypotheses holds. a_i values within
/// 1e-12 of zero count as exactly zero; a declared override bypasses the
/// float test (a_i = 0 is structurally exact when p_ij = p_jj - 1).
CaseInfo case_dispatch(const companion::ExponentMatrix& e,
                       std::optional<Case> declared = std::nullopt);

struct Verdict {
    enum class Kind {
        UpperBound,            // tau_bar bounds the component's maximal time
        GlobalCertificate,     // the component exists globally
        BlowUpCertificate,     // single-power certificate with tau_bar
        Inconclusive,
        HypothesisUnverified,  // a sampled hypothesis failed
    };
    int component = 0;
    Kind kind = Kind::Inconclusive;
    double tau_bar = std::numeric_limits<double>::infinity();
    std::string case_label;
    std::string reason;
    std::map<std::string, double> audit;  // all intermediate quantities
};

/// Case (a) blow-up bound for component j via roles (i, j).
Verdict verdict_a1(const companion::CompanionProblem& prob, int i, int j);
/// Case (a) global certificate for component i via roles (i, j).
Verdict verdict_a2(const companion::CompanionProblem& prob, int i, int j);
/// Case (b) blow-up bound for component j (roles: a_i > 0, a_j = 0).
Verdict verdict_b1(const companion::CompanionProblem& prob, int i, int j);
/// Case (b) global certificate for component i; needs h~_i constant.
Verdict verdict_b2(const companion::CompanionProblem& prob, int i, int j);
/// Case (c) blow-up bound for component m (both a's zero, h~ constant).
/// `declared` trusts a caller-declared case and skips the float zero test
/// on the computed a_i (a_i = 0 is structurally exact when p_ij = p_jj - 1).
Verdict verdict_c1(const companion::CompanionProblem& prob, int m, bool declared = false);
/// Case (c) global certificate for component m.
Verdict verdict_c2(const companion::CompanionProblem& prob, int m, bool declared = false);

/// Single-power blow-up certificate for component i: needs p_ii > 1 and
/// int_0^inf h_i beyond the threshold; also returns the scalar bound tau.
Verdict single_power_criterion(const companion::CompanionProblem& prob, int i);

enum class ClassifierVerdict { BlowUp, NotCovered };

/// Constant-h classifier: blow-up iff p11 > 1 or p22 > 1 or
/// (p11-1)(p22-1) - p12 p21 < 0.
ClassifierVerdict classify_constant_coefficients(const companion::ExponentMatrix& e);

struct Report {
    CaseInfo case_info;
    std::vector<Verdict> verdicts;
    /// Tightest UpperBound across components/orders, if any.
    std::optional<double> system_upper_bound;
    std::optional<ClassifierVerdict> classifier;  // present when h1, h2 constant
};

/// Dispatch the case and evaluate every applicable verdict. When both index
/// orders qualify, all verdicts are computed and the tightest upper bound
/// is also reported at system level.
Report analyze(const companion::CompanionProblem& prob,
               std::optional<Case> declared_case = std::nullopt);

/// Bracket-or-global convenience: runs the companion solver and upgrades a
/// quiet horizon to Global when this module certifies every component.
companion::BracketResult bracket_or_global(const companion::CompanionProblem& prob,
                                           const companion::BracketOptions& opts = {});

struct InequalityCheck {
    bool ok = true;
    double worst_slack = 0.0;  // most negative relative slack observed
    int samples = 0;
};

/// Power comparison along a trajectory: y_i >= c h~_i^{1/a_i} y_j^{a_j/a_i},
/// with 1e-8 relative slack.
InequalityCheck check_power_comparison(const companion::CompanionProblem& prob,
                                   const companion::CompanionTrajectory& traj, int i);
/// Log comparison: y_i^{a_i} >= c h~_i log y_j.
InequalityCheck check_log_comparison(const companion::CompanionProblem& prob,
                                   const companion::CompanionTrajectory& traj, int i);
/// Proportional comparison: y_i >= y_i(0) (y_j / y_j(0))^{h~_i(t)}
/// (constant-free).
InequalityCheck check_proportional_comparison(const companion::CompanionProblem& prob,
                                   const companion::CompanionTrajectory& traj, int i);

}  // namespace heatsys::bounds
