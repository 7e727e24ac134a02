#include "heatsys/companion.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace heatsys::companion {

namespace {

using State = std::array<double, 2>;  // log variables l_i = log y_i

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

struct LogRhs {
    const CompanionProblem* prob;

    State operator()(double t, const State& l) const {
        State d;
        for (int i = 1; i <= 2; ++i) {
            const int j = 3 - i;
            const auto& e = prob->exponents;
            double arg = (e.p(i, i) - 1.0) * l[i - 1] + e.p(i, j) * l[j - 1];
            arg = std::min(arg, 700.0);  // saturate instead of overflowing exp
            d[i - 1] = prob->h(i).eval(t) * std::exp(arg);
        }
        return d;
    }
};

struct StepResult {
    State y_new;
    State k_last;  // FSAL stage
    double err;    // scaled error norm
};

StepResult dopri_step(const LogRhs& f, double t, const State& y, const State& k1, double h,
                      double rel_tol) {
    State k2, k3, k4, k5, k6, k7, yt;

    for (int m = 0; m < 2; ++m) yt[m] = y[m] + h * a21 * k1[m];
    k2 = f(t + c2 * h, yt);
    for (int m = 0; m < 2; ++m) yt[m] = y[m] + h * (a31 * k1[m] + a32 * k2[m]);
    k3 = f(t + c3 * h, yt);
    for (int m = 0; m < 2; ++m) yt[m] = y[m] + h * (a41 * k1[m] + a42 * k2[m] + a43 * k3[m]);
    k4 = f(t + c4 * h, yt);
    for (int m = 0; m < 2; ++m)
        yt[m] = y[m] + h * (a51 * k1[m] + a52 * k2[m] + a53 * k3[m] + a54 * k4[m]);
    k5 = f(t + c5 * h, yt);
    for (int m = 0; m < 2; ++m)
        yt[m] = y[m] + h * (a61 * k1[m] + a62 * k2[m] + a63 * k3[m] + a64 * k4[m] + a65 * k5[m]);
    k6 = f(t + h, yt);
    State y_new;
    for (int m = 0; m < 2; ++m)
        y_new[m] = y[m] + h * (b1 * k1[m] + b3 * k3[m] + b4 * k4[m] + b5 * k5[m] + b6 * k6[m]);
    k7 = f(t + h, y_new);

    double err = 0.0;
    for (int m = 0; m < 2; ++m) {
        const double ee = h * (e1 * k1[m] + e3 * k3[m] + e4 * k4[m] + e5 * k5[m] + e6 * k6[m] +
                               e7 * k7[m]);
        // Error measured on the log variables: absolute there is relative on y.
        const double sc = rel_tol * (1.0 + std::max(std::abs(y[m]), std::abs(y_new[m])));
        err += (ee / sc) * (ee / sc);
    }
    return {y_new, k7, std::sqrt(0.5 * err)};
}

TrajectorySample to_sample(double t, const State& l) {
    // The final crossing micro-step can leave the log state far past the
    // threshold; keep the recorded values finite.
    auto y = [](double lv) { return std::exp(std::min(lv, 700.0)); };
    return {t, y(l[0]), y(l[1])};
}

// Minimum of min(h1, h2) sampled over a short window; a mild deflation
// accounts for sampling between nodes.
double sampled_h_min(const CompanionProblem& prob, int i, double t0, double window) {
    double lo = std::numeric_limits<double>::infinity();
    for (int k = 0; k <= 256; ++k) {
        const double t = t0 + window * k / 256.0;
        lo = std::min(lo, prob.h(i).eval(t));
    }
    return lo * (1.0 - 1e-3);
}

// Rigorous bound on the remaining time to blow-up once max y has reached
// the escape threshold. Candidates:
//  - frozen-component scalar bound for a component with p_ii > 1;
//  - composite bound on m = min(y1, y2), valid when
//    min{p11+p12, p21+p22} > 1.
std::optional<double> tail_bound(const CompanionProblem& prob, double t_lo, double y1,
                                 double y2) {
    const auto& e = prob.exponents;
    std::optional<double> best;
    auto consider = [&](double v) {
        if (std::isfinite(v) && v > 0 && (!best || v < *best)) best = v;
    };

    // Freeze the other component at its current value; scalar power law.
    for (int i = 1; i <= 2; ++i) {
        const int j = 3 - i;
        const double pii = e.p(i, i), pij = e.p(i, j);
        if (pii <= 1.0) continue;
        const double yi = i == 1 ? y1 : y2;
        const double yj = i == 1 ? y2 : y1;
        double guess = 1.0;
        for (int it = 0; it < 8; ++it) {
            const double h_lo = sampled_h_min(prob, i, t_lo, guess);
            if (!(h_lo > 0)) break;
            const double delta =
                std::pow(yi, 1.0 - pii) / ((pii - 1.0) * h_lo * std::pow(yj, pij));
            if (delta <= guess) {
                consider(delta);
                break;
            }
            guess = 2.0 * delta;
        }
    }

    // Composite bound via m = min(y1, y2): m' >= h_lo * m^Q below 1 and
    // m' >= h_lo * m^q above 1, with q = min, Q = max of the row sums.
    const double q = std::min(e.p11 + e.p12, e.p21 + e.p22);
    const double Q = std::max(e.p11 + e.p12, e.p21 + e.p22);
    if (q > 1.0) {
        const double m0 = std::min(y1, y2);
        double guess = 1.0;
        for (int it = 0; it < 8; ++it) {
            double h_lo = std::min(sampled_h_min(prob, 1, t_lo, guess),
                                   sampled_h_min(prob, 2, t_lo, guess));
            if (!(h_lo > 0)) break;
            double time_below_one = 0.0;
            if (m0 < 1.0) time_below_one = (std::pow(m0, 1.0 - Q) - 1.0) / (Q - 1.0);
            const double time_above = std::pow(std::max(m0, 1.0), 1.0 - q) / (q - 1.0);
            const double delta = (time_below_one + time_above) / h_lo;
            if (delta <= guess) {
                consider(delta);
                break;
            }
            guess = 2.0 * delta;
        }
    }
    return best;
}

}  // namespace

double CompanionTrajectory::value_at(double t, int component) const {
    if (samples.empty()) throw std::runtime_error("trajectory: no samples");
    if (t <= samples.front().t) return samples.front().y(component);
    if (t >= samples.back().t) return samples.back().y(component);
    auto it = std::lower_bound(samples.begin(), samples.end(), t,
                               [](const TrajectorySample& s, double v) { return s.t < v; });
    const TrajectorySample& hi = *it;
    const TrajectorySample& lo = *(it - 1);
    if (hi.t == t) return hi.y(component);
    const double w = hi.t - lo.t;
    const double u = (t - lo.t) / w;

    auto slope = [&](const TrajectorySample& s, int i) {
        if (!problem) return 0.0;
        const int j = 3 - i;
        const auto& e = problem->exponents;
        return problem->h(i).eval(s.t) * std::pow(s.y(i), e.p(i, i)) *
               std::pow(s.y(j), e.p(i, j));
    };
    const double y0 = lo.y(component), y1v = hi.y(component);
    const double m0 = slope(lo, component) * w, m1 = slope(hi, component) * w;
    const double u2 = u * u, u3 = u2 * u;
    return (2 * u3 - 3 * u2 + 1) * y0 + (u3 - 2 * u2 + u) * m0 +
           (-2 * u3 + 3 * u2) * y1v + (u3 - u2) * m1;
}

CompanionTrajectory solve(const CompanionProblem& prob, double T_end,
                          const SolveControls& controls) {
    if (!(T_end > 0)) throw std::invalid_argument("companion::solve: T_end must be > 0");
    if (!prob.exponents.valid())
        throw std::invalid_argument("companion::solve: exponents must be >= 0");
    if (!(prob.y1_0 > 0 && prob.y2_0 > 0))
        throw std::invalid_argument("companion::solve: initial values must be positive");

    CompanionTrajectory traj;
    traj.problem = std::make_shared<CompanionProblem>(prob);
    const LogRhs rhs{traj.problem.get()};
    const double l_escape = std::log(controls.escape_threshold);

    State l{std::log(prob.y1_0), std::log(prob.y2_0)};
    double t = 0.0;
    traj.samples.push_back(to_sample(t, l));

    std::size_t next_record = 0;
    auto skip_past_records = [&](double now) {
        while (next_record < controls.record_times.size() &&
               controls.record_times[next_record] <= now)
            ++next_record;
    };
    skip_past_records(0.0);

    State k1 = rhs(t, l);
    double dt = std::min({1e-4, T_end, controls.dt_max});
    double facold = 1e-4;
    long steps = 0;
    bool localizing = false;  // bisecting onto the escape threshold

    auto finish_blow_up = [&](double t_before, const State& l_before, double step,
                              const State& l_cross) {
        // The crossing micro-step is recorded so the trajectory ends just
        // past the threshold. The reported bracket is padded by the
        // solver's time accuracy so it contains the true blow-up time.
        traj.status = RunStatus::BlowUp;
        const double pad = 1e-7 * std::max(t_before, 1e-3);
        traj.bracket_lo = t_before - pad;
        const auto stable = to_sample(t_before, l_before);
        const auto bound = tail_bound(prob, t_before, stable.y1, stable.y2);
        traj.bracket_hi = bound ? t_before + *bound * 1.001 + pad
                                : std::numeric_limits<double>::infinity();
        traj.samples.push_back(to_sample(t_before + step, l_cross));
        traj.t_end = t_before + step;
    };

    while (t < T_end) {
        if (++steps > controls.max_steps) {
            traj.status = RunStatus::BudgetExceeded;
            traj.t_end = t;
            return traj;
        }
        // Smallest step that still advances t in floating point; near the
        // blow-up asymptote the dynamics genuinely require ulp-sized steps.
        const double ulp_floor = 8.0 * std::numeric_limits<double>::epsilon() *
                                 std::max(t, 1e-3);
        double step = std::min(dt, controls.dt_max);
        bool clamped = false;
        if (t + step >= T_end) {
            step = T_end - t;
            clamped = true;
        }
        if (next_record < controls.record_times.size()) {
            const double tr = controls.record_times[next_record];
            if (t + step >= tr && tr > t) {
                step = tr - t;
                clamped = true;
            }
        }
        if (step < ulp_floor) step = ulp_floor;

        StepResult r = dopri_step(rhs, t, l, k1, step, controls.rel_tol / 8.0);

        const double l_max_new = std::max(r.y_new[0], r.y_new[1]);
        if (!(l_max_new <= l_escape)) {  // crossing; also catches inf/NaN states
            // Bisect the step onto the threshold; once at floating point
            // resolution, accept the crossing and report the bracket.
            localizing = true;
            const double half = 0.5 * step;
            if (half <= ulp_floor) {
                finish_blow_up(t, l, step, r.y_new);
                return traj;
            }
            dt = half;
            continue;
        }
        if (!std::isfinite(r.err) || r.err > 1.0) {
            if (step > ulp_floor * 1.001) {
                const double errv = std::isfinite(r.err) ? r.err : 1e10;
                const double fac = std::max(0.2, 0.9 * std::pow(errv, -0.2));
                dt = step * fac;
                continue;
            }
            // No refinement possible at ulp scale; take the step.
        }

        t += step;
        l = r.y_new;
        k1 = r.k_last;
        if (next_record < controls.record_times.size()) {
            // Snap onto a record time reached up to roundoff so callers can
            // look the sample up exactly.
            const double tr = controls.record_times[next_record];
            if (std::abs(t - tr) <= 4e-15 * std::max(1.0, tr)) t = tr;
        }
        traj.samples.push_back(to_sample(t, l));
        skip_past_records(t);

        if (!localizing && std::isfinite(r.err)) {
            const double errv = std::max(r.err, 1e-10);
            double fac = std::pow(errv, 0.17) / (0.9 * std::pow(facold, 0.04));
            fac = std::clamp(fac, 0.2, 5.0);
            facold = errv;
            if (!clamped) dt = step / fac;
        }
        // While localizing, dt keeps its last halved value; growth forces
        // further halving until the bracket is reported.
    }

    traj.status = RunStatus::Completed;
    traj.t_end = t;
    return traj;
}

BracketResult blow_up_bracket(const CompanionProblem& prob, const BracketOptions& opts) {
    CompanionTrajectory traj = solve(prob, opts.horizon, opts.controls);
    BracketResult res;
    res.y_final = {traj.samples.back().y1, traj.samples.back().y2};
    if (traj.status == RunStatus::BlowUp) {
        if (opts.certified_global) {
            // Exponential-type growth reaches the escape threshold without
            // blowing up; the caller's certificate takes precedence.
            res.kind = BracketResult::Kind::Global;
            res.horizon = traj.bracket_lo;
            res.note = "certified global; escape threshold reached by growth";
            return res;
        }
        if (std::isfinite(traj.bracket_hi)) {
            res.kind = BracketResult::Kind::Bracket;
            res.t_lo = traj.bracket_lo;
            res.t_hi = traj.bracket_hi;
            return res;
        }
        res.kind = BracketResult::Kind::Inconclusive;
        res.horizon = traj.bracket_lo;
        res.note = "escape threshold reached but no rigorous tail bound applies";
        return res;
    }
    res.horizon = traj.t_end;
    if (traj.status == RunStatus::Completed && opts.certified_global) {
        res.kind = BracketResult::Kind::Global;
        res.note = "certified global; integrated to horizon";
    } else {
        res.kind = BracketResult::Kind::Inconclusive;
        res.note = traj.status == RunStatus::Completed
                       ? "no escape by horizon and no global certificate"
                       : "integration budget exceeded";
    }
    return res;
}

std::pair<double, double> power_product_identity(double a, double b, double c, double d,
                                                 double p, double q, double rel_tol) {
    if (a < 0 || b < 0 || c < 0 || d < 0 || p < 0 || q < 0)
        throw std::invalid_argument("power_product_identity: inputs must be >= 0");
    const double lhs = std::pow(a, p) * std::pow(b, q) - std::pow(c, p) * std::pow(d, q);

    quadrature::Options opt;
    opt.rel_tol = rel_tol;
    auto seg1 = [&](double t) { return c + t * (a - c); };
    auto seg2 = [&](double t) { return d + t * (b - d); };

    // An endpoint sitting at zero under a negative power is an integrable
    // singularity for p, q in (0, 1); map it away with t = u^2.
    auto term = [&](double coeff, double e1x, double e2x) -> double {
        if (coeff == 0.0) return 0.0;
        auto g = [&](double t) { return std::pow(seg1(t), e1x) * std::pow(seg2(t), e2x); };
        const bool sing_left = (e1x < 0 && seg1(0.0) == 0.0) || (e2x < 0 && seg2(0.0) == 0.0);
        const bool sing_right = (e1x < 0 && seg1(1.0) == 0.0) || (e2x < 0 && seg2(1.0) == 0.0);
        if (sing_left && sing_right)
            throw std::invalid_argument("power_product_identity: singular at both endpoints");
        if (sing_left)
            return coeff * quadrature::integrate(
                               [&](double u) { return 2.0 * u * g(u * u); }, 0.0, 1.0, opt);
        if (sing_right)
            return coeff * quadrature::integrate(
                               [&](double u) { return 2.0 * u * g(1.0 - u * u); }, 0.0, 1.0, opt);
        return coeff * quadrature::integrate(g, 0.0, 1.0, opt);
    };

    const double rhs = term(p * (a - c), p - 1.0, q) + term(q * (b - d), p, q - 1.0);
    return {lhs, rhs};
}

ComparisonReport comparison_check(const CompanionProblem& prob, Direction dir, double horizon,
                                  double delta_scale) {
    // Record the trajectory exactly at the composite quadrature nodes so the
    // hypothesis integral needs no interpolation.
    const int panels = 32;
    const int order = 3;
    const double* gx;
    const double* gw;
    quadrature::gauss_legendre(order, &gx, &gw);

    SolveControls controls;
    std::vector<double> times;
    for (int k = 0; k < panels; ++k) {
        const double a = horizon * k / panels, b = horizon * (k + 1) / panels;
        for (int m = 0; m < order; ++m)
            times.push_back(0.5 * (a + b) + 0.5 * (b - a) * gx[m]);
        times.push_back(b);
    }
    std::sort(times.begin(), times.end());
    controls.record_times = times;
    CompanionTrajectory traj = solve(prob, horizon, controls);
    if (traj.status != RunStatus::Completed)
        throw std::runtime_error("comparison_check: trajectory did not reach the horizon");

    auto delta = [&](double t) { return delta_scale * t / (1.0 + t); };
    const double sign = dir == Direction::Super ? 1.0 : -1.0;
    auto z = [&](double t, int i) { return traj.value_at(t, i) * (1.0 + sign * delta(t)); };

    ComparisonReport rep;
    rep.hypothesis_ok = true;
    rep.conclusion_ok = true;

    const auto& e = prob.exponents;
    std::array<double, 2> integral{0.0, 0.0};
    for (int k = 0; k < panels; ++k) {
        const double a = horizon * k / panels, b = horizon * (k + 1) / panels;
        for (int i = 1; i <= 2; ++i) {
            const int j = 3 - i;
            double s = 0.0;
            for (int m = 0; m < order; ++m) {
                const double t = 0.5 * (a + b) + 0.5 * (b - a) * gx[m];
                s += gw[m] * prob.h(i).eval(t) * std::pow(z(t, i), e.p(i, i)) *
                     std::pow(z(t, j), e.p(i, j));
            }
            integral[i - 1] += 0.5 * (b - a) * s;
        }
        const double t_check = b;
        for (int i = 1; i <= 2; ++i) {
            const double zi = z(t_check, i);
            const double margin = sign * (zi - prob.y0(i) - integral[i - 1]);
            // Super: z >= z(0) + int(...); Sub: reversed.
            if (margin < -1e-8 * (1.0 + std::abs(zi))) rep.hypothesis_ok = false;
            rep.worst_hypothesis_margin = std::min(rep.worst_hypothesis_margin, margin);

            const double yi = traj.value_at(t_check, i);
            const double gap = sign * (zi - yi);
            if (gap < -1e-8 * (1.0 + std::abs(yi))) rep.conclusion_ok = false;
            rep.worst_conclusion_gap = std::min(rep.worst_conclusion_gap, gap);
        }
    }
    return rep;
}

void write_csv(const CompanionTrajectory& traj, std::ostream& out) {
    out << "t,y1,y2\n";
    char buf[128];
    for (const auto& s : traj.samples) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", s.t, s.y1, s.y2);
        out << buf;
    }
}

}  // namespace heatsys::companion
