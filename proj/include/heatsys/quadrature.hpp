#pragma once

#include <functional>
#include <limits>
#include <stdexcept>
#include <string>

namespace heatsys::quadrature {

struct QuadratureError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Declared asymptotic class of an integrand on [T, inf):
/// f(t) ~ C * t^exponent * exp(rate * t). Unknown tails carry no claim.
struct TailDescriptor {
    enum class Kind { Power, Exponential, Unknown };
    Kind kind = Kind::Unknown;
    double exponent = 0.0;  // power of t
    double rate = 0.0;      // exponential rate (negative = decay)

    static TailDescriptor power(double exponent) {
        return {Kind::Power, exponent, 0.0};
    }
    static TailDescriptor exponential(double rate, double exponent = 0.0) {
        return {Kind::Exponential, exponent, rate};
    }
    static TailDescriptor unknown() { return {}; }

    bool is_unknown() const { return kind == Kind::Unknown; }
    /// For positive integrands: divergent iff rate > 0 or (rate == 0 and
    /// exponent >= -1).
    bool divergent() const;
    bool convergent() const { return !is_unknown() && !divergent(); }

    /// Tail class of f^q (exponents and rates scale linearly).
    TailDescriptor pow(double q) const;
    /// Tail class of f * g.
    TailDescriptor operator*(const TailDescriptor& g) const;
    /// Tail class of f / g.
    TailDescriptor operator/(const TailDescriptor& g) const;
};

struct Options {
    double rel_tol = 1e-10;
    long max_segments = 1'000'000;  // subdivision budget
};

/// Adaptive definite integral of f over [a, b] using an embedded
/// Gauss-Legendre 7/15 pair; the worst segment is bisected until the summed
/// error estimate meets rel_tol. Deterministic for fixed inputs. Throws
/// QuadratureError on non-finite integrand values or an exhausted budget.
double integrate(const std::function<double(double)>& f, double a, double b,
                 const Options& opt = {});

struct ImproperResult {
    enum class Status { Finite, Divergent, Undetermined };
    Status status = Status::Undetermined;
    double value = 0.0;          // lower bound when Undetermined (f >= 0)
    double est_rel_error = 0.0;  // achieved estimate for Finite results
    double t_reached = 0.0;

    bool finite() const { return status == Status::Finite; }
    bool is_divergent() const { return status == Status::Divergent; }
    /// +inf for Divergent, value otherwise. Undetermined has no extended
    /// value; callers must branch on status first.
    double extended() const {
        return is_divergent() ? std::numeric_limits<double>::infinity() : value;
    }
};

/// Integral of f over [t0, inf). Divergence is certified from the tail
/// descriptor alone (f must be eventually positive). Convergent tails are
/// integrated over doubling windows until the geometric remainder estimate
/// meets rel_tol. Unknown tails are integrated up to t < ~1e6 and flagged
/// Undetermined when the evidence is inconclusive. Throws QuadratureError
/// when the sampled behaviour flatly contradicts the declared tail.
ImproperResult improper_integral(const std::function<double(double)>& f,
                                 double t0, const TailDescriptor& tail,
                                 const Options& opt = {});

/// Gauss-Legendre nodes/weights on [-1, 1], computed once per order by
/// Newton iteration on the Legendre recurrence.
void gauss_legendre(int n, const double** nodes, const double** weights);

/// Fixed-order Gauss-Legendre estimate on [a, b] (no adaptivity).
double gauss_fixed(const std::function<double(double)>& f, double a, double b, int order);

}  // namespace heatsys::quadrature
