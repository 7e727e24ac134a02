#pragma once

#include <array>
#include <complex>
#include <ostream>
#include <variant>
#include <vector>

#include "heatsys/companion.hpp"
#include "heatsys/fft.hpp"

namespace heatsys::pde {

/// Periodic box [-L, L)^dim sampled with n points per axis (n a power of
/// two, >= 16). Wavenumbers are k_m = pi m / L for m in [-n/2, n/2).
struct Grid {
    int dim = 1;
    int n = 256;
    double half_length = 10.0;

    double spacing() const { return 2.0 * half_length / n; }
    std::size_t point_count() const {
        return dim == 1 ? static_cast<std::size_t>(n)
                        : static_cast<std::size_t>(n) * static_cast<std::size_t>(n);
    }
    double coord(int m) const { return -half_length + m * spacing(); }
    /// Signed frequency index for array position m.
    int freq(int m) const { return m < n / 2 ? m : m - n; }
    double wavenumber(int m) const { return M_PI * freq(m) / half_length; }
    int center_index() const { return n / 2; }
    int far_index() const { return n - 1; }  // coordinate L - spacing
    /// Flat index of the grid point (ix[, iy]).
    std::size_t flat(int ix, int iy = 0) const {
        return dim == 1 ? static_cast<std::size_t>(ix)
                        : static_cast<std::size_t>(iy) * n + ix;
    }
    /// Euclidean distance of a flat index from the origin.
    double radius(std::size_t idx) const;
};

struct Constant {
    double M;
};
/// phi(x) = M - A exp(-|x|^2 / (2 sigma^2)), 0 <= A < M.
struct ConstantMinusBump {
    double M;
    double A;
    double sigma;
};
/// Piecewise-linear radial profile; constant at far_value beyond the last
/// radius. Values must stay in [0, far_value].
struct RadialTable {
    std::vector<double> radii;
    std::vector<double> values;
    double far_value;
};

using InitialProfile = std::variant<Constant, ConstantMinusBump, RadialTable>;

double profile_eval(const InitialProfile& p, double radius);
double profile_far_value(const InitialProfile& p);
/// Length scale of the compact deviation from the far value (0 for
/// constants); feeds the automatic box sizing.
double profile_extent(const InitialProfile& p);

struct FieldPair {
    std::vector<double> u1, u2;
    double t = 0.0;
    std::vector<double>& u(int i) { return i == 1 ? u1 : u2; }
    const std::vector<double>& u(int i) const { return i == 1 ? u1 : u2; }
};

struct Snapshot {
    double t = 0;
    std::array<double, 2> sup{}, center{}, far{}, companion_y{};
};

struct PdeConfig {
    int dim = 1;
    int n = 256;
    double half_length = 0.0;  // <= 0 requests the automatic box rule
    std::array<InitialProfile, 2> profiles;
    companion::ExponentMatrix exponents;
    coeffs::TimeCoefficient h1, h2;  // reaction coefficients
    coeffs::TimeCoefficient k1, k2;  // diffusion coefficients
    double t_end = 1.0;
    std::vector<double> snapshot_times;
    double blow_up_threshold = 1e8;  // U_max
    double overflow_guard = 1e300;
    double growth_cap = 0.10;        // relative sup-norm growth per step
    double dt_cap = 5e-3;
    long max_steps = 500'000;
    bool parallel = true;

    const coeffs::TimeCoefficient& h(int i) const { return i == 1 ? h1 : h2; }
    const coeffs::TimeCoefficient& k(int i) const { return i == 1 ? k1 : k2; }
};

struct SimulationRun {
    enum class Status { Completed, BlowUpDetected, BudgetExceeded };
    Status status = Status::Completed;
    Grid grid;
    std::vector<Snapshot> snapshots;
    double last_stable_time = 0.0;
    FieldPair last_stable_fields;  // BlowUpDetected: state at last_stable_time
    companion::CompanionTrajectory companion_traj;
    long steps_taken = 0;
};

/// Pointwise blow-up inside a reaction step that no amount of halving can
/// resolve: the blow-up region has been reached.
struct ReactionOverflow : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

struct ReactionStage {
    companion::ExponentMatrix exponents;
    double dt;
    // h_i at the RK4 stage times t, t+dt/2, t+dt.
    std::array<double, 3> h1, h2;
    double overflow_guard = 1e300;
};

/// One classical RK4 substep of du_i/dt = h_i(t) u_i^{p_ii} u_j^{p_ij} at
/// every grid point. Returns false (leaving fields partially updated) when
/// any value would go negative or exceed the overflow guard. The serial
/// and OpenMP kernels are bit-identical; the parallel one is the default.
bool reaction_kernel_serial(std::vector<double>& u1, std::vector<double>& u2,
                            const ReactionStage& st);
bool reaction_kernel_parallel(std::vector<double>& u1, std::vector<double>& u2,
                              const ReactionStage& st);

}  // namespace detail

/// Spectral Strang-splitting simulator for the coupled system on the
/// periodic box. A Simulator owns its FFT plans and cumulative diffusion
/// integrals; one instance drives one run at a time.
class Simulator {
public:
    explicit Simulator(PdeConfig config);

    const Grid& grid() const { return grid_; }
    const PdeConfig& config() const { return config_; }

    FieldPair initial_fields() const;

    /// Multiply component i by the heat multiplier exp(-|k|^2 K_i(s, t)).
    void diffusion_step(FieldPair& fields, int component, double s, double t) const;
    /// Same with an explicit kernel variance (tests drive this directly).
    void apply_heat_multiplier(std::vector<double>& field, double K) const;

    /// RK4 reaction step over [t, t+dt] with internal substepping; h_i are
    /// evaluated at the RK stage times. Throws ReactionOverflow when
    /// halving cannot keep values below the overflow guard.
    void reaction_step(FieldPair& fields, double t, double dt) const;

    /// Second-order splitting: reaction dt/2 at t, diffusion over
    /// [t, t+dt], reaction dt/2 at t+dt/2. Advances fields.t.
    void strang_step(FieldPair& fields, double t, double dt) const;

    SimulationRun run() const;

    struct PicardReport {
        double t_short = 0.0;
        int iterations = 0;
        double discrepancy = 0.0;             // fixed point vs splitting at t_short
        std::vector<double> iterate_gaps;     // sup distance between iterates
        bool contracted = true;               // every gap ratio <= 1/2
        double worst_ratio = 0.0;
    };

    /// Fixed-point validation of the integral formulation against the
    /// splitting solver. t_short <= 0 selects the contraction horizon
    /// R^{p_ii+p_ij} int_0^T h_i < 1/2 automatically.
    PicardReport picard_validate(double t_short, int iterations) const;

    double auto_half_length() const;

private:
    void fft_field(const std::vector<double>& field, std::vector<std::complex<double>>& out) const;
    void ifft_field(std::vector<std::complex<double>>& spec, std::vector<double>& out) const;
    void multiply_heat(std::vector<std::complex<double>>& spec, double K) const;
    double sup(const std::vector<double>& v) const;
    void reaction_advance(FieldPair& fields, double t, double dt, int depth) const;

    PdeConfig config_;
    Grid grid_;
    fft::Plan plan_;
    coeffs::CumulativeIntegral K1_, K2_;
    const coeffs::CumulativeIntegral& K(int i) const { return i == 1 ? K1_ : K2_; }
};

struct SpaceInfinityReport {
    double last_stable_time = 0.0;
    std::vector<double> radii;
    std::array<std::vector<double>, 2> interior_max;  // per component, per radius
    std::array<double, 2> far_value{};
    std::vector<double> snapshot_times;
    std::array<std::vector<double>, 2> center_over_far;
    bool ratio_nonincreasing[2] = {true, true};
    std::string caveat;
};

/// Interior-vs-far separation at the last stable time of a blow-up run:
/// the strongest finite-box analogue of explosion at space infinity.
SpaceInfinityReport space_infinity_report(const SimulationRun& run);

/// CSV columns t,sup1,sup2,center1,center2,far1,far2,y1,y2.
void write_snapshot_csv(const SimulationRun& run, std::ostream& out);
/// Grid dump with a text header (dim, n, L, t) followed by one value per line.
void write_field_dump(const Grid& grid, const FieldPair& fields, std::ostream& out);

}  // namespace heatsys::pde
