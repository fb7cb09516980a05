#ifndef DYM_CONSTANT_RHO_HPP
#define DYM_CONSTANT_RHO_HPP

#include <optional>
#include <string>

#include "dym/dynamics.hpp"

namespace dym {

enum class OrbitClass {
    singular,
    constant_fixed_point,
    separatrix_stable,
    separatrix_unstable,
    global_bounded,
    global_oscillatory,
    periodic,
    drift_periodic,
};
const char* to_string(OrbitClass c);

double rho_crit(double lambda);  // (1 + 8 lambda^2)^{-1/2}

// NaN marks a quantity that does not exist for the given rho0.
struct CriticalConstants {
    double rho_crit = 0;
    double beta = NAN;          // (1/lambda) sqrt(1/rho0^2 - 1), rho0 <= 1
    double alpha_branch = NAN;  // (1/lambda) sqrt(1 - 1/rho0^2), rho0 > 1
    double W_inf = NAN;         // arccos(-beta / (2 sqrt 2)), rho_crit <= rho0 < 1
    double P_inf = NAN;         // arcoth sqrt(1 + (1/rho0^2 - 1/rho_crit^2) / (4 lambda^2)), rho0 < rho_crit
};
CriticalConstants critical_constants(double lambda, double rho0);

// ---- delta0 = 0: the W equation ---------------------------------------------

// W' = lambda rho0 (3 cos W + sign sqrt(cos^2 W + k)), k = (1/rho0^2 - 1)/lambda^2
double w_rhs_delta0(double W, double lambda, double rho0, int sign = +1);

// state [W, int cos W, int sin W]
Trajectory<Vec3> integrate_w_delta0(double lambda, double rho0, double W0, double s0, double s1,
                                    const IntegratorConfig& cfg = {},
                                    std::span<const EventSpec<Vec3>> events = {}, int sign = +1);

// Fields along a W-equation orbit started from canonical data (rho0, xi0) at s = 0.
FieldSample reconstruct_w_delta0(double lambda, double rho0, const Quaternion& xi0, double s, const Vec3& v,
                                 int sign = +1);

struct PeriodF {
    double T = 0;
    double f = 0;  // (lambda rho0 / 2 pi) int_0^T cos W
    Trajectory<Vec3> orbit;
};
// rho0 < rho_crit, W0 = 0.
PeriodF period_and_f_delta0(double lambda, double rho0, double rtol = 1e-12);

struct PeriodicCandidate {
    double rho0 = 0;
    double P0 = NAN;
    std::int64_t p = 0, q = 1;
    std::int64_t p2 = 0, q2 = 1;  // second frequency (deltapos branches)
    double f = 0, f2 = NAN;
    double T = 0;
    double period = 0;  // minimal period of the full solution
    double closure = 0;
    bool converged = false;
};

// Solve f(rho0) = p/q on [lo, hi] and measure closure of (z, xi, r) over q T.
PeriodicCandidate find_periodic_delta0(double lambda, std::int64_t p, std::int64_t q, double lo, double hi,
                                       const Quaternion& xi0);

// ---- delta0 > 0: the (P, W) system ------------------------------------------

Vec2 pw_rhs(double P, double W, double lambda, double rho0);
// tanh(P) / (lambda rho0) times pw_rhs; smooth through P = 0
Vec2 desingularized_field(double P, double W, double beta);
Eigen::Matrix2d desingularized_jacobian_fd(double P, double W, double beta, double h = 1e-6);

// state [P, W, int tanh(P/2) cos W, int coth(P/2) cos W]
Trajectory<Vec4> integrate_pw(double lambda, double rho0, double P0, double W0, double s0, double s1,
                              const IntegratorConfig& cfg = {}, std::span<const EventSpec<Vec4>> events = {});

FieldSample reconstruct_pw(double lambda, double rho0, double delta0, double argc0, double W0, double s,
                           const Vec4& v);

// Separatrices in the pseudo-time of the desingularized field; state [P, W, s].
// Unstable branch leaves (0, pi/2) along (1, beta/4); stable branch enters (0, 3 pi/2) along (1, -beta/4).
Trajectory<Vec3> unstable_separatrix(double lambda, double rho0, double eps, double tau_max,
                                     std::span<const EventSpec<Vec3>> events = {});
Trajectory<Vec3> stable_separatrix(double lambda, double rho0, double eps, double tau_max,
                                   std::span<const EventSpec<Vec3>> events = {});

// P where the unstable separatrix meets W = pi (rho0 < rho_crit).
double p_crit(double lambda, double rho0, double eps = 1e-6);
// Same crossing on the stable separatrix.
double p_crit_stable(double lambda, double rho0, double eps = 1e-6);

struct F1F2 {
    OrbitClass kind = OrbitClass::periodic;
    double T = 0;
    double f1 = 0, f2 = 0;
    double closure = 0;
};
// Orbit through (P0, pi); bounded if P0 < P_crit, drifting otherwise.
F1F2 f1_f2_deltapos(double lambda, double rho0, double P0, double P_crit, double rtol = 1e-12);

// Period of the linearisation at (P_inf, pi).
double linearized_period(double lambda, double rho0);

// ---- rational fixed points --------------------------------------------------

struct RationalFixedPoint {
    double lambda = 1;
    std::int64_t p = 1, q = 2;
    double delta0 = 1, argc0 = 0;
    double rho0 = 0;             // 1/rho0^2 = 1/rho_crit^2 + lambda^2 (q - p)^2 / (p q)
    double P0 = 0;               // tanh^2(P0/2) = p/q
    double coth_P0 = 0;
    double r = 0;                // constant warping function
    double period_s = 0;         // s-period, t = lambda rho0 s / sqrt(pq) has period 2 pi
    double radius_circle = 0;    // r * period_s / (2 pi)
    double radius_sphere = 0;    // r
    double stationarity = 0;     // |pw_rhs(P0, pi)|
    double coth_P_inf = 0;       // from rho0, compared with coth_P0
    std::int64_t n_z = 0, n_c = 0, n_h = 0;  // z ~ e^{-i n_z t}, c ~ e^{-i n_c t}, h ~ e^{-i n_h t}
    // values from the closed-form display in the literature, kept for comparison
    double rho0_display_plus = NAN, rho0_display_minus = NAN;
    double radius_circle_display = NAN, radius_sphere_display = NAN;
    std::string discrepancy;     // non-empty when the display disagrees with the derivation

    double t_of_s(double s) const;
    FieldSample sample(double s) const;
};

RationalFixedPoint rational_fixed_point(double lambda, std::int64_t p, std::int64_t q, double delta0 = 1,
                                        double argc0 = 0);

// ---- rho0 > 1 ---------------------------------------------------------------

struct SingularBranchReport {
    int sign = +1;
    Branch branch = Branch::delta0;
    double s_singular = NAN;   // first s > 0 where the square root vanishes
    double W_singular = NAN;
    double r_singular = NAN;
    double r_min = NAN;        // inf of r on [0, s_singular]
    double min_W_rate = NAN;   // inf of W' along the orbit
    double min_W_rate_bound = NAN;
    Termination termination = Termination::reached_end;
};

// delta0 = 0 when P0 is NaN, otherwise the deltapos analogue.
SingularBranchReport singular_branch_rho_gt1(double lambda, double rho0, int sign, double W0,
                                             const Quaternion& xi0, double P0 = NAN, double delta0 = NAN,
                                             double s_max = 100);

}  // namespace dym

#endif
