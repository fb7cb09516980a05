#ifndef DYM_CONSTANT_W_HPP
#define DYM_CONSTANT_W_HPP

#include "dym/constant_rho.hpp"
#include "dym/dynamics.hpp"

namespace dym {

// Constants of the W = W0 reductions. `alpha` here is the shift of the x equation,
// unrelated to the metric coefficient of the field equations.
struct ConstantWParams {
    Branch branch = Branch::delta0;
    double lambda = 1, W0 = pi;
    double beta = 0;   // lambda sin W0
    double alpha = 1;  // delta0: 1 + 8 lambda^2 cos^2 W0;  deltapos: 1 + 4 (lambda^2 - beta^2)
    double mu = NAN;   // -tan W0 (deltapos, W0 < pi)
    double kappa = NAN;
};
// Requires pi/2 < W0 <= pi.
ConstantWParams constant_w_params(Branch branch, double lambda, double W0);

// ---- delta0 = 0: x = rho^{-2} -----------------------------------------------

// (x', y') = (y, -2 beta x^{-1/2} y + 2 (x - alpha))
Vec2 x_rhs_delta0(double x, double y, double beta, double alpha);

struct SaddleData {
    double x = 0;                 // fixed point (alpha, 0)
    double mu_plus = 0, mu_minus = 0;
    Vec2 v_plus, v_minus;         // (1, mu_pm)
    double nu_plus = std::sqrt(2.0);
    double nu_minus = 0;          // mu_minus - 1
};
SaddleData saddle_data(double beta, double alpha);
Eigen::Matrix2d x_jacobian_fd(double x, double y, double beta, double alpha, double h = 1e-6);

// <F, (nu, -1)> on the ray y = nu (x - alpha), and its closed form
double normal_flux(double x, double nu, double beta, double alpha);
double normal_flux_formula(double x, double nu, double beta, double alpha);

bool in_D_plus(double x, double y, const SaddleData& sd);
bool in_D_minus(double x, double y, const SaddleData& sd);

// One-sided run of the x system; state [x, y, int rho].
struct XRun {
    Trajectory<Vec3> traj;
    bool singular = false;   // x reached x_floor (rho -> infinity)
    bool escaped = false;    // x reached x_cap (rho -> 0)
    bool converged = false;  // ended within tolerance of the saddle
};
XRun run_x_delta0(double x0, double y0, double beta, double alpha, double s_end, double x_floor = 1e-10,
                  double x_cap = 1e12, const IntegratorConfig& cfg = {});

struct OrbitReport {
    OrbitClass tag = OrbitClass::singular;
    double s_singular_forward = NAN, s_singular_backward = NAN;
    double x_forward = NAN, x_backward = NAN;  // x at the end of each run
};
OrbitReport classify_orbit_delta0(double x0, double y0, double beta, double alpha, double s_max = 40);

// ---- W0 = pi closed forms -----------------------------------------------------

// x(s) = (x0 - a) cosh(sqrt2 s) + (x0'/sqrt2) sinh(sqrt2 s) + a with x0' = -2 r0 U0 / rho0^3.
struct W0PiSolution {
    Branch branch = Branch::delta0;
    double lambda = 1, rho0 = 0, U0 = 0;
    Quaternion xi0;        // canonical, arg c + arg h = pi
    double delta0 = 0, P0 = NAN;
    double r0 = 0;
    double a = 0;          // fixed point of x: 1/rho_crit^2 or 1 + 4 lambda^2 (1 + coth^2 P0)
    double x0 = 0, dx0 = 0;
    bool global = false;          // x stays positive for all s
    bool global_display = false;  // r0 |U0| <= sqrt2 rho0 (1 - rho0^2 a), the inequality as usually quoted
    bool global_corrected = false;  // r0 |U0| <= rho0 (1 - rho0^2 a) / sqrt2
    double s_blowup_forward = INFINITY, s_blowup_backward = -INFINITY;

    double x(double s) const;
    double dx(double s) const;
    double rho(double s) const { return 1 / std::sqrt(x(s)); }
    // rho from the formula with the sinh coefficient r0 U0 / (sqrt2 rho0), for comparison
    double rho_display(double s) const;
    // fields given I = int_0^s rho
    FieldSample sample(double s, double I) const;
};

W0PiSolution closed_form_W0pi_delta0(double lambda, double rho0, double U0, Complex c0);
W0PiSolution closed_form_W0pi_deltapos(double lambda, double rho0, double U0, double delta0, double P0,
                                       double argc0 = 0);

// ---- delta0 > 0: (x, y, P) ----------------------------------------------------

double x_crit(double P, double alpha);  // alpha + (alpha - 1) coth^2 P

// state [x, y, P, int rho tanh(P/2), int rho coth(P/2)]
Vec5 x_rhs_deltapos(const Vec5& v, double beta, double alpha);

struct XPosRun {
    Trajectory<Vec5> traj;
    bool singular = false;   // x reached x_floor
    double r_at_end = NAN;   // metric coefficient at the last state
};
XPosRun run_x_deltapos(const ConstantWParams& p, double delta0, double rho0, double U0, double P0, double s_end,
                       double x_floor = 1e-10, const IntegratorConfig& cfg = {});

// r = -8 lambda cos W0 rho^3 / (delta0^2 sinh P)
double w_const_r_deltapos(const ConstantWParams& p, double delta0, double rho, double P);
FieldSample reconstruct_x_deltapos(const ConstantWParams& p, double delta0, double argc0, double s, const Vec5& v);

// L = x - (2 alpha - 1) + y / sqrt2 + 2 sqrt2 beta x^{1/2} coth P
double L_value(double x, double y, double P, double beta, double alpha);
// L' - sqrt2 L = -4 (beta x^{1/2} coth P + sqrt2 lambda^2 / sinh^2 P)
double L_defect(double x, double P, double beta, double lambda);

double blowup_threshold_deltapos(const ConstantWParams& p, double P0);
// requires mu < 1; NaN otherwise
double global_bound_deltapos(const ConstantWParams& p, double P0);

// (Q, zeta) chart: Q = x' sinh P / 2, zeta = (x - x_crit(P)) sinh P
Vec2 q_zeta(double x, double y, double P, double alpha);
// Q' and zeta' from the chart equations
Vec2 q_zeta_rhs(double Q, double zeta, double x, double P, double beta, double alpha);

struct ComparisonSolution {
    double mu = 0, alpha = 1, P0 = 1, Q0 = 0, zeta0 = 0;
    double kappa = 0;
    double c1 = 0, c2 = 0;
    double D = 0;  // forcing amplitude used by the mu = 1 form

    double zeta(double s) const;
    double Q(double s) const;
};
ComparisonSolution comparison_solution(double Q0, double zeta0, double mu, double alpha, double P0);

}  // namespace dym

#endif
