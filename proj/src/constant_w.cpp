#include "dym/constant_w.hpp"

#include "dym/roots.hpp"

#include <stdexcept>

namespace dym {

namespace {

const double sqrt2 = std::sqrt(2.0);

double coth(double P) { return 1 / std::tanh(P); }

// first t > 0 (direction +1) or t < 0 (direction -1) with g(t) = 0, if any within |t| <= 200
double first_zero(const std::function<double(double)>& g, int direction)
{
    double t0 = 0, g0 = g(0);
    if (g0 <= 0) return 0;
    for (double step = 0.25; std::abs(t0) < 200;) {
        const double t1 = t0 + direction * step;
        const double g1 = g(t1);
        if (g1 <= 0) {
            const RootResult rr = brent_root(g, t0, t1, g0, g1);
            return rr.x;
        }
        t0 = t1;
        g0 = g1;
    }
    return direction * INFINITY;
}

}  // namespace

ConstantWParams constant_w_params(Branch branch, double lambda, double W0)
{
    if (!(W0 > pi / 2 && W0 <= pi)) throw std::invalid_argument("constant W needs pi/2 < W0 <= pi");
    ConstantWParams p;
    p.branch = branch;
    p.lambda = lambda;
    p.W0 = W0;
    p.beta = lambda * std::sin(W0);
    const double c = std::cos(W0);
    if (branch == Branch::delta0) {
        p.alpha = 1 + 8 * lambda * lambda * c * c;
    } else {
        p.alpha = 1 + 4 * lambda * lambda * c * c;
        if (W0 < pi) {
            p.mu = -std::tan(W0);
            p.kappa = std::sqrt(p.mu * p.mu + 8);
        }
    }
    return p;
}

// ---- delta0 = 0 -------------------------------------------------------------------

Vec2 x_rhs_delta0(double x, double y, double beta, double alpha)
{
    if (!(x > 0)) throw SingularState("x reached zero");
    return Vec2(y, -2 * beta * y / std::sqrt(x) + 2 * (x - alpha));
}

SaddleData saddle_data(double beta, double alpha)
{
    if (!(alpha >= 1)) throw std::invalid_argument("alpha must be >= 1");
    SaddleData sd;
    sd.x = alpha;
    const double b = beta / std::sqrt(alpha), root = std::sqrt(beta * beta / alpha + 2);
    sd.mu_plus = -b + root;
    sd.mu_minus = -b - root;
    sd.v_plus = Vec2(1, sd.mu_plus);
    sd.v_minus = Vec2(1, sd.mu_minus);
    sd.nu_minus = sd.mu_minus - 1;
    return sd;
}

Eigen::Matrix2d x_jacobian_fd(double x, double y, double beta, double alpha, double h)
{
    Eigen::Matrix2d J;
    J.col(0) = (x_rhs_delta0(x + h, y, beta, alpha) - x_rhs_delta0(x - h, y, beta, alpha)) / (2 * h);
    J.col(1) = (x_rhs_delta0(x, y + h, beta, alpha) - x_rhs_delta0(x, y - h, beta, alpha)) / (2 * h);
    return J;
}

double normal_flux(double x, double nu, double beta, double alpha)
{
    const Vec2 F = x_rhs_delta0(x, nu * (x - alpha), beta, alpha);
    return nu * F[0] - F[1];
}

double normal_flux_formula(double x, double nu, double beta, double alpha)
{
    return (nu * nu + 2 * beta * nu / std::sqrt(x) - 2) * (x - alpha);
}

bool in_D_plus(double x, double y, const SaddleData& sd)
{
    return x >= sd.x && y >= 0 && y <= sd.nu_plus * (x - sd.x);
}

bool in_D_minus(double x, double y, const SaddleData& sd)
{
    return x >= sd.x && y <= 0 && y >= sd.nu_minus * (x - sd.x);
}

XRun run_x_delta0(double x0, double y0, double beta, double alpha, double s_end, double x_floor, double x_cap,
                  const IntegratorConfig& cfg_in)
{
    IntegratorConfig cfg = cfg_in;
    cfg.blowup_norm = std::max(cfg.blowup_norm, 10 * x_cap);
    auto f = [=](double, const Vec3& v) {
        const Vec2 d = x_rhs_delta0(v[0], v[1], beta, alpha);
        return Vec3(d[0], d[1], 1 / std::sqrt(v[0]));
    };
    std::vector<EventSpec<Vec3>> ev{
        {[x_floor](double, const Vec3& v) { return v[0] - x_floor; }, Direction::falling, EventAction::stop, "floor"},
        {[x_cap](double, const Vec3& v) { return v[0] - x_cap; }, Direction::rising, EventAction::stop, "cap"}};
    XRun out;
    out.traj = integrate(f, Vec3(x0, y0, 0), 0.0, s_end, cfg, ev);
    const auto& tr = out.traj;
    if (tr.termination == Termination::event_stop) {
        (tr.back()[0] < alpha ? out.singular : out.escaped) = true;
    } else if (tr.termination != Termination::reached_end) {
        out.singular = tr.back()[0] < alpha;
        out.escaped = !out.singular;
    }
    double closest = INFINITY;
    for (const Vec3& v : tr.y) closest = std::min(closest, std::abs(v[0] - alpha) + std::abs(v[1]));
    out.converged = closest < 1e-5 * alpha;
    return out;
}

OrbitReport classify_orbit_delta0(double x0, double y0, double beta, double alpha, double s_max)
{
    if (!(x0 > 0)) throw std::invalid_argument("x0 must be positive");
    OrbitReport rep;
    if (std::abs(x0 - alpha) + std::abs(y0) <= 1e-12 * alpha) {
        rep.tag = OrbitClass::constant_fixed_point;
        rep.x_forward = rep.x_backward = alpha;
        return rep;
    }
    const XRun fw = run_x_delta0(x0, y0, beta, alpha, s_max);
    const XRun bw = run_x_delta0(x0, y0, beta, alpha, -s_max);
    rep.x_forward = fw.traj.back()[0];
    rep.x_backward = bw.traj.back()[0];
    if (fw.singular) rep.s_singular_forward = fw.traj.s_end();
    if (bw.singular) rep.s_singular_backward = bw.traj.s_end();
    if (fw.converged) rep.tag = OrbitClass::separatrix_stable;
    else if (bw.converged) rep.tag = OrbitClass::separatrix_unstable;
    else if (fw.singular || bw.singular) rep.tag = OrbitClass::singular;
    else rep.tag = OrbitClass::global_bounded;
    return rep;
}

// ---- W0 = pi ------------------------------------------------------------------------

double W0PiSolution::x(double s) const
{
    const double t = sqrt2 * s;
    return (x0 - a) * std::cosh(t) + dx0 / sqrt2 * std::sinh(t) + a;
}

double W0PiSolution::dx(double s) const
{
    const double t = sqrt2 * s;
    return sqrt2 * (x0 - a) * std::sinh(t) + dx0 * std::cosh(t);
}

double W0PiSolution::rho_display(double s) const
{
    const double t = sqrt2 * s, k = rho0 * rho0 * a;
    const double b = (1 - k) * std::cosh(t) - r0 * U0 / (sqrt2 * rho0) * std::sinh(t) + k;
    return b > 0 ? rho0 / std::sqrt(b) : NAN;
}

FieldSample W0PiSolution::sample(double s, double I) const
{
    FieldSample f;
    f.s = s;
    const double rho = this->rho(s);
    if (branch == Branch::delta0) {
        f.z = std::polar(rho, -2 * lambda * I);
        f.xi = xi0 * std::polar(1.0, -lambda * I);
        f.r = 8 * lambda * rho * rho * rho / xi0.norm2();
    } else {
        const double cP = coth(P0);
        f.z = std::polar(rho, -2 * lambda * cP * I);
        f.xi = Quaternion(xi0.c * std::polar(1.0, -lambda * std::tanh(P0 / 2) * I),
                          xi0.h * std::polar(1.0, -lambda / std::tanh(P0 / 2) * I));
        f.r = 8 * lambda * rho * rho * rho / (delta0 * delta0 * std::sinh(P0));
    }
    return f;
}

namespace {

void finish(W0PiSolution& sol)
{
    sol.x0 = 1 / (sol.rho0 * sol.rho0);
    sol.dx0 = -2 * sol.r0 * sol.U0 / (sol.rho0 * sol.rho0 * sol.rho0);
    const double A = sol.x0 - sol.a, B = sol.dx0 / sqrt2;
    sol.global = A - std::abs(B) >= -1e-12 * std::max(std::abs(A), sol.a);
    const double gap = sol.rho0 * (1 - sol.rho0 * sol.rho0 * sol.a);
    sol.global_display = sol.r0 * std::abs(sol.U0) <= sqrt2 * gap;
    sol.global_corrected = sol.r0 * std::abs(sol.U0) <= gap / sqrt2;
    if (!sol.global) {
        auto g = [&](double s) { return sol.x(s); };
        sol.s_blowup_forward = first_zero(g, +1);
        sol.s_blowup_backward = first_zero(g, -1);
    }
}

}  // namespace

W0PiSolution closed_form_W0pi_delta0(double lambda, double rho0, double U0, Complex c0)
{
    if (!(rho0 > 0) || std::abs(c0) == 0) throw std::invalid_argument("need rho0 > 0 and c0 != 0");
    W0PiSolution sol;
    sol.branch = Branch::delta0;
    sol.lambda = lambda;
    sol.rho0 = rho0;
    sol.U0 = U0;
    sol.xi0 = xi_delta0(c0, pi);
    sol.r0 = 8 * lambda * rho0 * rho0 * rho0 / sol.xi0.norm2();
    sol.a = 1 + 8 * lambda * lambda;
    finish(sol);
    return sol;
}

W0PiSolution closed_form_W0pi_deltapos(double lambda, double rho0, double U0, double delta0, double P0,
                                       double argc0)
{
    if (!(rho0 > 0) || !(delta0 > 0) || !(P0 > 0)) throw std::invalid_argument("need rho0, delta0, P0 > 0");
    W0PiSolution sol;
    sol.branch = Branch::deltapos;
    sol.lambda = lambda;
    sol.rho0 = rho0;
    sol.U0 = U0;
    sol.delta0 = delta0;
    sol.P0 = P0;
    sol.xi0 = xi_deltapos(delta0, P0, argc0, pi);
    sol.r0 = 8 * lambda * rho0 * rho0 * rho0 / (delta0 * delta0 * std::sinh(P0));
    const double c = coth(P0);
    sol.a = 1 + 4 * lambda * lambda * (1 + c * c);
    finish(sol);
    return sol;
}

// ---- delta0 > 0 ---------------------------------------------------------------------

double x_crit(double P, double alpha)
{
    const double c = coth(P);
    return alpha + (alpha - 1) * c * c;
}

Vec5 x_rhs_deltapos(const Vec5& v, double beta, double alpha)
{
    const double x = v[0], y = v[1], P = v[2];
    if (!(x > 0)) throw SingularState("x reached zero");
    if (!(P > 0)) throw SingularState("P reached zero");
    const double rho = 1 / std::sqrt(x), th = std::tanh(P / 2);
    Vec5 d;
    d[0] = y;
    d[1] = -2 * beta * rho * y * coth(P) + 2 * (x - x_crit(P, alpha));
    d[2] = 2 * beta * rho;
    d[3] = rho * th;
    d[4] = rho / th;
    return d;
}

double w_const_r_deltapos(const ConstantWParams& p, double delta0, double rho, double P)
{
    return -8 * p.lambda * std::cos(p.W0) * rho * rho * rho / (delta0 * delta0 * std::sinh(P));
}

XPosRun run_x_deltapos(const ConstantWParams& p, double delta0, double rho0, double U0, double P0, double s_end,
                       double x_floor, const IntegratorConfig& cfg)
{
    const double r0 = w_const_r_deltapos(p, delta0, rho0, P0);
    const Vec5 y0(1 / (rho0 * rho0), -2 * r0 * U0 / (rho0 * rho0 * rho0), P0, 0, 0);
    const double beta = p.beta, alpha = p.alpha;
    auto f = [=](double, const Vec5& v) { return x_rhs_deltapos(v, beta, alpha); };
    std::vector<EventSpec<Vec5>> ev{
        {[x_floor](double, const Vec5& v) { return v[0] - x_floor; }, Direction::falling, EventAction::stop, "floor"}};
    XPosRun out;
    out.traj = integrate(f, y0, 0.0, s_end, cfg, ev);
    const Vec5 e = out.traj.back();
    out.singular = out.traj.termination == Termination::event_stop ||
                   ((out.traj.termination == Termination::singular_state ||
                     out.traj.termination == Termination::step_underflow) && e[0] < 1);
    if (e[0] > 0 && e[2] > 0) out.r_at_end = w_const_r_deltapos(p, delta0, 1 / std::sqrt(e[0]), e[2]);
    return out;
}

FieldSample reconstruct_x_deltapos(const ConstantWParams& p, double delta0, double argc0, double s, const Vec5& v)
{
    const double rho = 1 / std::sqrt(v[0]), P = v[2], lc = p.lambda * std::cos(p.W0);
    FieldSample f;
    f.s = s;
    f.z = std::polar(rho, lc * (v[3] + v[4]));
    f.xi = Quaternion(std::polar(delta0 * std::cosh(P / 2), argc0 + lc * v[3]),
                      std::polar(delta0 * std::sinh(P / 2), p.W0 - argc0 + lc * v[4]));
    f.r = w_const_r_deltapos(p, delta0, rho, P);
    return f;
}

double L_value(double x, double y, double P, double beta, double alpha)
{
    return x - (2 * alpha - 1) + y / sqrt2 + 2 * sqrt2 * beta * std::sqrt(x) * coth(P);
}

double L_defect(double x, double P, double beta, double lambda)
{
    const double sh = std::sinh(P);
    return -4 * (beta * std::sqrt(x) * coth(P) + sqrt2 * lambda * lambda / (sh * sh));
}

double blowup_threshold_deltapos(const ConstantWParams& p, double P0)
{
    const double bc = p.beta * coth(P0);
    return 1 / (std::sqrt(2 * p.alpha - 1 + 2 * bc * bc) - sqrt2 * bc);
}

double global_bound_deltapos(const ConstantWParams& p, double P0)
{
    if (!(p.mu < 1)) return NAN;
    const double mu = p.mu, sh = std::sinh(P0);
    const double extra = (mu * mu + mu * p.kappa + 2) * (p.alpha - 1) / (2 * (1 - mu * mu) * sh * sh);
    return 1 / std::sqrt(2 * p.alpha - 1 + extra);
}

Vec2 q_zeta(double x, double y, double P, double alpha)
{
    const double sh = std::sinh(P);
    return Vec2(y * sh / 2, (x - x_crit(P, alpha)) * sh);
}

Vec2 q_zeta_rhs(double Q, double zeta, double x, double P, double beta, double alpha)
{
    return Vec2(zeta, 2 * Q + 2 * beta / std::sqrt(x) * coth(P) * (zeta + 2 * (alpha - 1) / std::sinh(P)));
}

ComparisonSolution comparison_solution(double Q0, double zeta0, double mu, double alpha, double P0)
{
    if (!(mu > 0)) throw std::invalid_argument("comparison solution needs mu > 0");
    ComparisonSolution c;
    c.mu = mu;
    c.alpha = alpha;
    c.P0 = P0;
    c.Q0 = Q0;
    c.zeta0 = zeta0;
    c.kappa = std::sqrt(mu * mu + 8);
    const double sh = std::sinh(P0), k = c.kappa;
    if (mu == 1) {
        c.D = 2 * (alpha - 1) / (3 * sh);
        c.c1 = (Q0 + zeta0 + c.D) / 3;
        c.c2 = (2 * Q0 - zeta0 - c.D) / 3;
    } else {
        const double m = mu * (alpha - 1) / (2 * k * (mu * mu - 1) * sh);
        c.c1 = (k - mu) / (2 * k) * Q0 + zeta0 / k - m * (k - 3 * mu);
        c.c2 = (k + mu) / (2 * k) * Q0 - zeta0 / k - m * (k + 3 * mu);
    }
    return c;
}

double ComparisonSolution::zeta(double s) const
{
    const double sh = std::sinh(P0);
    if (mu == 1) return 2 * c1 * std::exp(2 * s) - c2 * std::exp(-s) - D * (1 - s) * std::exp(-s);
    const double mp = (kappa + mu) / 2, mm = (kappa - mu) / 2;
    return mp * c1 * std::exp(mp * s) - mm * c2 * std::exp(-mm * s) -
           mu * mu * (alpha - 1) / ((mu * mu - 1) * sh) * std::exp(-mu * s);
}

double ComparisonSolution::Q(double s) const
{
    const double sh = std::sinh(P0);
    if (mu == 1) return c1 * std::exp(2 * s) + c2 * std::exp(-s) - D * s * std::exp(-s);
    const double mp = (kappa + mu) / 2, mm = (kappa - mu) / 2;
    return c1 * std::exp(mp * s) + c2 * std::exp(-mm * s) +
           mu * (alpha - 1) / ((mu * mu - 1) * sh) * std::exp(-mu * s);
}

}  // namespace dym
