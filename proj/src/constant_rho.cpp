#include "dym/constant_rho.hpp"

#include "dym/csv.hpp"
#include "dym/roots.hpp"

#include <numeric>
#include <stdexcept>

namespace dym {

namespace {

const double sqrt2 = std::sqrt(2.0);

double k_of(double lambda, double rho0) { return (1 / (rho0 * rho0) - 1) / (lambda * lambda); }

IntegratorConfig tight(double rtol)
{
    IntegratorConfig c;
    c.rtol = rtol;
    c.atol = rtol * 1e-2;
    c.blowup_norm = 1e12;
    return c;
}

}  // namespace

const char* to_string(OrbitClass c)
{
    switch (c) {
    case OrbitClass::singular: return "singular";
    case OrbitClass::constant_fixed_point: return "constant-fixed-point";
    case OrbitClass::separatrix_stable: return "separatrix-stable";
    case OrbitClass::separatrix_unstable: return "separatrix-unstable";
    case OrbitClass::global_bounded: return "global-bounded";
    case OrbitClass::global_oscillatory: return "global-oscillatory";
    case OrbitClass::periodic: return "periodic";
    case OrbitClass::drift_periodic: return "drift-periodic";
    }
    return "unknown";
}

double rho_crit(double lambda) { return 1 / std::sqrt(1 + 8 * lambda * lambda); }

CriticalConstants critical_constants(double lambda, double rho0)
{
    if (!(lambda > 0) || !(rho0 > 0)) throw std::invalid_argument("need lambda > 0 and rho0 > 0");
    CriticalConstants c;
    c.rho_crit = rho_crit(lambda);
    if (rho0 <= 1) c.beta = std::sqrt(1 / (rho0 * rho0) - 1) / lambda;
    else c.alpha_branch = std::sqrt(1 - 1 / (rho0 * rho0)) / lambda;
    if (rho0 >= c.rho_crit && rho0 < 1) c.W_inf = std::acos(-c.beta / (2 * sqrt2));
    if (rho0 < c.rho_crit) {
        const double x = 1 + (1 / (rho0 * rho0) - 1 / (c.rho_crit * c.rho_crit)) / (4 * lambda * lambda);
        c.P_inf = std::atanh(1 / std::sqrt(x));
    }
    return c;
}

// ---- W equation ----------------------------------------------------------

double w_rhs_delta0(double W, double lambda, double rho0, int sign)
{
    const double cw = std::cos(W);
    const double disc = cw * cw + k_of(lambda, rho0);
    if (disc < 0) throw SingularState("W equation left its domain");
    return lambda * rho0 * (3 * cw + sign * std::sqrt(disc));
}

Trajectory<Vec3> integrate_w_delta0(double lambda, double rho0, double W0, double s0, double s1,
                                    const IntegratorConfig& cfg, std::span<const EventSpec<Vec3>> events,
                                    int sign)
{
    auto f = [=](double, const Vec3& v) {
        return Vec3(w_rhs_delta0(v[0], lambda, rho0, sign), std::cos(v[0]), std::sin(v[0]));
    };
    return integrate(f, Vec3(W0, 0, 0), s0, s1, cfg, events);
}

FieldSample reconstruct_w_delta0(double lambda, double rho0, const Quaternion& xi0, double s, const Vec3& v,
                                 int sign)
{
    const double W0 = std::arg(xi0.c) + std::arg(xi0.h);
    const double W = v[0], lr = lambda * rho0;
    const double cw = std::cos(W);
    const double disc = std::max(0.0, cw * cw + k_of(lambda, rho0));
    FieldSample f;
    f.s = s;
    f.z = std::polar(rho0, 2 * lr * v[1] - W + W0);
    f.xi = xi0 * std::polar(std::exp(lr * v[2]), lr * v[1]);
    f.r = 4 * lambda * rho0 * rho0 * rho0 * (cw + sign * std::sqrt(disc)) / xi0.norm2() *
          std::exp(-2 * lr * v[2]);
    return f;
}

PeriodF period_and_f_delta0(double lambda, double rho0, double rtol)
{
    const auto cc = critical_constants(lambda, rho0);
    if (!(rho0 < cc.rho_crit)) throw std::domain_error("period of W needs rho0 < rho_crit");
    const double lr = lambda * rho0;
    const double slow = lr * (std::sqrt(1 + cc.beta * cc.beta) - 3);
    std::vector<EventSpec<Vec3>> ev{{[](double, const Vec3& v) { return v[0] - 2 * pi; }, Direction::rising,
                                     EventAction::stop, "W=2pi"}};
    PeriodF out;
    out.orbit = integrate_w_delta0(lambda, rho0, 0.0, 0.0, 4 * pi / slow, tight(rtol), ev);
    if (out.orbit.termination != Termination::event_stop) throw std::runtime_error("W did not reach 2 pi");
    out.T = out.orbit.s_end();
    out.f = lr / (2 * pi) * out.orbit.back()[1];
    return out;
}

PeriodicCandidate find_periodic_delta0(double lambda, std::int64_t p, std::int64_t q, double lo, double hi,
                                       const Quaternion& xi0)
{
    const std::int64_t g = std::gcd(p, q);
    p /= g;
    q /= g;
    const double target = double(p) / double(q);
    auto F = [&](double rho) { return period_and_f_delta0(lambda, rho).f - target; };
    PeriodicCandidate out;
    out.p = p;
    out.q = q;
    RootResult rr = brent_root(F, lo, hi, 1e-14);
    if (!rr.converged) return out;
    out.rho0 = rr.x;
    const PeriodF pf = period_and_f_delta0(lambda, rr.x);
    out.f = pf.f;
    out.T = pf.T;
    out.period = double(q) * pf.T;

    // closure of the full solution over the minimal period
    const double probe[] = {0.0, 0.37 * pf.T, 0.71 * pf.T};
    auto orbit = integrate_w_delta0(lambda, rr.x, 0.0, 0.0, out.period + pf.T, tight(1e-12));
    double worst = 0;
    for (double s : probe) {
        const FieldSample a = reconstruct_w_delta0(lambda, rr.x, xi0, s, orbit(s));
        const FieldSample b = reconstruct_w_delta0(lambda, rr.x, xi0, s + out.period, orbit(s + out.period));
        worst = std::max({worst, std::abs(a.z - b.z), distance(a.xi, b.xi), std::abs(a.r - b.r)});
    }
    out.closure = worst;
    out.converged = std::abs(out.f - target) < 1e-10;
    return out;
}

// ---- (P, W) system -----------------------------------------------------------

Vec2 pw_rhs(double P, double W, double lambda, double rho0)
{
    if (!(P > 0)) throw SingularState("P reached zero");
    const double cw = std::cos(W), tP = std::tanh(P);
    const double disc = tP * tP * cw * cw + k_of(lambda, rho0);
    if (disc < 0) throw SingularState("(P, W) system left its domain");
    const double lr = lambda * rho0;
    return Vec2(2 * lr * std::sin(W), lr * (2 / tP + tP) * cw + lr * std::sqrt(disc));
}

Vec2 desingularized_field(double P, double W, double beta)
{
    const double cw = std::cos(W), tP = std::tanh(P);
    return Vec2(2 * tP * std::sin(W), (2 + tP * tP) * cw + tP * std::sqrt(tP * tP * cw * cw + beta * beta));
}

Eigen::Matrix2d desingularized_jacobian_fd(double P, double W, double beta, double h)
{
    Eigen::Matrix2d J;
    J.col(0) = (desingularized_field(P + h, W, beta) - desingularized_field(P - h, W, beta)) / (2 * h);
    J.col(1) = (desingularized_field(P, W + h, beta) - desingularized_field(P, W - h, beta)) / (2 * h);
    return J;
}

Trajectory<Vec4> integrate_pw(double lambda, double rho0, double P0, double W0, double s0, double s1,
                              const IntegratorConfig& cfg, std::span<const EventSpec<Vec4>> events)
{
    auto f = [=](double, const Vec4& v) {
        const Vec2 d = pw_rhs(v[0], v[1], lambda, rho0);
        const double cw = std::cos(v[1]), th = std::tanh(v[0] / 2);
        return Vec4(d[0], d[1], th * cw, cw / th);
    };
    return integrate(f, Vec4(P0, W0, 0, 0), s0, s1, cfg, events);
}

FieldSample reconstruct_pw(double lambda, double rho0, double delta0, double argc0, double W0, double s,
                           const Vec4& v)
{
    const double P = v[0], W = v[1], lr = lambda * rho0;
    const double cw = std::cos(W), tP = std::tanh(P);
    FieldSample f;
    f.s = s;
    f.z = std::polar(rho0, lr * (v[2] + v[3]) - W + W0);
    f.xi = Quaternion(std::polar(delta0 * std::cosh(P / 2), argc0 + lr * v[2]),
                      std::polar(delta0 * std::sinh(P / 2), W0 - argc0 + lr * v[3]));
    f.r = 4 * lambda * rho0 * rho0 * rho0 *
          (tP * cw + std::sqrt(tP * tP * cw * cw + k_of(lambda, rho0))) / (delta0 * delta0 * std::cosh(P));
    return f;
}

namespace {

Trajectory<Vec3> separatrix(double lambda, double rho0, Vec3 start, double tau_end,
                            std::span<const EventSpec<Vec3>> events)
{
    const double beta = std::sqrt(k_of(lambda, rho0));
    const double lr = lambda * rho0;
    auto f = [=](double, const Vec3& v) {
        const Vec2 x = desingularized_field(v[0], v[1], beta);
        return Vec3(x[0], x[1], std::tanh(v[0]) / lr);
    };
    return integrate(f, start, 0.0, tau_end, tight(1e-12), events);
}

double crossing_of_pi(const Trajectory<Vec3>& tr)
{
    if (tr.termination != Termination::event_stop) throw std::runtime_error("separatrix did not reach W = pi");
    return tr.back()[0];
}

}  // namespace

Trajectory<Vec3> unstable_separatrix(double lambda, double rho0, double eps, double tau_max,
                                     std::span<const EventSpec<Vec3>> events)
{
    const double beta = std::sqrt(k_of(lambda, rho0));
    return separatrix(lambda, rho0, Vec3(eps, pi / 2 + eps * beta / 4, 0), tau_max, events);
}

Trajectory<Vec3> stable_separatrix(double lambda, double rho0, double eps, double tau_max,
                                   std::span<const EventSpec<Vec3>> events)
{
    const double beta = std::sqrt(k_of(lambda, rho0));
    return separatrix(lambda, rho0, Vec3(eps, 3 * pi / 2 - eps * beta / 4, 0), -tau_max, events);
}

double p_crit(double lambda, double rho0, double eps)
{
    if (!(rho0 < rho_crit(lambda))) throw std::domain_error("P_crit needs rho0 < rho_crit");
    std::vector<EventSpec<Vec3>> ev{{[](double, const Vec3& v) { return v[1] - pi; }, Direction::rising,
                                     EventAction::stop, "W=pi"}};
    return crossing_of_pi(unstable_separatrix(lambda, rho0, eps, 500, ev));
}

double p_crit_stable(double lambda, double rho0, double eps)
{
    if (!(rho0 < rho_crit(lambda))) throw std::domain_error("P_crit needs rho0 < rho_crit");
    std::vector<EventSpec<Vec3>> ev{{[](double, const Vec3& v) { return v[1] - pi; }, Direction::falling,
                                     EventAction::stop, "W=pi"}};
    return crossing_of_pi(stable_separatrix(lambda, rho0, eps, 500, ev));
}

F1F2 f1_f2_deltapos(double lambda, double rho0, double P0, double P_crit, double rtol)
{
    const auto cc = critical_constants(lambda, rho0);
    if (!(rho0 < cc.rho_crit)) throw std::domain_error("f1, f2 need rho0 < rho_crit");
    if (std::abs(P0 - cc.P_inf) < 1e-9) throw std::domain_error("P0 is the fixed point");
    if (std::abs(P0 - P_crit) < 1e-9) throw std::domain_error("P0 lies on the separatrix");

    F1F2 out;
    const bool drift = P0 > P_crit;
    out.kind = drift ? OrbitClass::drift_periodic : OrbitClass::periodic;
    const double target = drift ? 3 * pi : pi;
    const Direction dir = (drift || pw_rhs(P0, pi, lambda, rho0)[1] > 0) ? Direction::rising : Direction::falling;
    std::vector<EventSpec<Vec4>> ev{{[target](double, const Vec4& v) { return v[1] - target; }, dir,
                                     EventAction::stop, "return"}};
    auto tr = integrate_pw(lambda, rho0, P0, pi, 0.0, 1e6, tight(rtol), ev);
    if (tr.termination != Termination::event_stop) throw std::runtime_error("orbit did not return");
    const Vec4 e = tr.back();
    out.T = tr.s_end();
    out.f1 = lambda * rho0 / (2 * pi) * e[2];
    out.f2 = lambda * rho0 / (2 * pi) * e[3];
    out.closure = std::abs(e[0] - P0) + std::abs(e[1] - target);
    return out;
}

double linearized_period(double lambda, double rho0)
{
    const double Pinf = critical_constants(lambda, rho0).P_inf;
    const double h = 1e-6;
    Eigen::Matrix2d J;
    J.col(0) = (pw_rhs(Pinf + h, pi, lambda, rho0) - pw_rhs(Pinf - h, pi, lambda, rho0)) / (2 * h);
    J.col(1) = (pw_rhs(Pinf, pi + h, lambda, rho0) - pw_rhs(Pinf, pi - h, lambda, rho0)) / (2 * h);
    const double tr = J.trace(), disc = J.determinant() - tr * tr / 4;
    if (!(disc > 0)) throw std::domain_error("fixed point is not a centre");
    return 2 * pi / std::sqrt(disc);
}

// ---- rational fixed points ------------------------------------------------

double RationalFixedPoint::t_of_s(double s) const
{
    return lambda * rho0 * s / std::sqrt(double(p) * double(q));
}

FieldSample RationalFixedPoint::sample(double s) const
{
    const double t = t_of_s(s);
    FieldSample f;
    f.s = s;
    f.z = std::polar(rho0, -double(n_z) * t);
    f.xi = Quaternion(std::polar(delta0 * std::cosh(P0 / 2), -double(n_c) * t + argc0),
                      -std::polar(delta0 * std::sinh(P0 / 2), -double(n_h) * t - argc0));
    f.r = r;
    return f;
}

RationalFixedPoint rational_fixed_point(double lambda, std::int64_t p, std::int64_t q, double delta0, double argc0)
{
    if (!(p >= 1 && p < q) || std::gcd(p, q) != 1) throw std::invalid_argument("need coprime 1 <= p < q");
    RationalFixedPoint fp;
    fp.lambda = lambda;
    fp.p = p;
    fp.q = q;
    fp.delta0 = delta0;
    fp.argc0 = argc0;
    const double pd = double(p), qd = double(q), rc = rho_crit(lambda);
    fp.P0 = 2 * std::atanh(std::sqrt(pd / qd));
    fp.coth_P0 = (pd + qd) / (2 * std::sqrt(pd * qd));
    const double inv2 = 1 / (rc * rc) + lambda * lambda * (qd - pd) * (qd - pd) / (pd * qd);
    fp.rho0 = 1 / std::sqrt(inv2);
    fp.coth_P_inf = 1 / std::tanh(critical_constants(lambda, fp.rho0).P_inf);
    fp.stationarity = pw_rhs(fp.P0, pi, lambda, fp.rho0).norm();
    const double root = std::sqrt(1 / (fp.rho0 * fp.rho0) - 1 / (rc * rc));
    fp.r = 4 * fp.rho0 * fp.rho0 * fp.rho0 * root / (delta0 * delta0);
    fp.period_s = 2 * pi * std::sqrt(pd * qd) / (lambda * fp.rho0);
    fp.radius_sphere = fp.r;
    fp.radius_circle = fp.r * fp.period_s / (2 * pi);
    fp.n_z = p + q;
    fp.n_c = p;
    fp.n_h = q;

    // closed-form display: (1 + (2 lambda^2/3)(q/p + 9 +- sqrt(q^2/p^2 - 12)/2))^{-1/2}
    const double qp = qd / pd, d = qp * qp - 12;
    if (d >= 0) {
        fp.rho0_display_plus = 1 / std::sqrt(1 + 2 * lambda * lambda / 3 * (qp + 9 + 0.5 * std::sqrt(d)));
        fp.rho0_display_minus = 1 / std::sqrt(1 + 2 * lambda * lambda / 3 * (qp + 9 - 0.5 * std::sqrt(d)));
    }
    const double shrink = std::sqrt(1 - fp.rho0 * fp.rho0 / (rc * rc));
    fp.radius_circle_display = 2 * std::sqrt(pd * qd) / (lambda * delta0) * shrink;
    fp.radius_sphere_display = 2 * fp.rho0 / delta0 * shrink;

    auto close = [&](double a) { return std::isfinite(a) && std::abs(a - fp.rho0) <= 1e-12 * fp.rho0; };
    if (!close(fp.rho0_display_plus) && !close(fp.rho0_display_minus)) {
        auto residual = [&](double rho) {
            return std::isfinite(rho) ? format_double(pw_rhs(fp.P0, pi, lambda, rho).norm()) : std::string("n/a");
        };
        fp.discrepancy = "rho0(lambda,p/q) display gives {" + format_double(fp.rho0_display_plus) + ", " +
                         format_double(fp.rho0_display_minus) + "} with |rhs| {" +
                         residual(fp.rho0_display_plus) + ", " + residual(fp.rho0_display_minus) +
                         "}; stationary value from coth P_inf(rho0) = coth P0 is " + format_double(fp.rho0) +
                         " with |rhs| " + format_double(fp.stationarity) + "; display radii (S1, S2) = (" +
                         format_double(fp.radius_circle_display) + ", " + format_double(fp.radius_sphere_display) +
                         ") vs metric radii (" + format_double(fp.radius_circle) + ", " +
                         format_double(fp.radius_sphere) + ")";
    }
    return fp;
}

// ---- rho0 > 1 -----------------------------------------------------------------

SingularBranchReport singular_branch_rho_gt1(double lambda, double rho0, int sign, double W0,
                                             const Quaternion& xi0, double P0, double delta0, double s_max)
{
    if (!(rho0 > 1)) throw std::invalid_argument("singular branches need rho0 > 1");
    const double alpha = std::sqrt(1 - 1 / (rho0 * rho0)) / lambda;
    const double a2 = alpha * alpha, lr = lambda * rho0;
    SingularBranchReport rep;
    rep.sign = sign;
    IntegratorConfig cfg = tight(1e-12);

    if (std::isnan(P0)) {
        rep.branch = Branch::delta0;
        if (std::cos(W0) < alpha) throw std::invalid_argument("need cos W0 >= alpha");
        // the square root is clamped so that the crossing itself is resolved by the event
        auto f = [=](double, const Vec3& v) {
            const double cw = std::cos(v[0]);
            return Vec3(lr * (3 * cw + sign * std::sqrt(std::max(0.0, cw * cw - a2))), cw, std::sin(v[0]));
        };
        std::vector<EventSpec<Vec3>> ev{{[alpha](double, const Vec3& v) { return std::cos(v[0]) - alpha; },
                                         Direction::falling, EventAction::stop, "sqrt=0"}};
        auto tr = integrate(f, Vec3(W0, 0, 0), 0.0, s_max, cfg, ev);
        rep.termination = tr.termination;
        auto r_of = [&](const Vec3& v) {
            const double cw = std::cos(v[0]);
            return 4 * lambda * rho0 * rho0 * rho0 * (cw + sign * std::sqrt(std::max(0.0, cw * cw - a2))) /
                   xi0.norm2() * std::exp(-2 * lr * v[2]);
        };
        rep.r_min = INFINITY;
        rep.min_W_rate = INFINITY;
        for (std::size_t i = 0; i < tr.size(); ++i) {
            rep.r_min = std::min(rep.r_min, r_of(tr.y[i]));
            rep.min_W_rate = std::min(rep.min_W_rate, f(0, tr.y[i])[0]);
        }
        if (tr.termination == Termination::event_stop) {
            rep.s_singular = tr.s_end();
            rep.W_singular = tr.back()[0];
            rep.r_singular = r_of(tr.back());
        }
        // inf over x in [alpha, 1] of 3x +- sqrt(x^2 - alpha^2)
        if (sign > 0) rep.min_W_rate_bound = lr * 3 * alpha;
        else {
            const double xs = 3 * alpha / (2 * sqrt2);
            rep.min_W_rate_bound = xs <= 1 ? lr * 2 * sqrt2 * alpha : lr * (3 - std::sqrt(1 - a2));
        }
        return rep;
    }

    rep.branch = Branch::deltapos;
    auto g = [a2](double P, double W) {
        const double t = std::tanh(P) * std::cos(W);
        return t * t - a2;
    };
    if (g(P0, W0) < 0 || std::cos(W0) <= 0) throw std::invalid_argument("need tanh P0 cos W0 >= alpha");
    auto f = [=](double, const Vec4& v) {
        const double P = v[0], W = v[1];
        if (!(P > 0)) throw SingularState("P reached zero");
        const double cw = std::cos(W), tP = std::tanh(P), th = std::tanh(P / 2);
        const double root = std::sqrt(std::max(0.0, tP * tP * cw * cw - a2));
        return Vec4(2 * lr * std::sin(W), lr * (2 / tP + tP) * cw + sign * lr * root, th * cw, cw / th);
    };
    std::vector<EventSpec<Vec4>> ev{{[g](double, const Vec4& v) { return g(v[0], v[1]); }, Direction::falling,
                                     EventAction::stop, "sqrt=0"}};
    auto tr = integrate(f, Vec4(P0, W0, 0, 0), 0.0, s_max, cfg, ev);
    rep.termination = tr.termination;
    auto r_of = [&](const Vec4& v) {
        const double cw = std::cos(v[1]), tP = std::tanh(v[0]);
        return 4 * lambda * rho0 * rho0 * rho0 * (tP * cw + sign * std::sqrt(std::max(0.0, tP * tP * cw * cw - a2))) /
               (delta0 * delta0 * std::cosh(v[0]));
    };
    rep.r_min = INFINITY;
    rep.min_W_rate = INFINITY;
    for (std::size_t i = 0; i < tr.size(); ++i) {
        rep.r_min = std::min(rep.r_min, r_of(tr.y[i]));
        rep.min_W_rate = std::min(rep.min_W_rate, f(0, tr.y[i])[1]);
    }
    if (tr.termination == Termination::event_stop) {
        rep.s_singular = tr.s_end();
        rep.W_singular = tr.back()[1];
        rep.r_singular = r_of(tr.back());
    }
    return rep;
}

}  // namespace dym
