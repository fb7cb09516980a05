#include "dym/families.hpp"

#include <array>
#include <stdexcept>

namespace dym {

void SampledSolution::resize(Eigen::Index n)
{
    s.resize(n);
    r.resize(n);
    z.resize(n);
    c.resize(n);
    h.resize(n);
}

void SampledSolution::set(Eigen::Index i, const FieldSample& f)
{
    s[i] = f.s;
    z[i] = f.z;
    c[i] = f.xi.c;
    h[i] = f.xi.h;
    r[i] = f.r;
}

Eigen::VectorXd uniform_grid(double a, double b, double h)
{
    if (!(h > 0) || !(b > a)) throw std::invalid_argument("grid needs a < b and h > 0");
    const auto n = static_cast<Eigen::Index>(std::llround((b - a) / h));
    if (std::abs(a + n * h - b) > 1e-9 * std::max(1.0, std::abs(b)))
        throw std::invalid_argument("span is not a multiple of the grid step");
    Eigen::VectorXd s(n + 1);
    for (Eigen::Index i = 0; i <= n; ++i) s[i] = a + i * h;
    return s;
}

namespace {

// 8-point Gauss-Legendre on [-1, 1]
constexpr std::array<long double, 4> gl_x{0.1834346424956498049394761423601840L, 0.5255324099163289858177390491892463L,
                                          0.7966664774136267395915539364758304L, 0.9602898564975362316835608685694730L};
constexpr std::array<long double, 4> gl_w{0.3626837833783619829651504492771957L, 0.3137066458778872873379622019866013L,
                                          0.2223810344533744705443559944919653L, 0.1012285362903762591525313641640500L};

long double gauss(const std::function<double(double)>& f, double a, double b)
{
    const long double m = (static_cast<long double>(a) + b) / 2, d = (static_cast<long double>(b) - a) / 2;
    long double sum = 0;
    for (int k = 0; k < 4; ++k) {
        sum += gl_w[k] * (static_cast<long double>(f(static_cast<double>(m - d * gl_x[k]))) +
                          static_cast<long double>(f(static_cast<double>(m + d * gl_x[k]))));
    }
    return sum * d;
}

}  // namespace

std::vector<double> cumulative_from_zero(const std::function<double(double)>& f, const Eigen::VectorXd& s)
{
    const Eigen::Index n = s.size();
    std::vector<double> out(static_cast<std::size_t>(n));
    if (n == 0) return out;
    Eigen::Index k0 = 0;
    for (Eigen::Index i = 1; i < n; ++i)
        if (std::abs(s[i]) < std::abs(s[k0])) k0 = i;
    long double acc = s[k0] == 0 ? 0.0L : gauss(f, 0.0, s[k0]);
    out[static_cast<std::size_t>(k0)] = static_cast<double>(acc);
    for (Eigen::Index i = k0 + 1; i < n; ++i) {
        acc += gauss(f, s[i - 1], s[i]);
        out[static_cast<std::size_t>(i)] = static_cast<double>(acc);
    }
    acc = out[static_cast<std::size_t>(k0)];
    for (Eigen::Index i = k0 - 1; i >= 0; --i) {
        acc -= gauss(f, s[i], s[i + 1]);
        out[static_cast<std::size_t>(i)] = static_cast<double>(acc);
    }
    return out;
}

// ---- closed forms -------------------------------------------------------------------

double Rho1Delta0::W(double s) const { return std::atan(std::sinh(gamma0 + 4 * lambda * s)); }

double Rho1Delta0::r(double s) const
{
    const double g = gamma0 + 4 * lambda * s;
    return 8 * lambda * std::sqrt(std::cosh(gamma0)) * std::pow(std::cosh(g), -1.5) / xi0.norm2();
}

double Rho1Delta0::r_display(double s) const
{
    return 16 * lambda / xi0.norm2() * std::pow(std::cosh(4 * lambda * s), -1.5);
}

FieldSample Rho1Delta0::sample(double s) const
{
    const double g = gamma0 + 4 * lambda * s, dW = W(s) - W0;
    FieldSample f;
    f.s = s;
    f.z = std::polar(1.0, -dW / 2);
    f.xi = xi0 * std::polar(std::pow(std::cosh(g) / std::cosh(gamma0), 0.25), dW / 4);
    f.r = r(s);
    return f;
}

Rho1Delta0 closed_form_rho1_delta0(double lambda, Complex c0, double W0)
{
    if (!(std::abs(W0) < pi / 2)) throw std::invalid_argument("rho0 = 1 family needs |W0| < pi/2 (cos W0 > 0)");
    if (std::abs(c0) == 0) throw std::invalid_argument("c0 must be nonzero");
    Rho1Delta0 f;
    f.lambda = lambda;
    f.W0 = W0;
    f.gamma0 = std::asinh(std::tan(W0));
    f.xi0 = xi_delta0(c0, W0);
    return f;
}

double Rho1Deltapos::P(double s) const { return 0.5 * std::acosh(C * std::cosh(4 * lambda * s + gamma0)); }

double Rho1Deltapos::W(double s) const
{
    return std::atan(C * std::sinh(4 * lambda * s + gamma0) / std::sqrt(C * C - 1));
}

double Rho1Deltapos::r(double s) const
{
    const double p = P(s);
    return 8 * lambda * std::tanh(p) * std::cos(W(s)) / (delta0 * delta0 * std::cosh(p));
}

Rho1Deltapos closed_form_rho1_deltapos(double lambda, double P0, double W0, double delta0, double argc0)
{
    if (!(P0 > 0) || !(std::abs(W0) < pi / 2)) throw std::invalid_argument("needs tanh P0 cos W0 > 0 (P0 > 0, |W0| < pi/2)");
    if (!(delta0 > 0)) throw std::invalid_argument("delta0 must be positive");
    Rho1Deltapos f;
    f.lambda = lambda;
    f.P0 = P0;
    f.W0 = W0;
    f.delta0 = delta0;
    f.argc0 = argc0;
    const double sh = std::sinh(2 * P0), cw = std::cos(W0);
    f.C = std::sqrt(1 + cw * cw * sh * sh);
    f.gamma0 = std::atanh(std::sin(W0) * std::tanh(2 * P0));
    return f;
}

FieldSample WInfSolution::sample(double s) const
{
    const double a = std::sqrt(1 - rho0 * rho0) / std::sqrt(2.0);
    const double g = std::sqrt(rho0 * rho0 / (rho_crit(lambda) * rho_crit(lambda)) - 1) / (2 * std::sqrt(2.0));
    FieldSample f;
    f.s = s;
    f.z = std::polar(rho0, -a * s);
    f.xi = xi0 * std::polar(std::exp(g * s), -a * s / 2);
    f.r = 2 * std::sqrt(2.0) * rho0 * rho0 * std::sqrt(1 - rho0 * rho0) / xi0.norm2() * std::exp(-2 * g * s);
    return f;
}

WInfSolution winf_solution(double lambda, double rho0, Complex c0)
{
    const auto cc = critical_constants(lambda, rho0);
    if (!(rho0 >= cc.rho_crit && rho0 < 1)) throw std::invalid_argument("W_inf family needs rho_crit <= rho0 < 1");
    WInfSolution f;
    f.lambda = lambda;
    f.rho0 = rho0;
    f.W_inf = cc.W_inf;
    f.xi0 = xi_delta0(c0, cc.W_inf);
    return f;
}

FieldSample S1xS2Solution::sample(double s) const
{
    const double t = t_of_s(s);
    return {s, std::polar(rho_c, -2 * t), xi0 * std::polar(1.0, -t), r};
}

S1xS2Solution s1xs2_solution_delta0(double lambda, Complex c0)
{
    if (std::abs(c0) == 0) throw std::invalid_argument("c0 must be nonzero");
    S1xS2Solution f;
    f.lambda = lambda;
    f.rho_c = rho_crit(lambda);
    f.xi0 = xi_delta0(c0, pi);
    const double n2 = f.xi0.norm2(), rc = f.rho_c;
    f.r = 8 * lambda * rc * rc * rc / n2;
    f.radius_sphere = f.r;
    f.radius_circle = 8 * rc * rc / n2;
    return f;
}

// ---- sampled families -----------------------------------------------------------------

namespace {

SampledSolution start(const std::string& name, const Eigen::VectorXd& s)
{
    SampledSolution out;
    out.family = name;
    out.resize(s.size());
    return out;
}

}  // namespace

SampledSolution family_rho1_delta0(double lambda, Complex c0, double W0, const Eigen::VectorXd& s)
{
    const Rho1Delta0 cf = closed_form_rho1_delta0(lambda, c0, W0);
    SampledSolution out = start("rho1-delta0", s);
    Eigen::VectorXd W(s.size());
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        out.set(i, cf.sample(s[i]));
        W[i] = cf.W(s[i]);
    }
    out.extra.emplace_back("W", W);
    out.scalars["lambda"] = lambda;
    out.scalars["W0"] = W0;
    out.scalars["gamma0"] = cf.gamma0;
    out.scalars["r0"] = cf.r(0);
    out.scalars["r0_display_W0_zero"] = cf.r_display(0);
    out.scalars["xi0_norm2"] = cf.xi0.norm2();
    return out;
}

SampledSolution family_winfty(double lambda, double rho0, Complex c0, const Eigen::VectorXd& s)
{
    const WInfSolution cf = winf_solution(lambda, rho0, c0);
    SampledSolution out = start("winfty", s);
    for (Eigen::Index i = 0; i < s.size(); ++i) out.set(i, cf.sample(s[i]));
    out.scalars["lambda"] = lambda;
    out.scalars["rho0"] = rho0;
    out.scalars["W_inf"] = cf.W_inf;
    out.scalars["xi0_norm2"] = cf.xi0.norm2();
    return out;
}

SampledSolution family_s1xs2(double lambda, Complex c0, const Eigen::VectorXd& s)
{
    const S1xS2Solution cf = s1xs2_solution_delta0(lambda, c0);
    SampledSolution out = start("s1xs2", s);
    Eigen::VectorXd t(s.size());
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        out.set(i, cf.sample(s[i]));
        t[i] = cf.t_of_s(s[i]);
    }
    out.extra.emplace_back("t", t);
    out.scalars["lambda"] = lambda;
    out.scalars["rho_crit"] = cf.rho_c;
    out.scalars["r"] = cf.r;
    out.scalars["radius_circle"] = cf.radius_circle;
    out.scalars["radius_sphere"] = cf.radius_sphere;
    out.scalars["period_s"] = 2 * pi / (lambda * cf.rho_c);
    out.scalars["xi0_norm2"] = cf.xi0.norm2();
    return out;
}

SampledSolution family_rational_fp(double lambda, std::int64_t p, std::int64_t q, double delta0, double argc0,
                                   const Eigen::VectorXd& s)
{
    const RationalFixedPoint fp = rational_fixed_point(lambda, p, q, delta0, argc0);
    if (!(fp.stationarity <= 1e-12)) throw std::logic_error("rational fixed point failed the stationarity check");
    SampledSolution out = start("rational-fp", s);
    Eigen::VectorXd t(s.size());
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        out.set(i, fp.sample(s[i]));
        t[i] = fp.t_of_s(s[i]);
    }
    out.extra.emplace_back("t", t);
    out.scalars["lambda"] = lambda;
    out.scalars["p"] = double(p);
    out.scalars["q"] = double(q);
    out.scalars["delta0"] = delta0;
    out.scalars["rho0"] = fp.rho0;
    out.scalars["P0"] = fp.P0;
    out.scalars["coth_P0"] = fp.coth_P0;
    out.scalars["coth_P_inf"] = fp.coth_P_inf;
    out.scalars["stationarity"] = fp.stationarity;
    out.scalars["r"] = fp.r;
    out.scalars["period_s"] = fp.period_s;
    out.scalars["radius_circle"] = fp.radius_circle;
    out.scalars["radius_sphere"] = fp.radius_sphere;
    out.scalars["rho0_display_plus"] = fp.rho0_display_plus;
    out.scalars["rho0_display_minus"] = fp.rho0_display_minus;
    out.scalars["radius_circle_display"] = fp.radius_circle_display;
    out.scalars["radius_sphere_display"] = fp.radius_sphere_display;
    if (!fp.discrepancy.empty()) out.notes.push_back(fp.discrepancy);
    return out;
}

SampledSolution family_rho1_deltapos(double lambda, double P0, double W0, double delta0, double argc0,
                                     const Eigen::VectorXd& s)
{
    const Rho1Deltapos cf = closed_form_rho1_deltapos(lambda, P0, W0, delta0, argc0);
    auto i1 = cumulative_from_zero([&](double t) { return std::tanh(cf.P(t) / 2) * std::cos(cf.W(t)); }, s);
    auto i2 = cumulative_from_zero([&](double t) { return std::cos(cf.W(t)) / std::tanh(cf.P(t) / 2); }, s);
    SampledSolution out = start("rho1-deltapos", s);
    Eigen::VectorXd Pc(s.size()), Wc(s.size());
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        const auto k = static_cast<std::size_t>(i);
        const double P = cf.P(s[i]), W = cf.W(s[i]);
        FieldSample f;
        f.s = s[i];
        f.z = std::polar(1.0, lambda * (i1[k] + i2[k]) - W + W0);
        f.xi = Quaternion(std::polar(delta0 * std::cosh(P / 2), argc0 + lambda * i1[k]),
                          std::polar(delta0 * std::sinh(P / 2), W0 - argc0 + lambda * i2[k]));
        f.r = cf.r(s[i]);
        out.set(i, f);
        Pc[i] = P;
        Wc[i] = W;
    }
    out.extra.emplace_back("P", Pc);
    out.extra.emplace_back("W", Wc);
    out.scalars["lambda"] = lambda;
    out.scalars["P0"] = P0;
    out.scalars["W0"] = W0;
    out.scalars["delta0"] = delta0;
    out.scalars["C"] = cf.C;
    out.scalars["gamma0"] = cf.gamma0;
    return out;
}

namespace {

SampledSolution w0pi_sampled(const W0PiSolution& sol, const std::string& name, const Eigen::VectorXd& s)
{
    if (s[0] <= sol.s_blowup_backward || s[s.size() - 1] >= sol.s_blowup_forward)
        throw std::invalid_argument("grid reaches the finite-s blow-up of rho");
    auto I = cumulative_from_zero([&](double t) { return sol.rho(t); }, s);
    SampledSolution out = start(name, s);
    Eigen::VectorXd rho(s.size());
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        out.set(i, sol.sample(s[i], I[static_cast<std::size_t>(i)]));
        rho[i] = sol.rho(s[i]);
    }
    out.extra.emplace_back("rho", rho);
    out.scalars["lambda"] = sol.lambda;
    out.scalars["rho0"] = sol.rho0;
    out.scalars["U0"] = sol.U0;
    out.scalars["r0"] = sol.r0;
    out.scalars["x_fixed"] = sol.a;
    out.scalars["global"] = sol.global;
    out.scalars["global_display_inequality"] = sol.global_display;
    out.scalars["global_corrected_inequality"] = sol.global_corrected;
    out.scalars["s_blowup_forward"] = sol.s_blowup_forward;
    out.scalars["s_blowup_backward"] = sol.s_blowup_backward;
    return out;
}

}  // namespace

SampledSolution family_w0pi_delta0(double lambda, double rho0, double U0, Complex c0, const Eigen::VectorXd& s)
{
    return w0pi_sampled(closed_form_W0pi_delta0(lambda, rho0, U0, c0), "w0pi-delta0", s);
}

SampledSolution family_w0pi_deltapos(double lambda, double rho0, double U0, double delta0, double P0,
                                     double argc0, const Eigen::VectorXd& s)
{
    SampledSolution out =
        w0pi_sampled(closed_form_W0pi_deltapos(lambda, rho0, U0, delta0, P0, argc0), "w0pi-deltapos", s);
    out.scalars["delta0"] = delta0;
    out.scalars["P0"] = P0;
    return out;
}

}  // namespace dym
