#include "dym/dynamics.hpp"

#include <stdexcept>

namespace dym {

namespace {
const Complex I(0, 1);

Complex phase(double t) { return std::polar(1.0, t); }
}  // namespace

Vec8 cartesian_rhs(double s, const Vec8& v, const MetricProfile& metric, double lambda)
{
    const double r = metric(s);
    if (!(r > 0)) throw SingularState("metric is not positive");
    return cartesian_rhs<double>(v, r, lambda);
}

CartesianPoint to_point(const InitialData& d)
{
    return {Complex(d.rho0, 0), Complex(d.U0, -d.xi0.norm2() / (4 * d.rho0)), d.xi0};
}

CartesianPoint apply_u1(const CartesianPoint& p, double T)
{
    const Complex e = phase(T), e2 = phase(T / 2);
    return {e * p.z, e * p.Y, p.xi * e2};
}

CartesianPoint apply_swap(const CartesianPoint& p) { return {p.z, p.Y, Quaternion(p.xi.h, p.xi.c)}; }

CartesianPoint apply_scale(const CartesianPoint& p, double a) { return {p.z, a * a * p.Y, p.xi * a}; }

CartesianPoint apply_transform(const CartesianPoint& p, const CanonicalTransform& t)
{
    CartesianPoint q = apply_u1(p, t.rotation);
    return t.swapped ? apply_swap(q) : q;
}

CartesianPoint invert_transform(const CartesianPoint& p, const CanonicalTransform& t)
{
    CartesianPoint q = t.swapped ? apply_swap(p) : p;
    return apply_u1(q, -t.rotation);
}

Canonicalized canonicalize_initial_data(Complex z0, Complex Y0, const Quaternion& xi0, double tol)
{
    if (std::abs(z0) == 0) throw std::invalid_argument("z0 = 0 has no canonical form");
    const double viol = constraint_value(z0, Y0, xi0);
    const double scale = 1 + std::abs(z0) * std::abs(Y0) + xi0.norm2();
    if (std::abs(viol) > tol * scale)
        throw std::invalid_argument("initial data violate the constraint");

    Canonicalized out;
    const double T = -std::arg(z0);
    CartesianPoint p = apply_u1({z0, Y0, xi0}, T);
    p.z = Complex(std::abs(z0), 0);
    out.transform.rotation = T;
    if (std::abs(p.xi.c) < std::abs(p.xi.h)) {
        p = apply_swap(p);
        out.transform.swapped = true;
    }
    const double sum = std::arg(p.xi.c) + std::arg(p.xi.h);
    if (sum <= -pi || sum > pi) {
        // rotation by 2 pi: z and Y fixed, xi -> -xi
        p.xi = -p.xi;
        out.transform.rotation += 2 * pi;
    }
    out.data.rho0 = p.z.real();
    out.data.U0 = p.Y.real();
    out.data.xi0 = p.xi;
    return out;
}

Complex project_constraint(Complex z0, Complex Y0, const Quaternion& xi0)
{
    if (std::abs(z0) == 0) throw std::invalid_argument("z0 = 0");
    const Complex w = Y0 / z0;
    return z0 * Complex(w.real(), -xi0.norm2() / (4 * std::norm(z0)));
}

Quaternion xi_delta0(Complex c0, double W0) { return {c0, std::conj(c0) * phase(W0)}; }

Quaternion xi_deltapos(double delta0, double P0, double argc, double W0)
{
    return {std::polar(delta0 * std::cosh(P0 / 2), argc), std::polar(delta0 * std::sinh(P0 / 2), W0 - argc)};
}

const char* to_string(Branch b) { return b == Branch::delta0 ? "delta0" : "deltapos"; }

PolarInit polar_init(const InitialData& d)
{
    const Complex c = d.xi0.c, h = d.xi0.h;
    const double ac = std::abs(c), ah = std::abs(h);
    if (ah == 0) throw std::invalid_argument("polar form needs h0 != 0");
    const double norm = d.xi0.norm();
    const double diff = ac - ah;
    if (diff < -tau_delta * norm) throw std::invalid_argument("initial data are not canonical (|c0| < |h0|)");

    PolarInit pi;
    pi.rho0 = d.rho0;
    pi.H0 = d.U0;
    pi.W0 = std::arg(c) + std::arg(h);
    pi.c0 = c;
    pi.h0 = h;
    pi.xi_norm = norm;
    if (diff <= tau_delta * norm) {
        pi.branch = Branch::delta0;
        pi.R0 = ac;
    } else {
        pi.branch = Branch::deltapos;
        pi.delta0 = std::sqrt(diff * (ac + ah));
        pi.P0 = 2 * std::asinh(ah / pi.delta0);
        pi.near_degenerate = pi.delta0 < 1e-6 * norm;
    }
    return pi;
}

Vec6 polar_initial_state_delta0(const PolarInit& pi)
{
    Vec6 v;
    v << pi.rho0, pi.H0, pi.R0, pi.W0, 0, 0;
    return v;
}

Vec7 polar_initial_state_deltapos(const PolarInit& pi)
{
    Vec7 v;
    v << pi.rho0, pi.H0, pi.P0, pi.W0, 0, 0, 0;
    return v;
}

RadiusDelta0 metric_radius_delta0(const MetricProfile& m)
{
    return [m](double s, const Vec6&) { return m(s); };
}

RadiusDeltapos metric_radius_deltapos(const MetricProfile& m)
{
    return [m](double s, const Vec7&) { return m(s); };
}

RadiusDelta0 rho_const_radius_delta0(double lambda, double rho0, int sign)
{
    const double k = (1 / (rho0 * rho0) - 1) / (lambda * lambda);
    return [=](double, const Vec6& v) {
        const double cw = std::cos(v[3]), R = v[2];
        const double disc = cw * cw + k;
        if (disc < 0) throw SingularState("constant-rho closure has no real radius");
        const double r = 2 * lambda * rho0 * rho0 * rho0 * (cw + sign * std::sqrt(disc)) / (R * R);
        if (!(r > 0)) throw SingularState("constant-rho closure radius is not positive");
        return r;
    };
}

RadiusDeltapos rho_const_radius_deltapos(double lambda, double rho0, double delta0, int sign)
{
    const double k = (1 / (rho0 * rho0) - 1) / (lambda * lambda);
    return [=](double, const Vec7& v) {
        const double cw = std::cos(v[3]), tP = std::tanh(v[2]);
        const double disc = tP * tP * cw * cw + k;
        if (disc < 0) throw SingularState("constant-rho closure has no real radius");
        const double r = 4 * lambda * rho0 * rho0 * rho0 * (tP * cw + sign * std::sqrt(disc)) /
                         (delta0 * delta0 * std::cosh(v[2]));
        if (!(r > 0)) throw SingularState("constant-rho closure radius is not positive");
        return r;
    };
}

RadiusDelta0 w_const_radius_delta0(double lambda, double W0)
{
    const double cw0 = std::cos(W0);
    if (!(cw0 < 0)) throw std::invalid_argument("constant-W closure needs cos W0 < 0");
    return [=](double, const Vec6& v) {
        const double rho = v[0], R = v[2];
        return -4 * lambda * cw0 * rho * rho * rho / (R * R);
    };
}

RadiusDeltapos w_const_radius_deltapos(double lambda, double W0, double delta0)
{
    const double cw0 = std::cos(W0);
    if (!(cw0 < 0)) throw std::invalid_argument("constant-W closure needs cos W0 < 0");
    return [=](double, const Vec7& v) {
        const double rho = v[0];
        if (!(v[2] > 0)) throw SingularState("P reached zero");
        return -8 * lambda * cw0 * rho * rho * rho / (delta0 * delta0 * std::sinh(v[2]));
    };
}

FieldSample reconstruct_delta0(const PolarInit& pi, double s, const Vec6& v, double lambda, double r)
{
    const double rho = v[0], R = v[2], W = v[3], A = v[4];
    FieldSample f;
    f.s = s;
    f.z = std::polar(rho, 2 * lambda * A - W + pi.W0);
    const Complex ph = phase(lambda * A);
    f.xi = Quaternion(pi.c0 / std::abs(pi.c0) * R * ph, pi.h0 / std::abs(pi.h0) * R * ph);
    f.r = r;
    return f;
}

FieldSample reconstruct_deltapos(const PolarInit& pi, double s, const Vec7& v, double lambda, double r)
{
    const double rho = v[0], P = v[2], W = v[3];
    FieldSample f;
    f.s = s;
    f.z = std::polar(rho, 2 * lambda * v[6] - W + pi.W0);
    f.xi = Quaternion(std::polar(pi.delta0 * std::cosh(P / 2), std::arg(pi.c0) + lambda * v[4]),
                      std::polar(pi.delta0 * std::sinh(P / 2), std::arg(pi.h0) + lambda * v[5]));
    f.r = r;
    return f;
}

Trajectory<Vec8> integrate_cartesian(const Vec8& y0, const MetricProfile& metric, double lambda,
                                     double s0, double s1, const IntegratorConfig& cfg)
{
    auto f = [&](double s, const Vec8& v) { return cartesian_rhs(s, v, metric, lambda); };
    return integrate(f, y0, s0, s1, cfg);
}

Trajectory<Vec6> integrate_polar_delta0(const PolarInit& pi, const RadiusDelta0& radius, double lambda,
                                        double s0, double s1, const IntegratorConfig& cfg)
{
    if (pi.branch != Branch::delta0) throw std::invalid_argument("initial data are on the deltapos branch");
    auto f = [&](double s, const Vec6& v) { return polar_rhs_delta0<double>(v, radius(s, v), lambda); };
    return integrate(f, polar_initial_state_delta0(pi), s0, s1, cfg);
}

Trajectory<Vec7> integrate_polar_deltapos(const PolarInit& pi, const RadiusDeltapos& radius, double lambda,
                                          double s0, double s1, const IntegratorConfig& cfg)
{
    if (pi.branch != Branch::deltapos) throw std::invalid_argument("initial data are on the delta0 branch");
    auto f = [&](double s, const Vec7& v) {
        return polar_rhs_deltapos<double>(v, radius(s, v), lambda, pi.delta0);
    };
    return integrate(f, polar_initial_state_deltapos(pi), s0, s1, cfg);
}

}  // namespace dym
