#include "dym/verify.hpp"

#include <stdexcept>

namespace dym {

namespace {

template <class V>
V first_diff(const V& y, double h)
{
    const Eigen::Index n = y.size();
    V d = V::Constant(n, typename V::Scalar(NAN));
    for (Eigen::Index i = 2; i + 2 < n; ++i) d[i] = (-y[i + 2] + 8.0 * y[i + 1] - 8.0 * y[i - 1] + y[i - 2]) / (12 * h);
    return d;
}

}  // namespace

Eigen::VectorXd fd_first(const Eigen::VectorXd& y, double h) { return first_diff(y, h); }
Eigen::VectorXcd fd_first(const Eigen::VectorXcd& y, double h) { return first_diff(y, h); }

Eigen::VectorXd fd_second(const Eigen::VectorXd& y, double h)
{
    const Eigen::Index n = y.size();
    Eigen::VectorXd d = Eigen::VectorXd::Constant(n, NAN);
    for (Eigen::Index i = 2; i + 2 < n; ++i)
        d[i] = (-y[i + 2] + 16 * y[i + 1] - 30 * y[i] + 16 * y[i - 1] - y[i - 2]) / (12 * h * h);
    return d;
}

FieldGrid fields_from_solution(const Eigen::VectorXd& s, const Eigen::VectorXcd& z, const Eigen::VectorXcd& c,
                               const Eigen::VectorXcd& h, const Eigen::VectorXd& r)
{
    const Eigen::Index n = s.size();
    if (z.size() != n || c.size() != n || h.size() != n || r.size() != n)
        throw std::invalid_argument("field columns differ in length");
    if (n < 2) throw std::invalid_argument("grid needs at least two points");
    FieldGrid f;
    f.h = (s[n - 1] - s[0]) / double(n - 1);
    for (Eigen::Index i = 1; i < n; ++i)
        if (std::abs(s[i] - s[i - 1] - f.h) > 1e-9 * std::max(f.h, std::abs(s[i])))
            throw std::invalid_argument("grid is not uniform near s = " + std::to_string(s[i]));
    if (!((r.array() > 0).all())) throw std::invalid_argument("r must be positive");
    f.s = s;
    f.w = z.real();
    f.v = z.imag();
    f.r = r;
    f.alpha = r;
    f.psi1 = c.array() / r.array().cast<Complex>();
    f.psi2 = h.conjugate().array() / r.array().cast<Complex>();
    return f;
}

FieldGrid fields_from_solution(const SampledSolution& sol)
{
    return fields_from_solution(sol.s, sol.z, sol.c, sol.h, sol.r);
}

void solution_from_fields(const FieldGrid& f, Eigen::VectorXcd& z, Eigen::VectorXcd& c, Eigen::VectorXcd& h)
{
    const Eigen::Index n = f.size();
    z.resize(n);
    c.resize(n);
    h.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        z[i] = Complex(f.w[i], f.v[i]);
        c[i] = f.r[i] * f.psi1[i];
        h[i] = f.r[i] * std::conj(f.psi2[i]);
    }
}

double Residuals::max() const
{
    double m = 0;
    for (double v : value) m = std::max(m, v);
    return m;
}

Residuals residual_full(const FieldGrid& f, double lambda)
{
    const Eigen::Index n = f.size();
    if (n < 9) throw std::invalid_argument("residual check needs at least 9 grid points");
    const double h = f.h;
    const Eigen::VectorXd dw = fd_first(f.w, h), dv = fd_first(f.v, h);
    const Eigen::VectorXd ddw = fd_second(f.w, h), ddv = fd_second(f.v, h);
    const Eigen::VectorXd da = fd_first(f.alpha, h), dr = fd_first(f.r, h);
    const Eigen::VectorXcd dp1 = fd_first(f.psi1, h), dp2 = fd_first(f.psi2, h);
    const Complex I(0, 1);

    Residuals res;
    for (Eigen::Index i = 2; i + 2 < n; ++i) {
        const double w = f.w[i], v = f.v[i], a = f.alpha[i], r = f.r[i];
        const Complex p1 = f.psi1[i], p2 = f.psi2[i];
        const Complex prod = p1 * std::conj(p2);
        const double flat = 1 - v * v - w * w;
        const double e0 = dv[i] * w - v * dw[i] + a * r * r / 4 * (std::norm(p1) + std::norm(p2));
        const double e1 = ddw[i] - da[i] / a * dw[i] + a * a / (r * r) * w * flat + lambda * a * a * r * prod.real();
        const double e2 = ddv[i] - da[i] / a * dv[i] + a * a / (r * r) * v * flat + lambda * a * a * r * prod.imag();
        const Complex e3 = dp1[i] + dr[i] / r * p1 + a / r * lambda * (v - I * w) * p2;
        const Complex e4 = dp2[i] + dr[i] / r * p2 + a / r * lambda * (v + I * w) * p1;
        const double e[5] = {std::abs(e0), std::abs(e1), std::abs(e2), std::abs(e3), std::abs(e4)};
        for (int k = 0; k < 5; ++k) res.value[k] = std::max(res.value[k], e[k]);
    }
    return res;
}

Eigen::VectorXd energy_density(const FieldGrid& f)
{
    const Eigen::VectorXd dw = fd_first(f.w, f.h), dv = fd_first(f.v, f.h);
    Eigen::VectorXd e(f.size());
    for (Eigen::Index i = 0; i < f.size(); ++i) {
        const double flat = 1 - f.v[i] * f.v[i] - f.w[i] * f.w[i];
        e[i] = (2 * (dw[i] * dw[i] + dv[i] * dv[i]) + flat * flat) / (f.r[i] * f.r[i]);
    }
    return e;
}

Current current_components(const FieldGrid& f, double lambda)
{
    Current c;
    const Eigen::Index n = f.size();
    c.js.resize(n);
    c.j1.resize(n);
    c.j2.resize(n);
    double sup = 0, scale = 1;
    for (Eigen::Index i = 0; i < n; ++i) {
        const Complex prod = f.psi1[i] * std::conj(f.psi2[i]);
        c.js[i] = -0.5 * f.alpha[i] * (std::norm(f.psi1[i]) + std::norm(f.psi2[i]));
        c.j1[i] = lambda * f.r[i] * prod.real();
        c.j2[i] = lambda * f.r[i] * prod.imag();
        sup = std::max({sup, std::abs(c.js[i]), std::abs(c.j1[i]), std::abs(c.j2[i])});
        scale = std::max(scale, f.alpha[i]);
    }
    c.coupled = sup > 1e-10 * scale;
    return c;
}

}  // namespace dym
