#ifndef DYM_DYNAMICS_HPP
#define DYM_DYNAMICS_HPP

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <numbers>

#include "dym/algebra.hpp"
#include "dym/integrate.hpp"
#include "dym/metric.hpp"

namespace dym {

template <class T, int N> using VecT = Eigen::Matrix<T, N, 1>;
using Vec2 = VecT<double, 2>;
using Vec3 = VecT<double, 3>;
using Vec4 = VecT<double, 4>;
using Vec5 = VecT<double, 5>;
using Vec6 = VecT<double, 6>;
using Vec7 = VecT<double, 7>;
using Vec8 = VecT<double, 8>;

inline constexpr double pi = std::numbers::pi;
// relative threshold on | |c| - |h| | below which the delta0 = 0 branch is used
inline constexpr double tau_delta = 1e-12;

// Cartesian state (z, Y, xi); packed as [z, Y, c, h] real/imag pairs.
struct CartesianPoint {
    Complex z, Y;
    Quaternion xi;
};

template <class T>
VecT<T, 8> pack(const ComplexT<T>& z, const ComplexT<T>& Y, const QuaternionT<T>& xi)
{
    VecT<T, 8> v;
    v << z.real(), z.imag(), Y.real(), Y.imag(), xi.c.real(), xi.c.imag(), xi.h.real(), xi.h.imag();
    return v;
}
inline Vec8 pack(const CartesianPoint& p) { return pack(p.z, p.Y, p.xi); }
inline CartesianPoint unpack(const Vec8& v)
{
    return {{v[0], v[1]}, {v[2], v[3]}, Quaternion({v[4], v[5]}, {v[6], v[7]})};
}

// Im(conj(z) Y) + |xi|^2 / 4
template <class T>
T constraint_value(const ComplexT<T>& z, const ComplexT<T>& Y, const QuaternionT<T>& xi)
{
    return std::imag(std::conj(z) * Y) + xi.norm2() / 4;
}
inline double constraint_value(const CartesianPoint& p) { return constraint_value(p.z, p.Y, p.xi); }

// z' = r Y,  Y' = -(1/r) z (1 - |z|^2) - lambda c h,  c' = i lambda z conj(h),  h' = i lambda z conj(c)
template <class T>
VecT<T, 8> cartesian_rhs(const VecT<T, 8>& v, T r, T lambda)
{
    const ComplexT<T> z(v[0], v[1]), Y(v[2], v[3]), c(v[4], v[5]), h(v[6], v[7]);
    const ComplexT<T> dz = r * Y;
    const ComplexT<T> dY = -z * (T(1) - std::norm(z)) / r - lambda * c * h;
    const QuaternionT<T> dxi = dirac_rhs_components(QuaternionT<T>(c, h), z, lambda);
    return pack(dz, dY, dxi);
}

Vec8 cartesian_rhs(double s, const Vec8& v, const MetricProfile& metric, double lambda);

// ---- initial data -------------------------------------------------------

// Canonical data: z0 = rho0 > 0, Y0 = U0 - i |xi0|^2 / (4 rho0), |c0| >= |h0|, arg c0 + arg h0 in (-pi, pi].
struct InitialData {
    double rho0 = 1;
    double U0 = 0;
    Quaternion xi0;
};

CartesianPoint to_point(const InitialData& d);

// Composite of a U(1) rotation by `rotation` and an optional c <-> h swap (they commute).
struct CanonicalTransform {
    double rotation = 0;
    bool swapped = false;
};

CartesianPoint apply_u1(const CartesianPoint& p, double T);
CartesianPoint apply_swap(const CartesianPoint& p);
CartesianPoint apply_scale(const CartesianPoint& p, double a);  // Y -> a^2 Y, xi -> a xi (r -> r / a^2)
CartesianPoint apply_transform(const CartesianPoint& p, const CanonicalTransform& t);
CartesianPoint invert_transform(const CartesianPoint& p, const CanonicalTransform& t);

struct Canonicalized {
    InitialData data;
    CanonicalTransform transform;
};

// Throws std::invalid_argument for z0 = 0 or a violated constraint.
Canonicalized canonicalize_initial_data(Complex z0, Complex Y0, const Quaternion& xi0, double tol = 1e-10);

// Re-solve the component of Y0 along i z0 so that the constraint holds.
Complex project_constraint(Complex z0, Complex Y0, const Quaternion& xi0);

// xi0 = c0 (1 + j e^{i W0}) has |c| = |h| and arg c + arg h = W0.
Quaternion xi_delta0(Complex c0, double W0);
// c = delta0 cosh(P0/2) e^{i argc}, h = delta0 sinh(P0/2) e^{i (W0 - argc)}
Quaternion xi_deltapos(double delta0, double P0, double argc, double W0);

// ---- polar form -------------------------------------------------------

enum class Branch { delta0, deltapos };
const char* to_string(Branch b);

struct PolarInit {
    Branch branch = Branch::delta0;
    double rho0 = 1, H0 = 0;
    double R0 = 0;       // delta0 branch: |c0| = |h0|
    double P0 = 0;       // deltapos branch: 2 arsinh(|h0| / delta0)
    double W0 = 0;       // arg c0 + arg h0
    double delta0 = 0;   // sqrt(|c0|^2 - |h0|^2)
    Complex c0, h0;
    double xi_norm = 0;
    bool near_degenerate = false;  // deltapos with delta0 < 1e-6 |xi0|
};

// Requires h0 != 0. H0 = rho0'/r0 = U0.
PolarInit polar_init(const InitialData& d);

// state [rho, H, R, W, int rho cos W, int rho sin W]
template <class T>
VecT<T, 6> polar_rhs_delta0(const VecT<T, 6>& v, T r, T lambda)
{
    const T rho = v[0], H = v[1], R = v[2], W = v[3];
    if (!(rho > 0)) throw SingularState("rho reached zero");
    const T cw = std::cos(W), sw = std::sin(W), R2 = R * R;
    VecT<T, 6> d;
    d[0] = r * H;
    d[1] = -rho * (1 - rho * rho) / r + r * R2 * R2 / (4 * rho * rho * rho) - lambda * R2 * cw;
    d[2] = lambda * rho * R * sw;
    d[3] = 2 * lambda * rho * cw + r * R2 / (2 * rho * rho);
    d[4] = rho * cw;
    d[5] = rho * sw;
    return d;
}

// state [rho, H, P, W, int rho tanh(P/2) cos W, int rho coth(P/2) cos W, int rho coth P cos W]
template <class T>
VecT<T, 7> polar_rhs_deltapos(const VecT<T, 7>& v, T r, T lambda, T delta0)
{
    const T rho = v[0], H = v[1], P = v[2], W = v[3];
    if (!(rho > 0)) throw SingularState("rho reached zero");
    if (!(P > 0)) throw SingularState("P reached zero");
    const T cw = std::cos(W), sw = std::sin(W), d2 = delta0 * delta0;
    const T chP = std::cosh(P), shP = std::sinh(P), th2 = std::tanh(P / 2);
    VecT<T, 7> d;
    d[0] = r * H;
    d[1] = -rho * (1 - rho * rho) / r + d2 * d2 * r * chP * chP / (16 * rho * rho * rho) -
           lambda * d2 / 2 * shP * cw;
    d[2] = 2 * lambda * rho * sw;
    d[3] = 2 * lambda * rho * chP / shP * cw + d2 * r * chP / (4 * rho * rho);
    d[4] = rho * th2 * cw;
    d[5] = rho / th2 * cw;
    d[6] = rho * chP / shP * cw;
    return d;
}

Vec6 polar_initial_state_delta0(const PolarInit& pi);
Vec7 polar_initial_state_deltapos(const PolarInit& pi);

// r as a function of (s, state); lets algebraic closures stand in for a prescribed metric
using RadiusDelta0 = std::function<double(double, const Vec6&)>;
using RadiusDeltapos = std::function<double(double, const Vec7&)>;

RadiusDelta0 metric_radius_delta0(const MetricProfile& m);
RadiusDeltapos metric_radius_deltapos(const MetricProfile& m);
// constant-rho closure: r R^2 / (2 rho0^2) = lambda rho0 (cos W +- sqrt(cos^2 W + (1/rho0^2 - 1)/lambda^2))
RadiusDelta0 rho_const_radius_delta0(double lambda, double rho0, int sign = +1);
RadiusDeltapos rho_const_radius_deltapos(double lambda, double rho0, double delta0, int sign = +1);
// constant-W closure: r R^2 / (4 rho^3) = -lambda cos W0
RadiusDelta0 w_const_radius_delta0(double lambda, double W0);
RadiusDeltapos w_const_radius_deltapos(double lambda, double W0, double delta0);

struct FieldSample {
    double s = 0;
    Complex z;
    Quaternion xi;
    double r = 0;
};

FieldSample reconstruct_delta0(const PolarInit& pi, double s, const Vec6& v, double lambda, double r);
FieldSample reconstruct_deltapos(const PolarInit& pi, double s, const Vec7& v, double lambda, double r);

// ---- drivers ------------------------------------------------------------

Trajectory<Vec8> integrate_cartesian(const Vec8& y0, const MetricProfile& metric, double lambda,
                                     double s0, double s1, const IntegratorConfig& cfg = {});
Trajectory<Vec6> integrate_polar_delta0(const PolarInit& pi, const RadiusDelta0& radius, double lambda,
                                        double s0, double s1, const IntegratorConfig& cfg = {});
Trajectory<Vec7> integrate_polar_deltapos(const PolarInit& pi, const RadiusDeltapos& radius, double lambda,
                                          double s0, double s1, const IntegratorConfig& cfg = {});

}  // namespace dym

#endif
