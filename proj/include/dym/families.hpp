#ifndef DYM_FAMILIES_HPP
#define DYM_FAMILIES_HPP

#include <map>
#include <string>
#include <vector>

#include "dym/constant_rho.hpp"
#include "dym/constant_w.hpp"

namespace dym {

// Exact solutions sampled on a grid.
struct SampledSolution {
    std::string family;
    Eigen::VectorXd s, r;
    Eigen::VectorXcd z, c, h;
    std::vector<std::pair<std::string, Eigen::VectorXd>> extra;  // W, P, rho, ...
    std::map<std::string, double> scalars;                       // for manifests
    std::vector<std::string> notes;

    Eigen::Index size() const { return s.size(); }
    FieldSample at(Eigen::Index i) const { return {s[i], z[i], Quaternion(c[i], h[i]), r[i]}; }
    void resize(Eigen::Index n);
    void set(Eigen::Index i, const FieldSample& f);
};

Eigen::VectorXd uniform_grid(double a, double b, double h);

// int_0^{s_i} f for every grid point (grid strictly increasing), 8-point Gauss-Legendre per
// interval with long double accumulation.
std::vector<double> cumulative_from_zero(const std::function<double(double)>& f, const Eigen::VectorXd& s);

// ---- constant rho closed forms --------------------------------------------------

// rho0 = 1, delta0 = 0: W = arctan sinh(gamma0 + 4 lambda s), gamma0 = arsinh tan W0.
struct Rho1Delta0 {
    double lambda = 1, W0 = 0, gamma0 = 0;
    Quaternion xi0;
    double W(double s) const;
    double r(double s) const;
    // r as displayed for W0 = 0: (16 lambda / |xi0|^2) sech^{3/2}(4 lambda s)
    double r_display(double s) const;
    FieldSample sample(double s) const;
};
Rho1Delta0 closed_form_rho1_delta0(double lambda, Complex c0, double W0);

// rho0 = 1, delta0 > 0: P = arcosh(C cosh gamma)/2, gamma = 4 lambda s + gamma0.
struct Rho1Deltapos {
    double lambda = 1, P0 = 1, W0 = 0, delta0 = 1, argc0 = 0;
    double C = 1, gamma0 = 0;
    double P(double s) const;
    double W(double s) const;
    double r(double s) const;
};
Rho1Deltapos closed_form_rho1_deltapos(double lambda, double P0, double W0, double delta0, double argc0 = 0);

// rho_crit <= rho0 < 1, W = W_inf.
struct WInfSolution {
    double lambda = 1, rho0 = 0.5, W_inf = 0;
    Quaternion xi0;
    FieldSample sample(double s) const;
};
WInfSolution winf_solution(double lambda, double rho0, Complex c0);

// rho0 = rho_crit, W = pi, t = lambda rho_crit s.
struct S1xS2Solution {
    double lambda = 1, rho_c = 0;
    Quaternion xi0;
    double r = 0;
    double radius_circle = 0, radius_sphere = 0;
    double t_of_s(double s) const { return lambda * rho_c * s; }
    FieldSample sample(double s) const;
};
S1xS2Solution s1xs2_solution_delta0(double lambda, Complex c0);

// ---- sampled families -------------------------------------------------------------

SampledSolution family_rho1_delta0(double lambda, Complex c0, double W0, const Eigen::VectorXd& s);
SampledSolution family_winfty(double lambda, double rho0, Complex c0, const Eigen::VectorXd& s);
SampledSolution family_s1xs2(double lambda, Complex c0, const Eigen::VectorXd& s);
SampledSolution family_rational_fp(double lambda, std::int64_t p, std::int64_t q, double delta0, double argc0,
                                   const Eigen::VectorXd& s);
SampledSolution family_rho1_deltapos(double lambda, double P0, double W0, double delta0, double argc0,
                                     const Eigen::VectorXd& s);
SampledSolution family_w0pi_delta0(double lambda, double rho0, double U0, Complex c0, const Eigen::VectorXd& s);
SampledSolution family_w0pi_deltapos(double lambda, double rho0, double U0, double delta0, double P0,
                                     double argc0, const Eigen::VectorXd& s);

}  // namespace dym

#endif
