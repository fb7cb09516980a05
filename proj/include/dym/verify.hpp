#ifndef DYM_VERIFY_HPP
#define DYM_VERIFY_HPP

#include <array>

#include "dym/families.hpp"

namespace dym {

// Gauge-theoretic fields on a uniform grid: z = w + i v, xi = r (psi1 + j conj(psi2)).
struct FieldGrid {
    double h = 0;
    Eigen::VectorXd s, w, v, alpha, r;
    Eigen::VectorXcd psi1, psi2;
    Eigen::Index size() const { return s.size(); }
};

// Throws if the grid is not uniform or r <= 0 somewhere.
FieldGrid fields_from_solution(const Eigen::VectorXd& s, const Eigen::VectorXcd& z, const Eigen::VectorXcd& c,
                               const Eigen::VectorXcd& h, const Eigen::VectorXd& r);
FieldGrid fields_from_solution(const SampledSolution& sol);

// Inverse map, for round trips.
void solution_from_fields(const FieldGrid& f, Eigen::VectorXcd& z, Eigen::VectorXcd& c, Eigen::VectorXcd& h);

// Sup-norms over interior points of
//   constraint:  v' w - v w' + (alpha r^2 / 4)(|psi1|^2 + |psi2|^2)
//   ym_w:        w'' - (alpha'/alpha) w' + (alpha^2/r^2) w (1 - v^2 - w^2) + lambda alpha^2 r Re(psi1 conj psi2)
//   ym_v:        same with v and Im
//   psi1:        psi1' + (r'/r) psi1 + (alpha/r) lambda (v - i w) psi2
//   psi2:        psi2' + (r'/r) psi2 + (alpha/r) lambda (v + i w) psi1
struct Residuals {
    std::array<double, 5> value{};
    static constexpr std::array<const char*, 5> names{"constraint", "ym_w", "ym_v", "psi1", "psi2"};
    double max() const;
};
Residuals residual_full(const FieldGrid& f, double lambda);

// |F|^2 = (2 (w'^2 + v'^2) + (1 - v^2 - w^2)^2) / r^2 at interior points (ends are NaN)
Eigen::VectorXd energy_density(const FieldGrid& f);

struct Current {
    Eigen::VectorXd js, j1, j2;  // -alpha (|psi1|^2 + |psi2|^2) / 2, lambda r Re/Im(psi1 conj psi2)
    bool coupled = false;
};
Current current_components(const FieldGrid& f, double lambda);

// 4th-order central differences; entries within two points of either end are NaN.
Eigen::VectorXd fd_first(const Eigen::VectorXd& y, double h);
Eigen::VectorXcd fd_first(const Eigen::VectorXcd& y, double h);
Eigen::VectorXd fd_second(const Eigen::VectorXd& y, double h);

}  // namespace dym

#endif
