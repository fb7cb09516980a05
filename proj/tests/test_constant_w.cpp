#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "dym/constant_w.hpp"
#include "dym/families.hpp"

using namespace dym;

namespace {

const double sqrt2 = std::sqrt(2.0);

IntegratorConfig tight()
{
    IntegratorConfig cfg;
    cfg.rtol = 1e-12;
    cfg.atol = 1e-14;
    return cfg;
}

// metric r(s) = K rho(s)^3 of a W0 = pi solution
MetricProfile w0pi_metric(const W0PiSolution& sol)
{
    const double K = sol.r0 / (sol.rho0 * sol.rho0 * sol.rho0);
    auto r = [sol, K](double s) { return K * std::pow(sol.rho(s), 3); };
    auto dr = [sol, K](double s) { return -1.5 * K * std::pow(sol.x(s), -2.5) * sol.dx(s); };
    return MetricProfile::closed_form("w0pi", r, dr);
}

// max field distance between a Cartesian run and a sampled family on [0, s1]
double cartesian_gap(const SampledSolution& fam, const W0PiSolution& sol, double lambda)
{
    const CartesianPoint p0 = to_point(InitialData{sol.rho0, sol.U0, sol.xi0});
    const auto tr = integrate_cartesian(pack(p0), w0pi_metric(sol), lambda, 0.0, fam.s[fam.size() - 1], tight());
    double worst = 0;
    for (Eigen::Index i = 0; i < fam.size(); ++i) {
        const CartesianPoint q = unpack(tr(fam.s[i]));
        worst = std::max({worst, std::abs(q.z - fam.z[i]), std::abs(q.xi.c - fam.c[i]), std::abs(q.xi.h - fam.h[i])});
    }
    return worst;
}

}  // namespace

TEST_CASE("parameters")
{
    const auto p = constant_w_params(Branch::delta0, 2.0, pi);
    CHECK(p.alpha == doctest::Approx(33));
    CHECK(std::abs(p.beta) < 1e-15);
    const auto q = constant_w_params(Branch::deltapos, 1.0, 0.8 * pi);
    CHECK(q.mu == doctest::Approx(-std::tan(0.8 * pi)));
    CHECK(q.kappa == doctest::Approx(std::sqrt(q.mu * q.mu + 8)));
    CHECK(std::isnan(constant_w_params(Branch::deltapos, 1.0, pi).mu));
    CHECK_THROWS_AS(constant_w_params(Branch::delta0, 1.0, 0.4 * pi), std::invalid_argument);
    CHECK_THROWS_AS(constant_w_params(Branch::delta0, 1.0, 1.1 * pi), std::invalid_argument);
}

TEST_CASE("saddle of the x system")
{
    for (double W0 : {0.6 * pi, 0.8 * pi, pi}) {
        const auto p = constant_w_params(Branch::delta0, 1.0, W0);
        const SaddleData sd = saddle_data(p.beta, p.alpha);
        CHECK(x_rhs_delta0(sd.x, 0.0, p.beta, p.alpha).norm() == 0);
        const Eigen::Matrix2d J = x_jacobian_fd(sd.x, 0.0, p.beta, p.alpha);
        CHECK((J * sd.v_plus - sd.mu_plus * sd.v_plus).norm() < 1e-7);
        CHECK((J * sd.v_minus - sd.mu_minus * sd.v_minus).norm() < 1e-7);
        CHECK(sd.mu_plus > 0);
        CHECK(sd.mu_minus < 0);
        CHECK(sd.mu_plus * sd.mu_minus == doctest::Approx(-2));
        CHECK(J.determinant() == doctest::Approx(-2).epsilon(1e-7));
    }
}

TEST_CASE("normal flux")
{
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> u(0, 1);
    for (int k = 0; k < 100; ++k) {
        const double beta = 2 * u(gen), alpha = 1 + 5 * u(gen), x = 0.1 + 20 * u(gen), nu = -4 + 8 * u(gen);
        CHECK(normal_flux(x, nu, beta, alpha) ==
              doctest::Approx(normal_flux_formula(x, nu, beta, alpha)).epsilon(1e-12).scale(1));
    }
    // the upper ray is crossed inward whenever beta >= 0
    for (double x : {1.5, 3.0, 40.0}) CHECK(normal_flux(x, sqrt2, 0.7, 1.2) > 0);
}

TEST_CASE("D+ is forward invariant")
{
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> u(0, 1);
    int escaped = 0;
    for (int k = 0; k < 200; ++k) {
        const double W0 = pi / 2 + 1e-3 + (pi / 2 - 1e-3) * u(gen), lambda = 1 + u(gen);
        const auto p = constant_w_params(Branch::delta0, lambda, W0);
        const SaddleData sd = saddle_data(p.beta, p.alpha);
        const double x0 = p.alpha * (1 + 3 * u(gen)), y0 = u(gen) * sd.nu_plus * (x0 - p.alpha);
        const XRun run = run_x_delta0(x0, y0, p.beta, p.alpha, 10.0, 1e-10, 1e5);
        bool inside = true;
        for (const Vec3& v : run.traj.y) {
            const double slack = 1e-9 * std::max(1.0, std::abs(v[0]));
            inside = inside && v[0] >= sd.x - slack && v[1] >= -slack && v[1] <= sd.nu_plus * (v[0] - sd.x) + slack;
        }
        CHECK(inside);
        CHECK_FALSE(run.singular);
        escaped += run.escaped;
    }
    CHECK(escaped > 150);
}

TEST_CASE("orbit classification")
{
    const auto p = constant_w_params(Branch::delta0, 1.0, 0.75 * pi);
    const SaddleData sd = saddle_data(p.beta, p.alpha);
    CHECK(classify_orbit_delta0(sd.x, 0.0, p.beta, p.alpha).tag == OrbitClass::constant_fixed_point);

    // below the saddle with y < 0: x reaches zero in finite forward time
    const OrbitReport down = classify_orbit_delta0(0.5 * p.alpha, -1.0, p.beta, p.alpha);
    CHECK(down.tag == OrbitClass::singular);
    CHECK(std::isfinite(down.s_singular_forward));
    CHECK(down.s_singular_forward > 0);

    CHECK(in_D_plus(2 * p.alpha, 0.1, sd));
    CHECK_FALSE(in_D_plus(2 * p.alpha, -0.1, sd));
    CHECK(in_D_minus(2 * p.alpha, -0.1, sd));
    CHECK_THROWS_AS(classify_orbit_delta0(0.0, 0.0, p.beta, p.alpha), std::invalid_argument);
}

TEST_CASE("time reflection with beta -> -beta")
{
    const double alpha = 2.5, beta = 0.6, x0 = 3.0, y0 = 0.4;
    const XRun fw = run_x_delta0(x0, y0, beta, alpha, 1.5, 1e-10, 1e12, tight());
    const XRun bw = run_x_delta0(x0, -y0, -beta, alpha, -1.5, 1e-10, 1e12, tight());
    REQUIRE(fw.traj.termination == Termination::reached_end);
    REQUIRE(bw.traj.termination == Termination::reached_end);
    CHECK(fw.traj.back()[0] == doctest::Approx(bw.traj.back()[0]).epsilon(1e-9));
    CHECK(fw.traj.back()[1] == doctest::Approx(-bw.traj.back()[1]).epsilon(1e-9));
}

TEST_CASE("W0 = pi closed form, delta0 = 0")
{
    const double lambda = 1;
    const Complex c0(0.8, 0.3);
    for (double U0 : {0.0, 0.002, -0.002}) {
        const W0PiSolution sol = closed_form_W0pi_delta0(lambda, 0.2, U0, c0);
        CHECK(sol.a == doctest::Approx(1 / (rho_crit(lambda) * rho_crit(lambda))));
        CHECK(sol.global);
        const XRun run = run_x_delta0(sol.x0, sol.dx0, 0.0, sol.a, 1.0, 1e-10, 1e12, tight());
        double worst = 0;
        for (std::size_t i = 0; i < run.traj.size(); ++i)
            worst = std::max(worst, std::abs(run.traj.y[i][0] - sol.x(run.traj.s[i])) / sol.x(run.traj.s[i]));
        CHECK(worst < 1e-8);

        const SampledSolution fam = family_w0pi_delta0(lambda, 0.2, U0, c0, uniform_grid(0, 1, 0.05));
        CHECK(cartesian_gap(fam, sol, lambda) < 1e-8);
    }
}

TEST_CASE("W0 = pi closed form, delta0 > 0")
{
    const double lambda = 1, delta0 = 0.5, P0 = 0.9;
    const auto p = constant_w_params(Branch::deltapos, lambda, pi);
    for (double U0 : {0.0, 0.001}) {
        const W0PiSolution sol = closed_form_W0pi_deltapos(lambda, 0.15, U0, delta0, P0, 0.3);
        CHECK(sol.a == doctest::Approx(x_crit(P0, p.alpha)));
        const XPosRun run = run_x_deltapos(p, delta0, 0.15, U0, P0, 1.0, 1e-10, tight());
        REQUIRE(run.traj.termination == Termination::reached_end);
        double worst = 0;
        for (std::size_t i = 0; i < run.traj.size(); ++i) {
            const Vec5& v = run.traj.y[i];
            worst = std::max(worst, std::abs(v[0] - sol.x(run.traj.s[i])) / v[0]);
            CHECK(v[2] == P0);
        }
        CHECK(worst < 1e-8);

        const SampledSolution fam = family_w0pi_deltapos(lambda, 0.15, U0, delta0, P0, 0.3, uniform_grid(0, 1, 0.05));
        CHECK(cartesian_gap(fam, sol, lambda) < 1e-8);
    }
}

TEST_CASE("W0 = pi globality")
{
    const double lambda = 1, rho0 = 0.2;
    const Complex c0(1, 0);
    const double a = 1 + 8 * lambda * lambda, gap = rho0 * (1 - rho0 * rho0 * a);
    const W0PiSolution base = closed_form_W0pi_delta0(lambda, rho0, 1.0, c0);
    // sweep r0 |U0| across both candidate thresholds
    for (int k = 1; k < 40; ++k) {
        const double target = k * 0.05 * gap, U0 = target / base.r0;
        const W0PiSolution sol = closed_form_W0pi_delta0(lambda, rho0, U0, c0);
        CHECK(sol.global == sol.global_corrected);
        if (!sol.global) {
            CHECK(std::isfinite(sol.s_blowup_forward));
            CHECK(std::abs(sol.x(sol.s_blowup_forward)) < 1e-9 * sol.x0);
        }
    }
    // the larger threshold admits solutions that do reach rho = infinity
    const W0PiSolution mid = closed_form_W0pi_delta0(lambda, rho0, gap / base.r0, c0);
    CHECK(mid.global_display);
    CHECK_FALSE(mid.global);
    const XRun run = run_x_delta0(mid.x0, mid.dx0, 0.0, mid.a, 10.0, 1e-8, 1e12, tight());
    CHECK(run.singular);
    CHECK(run.traj.s_end() == doctest::Approx(mid.s_blowup_forward).epsilon(1e-6));
    // U0 > 0 shrinks x forward
    CHECK(std::isinf(mid.s_blowup_backward));
}

TEST_CASE("delta0 > 0 x system")
{
    const double lambda = 1, delta0 = 0.8;
    const auto p = constant_w_params(Branch::deltapos, lambda, 0.8 * pi);
    const double P0 = 0.7, rho0 = 0.12;
    const XPosRun run = run_x_deltapos(p, delta0, rho0, 0.0, P0, 0.6, 1e-10, tight());
    REQUIRE(run.traj.termination == Termination::reached_end);

    // P' = 2 beta rho and r stays positive
    for (const Vec5& v : run.traj.y) CHECK(w_const_r_deltapos(p, delta0, 1 / std::sqrt(v[0]), v[2]) > 0);
    CHECK(run.traj.back()[2] > P0);

    // L' - sqrt2 L and the (Q, zeta) chart against finite differences along the orbit
    const double h = 1e-4;
    for (double s : {0.1, 0.3, 0.5}) {
        auto L = [&](double t) {
            const Vec5 v = run.traj(t);
            return L_value(v[0], v[1], v[2], p.beta, p.alpha);
        };
        const Vec5 v = run.traj(s);
        const double dL = (L(s - 2 * h) - 8 * L(s - h) + 8 * L(s + h) - L(s + 2 * h)) / (12 * h);
        CHECK(dL - sqrt2 * L(s) == doctest::Approx(L_defect(v[0], v[2], p.beta, lambda)).epsilon(1e-6));
        CHECK(L_defect(v[0], v[2], p.beta, lambda) < 0);

        auto qz = [&](double t) {
            const Vec5 w = run.traj(t);
            return q_zeta(w[0], w[1], w[2], p.alpha);
        };
        const Vec2 dqz = (qz(s - 2 * h) - 8 * qz(s - h) + 8 * qz(s + h) - qz(s + 2 * h)) / (12 * h);
        const Vec2 z = qz(s);
        const Vec2 rhs = q_zeta_rhs(z[0], z[1], v[0], v[2], p.beta, p.alpha);
        CHECK((dqz - rhs).norm() < 1e-6 * (1 + rhs.norm()));
    }

    // reconstructed fields satisfy the Cartesian system
    const auto tr = run.traj;
    auto field = [&](double s) { return reconstruct_x_deltapos(p, delta0, 0.2, s, tr(s)); };
    const double s = 0.3;
    const FieldSample f = field(s);
    const Complex dz = (field(s - 2 * h).z - 8. * field(s - h).z + 8. * field(s + h).z - field(s + 2 * h).z) / (12 * h);
    const Complex dc = (field(s - 2 * h).xi.c - 8. * field(s - h).xi.c + 8. * field(s + h).xi.c - field(s + 2 * h).xi.c) /
                       (12 * h);
    const Vec8 rhs = cartesian_rhs(pack(f.z, dz / f.r, f.xi), f.r, lambda);
    CHECK(std::abs(Complex(rhs[4], rhs[5]) - dc) < 1e-6);
}

TEST_CASE("blow-up threshold and global bound")
{
    const double lambda = 1;
    for (double W0 : {0.8 * pi, 0.9 * pi, 0.97 * pi}) {
        const auto p = constant_w_params(Branch::deltapos, lambda, W0);
        REQUIRE(p.mu < 1);
        for (double P0 : {0.5, 1.0, 2.0}) {
            const double g = global_bound_deltapos(p, P0), b = blowup_threshold_deltapos(p, P0);
            CHECK(g > 0);
            CHECK(g <= b);
        }
    }
    CHECK(std::isnan(global_bound_deltapos(constant_w_params(Branch::deltapos, lambda, 0.6 * pi), 1.0)));
}

TEST_CASE("comparison solution")
{
    const double alpha = 1.8, P0 = 0.9, sh = std::sinh(P0);
    for (double mu : {0.4, 1.0, 2.5}) {
        const ComparisonSolution c = comparison_solution(0.3, -0.2, mu, alpha, P0);
        CHECK(c.Q(0) == doctest::Approx(0.3).epsilon(1e-14));
        CHECK(c.zeta(0) == doctest::Approx(-0.2).epsilon(1e-14));
        const double h = 1e-3;
        for (double s : {0.2, 1.0, 2.5}) {
            const double dQ = (c.Q(s - 2 * h) - 8 * c.Q(s - h) + 8 * c.Q(s + h) - c.Q(s + 2 * h)) / (12 * h);
            const double dz =
                (c.zeta(s - 2 * h) - 8 * c.zeta(s - h) + 8 * c.zeta(s + h) - c.zeta(s + 2 * h)) / (12 * h);
            CHECK(dQ == doctest::Approx(c.zeta(s)).epsilon(1e-9));
            const double forcing = 2 * mu * (alpha - 1) / sh * std::exp(-mu * s);
            CHECK(dz == doctest::Approx(2 * c.Q(s) + mu * c.zeta(s) + forcing).epsilon(1e-9));
        }
        // growth rate of the leading mode
        const double mp = (c.kappa + mu) / 2;
        if (c.c1 != 0) CHECK(c.Q(12) * std::exp(-mp * 12) == doctest::Approx(c.c1).epsilon(1e-6));
    }
    CHECK_THROWS_AS(comparison_solution(0, 0, 0.0, alpha, P0), std::invalid_argument);
}

TEST_CASE("threshold and L")
{
    const double lambda = 1;
    // beta -> 0
    const auto p = constant_w_params(Branch::deltapos, lambda, pi - 1e-9);
    CHECK(blowup_threshold_deltapos(p, 1.0) == doctest::Approx(1 / std::sqrt(2 * p.alpha - 1)).epsilon(1e-7));

    const auto q = constant_w_params(Branch::deltapos, lambda, 0.8 * pi);
    for (double P0 : {0.5, 1.5}) {
        const double th = blowup_threshold_deltapos(q, P0);
        // with x'0 = 0, L0 < 0 exactly above the threshold
        for (double f : {0.9, 1.1}) {
            const double x0 = 1 / (f * th * f * th);
            CHECK((L_value(x0, 0, P0, q.beta, q.alpha) < 0) == (f > 1));
        }
        // e^{-sqrt2 s} L(s) is non-increasing along the orbit
        const XPosRun run = run_x_deltapos(q, 1.0, 1.1 * th, 0, P0, 5, 1e-10, tight());
        CHECK(run.singular);
        double last = INFINITY;
        bool monotone = true;
        for (std::size_t i = 0; i < run.traj.size(); ++i) {
            const Vec5& v = run.traj.y[i];
            const double e = std::exp(-sqrt2 * run.traj.s[i]) * L_value(v[0], v[1], v[2], q.beta, q.alpha);
            monotone = monotone && e <= last + 1e-12 * std::abs(last);
            last = e;
        }
        CHECK(monotone);
    }
}

TEST_CASE("comparison solution sign for s <= 0")
{
    const double alpha = 1.8, P0 = 0.9;
    int checked = 0;
    for (double mu : {0.3, 0.6, 0.9})
        for (double Q0 : {-1.0, -0.3, 0.0, 0.4})
            for (double zeta0 : {0.0, 0.2, 1.0}) {
                const ComparisonSolution c = comparison_solution(Q0, zeta0, mu, alpha, P0);
                if (c.c2 > 0) continue;
                ++checked;
                for (double s = 0; s >= -10; s -= 0.05) CHECK(c.zeta(s) >= -1e-12);
            }
    CHECK(checked > 3);
    // c2 > 0 turns zeta negative for some s < 0
    const ComparisonSolution bad = comparison_solution(1.0, 0.0, 0.6, alpha, P0);
    REQUIRE(bad.c2 > 0);
    double lowest = INFINITY;
    for (double s = 0; s >= -10; s -= 0.05) lowest = std::min(lowest, bad.zeta(s));
    CHECK(lowest < 0);
    // mu = 1: the resonant term wins for s -> -infinity even with c2 <= 0
    const ComparisonSolution res = comparison_solution(-1.0, 1.0, 1.0, alpha, P0);
    REQUIRE(res.c2 <= 0);
    CHECK(res.zeta(-10) < 0);
}

TEST_CASE("growth rate of escaping orbits")
{
    const auto p = constant_w_params(Branch::delta0, 1.0, 0.8 * pi);
    const SaddleData sd = saddle_data(p.beta, p.alpha);
    const double x0 = 2 * p.alpha, y0 = 0.5 * sd.nu_plus * (x0 - p.alpha);
    const XRun run = run_x_delta0(x0, y0, p.beta, p.alpha, 8, 1e-10, 1e12, tight());
    REQUIRE(run.traj.termination == Termination::reached_end);
    const double rate = std::sqrt(2 * 0.9);
    for (double s1 : {3.0, 4.0, 5.0})
        for (double s2 : {s1 + 0.5, s1 + 2})
            CHECK(run.traj(s2)[0] / run.traj(s1)[0] >= std::exp(rate * (s2 - s1)));
}
