#include "dym/periodic.hpp"

#include "dym/parallel.hpp"
#include "dym/rational.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <stdexcept>

namespace dym {

const char* to_string(PeriodicBranch b)
{
    switch (b) {
    case PeriodicBranch::delta0: return "delta0";
    case PeriodicBranch::deltapos_drift: return "deltapos-drift";
    case PeriodicBranch::deltapos_bounded: return "deltapos-bounded";
    }
    return "unknown";
}

PeriodicBranch parse_periodic_branch(const std::string& name)
{
    if (name == "delta0") return PeriodicBranch::delta0;
    if (name == "deltapos-drift") return PeriodicBranch::deltapos_drift;
    if (name == "deltapos-bounded") return PeriodicBranch::deltapos_bounded;
    throw std::invalid_argument("unknown branch '" + name + "'");
}

namespace {

std::vector<double> linspace(double a, double b, int n)
{
    std::vector<double> v(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = n == 1 ? a : a + (b - a) * i / (n - 1);
    return v;
}

void check_range(const ScanOptions& opt)
{
    if (!(opt.rho_lo > 0) || !(opt.rho_hi > opt.rho_lo) || opt.rho_grid < 2)
        throw std::invalid_argument("empty rho scan range");
    if (!(opt.rho_hi < rho_crit(opt.lambda))) throw std::invalid_argument("scan range must stay below rho_crit");
    if (opt.qmax < 1) throw std::invalid_argument("qmax must be >= 1");
}

// ---- delta0 -------------------------------------------------------------------------

struct Job {
    Fraction target;
    std::size_t lo = 0;
};

PeriodicReport scan_delta0(const ScanOptions& opt)
{
    PeriodicReport rep;
    const auto rho = linspace(opt.rho_lo, opt.rho_hi, opt.rho_grid);
    rep.grid.resize(rho.size());
    parallel_for(rho.size(), [&](std::size_t i) {
        const PeriodF pf = period_and_f_delta0(opt.lambda, rho[i]);
        rep.grid[i] = {rho[i], NAN, pf.f, NAN, pf.T};
    });

    std::set<std::pair<std::int64_t, std::int64_t>> seen;
    std::vector<Job> jobs;
    for (const ScanPoint& g : rep.grid) {
        for (const Fraction& fr : convergents(g.f, opt.qmax)) {
            if (fr.p == 0 || !seen.insert({fr.q, fr.p}).second) continue;
            const double t = fr.value();
            for (std::size_t i = 0; i + 1 < rep.grid.size(); ++i) {
                const double a = rep.grid[i].f - t, b = rep.grid[i + 1].f - t;
                if (a * b <= 0) jobs.push_back({fr, i});
            }
        }
    }
    std::sort(jobs.begin(), jobs.end(), [](const Job& a, const Job& b) {
        if (a.target.q != b.target.q) return a.target.q < b.target.q;
        if (std::abs(a.target.p) != std::abs(b.target.p)) return std::abs(a.target.p) < std::abs(b.target.p);
        if (a.target.p != b.target.p) return a.target.p < b.target.p;
        return a.lo < b.lo;
    });
    if (jobs.size() > static_cast<std::size_t>(opt.max_candidates)) jobs.resize(static_cast<std::size_t>(opt.max_candidates));
    if (jobs.empty()) rep.notes.push_back("no convergent with q <= qmax is attained inside the scan range");

    const Quaternion xi0 = xi_delta0(opt.c0, 0.0);
    rep.candidates.resize(jobs.size());
    parallel_for(jobs.size(), [&](std::size_t k) {
        const Job& j = jobs[k];
        rep.candidates[k] = find_periodic_delta0(opt.lambda, j.target.p, j.target.q, rep.grid[j.lo].rho0,
                                                 rep.grid[j.lo + 1].rho0, xi0);
    });
    return rep;
}

// ---- deltapos ---------------------------------------------------------------------------

struct PosEval {
    bool ok = false;
    F1F2 v;
    double P_crit = NAN;
};

PosEval eval_pos(double lambda, double rho0, double P0, bool drift)
{
    PosEval e;
    if (!(rho0 > 0 && rho0 < rho_crit(lambda)) || !(P0 > 0)) return e;
    try {
        e.P_crit = p_crit(lambda, rho0);
        const double Pinf = critical_constants(lambda, rho0).P_inf;
        if (drift != (P0 > e.P_crit)) return e;
        if (std::abs(P0 - Pinf) < 1e-6 || std::abs(P0 - e.P_crit) < 1e-6) return e;
        e.v = f1_f2_deltapos(lambda, rho0, P0, e.P_crit);
        e.ok = true;
    } catch (const std::exception&) {
        e.ok = false;
    }
    return e;
}

struct NewtonResult {
    bool converged = false;
    double rho0 = 0, P0 = 0;
    F1F2 v;
};

struct Box {
    double rho_lo, rho_hi, P_lo, P_hi;
    bool contains(double r, double p) const { return r >= rho_lo && r <= rho_hi && p >= P_lo && p <= P_hi; }
};

NewtonResult newton_pos(double lambda, double rho0, double P0, double t1, double t2, bool drift, const Box& box)
{
    NewtonResult nr;
    PosEval cur = eval_pos(lambda, rho0, P0, drift);
    if (!cur.ok) return nr;
    auto resid = [&](const PosEval& e) { return Vec2(e.v.f1 - t1, e.v.f2 - t2); };
    Vec2 F = resid(cur);
    for (int it = 0; it < 40 && F.norm() > 1e-12; ++it) {
        const double hr = 1e-6 * rho0, hp = 1e-6 * std::max(P0, 0.1);
        const PosEval er = eval_pos(lambda, rho0 + hr, P0, drift), ep = eval_pos(lambda, rho0, P0 + hp, drift);
        if (!er.ok || !ep.ok) return nr;
        Eigen::Matrix2d J;
        J.col(0) = (resid(er) - F) / hr;
        J.col(1) = (resid(ep) - F) / hp;
        const Vec2 step = J.fullPivLu().solve(-F);
        double damp = 1;
        bool moved = false;
        for (int k = 0; k < 20; ++k, damp /= 2) {
            const double r1 = rho0 + damp * step[0], p1 = P0 + damp * step[1];
            if (!box.contains(r1, p1)) continue;
            const PosEval trial = eval_pos(lambda, r1, p1, drift);
            if (trial.ok && resid(trial).norm() < F.norm()) {
                rho0 = r1;
                P0 = p1;
                cur = trial;
                F = resid(trial);
                moved = true;
                break;
            }
        }
        if (!moved) break;
    }
    nr.converged = F.norm() <= 1e-10;
    nr.rho0 = rho0;
    nr.P0 = P0;
    nr.v = cur.v;
    return nr;
}

struct PosJob {
    std::size_t point = 0;
    Fraction t1, t2;
    std::int64_t periods = 1;
    double rho0 = 0, P0 = 0;  // predicted start
};

// reduced p/q != 0 with q <= qmax and |p/q - x| <= tol, ordered by (q, p)
std::vector<Fraction> fractions_near(double x, double tol, std::int64_t qmax)
{
    std::vector<Fraction> out;
    for (std::int64_t q = 1; q <= qmax; ++q) {
        const auto p0 = std::int64_t(std::ceil((x - tol) * double(q))), p1 = std::int64_t(std::floor((x + tol) * double(q)));
        for (std::int64_t p = p0; p <= p1; ++p)
            if (p != 0 && std::gcd(p, q) == 1) out.push_back({p, q});
    }
    return out;
}

PeriodicReport scan_deltapos(const ScanOptions& opt, bool drift)
{
    if (!(opt.P_lo > 0) || !(opt.P_hi > opt.P_lo) || opt.P_grid < 2) throw std::invalid_argument("empty P scan range");
    PeriodicReport rep;
    const auto rho = linspace(opt.rho_lo, opt.rho_hi, opt.rho_grid);
    const auto P = linspace(opt.P_lo, opt.P_hi, opt.P_grid);
    const std::size_t nr = rho.size(), np = P.size();
    std::vector<PosEval> evals(nr * np);
    parallel_for(evals.size(), [&](std::size_t k) { evals[k] = eval_pos(opt.lambda, rho[k / np], P[k % np], drift); });

    for (std::size_t k = 0; k < evals.size(); ++k)
        if (evals[k].ok) rep.grid.push_back({rho[k / np], P[k % np], evals[k].v.f1, evals[k].v.f2, evals[k].v.T});

    // Fractions within the local variation of (f1, f2); the grid Jacobian predicts where each
    // pair is hit and only pairs landing within one cell are kept.
    const double drho = rho[1] - rho[0], dP = P[1] - P[0];
    auto at = [&](long i, long j) -> const PosEval* {
        if (i < 0 || j < 0 || i >= long(nr) || j >= long(np)) return nullptr;
        const PosEval& e = evals[std::size_t(i) * np + std::size_t(j)];
        return e.ok ? &e : nullptr;
    };
    std::vector<PosJob> jobs;
    for (std::size_t k = 0; k < evals.size(); ++k) {
        if (!evals[k].ok) continue;
        const long i = long(k / np), j = long(k % np);
        const PosEval* ri = at(i + 1, j) ? at(i + 1, j) : at(i - 1, j);
        const PosEval* pj = at(i, j + 1) ? at(i, j + 1) : at(i, j - 1);
        if (!ri || !pj) continue;
        const double sr = at(i + 1, j) ? drho : -drho, sp = at(i, j + 1) ? dP : -dP;
        const Vec2 f0(evals[k].v.f1, evals[k].v.f2);
        Eigen::Matrix2d J;
        J.col(0) = (Vec2(ri->v.f1, ri->v.f2) - f0) / sr;
        J.col(1) = (Vec2(pj->v.f1, pj->v.f2) - f0) / sp;
        const double tol1 = std::abs(J(0, 0)) * drho + std::abs(J(0, 1)) * dP;
        const double tol2 = std::abs(J(1, 0)) * drho + std::abs(J(1, 1)) * dP;
        const auto lu = J.fullPivLu();
        if (!lu.isInvertible()) continue;
        const auto near1 = fractions_near(f0[0], tol1, opt.qmax), near2 = fractions_near(f0[1], tol2, opt.qmax);
        PosJob best;
        double best_d = INFINITY;
        for (const Fraction& a : near1) {
            for (const Fraction& b : near2) {
                const Vec2 dx = lu.solve(Vec2(a.value(), b.value()) - f0);
                const double d = std::max(std::abs(dx[0]) / drho, std::abs(dx[1]) / dP);
                if (d > 1) continue;
                const double r1 = rho[std::size_t(i)] + dx[0], p1 = P[std::size_t(j)] + dx[1];
                if (r1 < opt.rho_lo || r1 > opt.rho_hi || p1 < opt.P_lo || p1 > opt.P_hi) continue;
                const std::int64_t n = lcm64(a.q, b.q);
                if (best_d == INFINITY || n < best.periods || (n == best.periods && d < best_d)) {
                    best = {k, a, b, n, r1, p1};
                    best_d = d;
                }
            }
        }
        if (best_d < INFINITY) jobs.push_back(best);
    }
    std::sort(jobs.begin(), jobs.end(), [](const PosJob& a, const PosJob& b) {
        if (a.periods != b.periods) return a.periods < b.periods;
        return a.point < b.point;
    });
    // one job per target pair
    std::vector<PosJob> unique;
    for (const PosJob& j : jobs) {
        const bool dup = std::any_of(unique.begin(), unique.end(),
                                     [&](const PosJob& u) { return u.t1 == j.t1 && u.t2 == j.t2; });
        if (!dup) unique.push_back(j);
    }
    if (unique.empty()) rep.notes.push_back("no rational pair with q <= qmax is attained near the scan grid");

    // batches in job order until enough candidates converge; the merge order is fixed
    const Box box{opt.rho_lo, opt.rho_hi, opt.P_lo, opt.P_hi};
    const std::size_t want = static_cast<std::size_t>(opt.max_candidates);
    const std::size_t budget = std::min(unique.size(), 4 * want);
    std::size_t tried = 0, failed = 0;
    while (tried < budget && rep.candidates.size() < want) {
        const std::size_t batch = std::min(want, budget - tried);
        std::vector<PeriodicCandidate> out(batch);
        parallel_for(batch, [&](std::size_t m) {
            const PosJob& j = unique[tried + m];
            const NewtonResult nres = newton_pos(opt.lambda, j.rho0, j.P0, j.t1.value(), j.t2.value(), drift, box);
            PeriodicCandidate c;
            c.p = j.t1.p;
            c.q = j.t1.q;
            c.p2 = j.t2.p;
            c.q2 = j.t2.q;
            c.rho0 = nres.rho0;
            c.P0 = nres.P0;
            c.f = nres.v.f1;
            c.f2 = nres.v.f2;
            c.T = nres.v.T;
            c.period = double(j.periods) * nres.v.T;
            c.converged = nres.converged;
            if (c.converged) c.closure = closure_deltapos(opt.lambda, c.rho0, c.P0, c.T, j.periods, opt.delta0, opt.argc0);
            out[m] = c;
        });
        for (const auto& c : out) {
            if (!c.converged) ++failed;
            else if (rep.candidates.size() < want) rep.candidates.push_back(c);
        }
        tried += batch;
    }
    if (failed)
        rep.notes.push_back(std::to_string(failed) + " of " + std::to_string(tried) +
                            " Newton solves did not converge inside the scan box");
    return rep;
}

}  // namespace

double closure_deltapos(double lambda, double rho0, double P0, double T, std::int64_t periods, double delta0,
                        double argc0)
{
    IntegratorConfig cfg;
    cfg.rtol = 1e-12;
    cfg.atol = 1e-14;
    const double span = double(periods) * T;
    auto tr = integrate_pw(lambda, rho0, P0, pi, 0.0, span + T, cfg);
    if (tr.termination != Termination::reached_end) return INFINITY;
    double worst = 0;
    for (double s : {0.0, 0.37 * T, 0.71 * T}) {
        const FieldSample a = reconstruct_pw(lambda, rho0, delta0, argc0, pi, s, tr(s));
        const FieldSample b = reconstruct_pw(lambda, rho0, delta0, argc0, pi, s + span, tr(s + span));
        worst = std::max({worst, std::abs(a.z - b.z), distance(a.xi, b.xi), std::abs(a.r - b.r)});
    }
    return worst;
}

PeriodicReport find_periodic(const ScanOptions& opt)
{
    check_range(opt);
    switch (opt.branch) {
    case PeriodicBranch::delta0: return scan_delta0(opt);
    case PeriodicBranch::deltapos_drift: return scan_deltapos(opt, true);
    case PeriodicBranch::deltapos_bounded: return scan_deltapos(opt, false);
    }
    throw std::logic_error("unreachable");
}

}  // namespace dym
