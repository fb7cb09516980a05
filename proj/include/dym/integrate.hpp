#ifndef DYM_INTEGRATE_HPP
#define DYM_INTEGRATE_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

#include "dym/roots.hpp"

namespace dym {

// Thrown by right-hand sides when the state leaves the domain of the equations.
struct SingularState : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Method { rk4_fixed, dopri5 };
enum class Termination { reached_end, blow_up, step_underflow, singular_state, event_stop };
enum class Direction { any, rising, falling };
enum class EventAction { record, stop };

const char* to_string(Termination t);

struct IntegratorConfig {
    Method method = Method::dopri5;
    bool adaptive = true;       // dopri5 only; false takes fixed steps of size h_fixed
    double h_fixed = 1e-2;
    double rtol = 1e-10;
    double atol = 1e-12;
    double max_step = std::numeric_limits<double>::infinity();
    double min_step = 1e-14;
    double blowup_norm = 1e8;   // sup-norm of the state
    long max_steps = 50'000'000;
};

template <class Vec>
using EventFn = std::function<double(double, const Vec&)>;

template <class Vec>
struct EventSpec {
    EventFn<Vec> g;
    Direction direction = Direction::any;
    EventAction action = EventAction::record;
    std::string name;
};

template <class Vec>
struct EventHit {
    std::size_t index = 0;   // position in the event list
    double s = 0;
    Vec state;
    bool degenerate = false; // tangential touch without a sign change
    double s_lo = 0, s_hi = 0;
};

// Accepted steps plus a continuous extension on each of them.
template <class Vec>
class Trajectory {
public:
    struct Segment {
        double s0 = 0, h = 0;
        bool hermite = false;
        std::array<Vec, 5> r;
    };

    std::vector<double> s;
    std::vector<Vec> y;
    std::vector<Segment> segments;
    std::vector<EventHit<Vec>> events;
    Termination termination = Termination::reached_end;
    long rhs_evals = 0;

    std::size_t size() const { return s.size(); }
    double s_begin() const { return s.front(); }
    double s_end() const { return s.back(); }
    const Vec& back() const { return y.back(); }
    bool forward() const { return s.size() < 2 || s.back() >= s.front(); }

    Vec operator()(double t) const
    {
        if (segments.empty()) return y.front();
        return eval_segment(segments[locate(t)], t);
    }

    std::size_t locate(double t) const
    {
        // segments are ordered along the direction of integration
        const bool fwd = forward();
        std::size_t lo = 0, hi = segments.size();
        while (hi - lo > 1) {
            const std::size_t mid = (lo + hi) / 2;
            const bool after = fwd ? t >= segments[mid].s0 : t <= segments[mid].s0;
            if (after) lo = mid; else hi = mid;
        }
        return lo;
    }

    static Vec eval_segment(const Segment& seg, double t)
    {
        const double th = (t - seg.s0) / seg.h;
        if (seg.hermite) {
            // r = {y0, y1, h f0, h f1}
            const double t2 = th * th, t3 = t2 * th;
            return (2 * t3 - 3 * t2 + 1) * seg.r[0] + (-2 * t3 + 3 * t2) * seg.r[1] +
                   (t3 - 2 * t2 + th) * seg.r[2] + (t3 - t2) * seg.r[3];
        }
        const double th1 = 1 - th;
        return seg.r[0] + th * (seg.r[1] + th1 * (seg.r[2] + th * (seg.r[3] + th1 * seg.r[4])));
    }
};

namespace detail {

struct Dopri5 {
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                            a75 = -2187.0 / 6784, a76 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
    static constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                            d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                            d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;
};

template <class Vec>
bool all_finite(const Vec& v) { return v.allFinite(); }

template <class Vec>
double sup_norm(const Vec& v) { return v.template lpNorm<Eigen::Infinity>(); }

inline bool crossed(double g0, double g1, Direction dir)
{
    if (g0 == 0 && g1 == 0) return false;
    if (g0 == 0) return false;  // a root at the left end belongs to the previous step
    const bool change = (g0 < 0 && g1 >= 0) || (g0 > 0 && g1 <= 0);
    if (!change) return false;
    if (dir == Direction::rising) return g0 < 0;
    if (dir == Direction::falling) return g0 > 0;
    return true;
}

// Scan one segment for crossings and tangential touches of g.
template <class Vec>
void scan_segment(const typename Trajectory<Vec>::Segment& seg, double sa, double sb,
                  const EventFn<Vec>& g, Direction dir, std::size_t idx,
                  std::vector<EventHit<Vec>>& hits)
{
    constexpr int nsub = 4;
    std::array<double, nsub + 1> ts, gs;
    for (int k = 0; k <= nsub; ++k) {
        ts[k] = sa + (sb - sa) * double(k) / nsub;
        gs[k] = g(ts[k], Trajectory<Vec>::eval_segment(seg, ts[k]));
    }
    auto gt = [&](double t) { return g(t, Trajectory<Vec>::eval_segment(seg, t)); };
    double scale = 0;
    for (double v : gs) scale = std::max(scale, std::abs(v));
    scale = std::max(scale, 1e-300);

    for (int k = 0; k < nsub; ++k) {
        if (crossed(gs[k], gs[k + 1], dir)) {
            RootResult rr = brent_root(gt, ts[k], ts[k + 1], gs[k], gs[k + 1], 1e-15);
            EventHit<Vec> hit;
            hit.index = idx;
            hit.s = rr.x;
            hit.state = Trajectory<Vec>::eval_segment(seg, rr.x);
            hit.s_lo = ts[k];
            hit.s_hi = ts[k + 1];
            // exact zero on an interior node with equal signs on both sides is a touch
            if (gs[k + 1] == 0 && k + 2 <= nsub && (gs[k] > 0) == (gs[k + 2] > 0) && gs[k + 2] != 0) {
                hit.degenerate = true;
                hit.s_hi = ts[k + 2];
            }
            hits.push_back(hit);
        }
    }
    // tangential touch: local minimum of |g| with no sign change around it
    auto touch = [&](double a, double b) {
        auto [tm, gm] = golden_min([&](double t) { return std::abs(gt(t)); }, std::min(a, b), std::max(a, b), 60);
        if (gm > 1e-10 * scale) return;
        EventHit<Vec> hit;
        hit.index = idx;
        hit.s = tm;
        hit.state = Trajectory<Vec>::eval_segment(seg, tm);
        hit.degenerate = true;
        hit.s_lo = a;
        hit.s_hi = b;
        hits.push_back(hit);
    };
    bool one_sign = true;
    for (int k = 0; k <= nsub; ++k) one_sign = one_sign && gs[k] != 0 && (gs[k] > 0) == (gs[0] > 0);
    if (!one_sign) return;
    for (int k = 0; k <= nsub; ++k) {
        const double gk = std::abs(gs[k]);
        if (gk > 0.25 * scale) continue;
        const bool left_ok = k == 0 || gk <= std::abs(gs[k - 1]);
        const bool right_ok = k == nsub || gk <= std::abs(gs[k + 1]);
        if (!left_ok || !right_ok) continue;
        touch(ts[std::max(k - 1, 0)], ts[std::min(k + 1, nsub)]);
    }
}

}  // namespace detail

// Integrate y' = f(s, y) from s_a to s_b (either direction).
template <class Vec, class Rhs>
Trajectory<Vec> integrate(Rhs&& f, const Vec& y0, double s_a, double s_b,
                          const IntegratorConfig& cfg = {},
                          std::type_identity_t<std::span<const EventSpec<Vec>>> events = {})
{
    using D = detail::Dopri5;
    Trajectory<Vec> tr;
    tr.s.push_back(s_a);
    tr.y.push_back(y0);
    if (s_a == s_b) return tr;

    const double dir = s_b > s_a ? 1.0 : -1.0;
    const double span = std::abs(s_b - s_a);
    const double max_step = std::min(cfg.max_step, span);

    auto eval = [&](double s, const Vec& y) -> Vec {
        ++tr.rhs_evals;
        Vec k = f(s, y);
        if (!k.allFinite()) throw SingularState("non-finite right-hand side");
        return k;
    };

    double s = s_a;
    Vec y = y0;
    Vec k1;
    try {
        k1 = eval(s, y);
    } catch (const SingularState&) {
        tr.termination = Termination::singular_state;
        return tr;
    }

    // initial step (Hairer-Wanner heuristic)
    double h;
    if (cfg.method == Method::rk4_fixed || !cfg.adaptive) {
        h = std::min(cfg.h_fixed, span);
    } else {
        Vec sc = (cfg.atol + cfg.rtol * y.array().abs()).matrix();
        const double d0 = std::sqrt((y.array() / sc.array()).square().mean());
        const double d1 = std::sqrt((k1.array() / sc.array()).square().mean());
        double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
        h0 = std::min(h0, max_step);
        double h1 = h0;
        try {
            Vec y1 = y + dir * h0 * k1;
            Vec k2 = eval(s + dir * h0, y1);
            const double d2 = std::sqrt(((k2 - k1).array() / sc.array()).square().mean()) / h0;
            const double dm = std::max(d1, d2);
            h1 = dm <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dm, 0.2);
        } catch (const SingularState&) {
            h1 = h0 * 1e-2;
        }
        h = std::min({100 * h0, h1, max_step});
    }

    long nsteps = 0;
    while (true) {
        const double remaining = dir * (s_b - s);
        if (remaining <= 0) break;
        if (++nsteps > cfg.max_steps) {
            tr.termination = Termination::step_underflow;
            break;
        }
        bool last = false;
        if (h >= remaining || (cfg.adaptive && cfg.method == Method::dopri5 && h > 0.999999 * remaining)) {
            h = remaining;
            last = true;
        }
        const double hs = dir * h;

        typename Trajectory<Vec>::Segment seg;
        Vec ynew, knew;
        double err = 0;
        bool singular = false;
        try {
            if (cfg.method == Method::rk4_fixed) {
                Vec a = k1;
                Vec b = eval(s + hs / 2, y + hs / 2 * a);
                Vec c = eval(s + hs / 2, y + hs / 2 * b);
                Vec d = eval(s + hs, y + hs * c);
                ynew = y + hs / 6 * (a + 2 * b + 2 * c + d);
                knew = eval(s + hs, ynew);
                seg.hermite = true;
                seg.r = {y, ynew, hs * k1, hs * knew, ynew};
            } else {
                Vec k2 = eval(s + D::c2 * hs, y + hs * (D::a21 * k1));
                Vec k3 = eval(s + D::c3 * hs, y + hs * (D::a31 * k1 + D::a32 * k2));
                Vec k4 = eval(s + D::c4 * hs, y + hs * (D::a41 * k1 + D::a42 * k2 + D::a43 * k3));
                Vec k5 = eval(s + D::c5 * hs,
                              y + hs * (D::a51 * k1 + D::a52 * k2 + D::a53 * k3 + D::a54 * k4));
                Vec k6 = eval(s + hs, y + hs * (D::a61 * k1 + D::a62 * k2 + D::a63 * k3 +
                                                D::a64 * k4 + D::a65 * k5));
                ynew = y + hs * (D::a71 * k1 + D::a73 * k3 + D::a74 * k4 + D::a75 * k5 + D::a76 * k6);
                knew = eval(s + hs, ynew);
                if (cfg.adaptive) {
                    Vec e = hs * (D::e1 * k1 + D::e3 * k3 + D::e4 * k4 + D::e5 * k5 + D::e6 * k6 +
                                  D::e7 * knew);
                    // error per unit step: local error measured against tol * min(|h|, 1),
                    // floored a few ulps above roundoff so that tiny steps stay achievable
                    const auto ymax = y.array().abs().max(ynew.array().abs());
                    const auto sc = ((cfg.atol + cfg.rtol * ymax) * std::min(h, 1.0))
                                        .max(64 * std::numeric_limits<double>::epsilon() * ymax);
                    err = std::sqrt((e.array() / sc).square().mean());
                }
                Vec ydiff = ynew - y;
                Vec bspl = hs * k1 - ydiff;
                seg.r = {y, ydiff, bspl, ydiff - hs * knew - bspl,
                         hs * (D::d1 * k1 + D::d3 * k3 + D::d4 * k4 + D::d5 * k5 + D::d6 * k6 +
                               D::d7 * knew)};
            }
        } catch (const SingularState&) {
            singular = true;
        }
        if (!singular && !std::isfinite(err)) singular = true;

        if (singular) {
            if (cfg.method == Method::rk4_fixed || !cfg.adaptive || h * 0.25 < cfg.min_step) {
                tr.termination = Termination::singular_state;
                break;
            }
            h *= 0.25;
            continue;
        }

        const bool adaptive = cfg.method == Method::dopri5 && cfg.adaptive;
        if (adaptive && err > 1.0) {
            h *= std::max(0.2, 0.9 * std::pow(err, -0.25));
            if (h < cfg.min_step) {
                tr.termination = Termination::step_underflow;
                break;
            }
            continue;
        }

        // accepted
        seg.s0 = s;
        seg.h = hs;
        const double snew = last ? s_b : s + hs;

        // events on the accepted step
        std::vector<EventHit<Vec>> hits;
        for (std::size_t e = 0; e < events.size(); ++e)
            detail::scan_segment<Vec>(seg, s, snew, events[e].g, events[e].direction, e, hits);
        std::sort(hits.begin(), hits.end(),
                  [dir](const auto& a, const auto& b) { return dir * a.s < dir * b.s; });
        bool stop = false;
        double s_stop = snew;
        for (auto& hit : hits) {
            // a touch on a step boundary is seen from both neighbouring steps
            if (hit.degenerate && !tr.events.empty() && tr.events.back().degenerate &&
                tr.events.back().index == hit.index && std::abs(tr.events.back().s - hit.s) < 1e-8 * (1 + std::abs(hit.s)))
                continue;
            tr.events.push_back(hit);
            if (events[hit.index].action == EventAction::stop && !hit.degenerate) {
                stop = true;
                s_stop = hit.s;
                break;
            }
        }

        tr.segments.push_back(seg);
        if (stop) {
            tr.s.push_back(s_stop);
            tr.y.push_back(Trajectory<Vec>::eval_segment(seg, s_stop));
            tr.termination = Termination::event_stop;
            break;
        }
        tr.s.push_back(snew);
        tr.y.push_back(ynew);
        s = snew;
        y = ynew;
        k1 = knew;

        if (!y.allFinite() || detail::sup_norm(y) > cfg.blowup_norm) {
            tr.termination = Termination::blow_up;
            break;
        }
        if (last) break;

        if (adaptive) {
            const double fac = err == 0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.25), 0.2, 5.0);
            h = std::min(h * fac, max_step);
            if (h < cfg.min_step) {
                tr.termination = Termination::step_underflow;
                break;
            }
        }
    }
    return tr;
}

// Locate crossings of g on a finished trajectory through its continuous extension.
template <class Vec>
std::vector<EventHit<Vec>> refine_event(const Trajectory<Vec>& tr, const EventFn<Vec>& g,
                                        Direction dir = Direction::any)
{
    std::vector<EventHit<Vec>> hits;
    for (std::size_t i = 0; i < tr.segments.size(); ++i) {
        const auto& seg = tr.segments[i];
        const double sa = tr.s[i], sb = tr.s[i + 1];
        detail::scan_segment<Vec>(seg, sa, sb, g, dir, 0, hits);
    }
    std::vector<EventHit<Vec>> out;
    for (auto& h : hits) {
        if (!out.empty() && !h.degenerate && !out.back().degenerate &&
            std::abs(out.back().s - h.s) < 1e-13 * (1 + std::abs(h.s)))
            continue;
        out.push_back(h);
    }
    return out;
}

inline const char* to_string(Termination t)
{
    switch (t) {
    case Termination::reached_end: return "reached-end";
    case Termination::blow_up: return "blow-up";
    case Termination::step_underflow: return "step-underflow";
    case Termination::singular_state: return "singular-state";
    case Termination::event_stop: return "event-stop";
    }
    return "unknown";
}

}  // namespace dym

#endif
