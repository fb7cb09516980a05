#ifndef DYM_ROOTS_HPP
#define DYM_ROOTS_HPP

#include <cmath>
#include <limits>
#include <utility>

namespace dym {

struct RootResult {
    double x = 0;
    double fx = 0;
    int iterations = 0;
    bool converged = false;
};

// Brent-Dekker bracketing root finder. fa and fb must differ in sign (or one vanish).
template <class F>
RootResult brent_root(F&& f, double a, double b, double fa, double fb,
                      double xtol = 1e-15, int max_iter = 200)
{
    RootResult out;
    if (fa == 0) return {a, fa, 0, true};
    if (fb == 0) return {b, fb, 0, true};
    if ((fa > 0) == (fb > 0)) return {a, fa, 0, false};

    const double eps = std::numeric_limits<double>::epsilon();
    double c = a, fc = fa, d = b - a, e = d;
    for (int it = 1; it <= max_iter; ++it) {
        if ((fb > 0) == (fc > 0)) {
            c = a; fc = fa; d = b - a; e = d;
        }
        if (std::abs(fc) < std::abs(fb)) {
            a = b; b = c; c = a;
            fa = fb; fb = fc; fc = fa;
        }
        const double tol = 2 * eps * std::abs(b) + 0.5 * xtol;
        const double m = 0.5 * (c - b);
        if (std::abs(m) <= tol || fb == 0) return {b, fb, it, true};

        if (std::abs(e) >= tol && std::abs(fa) > std::abs(fb)) {
            double p, q, r;
            const double s = fb / fa;
            if (a == c) {
                p = 2 * m * s;
                q = 1 - s;
            } else {
                q = fa / fc;
                r = fb / fc;
                p = s * (2 * m * q * (q - r) - (b - a) * (r - 1));
                q = (q - 1) * (r - 1) * (s - 1);
            }
            if (p > 0) q = -q; else p = -p;
            if (2 * p < std::min(3 * m * q - std::abs(tol * q), std::abs(e * q))) {
                e = d;
                d = p / q;
            } else {
                d = m; e = m;
            }
        } else {
            d = m; e = m;
        }
        a = b; fa = fb;
        b += (std::abs(d) > tol) ? d : (m > 0 ? tol : -tol);
        fb = f(b);
        out = {b, fb, it, false};
    }
    return out;
}

template <class F>
RootResult brent_root(F&& f, double a, double b, double xtol = 1e-15, int max_iter = 200)
{
    const double fa = f(a), fb = f(b);
    return brent_root(f, a, b, fa, fb, xtol, max_iter);
}

// Golden-section minimiser of a unimodal function on [a, b].
template <class F>
std::pair<double, double> golden_min(F&& f, double a, double b, int iters = 80)
{
    const double g = 0.5 * (std::sqrt(5.0) - 1);
    double x1 = b - g * (b - a), x2 = a + g * (b - a);
    double f1 = f(x1), f2 = f(x2);
    for (int i = 0; i < iters; ++i) {
        if (f1 < f2) {
            b = x2; x2 = x1; f2 = f1;
            x1 = b - g * (b - a); f1 = f(x1);
        } else {
            a = x1; x1 = x2; f1 = f2;
            x2 = a + g * (b - a); f2 = f(x2);
        }
    }
    return f1 < f2 ? std::pair{x1, f1} : std::pair{x2, f2};
}

}  // namespace dym

#endif
