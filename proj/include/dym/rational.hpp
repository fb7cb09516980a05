#ifndef DYM_RATIONAL_HPP
#define DYM_RATIONAL_HPP

#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

namespace dym {

struct Fraction {
    std::int64_t p = 0;
    std::int64_t q = 1;
    double value() const { return double(p) / double(q); }
    friend bool operator==(const Fraction&, const Fraction&) = default;
    friend bool operator<(const Fraction& a, const Fraction& b) { return a.p * b.q < b.p * a.q; }
};

// Continued-fraction convergents of x with denominator <= qmax, in order of increasing q.
inline std::vector<Fraction> convergents(double x, std::int64_t qmax)
{
    std::vector<Fraction> out;
    if (!std::isfinite(x) || qmax < 1) return out;
    std::int64_t p0 = 1, q0 = 0;                       // h_{-1}, k_{-1}
    std::int64_t p1 = std::int64_t(std::floor(x)), q1 = 1;
    out.push_back({p1, q1});
    double frac = x - std::floor(x);
    for (int depth = 0; depth < 64 && frac > 1e-15; ++depth) {
        const double inv = 1.0 / frac;
        const auto a = std::int64_t(std::floor(inv));
        frac = inv - std::floor(inv);
        const std::int64_t p2 = a * p1 + p0, q2 = a * q1 + q0;
        if (q2 > qmax) break;
        out.push_back({p2, q2});
        p0 = p1; q0 = q1; p1 = p2; q1 = q2;
    }
    return out;
}

inline std::int64_t lcm64(std::int64_t a, std::int64_t b) { return std::lcm(a, b); }

}  // namespace dym

#endif
