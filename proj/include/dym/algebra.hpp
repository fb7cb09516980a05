#ifndef DYM_ALGEBRA_HPP
#define DYM_ALGEBRA_HPP

#include <cmath>
#include <complex>

namespace dym {

template <class T> using ComplexT = std::complex<T>;
using Complex = ComplexT<double>;

// q = c + j h with j^2 = -1 and w j = j conj(w) for complex w.
template <class T>
struct QuaternionT {
    ComplexT<T> c{};
    ComplexT<T> h{};

    QuaternionT() = default;
    QuaternionT(ComplexT<T> c_, ComplexT<T> h_) : c(c_), h(h_) {}

    static QuaternionT j() { return {ComplexT<T>(0), ComplexT<T>(1)}; }

    T norm2() const { return std::norm(c) + std::norm(h); }
    T norm() const { return std::sqrt(norm2()); }

    QuaternionT& operator+=(const QuaternionT& o) { c += o.c; h += o.h; return *this; }
    QuaternionT& operator-=(const QuaternionT& o) { c -= o.c; h -= o.h; return *this; }
    QuaternionT& operator*=(T a) { c *= a; h *= a; return *this; }
};

using Quaternion = QuaternionT<double>;

template <class T>
QuaternionT<T> operator+(QuaternionT<T> a, const QuaternionT<T>& b) { return a += b; }
template <class T>
QuaternionT<T> operator-(QuaternionT<T> a, const QuaternionT<T>& b) { return a -= b; }
template <class T>
QuaternionT<T> operator-(const QuaternionT<T>& a) { return {-a.c, -a.h}; }
template <class T>
QuaternionT<T> operator*(QuaternionT<T> a, T s) { return a *= s; }
template <class T>
QuaternionT<T> operator*(T s, QuaternionT<T> a) { return a *= s; }

// (c1 + j h1)(c2 + j h2) = (c1 c2 - conj(h1) h2) + j (h1 c2 + conj(c1) h2)
template <class T>
QuaternionT<T> operator*(const QuaternionT<T>& a, const QuaternionT<T>& b)
{
    return {a.c * b.c - std::conj(a.h) * b.h, a.h * b.c + std::conj(a.c) * b.h};
}

// complex scalars on the left / right
template <class T>
QuaternionT<T> operator*(const ComplexT<T>& w, const QuaternionT<T>& q)
{
    return QuaternionT<T>(w, ComplexT<T>(0)) * q;
}
template <class T>
QuaternionT<T> operator*(const QuaternionT<T>& q, const ComplexT<T>& w)
{
    return {q.c * w, q.h * w};
}

template <class T>
QuaternionT<T> conj(const QuaternionT<T>& q) { return {std::conj(q.c), -q.h}; }

template <class T>
bool operator==(const QuaternionT<T>& a, const QuaternionT<T>& b) { return a.c == b.c && a.h == b.h; }

template <class T>
T distance(const QuaternionT<T>& a, const QuaternionT<T>& b) { return (a - b).norm(); }

// xi' = -i lambda xi conj(z) j, evaluated through the quaternion product.
template <class T>
QuaternionT<T> dirac_rhs_quaternion(const QuaternionT<T>& xi, const ComplexT<T>& z, T lambda)
{
    const ComplexT<T> I(0, 1);
    QuaternionT<T> left(-I * lambda, ComplexT<T>(0));
    return left * (xi * std::conj(z)) * QuaternionT<T>::j();
}

// Same right-hand side in components: c' = i lambda z conj(h), h' = i lambda z conj(c).
template <class T>
QuaternionT<T> dirac_rhs_components(const QuaternionT<T>& xi, const ComplexT<T>& z, T lambda)
{
    const ComplexT<T> il(0, lambda);
    return {il * z * std::conj(xi.h), il * z * std::conj(xi.c)};
}

// d|xi|^2/ds along the Dirac flow
template <class T>
T spinor_norm_rate(const QuaternionT<T>& xi, const ComplexT<T>& z, T lambda)
{
    return 4 * lambda * std::imag(std::conj(z) * xi.c * xi.h);
}

}  // namespace dym

#endif
