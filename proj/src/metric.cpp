#include "dym/metric.hpp"

#include "dym/csv.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dym {

CubicSpline::CubicSpline(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y))
{
    const std::size_t n = x_.size();
    if (n < 3 || y_.size() != n) throw std::invalid_argument("spline needs >= 3 matching nodes");
    for (std::size_t i = 1; i < n; ++i)
        if (!(x_[i] > x_[i - 1])) throw std::invalid_argument("spline nodes must increase");

    // tridiagonal system for interior second derivatives, natural ends (Thomas algorithm)
    m_.assign(n, 0.0);
    std::vector<double> c(n, 0.0), d(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double h0 = x_[i] - x_[i - 1], h1 = x_[i + 1] - x_[i];
        const double a = h0 / 6, b = (h0 + h1) / 3, cc = h1 / 6;
        const double rhs = (y_[i + 1] - y_[i]) / h1 - (y_[i] - y_[i - 1]) / h0;
        const double denom = b - a * c[i - 1];
        c[i] = cc / denom;
        d[i] = (rhs - a * d[i - 1]) / denom;
    }
    for (std::size_t i = n - 2; i >= 1; --i) {
        m_[i] = d[i] - c[i] * m_[i + 1];
        if (i == 1) break;
    }
}

std::size_t CubicSpline::interval(double t) const
{
    if (t < x_.front() || t > x_.back()) throw std::out_of_range("spline evaluated outside its table");
    auto it = std::upper_bound(x_.begin(), x_.end(), t);
    std::size_t i = std::size_t(it - x_.begin());
    return std::min(i == 0 ? 0 : i - 1, x_.size() - 2);
}

double CubicSpline::operator()(double t) const
{
    const std::size_t i = interval(t);
    const double h = x_[i + 1] - x_[i];
    const double a = (x_[i + 1] - t) / h, b = (t - x_[i]) / h;
    return a * y_[i] + b * y_[i + 1] + ((a * a * a - a) * m_[i] + (b * b * b - b) * m_[i + 1]) * h * h / 6;
}

double CubicSpline::derivative(double t) const
{
    const std::size_t i = interval(t);
    const double h = x_[i + 1] - x_[i];
    const double a = (x_[i + 1] - t) / h, b = (t - x_[i]) / h;
    return (y_[i + 1] - y_[i]) / h + ((1 - 3 * a * a) * m_[i] + (3 * b * b - 1) * m_[i + 1]) * h / 6;
}

MetricProfile MetricProfile::constant(double r0)
{
    if (!(r0 > 0)) throw std::invalid_argument("constant metric needs r0 > 0");
    MetricProfile m;
    m.r_ = [r0](double) { return r0; };
    m.dr_ = [](double) { return 0.0; };
    m.desc_ = "const:" + format_double(r0);
    return m;
}

MetricProfile MetricProfile::sine(double a, double b, double omega)
{
    if (!(a > std::abs(b))) throw std::invalid_argument("sine metric needs a > |b|");
    MetricProfile m;
    m.r_ = [=](double s) { return a + b * std::sin(omega * s); };
    m.dr_ = [=](double s) { return b * omega * std::cos(omega * s); };
    m.desc_ = "form:sin:" + format_double(a) + "," + format_double(b) + "," + format_double(omega);
    return m;
}

MetricProfile MetricProfile::sech_power(double a, double k, double p)
{
    if (!(a > 0)) throw std::invalid_argument("sech metric needs a > 0");
    MetricProfile m;
    m.r_ = [=](double s) { return a * std::pow(std::cosh(k * s), -p); };
    m.dr_ = [=](double s) { return -a * p * k * std::tanh(k * s) * std::pow(std::cosh(k * s), -p); };
    m.desc_ = "form:sech:" + format_double(a) + "," + format_double(k) + "," + format_double(p);
    return m;
}

MetricProfile MetricProfile::closed_form(std::string name, std::function<double(double)> r,
                                         std::function<double(double)> dr)
{
    MetricProfile m;
    m.r_ = std::move(r);
    m.dr_ = std::move(dr);
    m.desc_ = "form:" + name;
    return m;
}

MetricProfile MetricProfile::tabulated(std::vector<double> s, std::vector<double> r)
{
    for (double v : r)
        if (!(v > 0)) throw std::invalid_argument("tabulated metric must be positive");
    auto sp = std::make_shared<CubicSpline>(std::move(s), std::move(r));
    MetricProfile m;
    m.r_ = [sp](double t) { return (*sp)(t); };
    m.dr_ = [sp](double t) { return sp->derivative(t); };
    m.domain_ = {sp->front(), sp->back()};
    m.desc_ = "table";
    return m;
}

MetricProfile MetricProfile::from_csv(const std::string& path)
{
    CsvTable t = read_csv(path);
    const auto& s = t.column("s");
    const auto& r = t.column("r");
    MetricProfile m = tabulated(s, r);
    m.desc_ = "file:" + path;
    return m;
}

MetricProfile MetricProfile::parse(const std::string& spec)
{
    const auto colon = spec.find(':');
    if (colon == std::string::npos) throw std::invalid_argument("metric spec needs KIND:VALUE");
    const std::string kind = spec.substr(0, colon), rest = spec.substr(colon + 1);
    if (kind == "const") return constant(parse_double(rest));
    if (kind == "file") return from_csv(rest);
    if (kind == "form") {
        const auto c2 = rest.find(':');
        const std::string name = rest.substr(0, c2);
        std::vector<double> p;
        if (c2 != std::string::npos) p = parse_double_list(rest.substr(c2 + 1), ',');
        if (name == "sin" && p.size() == 3) return sine(p[0], p[1], p[2]);
        if (name == "sech" && p.size() == 3) return sech_power(p[0], p[1], p[2]);
        throw std::invalid_argument("unknown closed-form metric '" + rest + "'");
    }
    throw std::invalid_argument("unknown metric kind '" + kind + "'");
}

double MetricProfile::operator()(double s) const
{
    if (s < domain_.first || s > domain_.second) throw std::out_of_range("metric evaluated outside its domain");
    return r_(s);
}

double MetricProfile::derivative(double s) const { return dr_(s); }

MetricProfile MetricProfile::scaled(double factor) const
{
    MetricProfile m = *this;
    auto r = r_, dr = dr_;
    m.r_ = [r, factor](double s) { return factor * r(s); };
    m.dr_ = [dr, factor](double s) { return factor * dr(s); };
    m.desc_ = desc_ + "*" + format_double(factor);
    return m;
}

}  // namespace dym
