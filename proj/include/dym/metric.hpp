#ifndef DYM_METRIC_HPP
#define DYM_METRIC_HPP

#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace dym {

// Natural cubic spline through (x_i, y_i), x strictly increasing.
class CubicSpline {
public:
    CubicSpline() = default;
    CubicSpline(std::vector<double> x, std::vector<double> y);

    double operator()(double t) const;
    double derivative(double t) const;
    double front() const { return x_.front(); }
    double back() const { return x_.back(); }

private:
    std::size_t interval(double t) const;
    std::vector<double> x_, y_, m_;  // m_ = second derivatives
};

// Warping function r(s) > 0 of the metric.
class MetricProfile {
public:
    static MetricProfile constant(double r0);
    // a + b sin(omega s)
    static MetricProfile sine(double a, double b, double omega);
    // a sech(k s)^p
    static MetricProfile sech_power(double a, double k, double p);
    static MetricProfile closed_form(std::string name, std::function<double(double)> r,
                                     std::function<double(double)> dr);
    static MetricProfile tabulated(std::vector<double> s, std::vector<double> r);
    static MetricProfile from_csv(const std::string& path);
    // "const:V" | "form:NAME:P1,P2,..." | "file:PATH"
    static MetricProfile parse(const std::string& spec);

    double operator()(double s) const;
    double derivative(double s) const;
    MetricProfile scaled(double factor) const;  // factor * r(s)
    std::pair<double, double> domain() const { return domain_; }
    const std::string& description() const { return desc_; }

private:
    std::function<double(double)> r_, dr_;
    std::pair<double, double> domain_{-1e300, 1e300};
    std::string desc_;
};

}  // namespace dym

#endif
