#pragma once

#include <vector>

namespace gravcam {

/// Cubic Hermite ramp from 0 at `t_start` to 1 at `t_end` with end slopes
/// `slope_start` and `slope_end` (per unit of t). Held at 0 before the
/// interval and at 1 after it.
struct HermiteRamp {
    double t_start = 0.0;
    double t_end = 1.0;
    double slope_start = 1.0;
    double slope_end = 1.0;

    double operator()(double t) const;
    double derivative(double t) const;
    /// Max |s'| over [t_start, t_end] (closed form, the derivative is quadratic).
    double max_abs_derivative() const;
};

/// C2 cubic spline through strictly increasing knots with prescribed end
/// derivatives (the "complete" boundary condition). A single knot yields a
/// constant; evaluation outside the knot span holds the end values.
class CubicSpline {
public:
    CubicSpline(std::vector<double> times, std::vector<double> values, double slope_start,
                double slope_end);

    double operator()(double t) const;

    const std::vector<double>& times() const noexcept { return t_; }
    const std::vector<double>& values() const noexcept { return y_; }
    const std::vector<double>& slopes() const noexcept { return m_; }

private:
    std::vector<double> t_;
    std::vector<double> y_;
    std::vector<double> m_;
};

}  // namespace gravcam
