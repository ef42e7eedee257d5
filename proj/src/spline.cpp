#include "gravcam/spline.hpp"

#include "gravcam/errors.hpp"

#include <algorithm>
#include <cmath>

namespace gravcam {

namespace {

// Hermite basis on u in [0, 1] for an interval of length h.
double hermite(double y0, double y1, double m0, double m1, double h, double u) {
    const double u2 = u * u, u3 = u2 * u;
    return (2 * u3 - 3 * u2 + 1) * y0 + (u3 - 2 * u2 + u) * h * m0 + (-2 * u3 + 3 * u2) * y1 +
           (u3 - u2) * h * m1;
}

double hermite_derivative(double y0, double y1, double m0, double m1, double h, double u) {
    const double u2 = u * u;
    return ((6 * u2 - 6 * u) * y0 + (-6 * u2 + 6 * u) * y1) / h + (3 * u2 - 4 * u + 1) * m0 +
           (3 * u2 - 2 * u) * m1;
}

}  // namespace

double HermiteRamp::operator()(double t) const {
    if (t <= t_start) return 0.0;
    if (t >= t_end) return 1.0;
    const double h = t_end - t_start;
    return hermite(0.0, 1.0, slope_start, slope_end, h, (t - t_start) / h);
}

double HermiteRamp::derivative(double t) const {
    if (t < t_start || t > t_end) return 0.0;
    const double h = t_end - t_start;
    return hermite_derivative(0.0, 1.0, slope_start, slope_end, h, (t - t_start) / h);
}

double HermiteRamp::max_abs_derivative() const {
    const double h = t_end - t_start;
    // s'(u) is quadratic in u; check both ends and the vertex.
    double best = std::max(std::abs(derivative(t_start)), std::abs(derivative(t_end)));
    const double a = -6.0 / h + 3.0 * slope_start + 3.0 * slope_end;  // u^2 coefficient
    const double b = 6.0 / h - 4.0 * slope_start - 2.0 * slope_end;   // u coefficient
    if (a != 0.0) {
        const double u = -b / (2.0 * a);
        if (u > 0.0 && u < 1.0) best = std::max(best, std::abs(derivative(t_start + u * h)));
    }
    return best;
}

CubicSpline::CubicSpline(std::vector<double> times, std::vector<double> values,
                         double slope_start, double slope_end)
    : t_(std::move(times)), y_(std::move(values)) {
    const std::size_t n = t_.size();
    if (n == 0 || n != y_.size()) throw InvalidArgument("spline needs matching, non-empty knots");
    for (std::size_t i = 1; i < n; ++i) {
        if (!(t_[i] > t_[i - 1])) throw InvalidArgument("spline knots must be strictly increasing");
    }
    m_.assign(n, 0.0);
    if (n == 1) return;
    m_.front() = slope_start;
    m_.back() = slope_end;
    if (n == 2) return;

    // Tridiagonal system for interior slopes (second-derivative continuity).
    const std::size_t k = n - 2;
    std::vector<double> sub(k), diag(k), sup(k), rhs(k);
    for (std::size_t j = 0; j < k; ++j) {
        const std::size_t i = j + 1;
        const double h0 = t_[i] - t_[i - 1];
        const double h1 = t_[i + 1] - t_[i];
        const double d0 = (y_[i] - y_[i - 1]) / h0;
        const double d1 = (y_[i + 1] - y_[i]) / h1;
        sub[j] = h1;
        diag[j] = 2.0 * (h0 + h1);
        sup[j] = h0;
        rhs[j] = 3.0 * (h1 * d0 + h0 * d1);
    }
    rhs.front() -= sub.front() * slope_start;
    rhs.back() -= sup.back() * slope_end;
    for (std::size_t j = 1; j < k; ++j) {
        const double w = sub[j] / diag[j - 1];
        diag[j] -= w * sup[j - 1];
        rhs[j] -= w * rhs[j - 1];
    }
    m_[k] = rhs[k - 1] / diag[k - 1];
    for (std::size_t j = k - 1; j-- > 0;) {
        m_[j + 1] = (rhs[j] - sup[j] * m_[j + 2]) / diag[j];
    }
}

double CubicSpline::operator()(double t) const {
    if (t_.size() == 1 || t <= t_.front()) return y_.front();
    if (t >= t_.back()) return y_.back();
    const auto it = std::upper_bound(t_.begin(), t_.end(), t);
    const std::size_t i = static_cast<std::size_t>(it - t_.begin()) - 1;
    const double h = t_[i + 1] - t_[i];
    return hermite(y_[i], y_[i + 1], m_[i], m_[i + 1], h, (t - t_[i]) / h);
}

}  // namespace gravcam
