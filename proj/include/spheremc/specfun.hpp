#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace spheremc {

struct convergence_error : std::runtime_error {
    explicit convergence_error(const std::string& what) : std::runtime_error(what) {}
};

namespace detail {

inline constexpr int kSpecfunMaxIter = 500;
inline constexpr double kSpecfunTol = 1e-14;

// Power series for the regularized lower incomplete gamma, valid x < a + 1.
inline double gamma_p_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double term = sum;
    for (int n = 0; n < kSpecfunMaxIter; ++n) {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if (std::abs(term) < std::abs(sum) * kSpecfunTol)
            return sum * std::exp(a * std::log(x) - x - std::lgamma(a));
    }
    throw convergence_error("gamma_p: series failed to converge");
}

// Lentz continued fraction for the regularized upper incomplete gamma,
// valid x >= a + 1.
inline double gamma_q_cf(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= kSpecfunMaxIter; ++i) {
        double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < kSpecfunTol)
            return h * std::exp(a * std::log(x) - x - std::lgamma(a));
    }
    throw convergence_error("gamma_q: continued fraction failed to converge");
}

inline double beta_cf(double a, double b, double x) {
    const double tiny = 1e-300;
    double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kSpecfunMaxIter; ++m) {
        int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < kSpecfunTol) return h;
    }
    throw convergence_error("beta_cf: continued fraction failed to converge");
}

}  // namespace detail

/// Regularized lower incomplete gamma P(a, x); x <= 0 maps to 0.
inline double gamma_p(double a, double x) {
    if (!(a > 0.0)) throw std::invalid_argument("gamma_p: a must be positive");
    if (std::isnan(x)) throw std::invalid_argument("gamma_p: x is NaN");
    if (x <= 0.0) return 0.0;
    if (std::isinf(x)) return 1.0;
    if (x < a + 1.0) return detail::gamma_p_series(a, x);
    return 1.0 - detail::gamma_q_cf(a, x);
}

/// Regularized incomplete beta I_x(a, b).
inline double inc_beta(double x, double a, double b) {
    if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("inc_beta: a, b must be positive");
    if (std::isnan(x) || x < 0.0 || x > 1.0) throw std::invalid_argument("inc_beta: x outside [0,1]");
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    double bt = std::exp(std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b)
                         + a * std::log(x) + b * std::log1p(-x));
    if (x < (a + 1.0) / (a + b + 2.0)) return bt * detail::beta_cf(a, b, x) / a;
    return 1.0 - bt * detail::beta_cf(b, a, 1.0 - x) / b;
}

/// CDF of the chi distribution with d degrees of freedom: P{||Z|| <= r} for
/// Z standard normal in R^d. Zero for r <= 0.
inline double chi_cdf(double r, int d) {
    if (d < 1) throw std::invalid_argument("chi_cdf: d must be >= 1");
    if (std::isnan(r)) throw std::invalid_argument("chi_cdf: r is NaN");
    if (r <= 0.0) return 0.0;
    if (std::isinf(r)) return 1.0;
    return gamma_p(0.5 * d, 0.5 * r * r);
}

/// Density of the chi distribution with d degrees of freedom.
inline double chi_pdf(double r, int d) {
    if (d < 1) throw std::invalid_argument("chi_pdf: d must be >= 1");
    if (r < 0.0) return 0.0;
    if (r == 0.0) return d == 1 ? std::sqrt(2.0 / M_PI) : 0.0;
    double lg = (d - 1) * std::log(r) - 0.5 * r * r - (0.5 * d - 1.0) * std::log(2.0)
                - std::lgamma(0.5 * d);
    return std::exp(lg);
}

/// Standard normal CDF.
inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

/// Normalized surface measure of the spherical cap {u : u . axis >= cos(theta)}
/// on the unit sphere in R^d.
inline double cap_measure(double theta, int d) {
    if (d < 2) throw std::invalid_argument("cap_measure: d must be >= 2");
    if (std::isnan(theta) || theta < 0.0 || theta > M_PI + 1e-12)
        throw std::invalid_argument("cap_measure: theta outside [0, pi]");
    theta = std::min(theta, M_PI);
    if (theta == 0.0) return 0.0;
    if (theta > 0.5 * M_PI) return 1.0 - cap_measure(M_PI - theta, d);
    double s = std::sin(theta);
    return 0.5 * inc_beta(s * s, 0.5 * (d - 1), 0.5);
}

using MultiIndex = std::vector<int>;

/// Exact moment E[u^alpha] of the uniform distribution on the unit sphere in
/// R^d, where u^alpha = prod_i u_i^alpha_i. Zero when any exponent is odd.
inline double sphere_moment(const MultiIndex& alpha, int d) {
    if (d < 1 || static_cast<std::size_t>(d) != alpha.size())
        throw std::invalid_argument("sphere_moment: alpha length must equal d");
    int total = 0;
    for (int e : alpha) {
        if (e < 0) throw std::invalid_argument("sphere_moment: negative exponent");
        if (e % 2 == 1) return 0.0;
        total += e;
    }
    if (total == 0) return 1.0;
    double lg = std::lgamma(0.5 * d) - std::lgamma(0.5 * (d + total));
    const double lg_half = std::lgamma(0.5);
    for (int e : alpha)
        if (e > 0) lg += std::lgamma(0.5 * (e + 1)) - lg_half;
    return std::exp(lg);
}

}  // namespace spheremc
