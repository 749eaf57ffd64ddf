#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

// Scalar special functions shared across the library: standard normal
// pdf/cdf/quantile, log-space gamma/beta/binomial helpers, the regularized
// incomplete beta function, and Student-t pdf/cdf/quantile for real dof.

namespace smts {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kSqrt2 = 1.41421356237309504880;
inline constexpr double kInvSqrt2Pi = 0.39894228040143267794;

inline double normal_pdf(double x) {
    return kInvSqrt2Pi * std::exp(-0.5 * x * x);
}

inline double normal_cdf(double x) {
    return 0.5 * std::erfc(-x / kSqrt2);
}

// Upper tail 1 - Phi(x), accurate for large x.
inline double normal_sf(double x) {
    return 0.5 * std::erfc(x / kSqrt2);
}

// Inverse of the standard normal CDF. Hastings' rational start polished by
// Newton steps against the erfc-based CDF; relative error near machine eps.
inline double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0))
        throw std::domain_error("normal_quantile: p must lie in (0,1)");
    if (p == 0.5) return 0.0;
    const bool lower = p < 0.5;
    const double pp = lower ? p : 1.0 - p;
    const double t = std::sqrt(-2.0 * std::log(pp));
    double z = -(t - (2.515517 + t * (0.802853 + t * 0.010328)) /
                     (1.0 + t * (1.432788 + t * (0.189269 + t * 0.001308))));
    for (int i = 0; i < 3; ++i) {
        const double err = normal_cdf(z) - pp;
        const double d = normal_pdf(z);
        if (d <= 0.0) break;
        z -= err / d;
    }
    return lower ? z : -z;
}

inline double log_gamma(double x) { return std::lgamma(x); }

inline double log_beta(double a, double b) {
    return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

// log C(n, k) for real-valued n >= k >= 0.
inline double log_binom(double n, double k) {
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

namespace detail {

// Continued fraction for the incomplete beta function (modified Lentz).
inline double betacf(double a, double b, double x) {
    constexpr int kMaxIter = 300;
    constexpr double kEps = 3e-16;
    constexpr double kFpMin = 1e-300;
    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < kFpMin) d = kFpMin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::abs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::abs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps) return h;
    }
    throw std::runtime_error("incomplete beta continued fraction did not converge");
}

}  // namespace detail

// Regularized incomplete beta I_x(a, b).
inline double incbeta(double a, double b, double x) {
    if (!(a > 0.0 && b > 0.0))
        throw std::domain_error("incbeta: a, b must be positive");
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double front =
        std::exp(a * std::log(x) + b * std::log1p(-x) - log_beta(a, b));
    if (x < (a + 1.0) / (a + b + 2.0))
        return front * detail::betacf(a, b, x) / a;
    return 1.0 - std::exp(b * std::log1p(-x) + a * std::log(x) - log_beta(a, b)) *
                     detail::betacf(b, a, 1.0 - x) / b;
}

inline double student_t_pdf(double x, double nu) {
    if (!(nu > 0.0)) throw std::domain_error("student_t_pdf: nu must be positive");
    const double lg = std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu) -
                      0.5 * std::log(nu * kPi);
    return std::exp(lg - 0.5 * (nu + 1.0) * std::log1p(x * x / nu));
}

inline double student_t_cdf(double x, double nu) {
    if (!(nu > 0.0)) throw std::domain_error("student_t_cdf: nu must be positive");
    if (x == 0.0) return 0.5;
    const double z = nu / (nu + x * x);
    const double tail = 0.5 * incbeta(0.5 * nu, 0.5, z);
    return x > 0.0 ? 1.0 - tail : tail;
}

// Inverse Student-t CDF for any real nu > 0 (bisection + Newton polish).
inline double student_t_quantile(double p, double nu) {
    if (!(p > 0.0 && p < 1.0))
        throw std::domain_error("student_t_quantile: p must lie in (0,1)");
    if (p == 0.5) return 0.0;
    if (nu == 1.0) return std::tan(kPi * (p - 0.5));
    const bool upper = p > 0.5;
    const double pp = upper ? p : 1.0 - p;
    double lo = 0.0, hi = 1.0;
    while (student_t_cdf(hi, nu) < pp && hi < 1e300) hi *= 2.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (student_t_cdf(mid, nu) < pp)
            lo = mid;
        else
            hi = mid;
        if (hi - lo <= 1e-14 * (1.0 + hi)) break;
    }
    double z = 0.5 * (lo + hi);
    for (int i = 0; i < 2; ++i) {
        const double d = student_t_pdf(z, nu);
        if (d <= 0.0) break;
        z -= (student_t_cdf(z, nu) - pp) / d;
    }
    return upper ? z : -z;
}

}  // namespace smts
