#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "smts/quadrature.hpp"
#include "smts/rng.hpp"
#include "smts/special.hpp"

// Population models used throughout: standard normal, logistic,
// double-exponential and Student-t (any real dof). All families are
// standardized (location 0, scale 1) and symmetric about 0, so the
// population median is 0. Also: the hypergeometric null law of the median
// count and the exact odd/even sample-median CDFs.

namespace smts {

enum class Family { normal, logistic, double_exponential, student_t };

struct DistributionModel {
    Family family = Family::normal;
    double dof = 0.0;  // student_t only

    static DistributionModel normal() { return {Family::normal, 0.0}; }
    static DistributionModel logistic() { return {Family::logistic, 0.0}; }
    static DistributionModel double_exponential() {
        return {Family::double_exponential, 0.0};
    }
    static DistributionModel student_t(double nu) {
        if (!(nu > 0.0)) throw std::domain_error("student_t: dof must be positive");
        return {Family::student_t, nu};
    }
};

// Accepts "normal", "logistic", "dexp", "t2", "t1", "t0.5", and "t:<nu>".
inline DistributionModel parse_distribution(std::string_view name) {
    if (name == "normal") return DistributionModel::normal();
    if (name == "logistic") return DistributionModel::logistic();
    if (name == "dexp") return DistributionModel::double_exponential();
    if (name.size() > 1 && name[0] == 't') {
        std::string_view arg = name.substr(1);
        if (!arg.empty() && arg[0] == ':') arg = arg.substr(1);
        try {
            size_t pos = 0;
            const double nu = std::stod(std::string(arg), &pos);
            if (pos == arg.size()) return DistributionModel::student_t(nu);
        } catch (const std::exception&) {
        }
    }
    throw std::invalid_argument("unknown distribution: " + std::string(name));
}

inline std::string distribution_name(const DistributionModel& m) {
    switch (m.family) {
        case Family::normal: return "normal";
        case Family::logistic: return "logistic";
        case Family::double_exponential: return "dexp";
        case Family::student_t: {
            double ip;
            if (std::modf(m.dof, &ip) == 0.0)
                return "t" + std::to_string(static_cast<long long>(ip));
            std::string s = std::to_string(m.dof);
            s.erase(s.find_last_not_of('0') + 1);
            if (!s.empty() && s.back() == '.') s.pop_back();
            return "t" + s;
        }
    }
    return "?";
}

inline double dist_pdf(const DistributionModel& m, double x) {
    switch (m.family) {
        case Family::normal: return normal_pdf(x);
        case Family::logistic: {
            const double s = 1.0 / (1.0 + std::exp(-x));
            return s * (1.0 - s);
        }
        case Family::double_exponential: return 0.5 * std::exp(-std::abs(x));
        case Family::student_t: return student_t_pdf(x, m.dof);
    }
    return 0.0;
}

inline double dist_cdf(const DistributionModel& m, double x) {
    switch (m.family) {
        case Family::normal: return normal_cdf(x);
        case Family::logistic: return 1.0 / (1.0 + std::exp(-x));
        case Family::double_exponential:
            return x < 0.0 ? 0.5 * std::exp(x) : 1.0 - 0.5 * std::exp(-x);
        case Family::student_t: return student_t_cdf(x, m.dof);
    }
    return 0.0;
}

struct DistEval {
    double pdf;
    double cdf;
};

inline DistEval dist_eval(const DistributionModel& m, double x) {
    return {dist_pdf(m, x), dist_cdf(m, x)};
}

inline double dist_quantile(const DistributionModel& m, double p) {
    if (!(p > 0.0 && p < 1.0))
        throw std::domain_error("dist_quantile: p must lie in (0,1)");
    switch (m.family) {
        case Family::normal: return normal_quantile(p);
        case Family::logistic: return std::log(p / (1.0 - p));
        case Family::double_exponential:
            return p < 0.5 ? std::log(2.0 * p) : -std::log(2.0 * (1.0 - p));
        case Family::student_t: return student_t_quantile(p, m.dof);
    }
    return 0.0;
}

// One draw from the model shifted by `shift`. Student-t uses the ratio
// construction Z / sqrt(G / nu), G ~ Gamma(nu/2, scale 2), valid for any
// real nu > 0.
inline double dist_draw(const DistributionModel& m, double shift, CounterRng& rng) {
    switch (m.family) {
        case Family::normal: return rng.normal() + shift;
        case Family::logistic: {
            const double u = rng.uniform01();
            return std::log(u / (1.0 - u)) + shift;
        }
        case Family::double_exponential: {
            const double u = rng.uniform01();
            return (u < 0.5 ? std::log(2.0 * u) : -std::log(2.0 * (1.0 - u))) + shift;
        }
        case Family::student_t: {
            const double z = rng.normal();
            const double g = 2.0 * rng.gamma(0.5 * m.dof);  // chi^2_nu
            return z / std::sqrt(g / m.dof) + shift;
        }
    }
    return shift;
}

inline std::vector<double> dist_sample(const DistributionModel& m, std::size_t count,
                                       double shift, CounterRng& rng) {
    std::vector<double> out(count);
    for (auto& v : out) v = dist_draw(m, shift, rng);
    return out;
}

struct DistTraits {
    double median;
    double density_at_median;
    double integral_f_squared;
    double variance;  // +inf for student_t with dof <= 2
};

inline DistTraits dist_traits(const DistributionModel& m) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    switch (m.family) {
        case Family::normal:
            return {0.0, kInvSqrt2Pi, 1.0 / (2.0 * std::sqrt(kPi)), 1.0};
        case Family::logistic:
            return {0.0, 0.25, 1.0 / 6.0, kPi * kPi / 3.0};
        case Family::double_exponential:
            return {0.0, 0.5, 0.25, 2.0};
        case Family::student_t: {
            const double nu = m.dof;
            const double f0 = std::exp(std::lgamma(0.5 * (nu + 1.0)) -
                                       std::lgamma(0.5 * nu) - 0.5 * std::log(nu * kPi));
            // int f^2 = f0^2 * sqrt(nu pi) Gamma(nu + 1/2) / Gamma(nu + 1)
            const double if2 =
                f0 * f0 * std::exp(0.5 * std::log(nu * kPi) + std::lgamma(nu + 0.5) -
                                   std::lgamma(nu + 1.0));
            const double var = nu > 2.0 ? nu / (nu - 2.0) : inf;
            return {0.0, f0, if2, var};
        }
    }
    return {0.0, 0.0, 0.0, 0.0};
}

// P(K = k) for K ~ HG(N, m, r): draws of size r from N items of which m are
// marked. Computed in log space.
inline double hypergeom_pmf(int N, int m, int r, int k) {
    if (N < 0 || m < 0 || m > N || r < 0 || r > N)
        throw std::domain_error("hypergeom_pmf: need 0 <= m <= N and 0 <= r <= N");
    if (k < std::max(0, r - (N - m)) || k > std::min(m, r)) return 0.0;
    return std::exp(log_binom(m, k) + log_binom(N - m, r - k) - log_binom(N, r));
}

// Upper tail P(K >= k).
inline double hypergeom_sf(int N, int m, int r, int k) {
    const int hi = std::min(m, r);
    if (k > hi) return 0.0;
    double p = 0.0;
    for (int j = std::max(k, std::max(0, r - (N - m))); j <= hi; ++j)
        p += hypergeom_pmf(N, m, r, j);
    return std::min(p, 1.0);
}

enum class Parity { odd, even };

// Exact CDF of the combined sample median of N iid draws from F, evaluated
// by quadrature of the stated integrands (beta constants in log space).
// parity selects the odd formula (middle order statistic) or the even one
// (average of the two middle order statistics, Desu-Rodine). Integration
// runs on the probability scale v = F(x), where the integrand is a beta
// bump of width ~ 1/sqrt(N) around v = 1/2 that the adaptive rule resolves
// reliably for any z.
inline double sample_median_cdf(const DistributionModel& F, double z, int N, Parity parity) {
    if (N < 3) throw std::domain_error("sample_median_cdf: need N >= 3");
    const double Fz = dist_cdf(F, z);
    if (Fz <= 0.0) return 0.0;
    if (parity == Parity::odd) {
        const double r = 0.5 * (N - 1);
        const double logc = -log_beta(r + 1.0, r + 1.0);
        auto g = [&](double v) {
            if (v <= 0.0 || v >= 1.0) return 0.0;
            return std::exp(logc + r * std::log(v) + r * std::log1p(-v));
        };
        return integrate(g, 0.0, Fz, 1e-12);
    }
    const double half = 0.5 * N;
    const double logc = std::log(2.0) - log_beta(half, half);
    auto g = [&](double v) {
        if (v <= 0.0 || v >= 1.0) return 0.0;
        const double base = logc + (half - 1.0) * std::log(v);
        const double t1 = std::exp(base + half * std::log1p(-v));
        const double Fr = dist_cdf(F, 2.0 * z - dist_quantile(F, v));
        const double t2 = Fr < 1.0 ? std::exp(base + half * std::log1p(-Fr)) : 0.0;
        return t1 - t2;
    };
    return integrate(g, 0.0, Fz, 1e-12);
}

}  // namespace smts
