#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "smts/distributions.hpp"
#include "smts/special.hpp"

// Pitman efficacies, asymptotic relative efficiencies, and the first-order
// theoretical local power of the smoothed median test.
//
//   e_P[median]   = 2 sqrt(l(1-l)) f(z0)
//   e_P[wilcoxon] = sqrt(12 l(1-l)) int f^2
//   e_P[ttest]    = sqrt(l(1-l) / Var X)        (undefined for infinite Var)
//   ARE(A|B)      = (e_P[A] / e_P[B])^2         (l cancels)

namespace smts {

enum class EfficacyTest { median, wilcoxon, ttest };

struct EfficacyInput {
    EfficacyTest test;
    DistributionModel model;
    double lambda = 0.5;
};

inline std::optional<double> pitman_efficacy(const EfficacyInput& input) {
    if (!(input.lambda > 0.0 && input.lambda < 1.0))
        throw std::domain_error("pitman_efficacy: lambda must lie in (0,1)");
    const DistTraits tr = dist_traits(input.model);
    const double l = input.lambda;
    const double root = std::sqrt(l * (1.0 - l));
    switch (input.test) {
        case EfficacyTest::median: return 2.0 * root * tr.density_at_median;
        case EfficacyTest::wilcoxon:
            return std::sqrt(12.0) * root * tr.integral_f_squared;
        case EfficacyTest::ttest:
            if (!std::isfinite(tr.variance)) return std::nullopt;
            return root / std::sqrt(tr.variance);
    }
    return std::nullopt;
}

inline std::optional<double> are(EfficacyTest a, EfficacyTest b,
                                 const DistributionModel& model) {
    const auto ea = pitman_efficacy({a, model, 0.5});
    const auto eb = pitman_efficacy({b, model, 0.5});
    if (!ea || !eb || *eb == 0.0) return std::nullopt;
    const double r = *ea / *eb;
    return r * r;
}

// ARE(median | wilcoxon) along the Student-t family; decreasing in nu.
inline std::vector<std::pair<double, double>> are_t_family_curve(
    const std::vector<double>& nu_grid) {
    std::vector<std::pair<double, double>> out;
    out.reserve(nu_grid.size());
    for (std::size_t i = 0; i < nu_grid.size(); ++i) {
        if (i > 0 && !(nu_grid[i] > nu_grid[i - 1]))
            throw std::domain_error("are_t_family_curve: grid must be ascending");
        const auto v = are(EfficacyTest::median, EfficacyTest::wilcoxon,
                           DistributionModel::student_t(nu_grid[i]));
        out.emplace_back(nu_grid[i], *v);
    }
    return out;
}

// First-order local power of the smoothed median against theta = xi/sqrt(N):
//   1 - Phi(v_{1-alpha} - c),
//   c = xi [ 2 sqrt(l(1-l)) f(z0) + 8 h sqrt(l/(1-l)) a111 f(z0)^2 ].
// h = 0 recovers the discrete test's first-order local power; a111 is
// supplied by the caller (see the kernel catalog notes on its sign).
//
// Derivation note: the h-term arises from the variance-corrected
// standardization V1* = V1 - 2 m h a111 f(z0). V1* is not offered as a
// runtime standardization because its plug-in estimate can turn negative;
// only its first-order effect on power appears here, through c.
inline double theoretical_local_power(double xi, double alpha, double lambda,
                                      const DistributionModel& model, double h,
                                      double a111) {
    if (!(xi >= 0.0)) throw std::domain_error("theoretical_local_power: xi must be >= 0");
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::domain_error("theoretical_local_power: alpha must lie in (0,1)");
    if (!(lambda > 0.0 && lambda < 1.0))
        throw std::domain_error("theoretical_local_power: lambda must lie in (0,1)");
    if (!(h >= 0.0)) throw std::domain_error("theoretical_local_power: h must be >= 0");
    const double f0 = dist_traits(model).density_at_median;
    const double c = xi * (2.0 * std::sqrt(lambda * (1.0 - lambda)) * f0 +
                           8.0 * h * std::sqrt(lambda / (1.0 - lambda)) * a111 * f0 * f0);
    return normal_sf(normal_quantile(1.0 - alpha) - c);
}

// Published ARE values for the reference tables (used by the CLI to print
// computed-vs-published deviations).
struct PublishedAre {
    const char* row;
    const char* column;
    double value;
};

inline const std::vector<PublishedAre>& published_table1() {
    static const std::vector<PublishedAre> t = {
        {"ARE(M|T2)", "normal", 0.637},  {"ARE(M|T2)", "logistic", 0.822},
        {"ARE(M|T2)", "dexp", 2.0},      {"ARE(W2|T2)", "normal", 0.955},
        {"ARE(W2|T2)", "logistic", 1.10}, {"ARE(W2|T2)", "dexp", 1.5},
        {"ARE(M|W2)", "normal", 0.667},  {"ARE(M|W2)", "logistic", 0.75},
        {"ARE(M|W2)", "dexp", 1.33},
    };
    return t;
}

inline const std::vector<PublishedAre>& published_table2() {
    static const std::vector<PublishedAre> t = {
        {"ARE(M|W2)", "t2", 0.961},
        {"ARE(M|W2)", "t1", 1.33},
        {"ARE(M|W2)", "t0.5", 2.29},
    };
    return t;
}

}  // namespace smts
