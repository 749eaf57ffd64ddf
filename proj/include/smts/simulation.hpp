#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "smts/distributions.hpp"
#include "smts/rank_tests.hpp"
#include "smts/smoothed_tests.hpp"

// Seeded Monte-Carlo experiments: power/size tables, power ratios of the
// discrete tests, significance-probability comparisons in tail areas, and
// bootstrap-bandwidth power.
//
// Determinism contract: every replication consumes its own counter-based
// stream keyed by (seed, cell index, replication index, purpose), and all
// aggregation is integer counting, so results are bit-identical for any
// worker count. Within a replication all tests see the same (X, Y) draw.

namespace smts {

struct SizePair {
    int m;
    int n;
};

struct ExperimentConfig {
    long reps = 20000;
    std::vector<SizePair> sizes;
    bool random_sizes = false;  // adds a U*(lo,hi)^2 random-size cell
    int random_lo = 5;
    int random_hi = 40;
    std::vector<double> thetas{0.0};
    std::vector<double> alphas{0.05};
    DistributionModel model = DistributionModel::normal();
    const KernelSpec* median_kernel = nullptr;
    const KernelSpec* wilcoxon_kernel = nullptr;
    BandwidthRule bandwidth = BandwidthRule::default_rule();
    std::uint64_t seed = 20240901;
    std::vector<Method> tests{Method::smoothed_median, Method::smoothed_wilcoxon,
                              Method::ttest};

    bool wants(Method t) const {
        return std::find(tests.begin(), tests.end(), t) != tests.end();
    }

    void validate() const {
        if (reps < 1) throw ConfigError("config: reps must be >= 1");
        if (sizes.empty() && !random_sizes)
            throw ConfigError("config: need at least one (m,n) size or the random rule");
        for (const auto& s : sizes)
            if (s.m < 1 || s.n < 1) throw ConfigError("config: sizes must be >= 1");
        if (random_sizes && !(random_lo >= 1 && random_hi >= random_lo))
            throw ConfigError("config: bad random size bounds");
        if (thetas.empty()) throw ConfigError("config: need at least one theta");
        for (double t : thetas)
            if (!(t >= 0.0)) throw ConfigError("config: thetas must be >= 0");
        if (alphas.empty()) throw ConfigError("config: need at least one alpha");
        for (double a : alphas)
            if (!(a > 0.0 && a < 1.0)) throw ConfigError("config: alphas must lie in (0,1)");
        if (tests.empty()) throw ConfigError("config: need at least one test");
        if (wants(Method::smoothed_median)) {
            if (median_kernel == nullptr)
                throw ConfigError("config: smoothed median requires median_kernel");
            if (median_kernel->side != KernelSide::one_sided)
                throw ConfigError("config: median kernel must be one-sided");
        }
        if (wants(Method::smoothed_wilcoxon)) {
            if (wilcoxon_kernel == nullptr)
                throw ConfigError("config: smoothed wilcoxon requires wilcoxon_kernel");
            if (wilcoxon_kernel->side != KernelSide::symmetric)
                throw ConfigError("config: wilcoxon kernel must be symmetric");
        }
    }

    std::string canonical() const {
        std::ostringstream os;
        os << "reps=" << reps << ";sizes=";
        for (const auto& s : sizes) os << s.m << "x" << s.n << ",";
        if (random_sizes) os << "U*(" << random_lo << "," << random_hi << ")";
        os << ";thetas=";
        for (double t : thetas) os << t << ",";
        os << ";alphas=";
        for (double a : alphas) os << a << ",";
        os << ";model=" << distribution_name(model);
        os << ";median_kernel=" << (median_kernel ? median_kernel->name : "-");
        os << ";wilcoxon_kernel=" << (wilcoxon_kernel ? wilcoxon_kernel->name : "-");
        os << ";bandwidth=";
        switch (bandwidth.kind) {
            case BandwidthRule::Kind::fixed: os << "fixed:" << bandwidth.h; break;
            case BandwidthRule::Kind::default_rule: os << "default"; break;
            case BandwidthRule::Kind::bootstrap:
                os << "bootstrap:L=" << bandwidth.L << ",alpha=" << bandwidth.alpha;
                break;
        }
        os << ";seed=" << seed << ";tests=";
        for (Method t : tests) os << method_name(t) << ",";
        return os.str();
    }
};

inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::uint64_t config_hash(const ExperimentConfig& c) { return fnv1a64(c.canonical()); }

// ---------------------------------------------------------------------------
// Tables

struct PowerRow {
    std::string model;
    int m;
    int n;
    double theta;
    double alpha;
    std::string test;
    long reps;
    long rejections;

    double frequency() const { return static_cast<double>(rejections) / reps; }
    double std_error() const {
        const double p = frequency();
        return std::sqrt(p * (1.0 - p) / reps);
    }
};

struct TailRow {
    std::string sizes;  // "10x10" or "U*(5-40)"
    double quantile;    // tail threshold is the z_q normal quantile
    long reps;
    long in_tail;
    long w_smaller;
    long m_smaller;
    long ties;

    bool ratio_defined() const { return m_smaller > 0; }
    double ratio() const {
        return static_cast<double>(w_smaller) / static_cast<double>(m_smaller);
    }
};

struct TableMeta {
    std::string kind;
    std::uint64_t config_hash = 0;
    std::uint64_t seed = 0;
    std::vector<std::string> assumptions;

    std::string header() const {
        std::ostringstream os;
        os << "# table: " << kind << "\n";
        char buf[32];
        std::snprintf(buf, sizeof buf, "%016llx",
                      static_cast<unsigned long long>(config_hash));
        os << "# config_hash: " << buf << "\n";
        os << "# seed: " << seed << "\n";
        for (const auto& a : assumptions) os << "# assumption: " << a << "\n";
        return os.str();
    }
};

struct PowerTable {
    TableMeta meta;
    std::vector<PowerRow> rows;

    std::string csv() const {
        std::ostringstream os;
        os << meta.header();
        os << "model,m,n,theta,alpha,test,reps,rejections,frequency,std_error\n";
        char buf[160];
        for (const auto& r : rows) {
            std::snprintf(buf, sizeof buf, "%s,%d,%d,%g,%g,%s,%ld,%ld,%.6f,%.6f\n",
                          r.model.c_str(), r.m, r.n, r.theta, r.alpha, r.test.c_str(),
                          r.reps, r.rejections, r.frequency(), r.std_error());
            os << buf;
        }
        return os.str();
    }

    std::string text() const {
        std::ostringstream os;
        os << meta.header();
        char buf[200];
        std::snprintf(buf, sizeof buf, "%-10s %4s %4s %6s %6s %-18s %9s %10s %9s\n",
                      "model", "m", "n", "theta", "alpha", "test", "reps", "freq", "se");
        os << buf;
        for (const auto& r : rows) {
            std::snprintf(buf, sizeof buf, "%-10s %4d %4d %6g %6g %-18s %9ld %10.5f %9.5f\n",
                          r.model.c_str(), r.m, r.n, r.theta, r.alpha, r.test.c_str(),
                          r.reps, r.frequency(), r.std_error());
            os << buf;
        }
        return os.str();
    }
};

struct TailComparisonTable {
    TableMeta meta;
    std::vector<TailRow> rows;

    std::string csv() const {
        std::ostringstream os;
        os << meta.header();
        os << "sizes,quantile,reps,in_tail,w_smaller,m_smaller,ties,ratio\n";
        char buf[160];
        for (const auto& r : rows) {
            if (r.ratio_defined())
                std::snprintf(buf, sizeof buf, "%s,%g,%ld,%ld,%ld,%ld,%ld,%.6f\n",
                              r.sizes.c_str(), r.quantile, r.reps, r.in_tail, r.w_smaller,
                              r.m_smaller, r.ties, r.ratio());
            else
                std::snprintf(buf, sizeof buf, "%s,%g,%ld,%ld,%ld,%ld,%ld,NA\n",
                              r.sizes.c_str(), r.quantile, r.reps, r.in_tail, r.w_smaller,
                              r.m_smaller, r.ties);
            os << buf;
        }
        return os.str();
    }

    std::string text() const {
        std::ostringstream os;
        os << meta.header();
        char buf[200];
        std::snprintf(buf, sizeof buf, "%-10s %9s %9s %9s %10s %10s %7s %8s\n", "sizes",
                      "quantile", "reps", "in_tail", "w_smaller", "m_smaller", "ties",
                      "ratio");
        os << buf;
        for (const auto& r : rows) {
            if (r.ratio_defined())
                std::snprintf(buf, sizeof buf, "%-10s %9g %9ld %9ld %10ld %10ld %7ld %8.4f\n",
                              r.sizes.c_str(), r.quantile, r.reps, r.in_tail, r.w_smaller,
                              r.m_smaller, r.ties, r.ratio());
            else
                std::snprintf(buf, sizeof buf, "%-10s %9g %9ld %9ld %10ld %10ld %7ld %8s\n",
                              r.sizes.c_str(), r.quantile, r.reps, r.in_tail, r.w_smaller,
                              r.m_smaller, r.ties, "NA");
            os << buf;
        }
        return os.str();
    }
};

namespace detail {

// Walks a table CSV, filling meta from the '#' block and handing each data
// row to the callback as a field list.
template <typename RowFn>
void parse_table_csv(const std::string& text, TableMeta& meta, RowFn&& on_row) {
    std::istringstream in(text);
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto colon = line.find(':');
            if (colon == std::string::npos) continue;
            const std::string key = line.substr(2, colon - 2);
            const std::string val = line.substr(colon + 2);
            if (key == "table") meta.kind = val;
            else if (key == "config_hash") meta.config_hash = std::stoull(val, nullptr, 16);
            else if (key == "seed") meta.seed = std::stoull(val);
            else if (key == "assumption") meta.assumptions.push_back(val);
            continue;
        }
        if (!header_seen) {  // column header
            header_seen = true;
            continue;
        }
        std::vector<std::string> fields;
        std::istringstream ls(line);
        std::string field;
        while (std::getline(ls, field, ',')) fields.push_back(field);
        on_row(fields);
    }
}

}  // namespace detail

// Parsers for the emitted CSV formats (round-trip checks and external
// tooling). Metadata lines are restored into meta.
inline PowerTable parse_power_csv(const std::string& text) {
    PowerTable table;
    detail::parse_table_csv(text, table.meta, [&](const std::vector<std::string>& f) {
        if (f.size() != 10) throw std::runtime_error("bad power csv row");
        table.rows.push_back({f[0], std::stoi(f[1]), std::stoi(f[2]), std::stod(f[3]),
                              std::stod(f[4]), f[5], std::stol(f[6]), std::stol(f[7])});
    });
    return table;
}

inline TailComparisonTable parse_tail_csv(const std::string& text) {
    TailComparisonTable table;
    detail::parse_table_csv(text, table.meta, [&](const std::vector<std::string>& f) {
        if (f.size() != 8) throw std::runtime_error("bad tail csv row");
        table.rows.push_back({f[0], std::stod(f[1]), std::stol(f[2]), std::stol(f[3]),
                              std::stol(f[4]), std::stol(f[5]), std::stol(f[6])});
    });
    return table;
}

// ---------------------------------------------------------------------------
// Worker pool: contiguous replication chunks, deterministic integer merges.

namespace detail {

template <typename Body>
void parallel_chunks(long reps, int workers, Body&& body) {
    workers = std::max(1, workers);
    if (workers == 1) {
        body(0L, reps);
        return;
    }
    std::vector<std::thread> pool;
    const long chunk = (reps + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
        const long lo = w * chunk;
        const long hi = std::min(reps, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&body, lo, hi]() { body(lo, hi); });
    }
    for (auto& t : pool) t.join();
}

// Medians of a pooled scratch buffer (modified in place): returns the
// smoothing center Z_(ceil(N/2)) and the averaged combined median.
struct PooledMedians {
    double center;
    double averaged;
};

inline PooledMedians pooled_medians(std::vector<double>& z) {
    const std::size_t N = z.size();
    const std::size_t k = (N + 1) / 2 - 1;
    auto mid = z.begin() + k;
    std::nth_element(z.begin(), mid, z.end());
    const double lower = *mid;
    if (N % 2 == 1) return {lower, lower};
    const double upper = *std::min_element(mid + 1, z.end());
    return {lower, 0.5 * (lower + upper)};
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Power / size experiment (the table7/table8/table9 presets).

inline PowerTable run_power_experiment(const ExperimentConfig& config, int workers = 1) {
    config.validate();
    if (config.random_sizes)
        throw ConfigError("run_power_experiment: random sizes are not part of this protocol");
    if (config.bandwidth.kind == BandwidthRule::Kind::bootstrap)
        throw ConfigError("run_power_experiment: use run_bootstrap_power for bootstrap rules");

    const std::size_t n_alpha = config.alphas.size();
    const std::size_t n_tests = config.tests.size();
    std::vector<double> v_alpha(n_alpha);
    for (std::size_t a = 0; a < n_alpha; ++a)
        v_alpha[a] = normal_quantile(1.0 - config.alphas[a]);

    PowerTable table;
    table.meta.kind = "power";
    table.meta.config_hash = config_hash(config);
    table.meta.seed = config.seed;
    table.meta.assumptions = {
        "discrete tests reject via normal approximation with exact null moments",
        "smoothed median centers on order statistic ceil(N/2)"};

    std::uint64_t cell_index = 0;
    for (const auto& size : config.sizes) {
        const int m = size.m, n = size.n, N = m + n;
        const double E1 = median_null_mean(m, n), sd1 = std::sqrt(median_null_var(m, n));
        // discrete tests standardize by their exact null moments
        const double Em = median_exact_mean(m, n);
        const double sdm = std::sqrt(median_exact_var(m, n));
        const double E2 = wilcoxon_null_mean(m, n);
        const double sdW = std::sqrt(wilcoxon_null_var_exact(m, n));
        const double sd2 = std::sqrt(smoothed_wilcoxon_null_var(m, n));
        const double h = config.bandwidth.kind == BandwidthRule::Kind::fixed
                             ? config.bandwidth.h
                             : default_bandwidth(N);
        std::vector<double> t_crit(n_alpha);
        for (std::size_t a = 0; a < n_alpha; ++a)
            t_crit[a] = student_t_quantile(1.0 - config.alphas[a], N - 2);

        for (double theta : config.thetas) {
            std::vector<long> counts(n_tests * n_alpha, 0);
            std::mutex merge_mutex;
            detail::parallel_chunks(config.reps, workers, [&](long lo, long hi) {
                std::vector<long> local(n_tests * n_alpha, 0);
                std::vector<double> xs(m), ys(n), pooled(N);
                for (long rep = lo; rep < hi; ++rep) {
                    CounterRng rng = CounterRng::stream(config.seed, cell_index, rep, 0);
                    for (int i = 0; i < m; ++i) xs[i] = dist_draw(config.model, 0.0, rng);
                    for (int j = 0; j < n; ++j) ys[j] = dist_draw(config.model, theta, rng);
                    std::copy(xs.begin(), xs.end(), pooled.begin());
                    std::copy(ys.begin(), ys.end(), pooled.begin() + m);
                    const auto med = detail::pooled_medians(pooled);

                    for (std::size_t t = 0; t < n_tests; ++t) {
                        double z = 0.0;
                        bool is_t = false;
                        switch (config.tests[t]) {
                            case Method::median: {
                                int md = 0;
                                for (double x : xs) md += (x < med.averaged);
                                z = (md - Em) / sdm;
                                break;
                            }
                            case Method::wilcoxon: {
                                long w2 = 0;
                                for (double x : xs)
                                    for (double y : ys) w2 += (y >= x);
                                z = (w2 - E2) / sdW;
                                break;
                            }
                            case Method::smoothed_median: {
                                double stat = 0.0;
                                for (double x : xs)
                                    stat += config.median_kernel->antiderivative(
                                        (med.center - x) / h);
                                z = (stat - E1) / sd1;
                                break;
                            }
                            case Method::smoothed_wilcoxon: {
                                double stat = 0.0;
                                for (double x : xs)
                                    for (double y : ys)
                                        stat += config.wilcoxon_kernel->antiderivative(
                                            (y - x) / h);
                                z = (stat - E2) / sd2;
                                break;
                            }
                            case Method::ttest: {
                                double xbar = 0.0, ybar = 0.0;
                                for (double x : xs) xbar += x;
                                for (double y : ys) ybar += y;
                                xbar /= m;
                                ybar /= n;
                                double ssq = 0.0;
                                for (double x : xs) ssq += (x - xbar) * (x - xbar);
                                for (double y : ys) ssq += (y - ybar) * (y - ybar);
                                const double sp2 = ssq / (N - 2);
                                z = sp2 > 0.0 ? (ybar - xbar) /
                                                    std::sqrt(sp2 * (1.0 / m + 1.0 / n))
                                              : 0.0;
                                is_t = true;
                                break;
                            }
                        }
                        for (std::size_t a = 0; a < n_alpha; ++a)
                            local[t * n_alpha + a] += (z > (is_t ? t_crit[a] : v_alpha[a]));
                    }
                }
                std::lock_guard<std::mutex> lock(merge_mutex);
                for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += local[i];
            });

            for (std::size_t t = 0; t < n_tests; ++t)
                for (std::size_t a = 0; a < n_alpha; ++a)
                    table.rows.push_back({distribution_name(config.model), m, n, theta,
                                          config.alphas[a],
                                          std::string(method_name(config.tests[t])),
                                          config.reps, counts[t * n_alpha + a]});
            ++cell_index;
        }
    }
    return table;
}

// ---------------------------------------------------------------------------
// Ratio of empirical power of the discrete median test to the discrete
// Wilcoxon test (the table3/table4 presets): shared draws,
// normal-approximation rejection.

struct RatioRow {
    std::string model;
    int m;
    int n;
    double theta;
    double alpha;
    long reps;
    long reject_median;
    long reject_wilcoxon;

    bool defined() const { return reject_wilcoxon > 0; }
    double ratio() const {
        return static_cast<double>(reject_median) / static_cast<double>(reject_wilcoxon);
    }
};

struct RatioTable {
    TableMeta meta;
    std::vector<RatioRow> rows;

    std::string csv() const {
        std::ostringstream os;
        os << meta.header();
        os << "model,m,n,theta,alpha,reps,reject_median,reject_wilcoxon,ratio\n";
        char buf[160];
        for (const auto& r : rows) {
            if (r.defined())
                std::snprintf(buf, sizeof buf, "%s,%d,%d,%g,%g,%ld,%ld,%ld,%.6f\n",
                              r.model.c_str(), r.m, r.n, r.theta, r.alpha, r.reps,
                              r.reject_median, r.reject_wilcoxon, r.ratio());
            else
                std::snprintf(buf, sizeof buf, "%s,%d,%d,%g,%g,%ld,%ld,%ld,NA\n",
                              r.model.c_str(), r.m, r.n, r.theta, r.alpha, r.reps,
                              r.reject_median, r.reject_wilcoxon);
            os << buf;
        }
        return os.str();
    }

    std::string text() const {
        std::ostringstream os;
        os << meta.header();
        char buf[200];
        std::snprintf(buf, sizeof buf, "%-10s %4s %4s %6s %6s %9s %10s %12s %8s\n", "model",
                      "m", "n", "theta", "alpha", "reps", "rej_median", "rej_wilcoxon",
                      "ratio");
        os << buf;
        for (const auto& r : rows) {
            if (r.defined())
                std::snprintf(buf, sizeof buf, "%-10s %4d %4d %6g %6g %9ld %10ld %12ld %8.4f\n",
                              r.model.c_str(), r.m, r.n, r.theta, r.alpha, r.reps,
                              r.reject_median, r.reject_wilcoxon, r.ratio());
            else
                std::snprintf(buf, sizeof buf, "%-10s %4d %4d %6g %6g %9ld %10ld %12ld %8s\n",
                              r.model.c_str(), r.m, r.n, r.theta, r.alpha, r.reps,
                              r.reject_median, r.reject_wilcoxon, "NA");
            os << buf;
        }
        return os.str();
    }
};

inline RatioTable parse_ratio_csv(const std::string& text) {
    RatioTable table;
    detail::parse_table_csv(text, table.meta, [&](const std::vector<std::string>& f) {
        if (f.size() != 9) throw std::runtime_error("bad ratio csv row");
        table.rows.push_back({f[0], std::stoi(f[1]), std::stoi(f[2]), std::stod(f[3]),
                              std::stod(f[4]), std::stol(f[5]), std::stol(f[6]),
                              std::stol(f[7])});
    });
    return table;
}

inline RatioTable run_power_ratio(const ExperimentConfig& config, int workers = 1) {
    ExperimentConfig c = config;
    c.tests = {Method::median, Method::wilcoxon};
    c.validate();
    if (c.random_sizes)
        throw ConfigError("run_power_ratio: random sizes are not part of this protocol");

    RatioTable table;
    table.meta.kind = "power-ratio";
    table.meta.config_hash = config_hash(c);
    table.meta.seed = c.seed;
    table.meta.assumptions = {
        "rejection rule: normal approximation with exact null moments at level alpha",
        "shared random numbers across the two tests"};

    const std::size_t n_alpha = c.alphas.size();
    std::vector<double> v_alpha(n_alpha);
    for (std::size_t a = 0; a < n_alpha; ++a) v_alpha[a] = normal_quantile(1.0 - c.alphas[a]);

    std::uint64_t cell_index = 0;
    for (const auto& size : c.sizes) {
        const int m = size.m, n = size.n, N = m + n;
        const double Em = median_exact_mean(m, n), sdm = std::sqrt(median_exact_var(m, n));
        const double E2 = wilcoxon_null_mean(m, n);
        const double sdW = std::sqrt(wilcoxon_null_var_exact(m, n));
        for (double theta : c.thetas) {
            std::vector<long> counts(2 * n_alpha, 0);
            std::mutex merge_mutex;
            detail::parallel_chunks(c.reps, workers, [&](long lo, long hi) {
                std::vector<long> local(2 * n_alpha, 0);
                std::vector<double> xs(m), ys(n), pooled(N);
                for (long rep = lo; rep < hi; ++rep) {
                    CounterRng rng = CounterRng::stream(c.seed, cell_index, rep, 0);
                    for (int i = 0; i < m; ++i) xs[i] = dist_draw(c.model, 0.0, rng);
                    for (int j = 0; j < n; ++j) ys[j] = dist_draw(c.model, theta, rng);
                    std::copy(xs.begin(), xs.end(), pooled.begin());
                    std::copy(ys.begin(), ys.end(), pooled.begin() + m);
                    const auto med = detail::pooled_medians(pooled);
                    int md = 0;
                    for (double x : xs) md += (x < med.averaged);
                    long w2 = 0;
                    for (double x : xs)
                        for (double y : ys) w2 += (y >= x);
                    const double zM = (md - Em) / sdm;
                    const double zW = (w2 - E2) / sdW;
                    for (std::size_t a = 0; a < n_alpha; ++a) {
                        local[2 * a] += (zM > v_alpha[a]);
                        local[2 * a + 1] += (zW > v_alpha[a]);
                    }
                }
                std::lock_guard<std::mutex> lock(merge_mutex);
                for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += local[i];
            });
            for (std::size_t a = 0; a < n_alpha; ++a)
                table.rows.push_back({distribution_name(c.model), m, n, theta, c.alphas[a],
                                      c.reps, counts[2 * a], counts[2 * a + 1]});
            ++cell_index;
        }
    }
    return table;
}

// ---------------------------------------------------------------------------
// Significance-probability comparison in the tail area (the table5/table6
// presets). Data are drawn under H0. A replication is in scope when either
// standardized statistic exceeds the z_q threshold; within the tail set the
// strictly smaller p-value wins.

inline TailComparisonTable run_pvalue_comparison(const ExperimentConfig& config,
                                                 bool smoothed, int workers = 1) {
    ExperimentConfig c = config;
    c.tests = smoothed
                  ? std::vector<Method>{Method::smoothed_median, Method::smoothed_wilcoxon}
                  : std::vector<Method>{Method::median, Method::wilcoxon};
    c.validate();

    TailComparisonTable table;
    table.meta.kind = smoothed ? "pvalue-comparison-smoothed" : "pvalue-comparison-discrete";
    table.meta.config_hash = config_hash(c);
    table.meta.seed = c.seed;
    table.meta.assumptions = {
        "underlying distribution sampled under H0 (theta = 0)",
        "ratio = #{p_W < p_M} / #{p_M < p_W}, ties excluded and reported"};

    // Exact-distribution tables for the discrete comparison, built up front
    // (shared read-only across workers).
    std::map<std::pair<int, int>, std::vector<double>> w2_tails;
    std::map<std::pair<int, int>, std::vector<double>> hg_tails;
    auto ensure_tables = [&](int m, int n) {
        if (smoothed) return;
        const auto key = std::make_pair(m, n);
        if (w2_tails.count(key)) return;
        w2_tails[key] = wilcoxon_tail_table(m, n);
        const int N = m + n;
        const int r = (N % 2 == 1) ? (N - 1) / 2 : N / 2;
        std::vector<double> hg(std::min(m, r) + 2, 0.0);
        for (int k = std::min(m, r); k >= 0; --k)
            hg[k] = hg[k + 1] + hypergeom_pmf(N, m, r, k);
        hg_tails[key] = std::move(hg);
    };
    std::vector<std::pair<SizePair, std::string>> cells;
    for (const auto& s : c.sizes) {
        ensure_tables(s.m, s.n);
        cells.push_back({s, std::to_string(s.m) + "x" + std::to_string(s.n)});
    }
    if (c.random_sizes) {
        for (int m = c.random_lo; m <= c.random_hi; ++m)
            for (int n = c.random_lo; n <= c.random_hi; ++n) ensure_tables(m, n);
        cells.push_back({{0, 0}, "U*(" + std::to_string(c.random_lo) + "-" +
                                     std::to_string(c.random_hi) + ")"});
    }

    std::uint64_t cell_index = 0;
    for (const auto& cell : cells) {
        const SizePair size = cell.first;
        const std::string& label = cell.second;
        const bool random_cell = size.m == 0;
        for (double q : c.alphas) {
            // alphas carry the tail levels: threshold is z_{1-alpha}
            const double zq = normal_quantile(1.0 - q);
            long in_tail = 0, w_sm = 0, m_sm = 0, ties = 0;
            std::mutex merge_mutex;
            detail::parallel_chunks(c.reps, workers, [&](long lo, long hi) {
                long l_in = 0, l_w = 0, l_m = 0, l_t = 0;
                std::vector<double> xs, ys, pooled;
                for (long rep = lo; rep < hi; ++rep) {
                    CounterRng rng = CounterRng::stream(c.seed, cell_index, rep, 0);
                    int m = size.m, n = size.n;
                    if (random_cell) {
                        m = static_cast<int>(rng.uniform_int(c.random_lo, c.random_hi));
                        n = static_cast<int>(rng.uniform_int(c.random_lo, c.random_hi));
                    }
                    const int N = m + n;
                    xs.resize(m);
                    ys.resize(n);
                    pooled.resize(N);
                    for (int i = 0; i < m; ++i) xs[i] = dist_draw(c.model, 0.0, rng);
                    for (int j = 0; j < n; ++j) ys[j] = dist_draw(c.model, 0.0, rng);
                    std::copy(xs.begin(), xs.end(), pooled.begin());
                    std::copy(ys.begin(), ys.end(), pooled.begin() + m);
                    const auto med = detail::pooled_medians(pooled);
                    const double E2 = wilcoxon_null_mean(m, n);

                    double zM, zW, pM, pW;
                    if (smoothed) {
                        // the smoothed tail region is defined through E1, V1
                        const double h = default_bandwidth(N);
                        double mt = 0.0;
                        for (double x : xs)
                            mt += c.median_kernel->antiderivative((med.center - x) / h);
                        double wt = 0.0;
                        for (double x : xs)
                            for (double y : ys)
                                wt += c.wilcoxon_kernel->antiderivative((y - x) / h);
                        zM = (mt - median_null_mean(m, n)) / std::sqrt(median_null_var(m, n));
                        zW = (wt - E2) / std::sqrt(smoothed_wilcoxon_null_var(m, n));
                        pM = normal_sf(zM);
                        pW = normal_sf(zW);
                    } else {
                        // the discrete region standardizes by the exact null
                        // moments of each count
                        int md = 0;
                        for (double x : xs) md += (x < med.averaged);
                        long w2 = 0;
                        for (double x : xs)
                            for (double y : ys) w2 += (y >= x);
                        zM = (md - median_exact_mean(m, n)) / std::sqrt(median_exact_var(m, n));
                        zW = (w2 - E2) / std::sqrt(wilcoxon_null_var_exact(m, n));
                        pM = hg_tails.at({m, n})[md];
                        pW = w2_tails.at({m, n})[w2];
                    }
                    if (zM > zq || zW > zq) {
                        ++l_in;
                        if (pW < pM) ++l_w;
                        else if (pM < pW) ++l_m;
                        else ++l_t;
                    }
                }
                std::lock_guard<std::mutex> lock(merge_mutex);
                in_tail += l_in;
                w_sm += l_w;
                m_sm += l_m;
                ties += l_t;
            });
            table.rows.push_back({label, 1.0 - q, c.reps, in_tail, w_sm, m_sm, ties});
            ++cell_index;
        }
    }
    return table;
}

// ---------------------------------------------------------------------------
// Bootstrap-bandwidth power of the smoothed median (the table10 preset):
// the bandwidth is re-selected from each replication's own data.

inline PowerTable run_bootstrap_power(const ExperimentConfig& config, int workers = 1) {
    ExperimentConfig c = config;
    c.tests = {Method::smoothed_median};
    c.validate();
    if (c.bandwidth.kind != BandwidthRule::Kind::bootstrap)
        throw ConfigError("run_bootstrap_power: bandwidth rule must be bootstrap");
    if (c.random_sizes)
        throw ConfigError("run_bootstrap_power: random sizes are not part of this protocol");

    PowerTable table;
    table.meta.kind = "bootstrap-power";
    table.meta.config_hash = config_hash(c);
    table.meta.seed = c.seed;
    table.meta.assumptions = {
        "bandwidth re-selected per replication by the smoothed bootstrap",
        "F-tilde estimated from the pooled sample with LSCV Gaussian bandwidth"};

    const std::size_t n_alpha = c.alphas.size();
    std::vector<double> v_alpha(n_alpha);
    for (std::size_t a = 0; a < n_alpha; ++a) v_alpha[a] = normal_quantile(1.0 - c.alphas[a]);

    std::uint64_t cell_index = 0;
    for (const auto& size : c.sizes) {
        const int m = size.m, n = size.n, N = m + n;
        const double E1 = median_null_mean(m, n), sd1 = std::sqrt(median_null_var(m, n));
        for (double theta : c.thetas) {
            std::vector<long> counts(n_alpha, 0);
            std::mutex merge_mutex;
            detail::parallel_chunks(c.reps, workers, [&](long lo, long hi) {
                std::vector<long> local(n_alpha, 0);
                std::vector<double> xs(m), ys(n), pooled(N);
                for (long rep = lo; rep < hi; ++rep) {
                    CounterRng rng = CounterRng::stream(c.seed, cell_index, rep, 0);
                    for (int i = 0; i < m; ++i) xs[i] = dist_draw(c.model, 0.0, rng);
                    for (int j = 0; j < n; ++j) ys[j] = dist_draw(c.model, theta, rng);
                    std::copy(xs.begin(), xs.end(), pooled.begin());
                    std::copy(ys.begin(), ys.end(), pooled.begin() + m);

                    CounterRng boot_rng = CounterRng::stream(c.seed, cell_index, rep, 1);
                    const double h =
                        bootstrap_bandwidth(pooled, SmoothedKind::median, m, n, c.bandwidth,
                                            *c.median_kernel, boot_rng);

                    std::vector<double> scratch(pooled);
                    const auto med = detail::pooled_medians(scratch);
                    double stat = 0.0;
                    for (double x : xs)
                        stat += c.median_kernel->antiderivative((med.center - x) / h);
                    const double z = (stat - E1) / sd1;
                    for (std::size_t a = 0; a < n_alpha; ++a) local[a] += (z > v_alpha[a]);
                }
                std::lock_guard<std::mutex> lock(merge_mutex);
                for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += local[i];
            });
            for (std::size_t a = 0; a < n_alpha; ++a)
                table.rows.push_back({distribution_name(c.model), m, n, theta, c.alphas[a],
                                      "smoothed-median", c.reps, counts[a]});
            ++cell_index;
        }
    }
    return table;
}

}  // namespace smts
