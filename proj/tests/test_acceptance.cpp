// Acceptance suite: one test case per criterion, each printing a PASS/FAIL
// line with the measured quantities. Criteria involving the command-line
// front end shell out to the built binary (SMTS_CLI_PATH).

#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "smts/smts.hpp"

using namespace smts;

namespace {

constexpr std::uint64_t kSeed = 20240901;

struct CriterionReport {
    int id;
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            if (!detail.empty()) detail += "; ";
            detail += what;
        }
    }
    void print() const {
        std::printf("criterion %2d: %s%s%s\n", id, pass ? "PASS" : "FAIL",
                    detail.empty() ? "" : " - ", detail.c_str());
        std::fflush(stdout);
    }
};

double table_freq(const PowerTable& t, const std::string& test, double theta, double alpha) {
    for (const auto& r : t.rows)
        if (r.test == test && r.theta == theta && r.alpha == alpha) return r.frequency();
    throw std::runtime_error("row not found: " + test);
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(SMTS_CLI_PATH) + " " + args;
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

template <typename Fn>
void for_each_labelling(const std::vector<double>& pooled, int m, Fn&& fn) {
    const int N = static_cast<int>(pooled.size());
    for (unsigned mask = 0; mask < (1u << N); ++mask) {
        if (__builtin_popcount(mask) != m) continue;
        std::vector<double> xs, ys;
        for (int i = 0; i < N; ++i) (mask >> i & 1 ? xs : ys).push_back(pooled[i]);
        fn(TwoSample(std::move(xs), std::move(ys)));
    }
}

}  // namespace

TEST_CASE("criterion 1: classical ARE table within 0.005, under one second",
          "[acceptance]") {
    CriterionReport rep{1};
    const auto t0 = std::chrono::steady_clock::now();
    for (const auto& row : published_table1()) {
        EfficacyTest a = EfficacyTest::median, b = EfficacyTest::ttest;
        if (std::string(row.row) == "ARE(W2|T2)") a = EfficacyTest::wilcoxon;
        if (std::string(row.row) == "ARE(M|W2)") b = EfficacyTest::wilcoxon;
        const auto v = are(a, b, parse_distribution(row.column));
        rep.require(v && std::abs(*v - row.value) <= 0.005,
                    std::string(row.row) + "/" + row.column);
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    rep.require(secs < 1.0, "runtime " + std::to_string(secs) + "s");
    rep.require(run_cli("efficiency 1 > /dev/null") == 0, "cli exit code");
    rep.print();
    CHECK(rep.pass);
}

TEST_CASE("criterion 2: t-family ARE values and monotone decrease", "[acceptance]") {
    CriterionReport rep{2};
    const auto curve = are_t_family_curve({0.5, 0.75, 1.0, 1.5, 2.0, 3.0});
    rep.require(std::abs(curve[4].second - 0.961) <= 0.01, "t2 value");
    rep.require(std::abs(curve[2].second - 1.33) <= 0.01, "t1 value");
    rep.require(std::abs(curve[0].second - 2.29) <= 0.01, "t0.5 value");
    for (std::size_t i = 1; i < curve.size(); ++i)
        rep.require(curve[i].second < curve[i - 1].second, "monotonicity");
    rep.require(run_cli("efficiency 2 > /dev/null") == 0, "cli exit code");
    rep.print();
    CHECK(rep.pass);
}

// The A11=0 / A111=1 clauses for the published constants cannot both hold:
// for any one-sided kernel A111 = A11 - (1/2) int (1-K)^2 <= A11, so A11 = 0
// forces A111 < 0. The checks below run as stated and the measured values
// are reported; see the kernel catalog notes.
TEST_CASE("criterion 3: kernel normalization and moment identities", "[acceptance]") {
    CriterionReport rep{3};
    for (const auto& k : kernel_catalog()) {
        const double norm = kernel_moment(k, 0, 1);
        rep.require(std::abs(norm - 1.0) <= 1e-8, std::string(k.name) + " normalization");
    }
    for (const char* name : {"remark26-poly-plus", "remark26-poly-minus", "remark26-exp"}) {
        const auto& k = *find_kernel(name);
        const double a11 = kernel_moment(k, 1, 1);
        const double a111 = kernel_mixed_moment(k, 1, 1, 1);
        char buf[160];
        std::snprintf(buf, sizeof buf, "%s A11=%.6f", name, a11);
        rep.require(std::abs(a11) <= 1e-8, buf);
        std::snprintf(buf, sizeof buf, "%s A111=%.6f (target 1, unattainable: A111<=A11)",
                      name, a111);
        rep.require(std::abs(a111 - 1.0) <= 1e-6, buf);
    }
    rep.print();
    CHECK(rep.pass);  // fails: the published kernel constants cannot satisfy this
}

TEST_CASE("criterion 4: exact distributions match full enumeration", "[acceptance]") {
    CriterionReport rep{4};
    // median count vs the hypergeometric law, all odd pooled sizes <= 9
    for (int N = 3; N <= 9; N += 2) {
        for (int m = 1; m < N; ++m) {
            std::vector<double> pooled(N);
            std::iota(pooled.begin(), pooled.end(), 1.0);
            std::vector<long> hist(m + 1, 0);
            long total = 0;
            for_each_labelling(pooled, m, [&](const TwoSample& s) {
                ++hist[median_statistic(s).m_dagger];
                ++total;
            });
            const int r = (N - 1) / 2;
            for (int k = 0; k <= m; ++k) {
                const double expect = hypergeom_pmf(N, m, r, k);
                rep.require(std::abs(static_cast<double>(hist[k]) / total - expect) < 1e-12,
                            "HG mismatch N=" + std::to_string(N) + " m=" + std::to_string(m));
            }
        }
    }
    // Wilcoxon tail probabilities vs enumeration, m, n <= 6
    for (int m = 1; m <= 6; ++m)
        for (int n = 1; n <= 6; ++n) {
            std::vector<double> pooled(m + n);
            std::iota(pooled.begin(), pooled.end(), 1.0);
            std::vector<long> counts(m * n + 1, 0);
            long total = 0;
            for_each_labelling(pooled, m, [&](const TwoSample& s) {
                ++counts[wilcoxon_statistic(s)];
                ++total;
            });
            const auto tail = wilcoxon_tail_table(m, n);
            long ge = total;
            for (int u = 0; u <= m * n; ++u) {
                rep.require(std::abs(tail[u] - static_cast<double>(ge) / total) < 1e-12,
                            "W2 mismatch m=" + std::to_string(m) + " n=" + std::to_string(n));
                ge -= counts[u];
            }
        }
    rep.print();
    CHECK(rep.pass);
}

TEST_CASE("criterion 5: vanishing bandwidth recovers the discrete statistics",
          "[acceptance]") {
    CriterionReport rep{5};
    CounterRng rng = CounterRng::stream(kSeed, 0, 0, 7);
    const auto& km = *find_kernel("remark26-exp");
    const auto& kw = *find_kernel("epanechnikov");
    int odd_checked = 0, even_checked = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const int m = 1 + static_cast<int>(rng.uniform_int(0, 19));
        const int n = 1 + static_cast<int>(rng.uniform_int(0, 19));
        std::vector<double> xs(m), ys(n);
        for (auto& v : xs) v = rng.normal();
        for (auto& v : ys) v = rng.normal();
        const TwoSample s(xs, ys);
        rep.require(smoothed_wilcoxon(s, kw, 1e-12) ==
                        static_cast<double>(wilcoxon_statistic(s)),
                    "W2 equality trial " + std::to_string(trial));
        const double mt = smoothed_median(s, km, 1e-12);
        if ((m + n) % 2 == 1) {
            ++odd_checked;
            rep.require(mt == static_cast<double>(median_statistic(s).m_dagger),
                        "M equality trial " + std::to_string(trial));
        } else {
            // even pooled size: the smoothing center is the lower middle
            // order statistic, checked against a direct count
            ++even_checked;
            std::vector<double> pooled = s.pooled();
            std::sort(pooled.begin(), pooled.end());
            const double zl = pooled[(m + n) / 2 - 1];
            int below = 0;
            for (double x : s.xs) below += (x < zl);
            rep.require(mt == static_cast<double>(below),
                        "M lower-middle equality trial " + std::to_string(trial));
        }
    }
    rep.detail = std::to_string(odd_checked) + " odd-N datasets exact vs M-dagger, " +
                 std::to_string(even_checked) +
                 " even-N datasets exact vs the lower-middle count" +
                 (rep.pass ? "" : "; " + rep.detail);
    rep.print();
    CHECK(rep.pass);
}

TEST_CASE("criterion 6: size reproduction at desk scale", "[acceptance]") {
    CriterionReport rep{6};
    const auto t0 = std::chrono::steady_clock::now();
    ExperimentConfig c;
    c.reps = 20000;
    c.sizes = {{30, 30}};
    c.thetas = {0.0};
    c.alphas = {0.05};
    c.median_kernel = find_kernel("remark26-exp");
    c.wilcoxon_kernel = find_kernel("epanechnikov");
    c.seed = kSeed;
    c.tests = {Method::smoothed_median, Method::smoothed_wilcoxon};

    c.model = DistributionModel::normal();
    const PowerTable tn = run_power_experiment(c, 1);
    c.model = DistributionModel::student_t(1.0);
    const PowerTable tt = run_power_experiment(c, 1);
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    const struct {
        const PowerTable* t;
        const char* test;
        double ref;
    } cells[] = {{&tn, "smoothed-median", 0.04647},
                 {&tn, "smoothed-wilcoxon", 0.05135},
                 {&tt, "smoothed-median", 0.03791},
                 {&tt, "smoothed-wilcoxon", 0.05087}};
    for (const auto& cell : cells) {
        const double f = table_freq(*cell.t, cell.test, 0.0, 0.05);
        char buf[120];
        std::snprintf(buf, sizeof buf, "%s %s size %.5f vs %.5f",
                      cell.t == &tn ? "normal" : "t1", cell.test, f, cell.ref);
        rep.require(std::abs(f - cell.ref) <= 0.006, buf);
    }
    rep.require(secs < 300.0, "single-worker runtime " + std::to_string(secs) + "s");
    rep.print();
    CHECK(rep.pass);
}

TEST_CASE("criterion 7: power reproduction at desk scale", "[acceptance]") {
    CriterionReport rep{7};
    ExperimentConfig c;
    c.reps = 20000;
    c.sizes = {{30, 30}};
    c.thetas = {0.5};
    c.alphas = {0.05};
    c.median_kernel = find_kernel("remark26-exp");
    c.wilcoxon_kernel = find_kernel("epanechnikov");
    c.seed = kSeed;
    c.tests = {Method::smoothed_median, Method::smoothed_wilcoxon, Method::ttest};

    c.model = DistributionModel::normal();
    const PowerTable tn = run_power_experiment(c, 2);
    c.model = DistributionModel::double_exponential();
    const PowerTable td = run_power_experiment(c, 2);

    const struct {
        const PowerTable* t;
        const char* test;
        double ref;
    } cells[] = {{&tn, "smoothed-median", 0.40059},
                 {&tn, "smoothed-wilcoxon", 0.59413},
                 {&tn, "ttest", 0.60390},
                 {&td, "smoothed-median", 0.45217},
                 {&td, "ttest", 0.39608}};
    for (const auto& cell : cells) {
        const double f = table_freq(*cell.t, cell.test, 0.5, 0.05);
        char buf[120];
        std::snprintf(buf, sizeof buf, "%s %s power %.5f vs %.5f",
                      cell.t == &tn ? "normal" : "dexp", cell.test, f, cell.ref);
        rep.require(std::abs(f - cell.ref) <= 0.015, buf);
    }
    rep.require(table_freq(td, "smoothed-median", 0.5, 0.05) >
                    table_freq(td, "ttest", 0.5, 0.05),
                "dexp ordering M~ > T2");
    rep.print();
    CHECK(rep.pass);
}

TEST_CASE("criterion 8: heavy-tail power ordering", "[acceptance]") {
    CriterionReport rep{8};
    ExperimentConfig c;
    c.reps = 20000;
    c.sizes = {{30, 30}};
    c.thetas = {0.5};
    c.alphas = {0.05};
    c.model = DistributionModel::student_t(0.5);
    c.median_kernel = find_kernel("remark26-exp");
    c.wilcoxon_kernel = find_kernel("epanechnikov");
    c.seed = kSeed;
    c.tests = {Method::smoothed_median, Method::smoothed_wilcoxon, Method::ttest};
    const PowerTable t = run_power_experiment(c, 2);
    const double pm = table_freq(t, "smoothed-median", 0.5, 0.05);
    const double pw = table_freq(t, "smoothed-wilcoxon", 0.5, 0.05);
    const double pt = table_freq(t, "ttest", 0.5, 0.05);
    auto se = [&](double p) { return std::sqrt(p * (1.0 - p) / c.reps); };
    char buf[120];
    std::snprintf(buf, sizeof buf, "M~=%.5f W2~=%.5f T2=%.5f", pm, pw, pt);
    rep.detail = buf;
    rep.require(pm - pw > 2.0 * std::sqrt(se(pm) * se(pm) + se(pw) * se(pw)),
                "M~ > W2~ beyond 2 se");
    rep.require(pw - pt > 2.0 * std::sqrt(se(pw) * se(pw) + se(pt) * se(pt)),
                "W2~ > T2 beyond 2 se");
    rep.print();
    CHECK(rep.pass);
}

TEST_CASE("criterion 9: significance-probability comparison directions", "[acceptance]") {
    CriterionReport rep{9};
    ExperimentConfig c;
    c.reps = 100000;
    c.sizes = {{10, 10}, {20, 20}, {30, 30}};
    c.thetas = {0.0};
    c.alphas = {0.1};  // tail threshold z_{0.9}
    c.model = DistributionModel::normal();
    c.median_kernel = find_kernel("remark26-exp");
    c.wilcoxon_kernel = find_kernel("epanechnikov");
    c.seed = kSeed;
    const TailComparisonTable d = run_pvalue_comparison(c, false, 2);
    const TailComparisonTable s = run_pvalue_comparison(c, true, 2);
    REQUIRE(d.rows.size() == 3);
    REQUIRE(s.rows.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        const double rd = d.rows[i].ratio();
        const double rs = s.rows[i].ratio();
        char buf[160];
        std::snprintf(buf, sizeof buf, "%s: discrete %.3f, smoothed %.3f",
                      d.rows[i].sizes.c_str(), rd, rs);
        rep.require(rd > 1.0, std::string("discrete ratio > 1 at ") + buf);
        rep.require(std::abs(rs - 1.0) < std::abs(rd - 1.0),
                    std::string("smoothed not closer to 1 at ") + buf);
    }
    rep.print();
    CHECK(rep.pass);
}

TEST_CASE("criterion 10: bootstrap-bandwidth size and power", "[acceptance]") {
    CriterionReport rep{10};
    ExperimentConfig c;
    c.reps = 5000;
    c.sizes = {{30, 30}};
    c.thetas = {0.0, 0.5};
    c.alphas = {0.05};
    c.model = DistributionModel::student_t(2.0);
    c.median_kernel = find_kernel("remark26-exp");
    c.wilcoxon_kernel = find_kernel("epanechnikov");
    c.bandwidth = BandwidthRule::bootstrap(1000, 0.05);
    c.seed = kSeed;
    const PowerTable t = run_bootstrap_power(c, 2);
    const double size = table_freq(t, "smoothed-median", 0.0, 0.05);
    const double power = table_freq(t, "smoothed-median", 0.5, 0.05);
    char buf[120];
    std::snprintf(buf, sizeof buf, "size %.5f (band [0.043, 0.063]), power %.5f vs 0.35837",
                  size, power);
    rep.detail = buf;
    rep.require(size >= 0.043 && size <= 0.063, "size band");
    rep.require(std::abs(power - 0.35837) <= 0.025, "power band");
    rep.print();
    CHECK(rep.pass);
}

// The first decade at z = 0.2 genuinely decays by a factor ~2.6, not 5: the
// odd/even difference at fixed z behaves like N^{-1/2} phi(2 f z sqrt(N))
// and is pre-asymptotic there. Measured values are reported; the remaining
// three ratios clear the bound with margin.
TEST_CASE("criterion 11: odd/even median law convergence", "[acceptance]") {
    CriterionReport rep{11};
    const auto model = DistributionModel::normal();
    for (double z : {0.2, 0.5}) {
        double prev = 0.0;
        std::vector<double> diffs;
        for (int Nt : {11, 41, 161}) {
            const double d = std::abs(sample_median_cdf(model, z, Nt, Parity::odd) -
                                      sample_median_cdf(model, z, Nt + 1, Parity::even));
            diffs.push_back(d);
        }
        for (std::size_t i = 1; i < diffs.size(); ++i) {
            const double ratio = diffs[i - 1] / diffs[i];
            char buf[120];
            std::snprintf(buf, sizeof buf, "z=%.1f step %zu ratio %.2f", z, i, ratio);
            rep.require(ratio >= 5.0, buf);
        }
        (void)prev;
    }
    rep.print();
    CHECK(rep.pass);  // fails: the z=0.2 first step measures ~2.6 (see notes above)
}

TEST_CASE("criterion 12: local power formula identities", "[acceptance]") {
    CriterionReport rep{12};
    const auto nm = DistributionModel::normal();
    for (double alpha : {0.01, 0.05}) {
        const double p = theoretical_local_power(0.0, alpha, 0.5, nm, 0.0, 1.0);
        char buf[120];
        std::snprintf(buf, sizeof buf, "alpha=%.2f: |p-alpha|=%.2e", alpha,
                      std::abs(p - alpha));
        rep.require(std::abs(p - alpha) <= 1e-12, buf);
    }
    double prev = -1.0;
    for (int i = 0; i < 10; ++i) {
        const double p = theoretical_local_power(1.0, 0.05, 0.5, nm, 0.01 * i, 0.5);
        rep.require(p > prev, "strict increase in h at grid point " + std::to_string(i));
        prev = p;
    }
    rep.print();
    CHECK(rep.pass);
}

TEST_CASE("criterion 13: worker-count invariance of simulate output", "[acceptance]") {
    CriterionReport rep{13};
    const std::string dir = "/tmp/smts_accept_" + std::to_string(::getpid());
    std::system(("mkdir -p " + dir + "/w1 " + dir + "/w8").c_str());
    const std::string cfg = dir + "/cfg.json";
    {
        std::ofstream out(cfg);
        out << R"({"kind":"power","reps":4000,"sizes":[[12,17],[30,30]],
"thetas":[0.0,0.5],"alphas":[0.01,0.05],"model":"logistic",
"median_kernel":"remark26-exp","wilcoxon_kernel":"epanechnikov",
"bandwidth":"default","seed":20240901,
"tests":["smoothed-median","smoothed-wilcoxon","ttest","median","wilcoxon"]})";
    }
    rep.require(run_cli("simulate --config " + cfg + " --workers 1 --out-dir " + dir +
                        "/w1 > /dev/null") == 0,
                "workers=1 run");
    rep.require(run_cli("simulate --config " + cfg + " --workers 8 --out-dir " + dir +
                        "/w8 > /dev/null") == 0,
                "workers=8 run");
    const std::string a = slurp(dir + "/w1/cfg.csv");
    const std::string b = slurp(dir + "/w8/cfg.csv");
    rep.require(!a.empty(), "output exists");
    rep.require(a == b, "byte-identical csv");
    rep.print();
    CHECK(rep.pass);
}
