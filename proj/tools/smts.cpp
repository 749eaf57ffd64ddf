// Command-line front end: run tests on data files, run simulation
// experiments from config files or presets, print efficiency tables, and
// list/verify the kernel catalog.
//
// Exit codes: 0 success, 1 verification failure, 2 data error,
//             3 configuration error.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>

#include "smts/smts.hpp"

using json = nlohmann::json;
using namespace smts;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerifyFail = 1;
constexpr int kExitDataError = 2;
constexpr int kExitConfigError = 3;

// --------------------------------------------------------------------------
// Data files: CSV with header "group,value"; group is x or y.

TwoSample read_data_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open data file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty data file: " + path);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "group,value")
        throw std::runtime_error("expected header 'group,value', got '" + line + "'");
    std::vector<double> xs, ys;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw std::runtime_error("line " + std::to_string(lineno) + ": missing comma");
        const std::string group = line.substr(0, comma);
        double value;
        try {
            std::size_t pos = 0;
            value = std::stod(line.substr(comma + 1), &pos);
            if (pos != line.size() - comma - 1) throw std::invalid_argument("trailing");
        } catch (const std::exception&) {
            throw std::runtime_error("line " + std::to_string(lineno) + ": bad value");
        }
        if (group == "x") xs.push_back(value);
        else if (group == "y") ys.push_back(value);
        else
            throw std::runtime_error("line " + std::to_string(lineno) +
                                     ": group must be x or y");
    }
    if (xs.empty() || ys.empty())
        throw std::runtime_error("need at least one observation in each group");
    return TwoSample(std::move(xs), std::move(ys));
}

// --------------------------------------------------------------------------
// Experiment configs: JSON mirroring ExperimentConfig, strict keys.

struct SimJob {
    std::string kind;  // power | power-ratio | pvalue-comparison | bootstrap-power
    ExperimentConfig config;
    bool smoothed = false;  // pvalue-comparison flavor
    std::string output = "csv";
    int workers = 1;
};

SimJob parse_sim_config(const json& j) {
    static const std::set<std::string> known = {
        "kind",   "reps",   "sizes",          "thetas",          "alphas",
        "model",  "seed",   "median_kernel",  "wilcoxon_kernel", "bandwidth",
        "tests",  "smoothed", "output",       "workers",         "random_range"};
    std::vector<std::string> violations;
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!known.count(it.key())) violations.push_back("unknown key: " + it.key());

    SimJob job;
    auto& c = job.config;
    try {
        job.kind = j.value("kind", "power");
        if (job.kind != "power" && job.kind != "power-ratio" &&
            job.kind != "pvalue-comparison" && job.kind != "bootstrap-power")
            violations.push_back("bad kind: " + job.kind);
        if (j.contains("reps")) c.reps = j.at("reps").get<long>();
        if (j.contains("sizes")) {
            for (const auto& e : j.at("sizes")) {
                if (e.is_string() && e.get<std::string>() == "random")
                    c.random_sizes = true;
                else if (e.is_array() && e.size() == 2)
                    c.sizes.push_back({e[0].get<int>(), e[1].get<int>()});
                else
                    violations.push_back("sizes entries must be [m,n] or \"random\"");
            }
        }
        if (j.contains("random_range")) {
            const auto& r = j.at("random_range");
            if (r.is_array() && r.size() == 2) {
                c.random_lo = r[0].get<int>();
                c.random_hi = r[1].get<int>();
            } else {
                violations.push_back("random_range must be [lo,hi]");
            }
        }
        if (j.contains("thetas")) c.thetas = j.at("thetas").get<std::vector<double>>();
        if (j.contains("alphas")) c.alphas = j.at("alphas").get<std::vector<double>>();
        if (j.contains("model")) {
            try {
                c.model = parse_distribution(j.at("model").get<std::string>());
            } catch (const std::exception& e) {
                violations.push_back(e.what());
            }
        }
        if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
        const std::string mk = j.value("median_kernel", "remark26-exp");
        const std::string wk = j.value("wilcoxon_kernel", "epanechnikov");
        c.median_kernel = find_kernel(mk);
        c.wilcoxon_kernel = find_kernel(wk);
        if (!c.median_kernel) violations.push_back("unknown kernel: " + mk);
        if (!c.wilcoxon_kernel) violations.push_back("unknown kernel: " + wk);
        if (j.contains("bandwidth")) {
            try {
                c.bandwidth = parse_bandwidth_rule(j.at("bandwidth").get<std::string>());
            } catch (const std::exception& e) {
                violations.push_back(e.what());
            }
        }
        if (j.contains("tests")) {
            c.tests.clear();
            for (const auto& t : j.at("tests")) {
                const std::string name = t.get<std::string>();
                bool ok = false;
                for (Method m : {Method::median, Method::wilcoxon, Method::ttest,
                                 Method::smoothed_median, Method::smoothed_wilcoxon})
                    if (name == method_name(m)) {
                        c.tests.push_back(m);
                        ok = true;
                    }
                if (!ok) violations.push_back("unknown test: " + name);
            }
        }
        job.smoothed = j.value("smoothed", false);
        job.output = j.value("output", "csv");
        if (job.output != "csv" && job.output != "text")
            violations.push_back("output must be csv or text");
        job.workers = j.value("workers", 1);
        if (job.workers < 1) violations.push_back("workers must be >= 1");
    } catch (const json::exception& e) {
        violations.push_back(e.what());
    }
    try {
        c.validate();
    } catch (const std::exception& e) {
        violations.push_back(e.what());
    }
    if (!violations.empty()) {
        std::ostringstream os;
        os << "invalid config:";
        for (const auto& v : violations) os << "\n  - " << v;
        throw ConfigError(os.str());
    }
    return job;
}

// Built-in experiment presets reproducing the reference tables. The -desk
// variants cut the repetition count for interactive runs.
json preset_config(const std::string& name) {
    std::string base = name;
    bool desk = false;
    if (base.size() > 5 && base.substr(base.size() - 5) == "-desk") {
        desk = true;
        base = base.substr(0, base.size() - 5);
    }
    json j;
    const json all_sizes = json::array({json::array({30, 30}), json::array({50, 30}),
                                        json::array({30, 50}), json::array({50, 50})});
    if (base == "table3" || base == "table4") {
        j["kind"] = "power-ratio";
        j["reps"] = desk ? 20000 : 100000;
        j["sizes"] = json::array({json::array({10, 10}), json::array({20, 20}),
                                  json::array({30, 30}), json::array({50, 50}),
                                  json::array({10, 30}), json::array({30, 10})});
        j["thetas"] = {1.0, 0.5, 0.1};
        j["alphas"] = {0.05};
        j["model"] = base == "table3" ? "t1" : "t0.5";
    } else if (base == "table5" || base == "table6") {
        j["kind"] = "pvalue-comparison";
        j["smoothed"] = base == "table6";
        j["reps"] = desk ? 20000 : 100000;
        j["sizes"] = json::array({json::array({10, 10}), json::array({20, 20}),
                                  json::array({30, 30}), json::array({10, 20}),
                                  json::array({20, 10}), "random"});
        j["thetas"] = {0.0};
        j["alphas"] = {0.1, 0.05, 0.025, 0.01};
        j["model"] = "normal";
    } else if (base == "table7" || base == "table8") {
        j["kind"] = "power";
        j["reps"] = desk ? 20000 : 100000;
        j["sizes"] = all_sizes;
        j["thetas"] = {0.1, 0.5};
        j["alphas"] = {0.01, 0.05};
        j["model"] = base == "table7" ? "normal" : "t1";
        j["tests"] = {"smoothed-median", "smoothed-wilcoxon", "ttest"};
    } else if (base == "table9") {
        j["kind"] = "power";
        j["reps"] = desk ? 20000 : 100000;
        j["sizes"] = all_sizes;
        j["thetas"] = {0.0};
        j["alphas"] = {0.01, 0.05};
        j["model"] = "normal";
        j["tests"] = {"smoothed-median", "smoothed-wilcoxon", "ttest"};
    } else if (base == "table10") {
        j["kind"] = "bootstrap-power";
        j["reps"] = desk ? 5000 : 100000;
        j["sizes"] = all_sizes;
        j["thetas"] = {0.0, 0.1, 0.5};
        j["alphas"] = {0.05};
        j["model"] = "t2";
        j["bandwidth"] = "bootstrap:L=1000,alpha=0.05";
        j["tests"] = {"smoothed-median"};
    } else {
        throw ConfigError("unknown preset: " + name);
    }
    return j;
}

int cmd_simulate(const std::string& config_path, const std::string& preset,
                 std::optional<std::uint64_t> seed, std::optional<int> workers, bool desk,
                 const std::string& output_override, const std::string& out_dir) {
    if (!preset.empty() && !config_path.empty()) {
        std::cerr << "simulate: --config and --preset are mutually exclusive\n";
        return kExitConfigError;
    }
    json j;
    std::string label = "config";
    if (!preset.empty()) {
        const bool has_suffix =
            preset.size() > 5 && preset.substr(preset.size() - 5) == "-desk";
        j = preset_config(desk && !has_suffix ? preset + "-desk" : preset);
        label = has_suffix ? preset.substr(0, preset.size() - 5) : preset;
    } else if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) {
            std::cerr << "cannot open config: " << config_path << "\n";
            return kExitDataError;
        }
        try {
            in >> j;
        } catch (const json::exception& e) {
            std::cerr << "config parse error: " << e.what() << "\n";
            return kExitConfigError;
        }
        const auto slash = config_path.find_last_of('/');
        label = slash == std::string::npos ? config_path : config_path.substr(slash + 1);
        const auto dot = label.find_last_of('.');
        if (dot != std::string::npos) label = label.substr(0, dot);
        if (desk && j.contains("reps"))
            j["reps"] = std::max<long>(1, j["reps"].get<long>() / 5);
    } else {
        std::cerr << "simulate: need --config or --preset\n";
        return kExitConfigError;
    }

    SimJob job;
    try {
        job = parse_sim_config(j);
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return kExitConfigError;
    }
    if (seed) job.config.seed = *seed;
    if (workers) job.workers = *workers;
    if (!output_override.empty()) job.output = output_override;

    char hashbuf[32];
    std::snprintf(hashbuf, sizeof hashbuf, "%016llx",
                  static_cast<unsigned long long>(config_hash(job.config)));
    std::cout << "kind: " << job.kind << "\nconfig_hash: " << hashbuf
              << "\nseed: " << job.config.seed << "\nworkers: " << job.workers << "\n";

    std::string body, text_body;
    try {
        if (job.kind == "power") {
            const PowerTable t = run_power_experiment(job.config, job.workers);
            body = t.csv();
            text_body = t.text();
        } else if (job.kind == "power-ratio") {
            const RatioTable t = run_power_ratio(job.config, job.workers);
            body = t.csv();
            text_body = t.text();
        } else if (job.kind == "pvalue-comparison") {
            const TailComparisonTable t =
                run_pvalue_comparison(job.config, job.smoothed, job.workers);
            body = t.csv();
            text_body = t.text();
        } else {
            const PowerTable t = run_bootstrap_power(job.config, job.workers);
            body = t.csv();
            text_body = t.text();
        }
    } catch (const ConfigError& e) {
        std::cerr << "invalid config: " << e.what() << "\n";
        return kExitConfigError;
    }

    const std::string path = out_dir + "/" + label + "." + (job.output == "csv" ? "csv" : "txt");
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        std::cerr << "cannot write " << path << "\n";
        return kExitDataError;
    }
    out << (job.output == "csv" ? body : text_body);
    out.close();
    std::cout << "wrote: " << path << "\n";
    return kExitOk;
}

// --------------------------------------------------------------------------

int cmd_test(const std::string& data_path, const std::string& method,
             const std::string& kernel_name, const std::string& bandwidth_spec, double alpha,
             std::uint64_t seed) {
    TwoSample sample({0.0}, {0.0});
    try {
        sample = read_data_csv(data_path);
    } catch (const std::exception& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitDataError;
    }

    TestResult res;
    try {
        if (method == "median") {
            res = median_exact_pvalue(sample);
        } else if (method == "wilcoxon") {
            const int w2 = wilcoxon_statistic(sample);
            res.method = Method::wilcoxon;
            res.statistic = w2;
            res.null_mean = wilcoxon_null_mean(sample.m(), sample.n());
            res.null_var = wilcoxon_null_var_exact(sample.m(), sample.n());
            res.z_score = (w2 - res.null_mean) / std::sqrt(res.null_var);
            if (static_cast<long long>(sample.m()) * sample.n() <= 10000) {
                res.p_value =
                    wilcoxon_exact_pvalue(static_cast<int>(sample.m()),
                                          static_cast<int>(sample.n()), w2);
                res.p_value_kind = PValueKind::exact;
            } else {
                res.p_value = normal_approx_pvalue(w2, res.null_mean, res.null_var);
                res.p_value_kind = PValueKind::normal_approx;
            }
            res.ties_present = sample.has_ties();
        } else if (method == "ttest") {
            res = two_sample_t(sample);
        } else if (method == "smoothed-median" || method == "smoothed-wilcoxon") {
            const KernelSpec* kernel = find_kernel(kernel_name);
            if (!kernel) throw ConfigError("unknown kernel: " + kernel_name);
            SmoothedConfig cfg{kernel, parse_bandwidth_rule(bandwidth_spec)};
            CounterRng rng = CounterRng::stream(seed, 0, 0, 1);
            res = method == "smoothed-median" ? smoothed_median_test(sample, cfg, &rng)
                                              : smoothed_wilcoxon_test(sample, cfg, &rng);
        } else {
            std::cerr << "unknown method: " << method << "\n";
            return kExitConfigError;
        }
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const DegenerateSampleError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitDataError;
    }

    std::printf("method:     %s\n", std::string(method_name(res.method)).c_str());
    std::printf("m, n:       %zu, %zu\n", sample.m(), sample.n());
    std::printf("statistic:  %.10g\n", res.statistic);
    std::printf("null mean:  %.10g\n", res.null_mean);
    std::printf("null var:   %.10g\n", res.null_var);
    std::printf("z score:    %.10g\n", res.z_score);
    std::printf("p value:    %.10g (%s)\n", res.p_value,
                res.p_value_kind == PValueKind::exact ? "exact" : "normal approx");
    std::printf("decision:   %s H0 at alpha = %g\n",
                res.p_value < alpha ? "reject" : "do not reject", alpha);
    if (res.ties_present)
        std::printf("note:       ties present; indicator conventions applied verbatim\n");
    return kExitOk;
}

// --------------------------------------------------------------------------

int cmd_efficiency(int table_id) {
    const auto& published = table_id == 1 ? published_table1() : published_table2();
    std::printf("%-11s %-9s %10s %10s %10s\n", "ratio", "model", "computed", "published",
                "|dev|");
    bool all_ok = true;
    for (const auto& row : published) {
        EfficacyTest a = EfficacyTest::median, b = EfficacyTest::ttest;
        if (std::string(row.row) == "ARE(W2|T2)") a = EfficacyTest::wilcoxon;
        if (std::string(row.row) == "ARE(M|W2)") b = EfficacyTest::wilcoxon;
        const auto v = are(a, b, parse_distribution(row.column));
        const double dev = std::abs(*v - row.value);
        all_ok = all_ok && dev <= (table_id == 1 ? 0.005 : 0.01);
        std::printf("%-11s %-9s %10.4f %10.4f %10.4f\n", row.row, row.column, *v, row.value,
                    dev);
    }
    return all_ok ? kExitOk : kExitVerifyFail;
}

int cmd_kernels(const std::string& action) {
    if (action == "list") {
        std::printf("%-20s %-10s %-14s %12s %12s  %s\n", "name", "side", "support", "A11",
                    "A111", "declared");
        for (const auto& k : kernel_catalog()) {
            const KernelReport rep = verify_kernel(k);
            char support[48];
            std::snprintf(support, sizeof support, "(%g, %g)", k.support_lo, k.support_hi);
            std::string props;
            for (const auto p : k.declared) {
                if (!props.empty()) props += ",";
                props += kernel_property_name(p);
            }
            std::printf("%-20s %-10s %-14s %12.6f %12.6f  %s\n", k.name,
                        k.side == KernelSide::one_sided ? "one-sided" : "symmetric", support,
                        rep.a11, rep.a111, props.c_str());
        }
        return kExitOk;
    }
    if (action == "verify") {
        bool all = true;
        for (const auto& k : kernel_catalog()) {
            const KernelReport rep = verify_kernel(k);
            for (const auto& c : rep.checks) {
                std::printf("%-20s %-12s measured % .10f target % g tol %g : %s\n", k.name,
                            std::string(kernel_property_name(c.property)).c_str(), c.measured,
                            c.target, c.tolerance, c.pass ? "pass" : "FAIL");
                all = all && c.pass;
            }
        }
        std::printf("%s\n", all ? "all declared kernel properties verified" :
                                  "kernel verification FAILED");
        return all ? kExitOk : kExitVerifyFail;
    }
    std::cerr << "kernels: action must be list or verify\n";
    return kExitConfigError;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"smoothed and classical two-sample location tests"};
    app.require_subcommand(1);

    // test
    auto* t = app.add_subcommand("test", "run a two-sample test on a data file");
    std::string data_path, method, kernel_name = "remark26-exp", bandwidth = "default";
    double alpha = 0.05;
    std::uint64_t seed = 20240901;
    t->add_option("--data", data_path, "CSV file with header group,value")->required();
    t->add_option("--method", method,
                  "median | wilcoxon | ttest | smoothed-median | smoothed-wilcoxon")
        ->required();
    t->add_option("--kernel", kernel_name, "kernel name for smoothed methods");
    t->add_option("--bandwidth", bandwidth, "fixed:<h> | default | bootstrap:L=..,alpha=..");
    t->add_option("--alpha", alpha, "significance level");
    t->add_option("--seed", seed, "seed for randomized bandwidth selection");

    // simulate
    auto* s = app.add_subcommand("simulate", "run a Monte-Carlo experiment");
    std::string config_path, preset, out_dir = ".", output;
    bool desk = false;
    std::optional<std::uint64_t> seed_opt;
    std::optional<int> workers_opt;
    s->add_option("--config", config_path, "JSON experiment config");
    s->add_option("--preset", preset,
                  "table3..table10 (append -desk or pass --desk for reduced reps)");
    s->add_flag("--desk", desk, "reduced-repetition preset variant");
    s->add_option("--seed", seed_opt, "override the config seed");
    s->add_option("--workers", workers_opt, "worker threads");
    s->add_option("--output", output, "csv | text");
    s->add_option("--out-dir", out_dir, "output directory");

    // efficiency
    auto* e = app.add_subcommand("efficiency", "print computed vs published ARE tables");
    int table_id = 1;
    e->add_option("table", table_id, "1 or 2")->required();

    // kernels
    auto* k = app.add_subcommand("kernels", "kernel catalog");
    std::string action = "list";
    k->add_option("action", action, "list | verify")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& err) {
        const int code = app.exit(err);
        return code == 0 ? 0 : kExitConfigError;
    }

    try {
        if (*t) return cmd_test(data_path, method, kernel_name, bandwidth, alpha, seed);
        if (*s) return cmd_simulate(config_path, preset, seed_opt, workers_opt, desk, output,
                                    out_dir);
        if (*e) {
            if (table_id != 1 && table_id != 2) {
                std::cerr << "efficiency: table must be 1 or 2\n";
                return kExitConfigError;
            }
            return cmd_efficiency(table_id);
        }
        if (*k) return cmd_kernels(action);
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return kExitConfigError;
    }
    return kExitOk;
}
