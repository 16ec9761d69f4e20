// Command-line front end: `resample` applies one oversampler to one dataset
// file, `benchmark` runs the full method-comparison protocol from a config
// file. Exit codes: 0 success, 1 data/runtime failure, 2 usage/config error.

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ohit/ohit.hpp"

namespace fs = std::filesystem;

namespace {

bool verbose() {
    const char* v = std::getenv("OHIT_VERBOSE");
    return v != nullptr && std::string(v) != "0";
}

std::vector<std::string> split_tags(const std::string& csv) {
    std::vector<std::string> tags;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ','))
        if (!tok.empty()) tags.push_back(tok);
    return tags;
}

char parse_delimiter(const std::string& s) {
    if (s == "tab" || s == "\\t") return '\t';
    if (s.size() == 1) return s[0];
    throw ohit::ParameterError("delimiter must be a single character or 'tab'");
}

std::optional<long long> parse_eta(const std::string& s) {
    if (s == "balance") return std::nullopt;
    try {
        return std::stoll(s);
    } catch (const std::exception&) {
        throw ohit::ParameterError("eta must be an integer or 'balance'");
    }
}

struct ResampleArgs {
    std::string input, output, minority;
    std::string method = "ohit";
    std::string mode = "full";
    std::string eta = "balance";
    std::string delimiter = ",";
    std::string dump_clusters, dump_shrinkage;
    int k = 0, kappa = 0;
    double drt = 0.0;
    std::uint64_t seed = 0;
};

int run_resample(const ResampleArgs& args) {
    const char delim = parse_delimiter(args.delimiter);
    const auto data = ohit::load_series(args.input, delim);
    const auto tags = split_tags(args.minority);
    auto bin = ohit::binarize(data, tags);
    const auto eta = parse_eta(args.eta);
    const long long eta_resolved = ohit::resolve_eta(bin, eta);

    if (args.method == "none") {
        // validated above; copy bytes so the output is identical to the input
        std::ifstream in(args.input, std::ios::binary);
        std::ofstream out(args.output, std::ios::binary);
        out << in.rdbuf();
        std::cout << "dataset=" << data.name << " method=none n_min=" << bin.n_min()
                  << " n_maj=" << bin.n_maj() << " (unchanged)\n";
        return 0;
    }

    ohit::LabeledSeriesSet result = data;
    int m = 1;
    double lambda_lo = std::numeric_limits<double>::quiet_NaN();
    double lambda_hi = std::numeric_limits<double>::quiet_NaN();
    ohit::Matrix synthetic;

    if (args.method == "ohit") {
        ohit::OhitConfig cfg;
        if (args.k > 0) cfg.drsnn.k = args.k;
        if (args.kappa > 0) cfg.drsnn.kappa = args.kappa;
        if (args.drt > 0.0) cfg.drsnn.drT = args.drt;
        cfg.eta = eta;
        cfg.seed = args.seed;
        const auto mode = ohit::parse_mode(args.mode);
        if (!mode) throw ohit::ParameterError("unknown mode '" + args.mode + "'");
        cfg.mode = *mode;

        const auto run = ohit::ohit_run(bin, cfg);
        synthetic = run.synthetic.samples;
        m = run.labeling.num_clusters;
        for (const auto& [id, est] : run.estimates) {
            if (std::isnan(est.lambda)) continue;
            lambda_lo = std::isnan(lambda_lo) ? est.lambda : std::min(lambda_lo, est.lambda);
            lambda_hi = std::isnan(lambda_hi) ? est.lambda : std::max(lambda_hi, est.lambda);
        }
        if (!args.dump_clusters.empty()) {
            std::ofstream dump(args.dump_clusters);
            // recompute the ratios the labeling was built from
            if (bin.n_min() > 1) {
                const int k = cfg.drsnn.k.value_or(ohit::default_k(bin.n_min()));
                const auto nt = ohit::knn_lists(bin.minority, k);
                const auto g = ohit::snn_graph(nt);
                const auto dens = ohit::snn_density(g, nt);
                const auto dr = ohit::density_ratio(
                    dens, g, nt, std::min(cfg.drsnn.kappa.value_or(k), nt.k));
                ohit::dump_labeling(dump, run.labeling, dr);
            } else {
                ohit::dump_labeling(dump, run.labeling, {1.0});
            }
        }
        if (!args.dump_shrinkage.empty()) {
            std::ofstream dump(args.dump_shrinkage);
            ohit::dump_estimates(dump, run.estimates);
        }
        if (verbose()) {
            for (const auto& [id, est] : run.estimates)
                std::cerr << "cluster " << id << ": n=" << est.n
                          << " lambda=" << est.lambda << '\n';
        }
    } else if (args.method == "ros") {
        synthetic = ohit::random_oversample(bin.minority, eta_resolved, args.seed).samples;
    } else if (args.method == "smote") {
        std::string warning;
        synthetic =
            ohit::smote(bin.minority, eta_resolved, 5, args.seed, nullptr, &warning)
                .samples;
        if (!warning.empty()) std::cerr << "warning: " << warning << '\n';
    } else {
        throw ohit::ParameterError("unknown method '" + args.method + "'");
    }

    const ohit::Index n_before = result.series.rows();
    result.series.conservativeResize(n_before + synthetic.rows(), Eigen::NoChange);
    result.series.bottomRows(synthetic.rows()) = synthetic;
    for (ohit::Index r = 0; r < synthetic.rows(); ++r)
        result.labels.push_back(tags.front());
    ohit::save_series(result, args.output, delim);

    std::cout << "dataset=" << data.name << " method=" << args.method
              << " n_min=" << bin.n_min() << "->" << bin.n_min() + synthetic.rows()
              << " n_maj=" << bin.n_maj() << " clusters=" << m;
    if (!std::isnan(lambda_lo))
        std::cout << " lambda=[" << lambda_lo << "," << lambda_hi << "]";
    std::cout << '\n';
    return 0;
}

// Line-oriented benchmark config:
//   dataset <name> <train_path> <test_path> <tag1[,tag2,...]>
//   method <none|ros|smote|ohit[:mode]>
//   seeds <s1> [s2 ...]
//   classifier_k <k>
//   eta <N|balance>
//   delimiter <char|tab>
//   drsnn_k / drsnn_kappa / drsnn_drt <value>
ohit::BenchmarkConfig read_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ohit::FormatError("cannot open config '" + path.string() + "'");

    ohit::BenchmarkConfig cfg;
    cfg.seeds.clear();
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        std::stringstream ss(line);
        std::string key;
        ss >> key;
        const auto fail = [&](const std::string& why) {
            throw ohit::FormatError("config line " + std::to_string(line_no) +
                                    ": " + why);
        };
        if (key == "dataset") {
            ohit::DatasetSpec ds;
            std::string tags;
            ss >> ds.name >> ds.train_path >> ds.test_path >> tags;
            if (ds.name.empty() || tags.empty())
                fail("expected: dataset <name> <train> <test> <tags>");
            ds.minority_tags = split_tags(tags);
            cfg.datasets.push_back(std::move(ds));
        } else if (key == "method") {
            std::string m;
            ss >> m;
            if (m.empty()) fail("method needs a name");
            cfg.methods.push_back(m);
        } else if (key == "seeds" || key == "seed") {
            std::uint64_t s;
            while (ss >> s) cfg.seeds.push_back(s);
        } else if (key == "classifier_k") {
            ss >> cfg.classifier_k;
        } else if (key == "eta") {
            std::string e;
            ss >> e;
            cfg.eta = parse_eta(e);
        } else if (key == "delimiter") {
            std::string d;
            ss >> d;
            cfg.delimiter = parse_delimiter(d);
        } else if (key == "drsnn_k") {
            int v;
            ss >> v;
            cfg.drsnn.k = v;
        } else if (key == "drsnn_kappa") {
            int v;
            ss >> v;
            cfg.drsnn.kappa = v;
        } else if (key == "drsnn_drt") {
            double v;
            ss >> v;
            cfg.drsnn.drT = v;
        } else {
            fail("unknown key '" + key + "'");
        }
    }
    if (cfg.seeds.empty()) cfg.seeds.push_back(0);
    return cfg;
}

nlohmann::json report_to_json(const ohit::EvaluationReport& report) {
    nlohmann::json j;
    j["cells"] = nlohmann::json::array();
    for (const auto& c : report.cells) {
        nlohmann::json cell;
        cell["dataset"] = c.dataset;
        cell["method"] = c.method;
        cell["seed"] = c.seed;
        cell["status"] = c.ok ? "ok" : "error";
        if (!c.ok) cell["error"] = c.error;
        if (c.ok) {
            cell["tp"] = c.counts.tp;
            cell["fp"] = c.counts.fp;
            cell["tn"] = c.counts.tn;
            cell["fn"] = c.counts.fn;
            cell["recall"] = c.m.recall;
            cell["specificity"] = c.m.specificity;
            cell["precision"] = c.m.precision;
            cell["f1"] = c.m.f1;
            cell["gmean"] = c.m.gmean;
            cell["auc"] = c.auc_value;
        }
        j["cells"].push_back(std::move(cell));
    }
    j["wilcoxon"] = nlohmann::json::array();
    for (const auto& w : report.wilcoxon) {
        nlohmann::json row;
        row["reference"] = w.reference;
        row["method"] = w.method;
        row["metric"] = w.metric;
        row["pairs"] = w.pairs;
        row["p"] = w.p;
        j["wilcoxon"].push_back(std::move(row));
    }
    return j;
}

int run_benchmark(const std::string& config_path, const std::string& out_dir) {
    ohit::BenchmarkConfig cfg;
    try {
        cfg = read_config(config_path);
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    }

    const auto report = ohit::benchmark(cfg);

    fs::create_directories(out_dir);
    {
        std::ofstream out(fs::path(out_dir) / "report.csv");
        ohit::write_report_csv(out, report);
    }
    {
        std::ofstream out(fs::path(out_dir) / "wilcoxon.csv");
        ohit::write_wilcoxon_csv(out, report);
    }
    {
        std::ofstream out(fs::path(out_dir) / "report.json");
        out << report_to_json(report).dump(2) << '\n';
    }

    int ok = 0, failed = 0;
    for (const auto& c : report.cells) (c.ok ? ok : failed)++;
    std::cout << "benchmark: " << ok << " cells ok, " << failed
              << " cells failed, reports in " << out_dir << '\n';
    if (verbose())
        for (const auto& c : report.cells)
            if (!c.ok)
                std::cerr << c.dataset << "/" << c.method << " seed " << c.seed
                          << ": " << c.error << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"structure-preserving minority oversampling for time series"};
    app.require_subcommand(1);

    ResampleArgs rs;
    auto* resample = app.add_subcommand("resample", "oversample one dataset file");
    resample->add_option("--input", rs.input, "input series file")->required();
    resample->add_option("--output", rs.output, "output series file")->required();
    resample->add_option("--minority", rs.minority, "comma-separated minority tags")
        ->required();
    resample->add_option("--method", rs.method, "ohit|ros|smote|none")
        ->check(CLI::IsMember({"ohit", "ros", "smote", "none"}));
    resample->add_option("--mode", rs.mode, "full|no_drsnn|no_shrinkage|er");
    resample->add_option("--eta", rs.eta, "synthetic count or 'balance'");
    resample->add_option("--seed", rs.seed, "RNG seed");
    resample->add_option("--k", rs.k, "DRSNN neighborhood size");
    resample->add_option("--kappa", rs.kappa, "DRSNN density-ratio neighborhood");
    resample->add_option("--drt", rs.drt, "DRSNN density-ratio threshold");
    resample->add_option("--delimiter", rs.delimiter, "field delimiter (default ,)");
    resample->add_option("--dump-clusters", rs.dump_clusters,
                         "write point,cluster,is_core,density_ratio");
    resample->add_option("--dump-shrinkage", rs.dump_shrinkage,
                         "write cluster,n,lambda,condition");

    std::string config_path, out_dir = ".";
    auto* bench = app.add_subcommand("benchmark", "run the full comparison protocol");
    bench->add_option("--config", config_path, "benchmark config file")->required();
    bench->add_option("--out-dir", out_dir, "directory for report files");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << '\n';
        return 2;
    }

    try {
        if (resample->parsed()) return run_resample(rs);
        if (bench->parsed()) return run_benchmark(config_path, out_dir);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
