#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <limits>
#include <numbers>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ohit/baselines.hpp"
#include "ohit/dataset.hpp"
#include "ohit/errors.hpp"
#include "ohit/pipeline.hpp"
#include "ohit/types.hpp"

namespace ohit {

// Minority is the positive class throughout: label 1 = minority, 0 = majority.
struct ScoredPredictions {
    std::vector<double> scores;  // minority-neighbor fraction, higher = more minority-like
    std::vector<int> labels;
    std::vector<int> predictions;
    int k_used = 0;
    bool clamped = false;
};

struct ConfusionCounts {
    long long tp = 0, fp = 0, tn = 0, fn = 0;
};

struct MetricSet {
    double recall = 0, specificity = 0, precision = 0, f1 = 0, gmean = 0;
};

// k-NN with score = fraction of minority among the k nearest training rows.
// Training rows are ordered minority block first, then majority; distance
// ties resolve to the lower index. Ties at score 0.5 predict minority.
inline ScoredPredictions knn_classify(const BinaryDataset& train,
                                      const BinaryDataset& test,
                                      int k_cls = 5) {
    if (train.length() != test.length())
        throw ContractViolation("knn_classify: train/test dimension mismatch");
    const Index n_train = train.n_min() + train.n_maj();
    if (n_train < 1) throw ContractViolation("knn_classify: empty training set");
    if (k_cls < 1) throw ParameterError("k_cls must be positive");

    ScoredPredictions sp;
    sp.k_used = std::min<int>(k_cls, static_cast<int>(n_train));
    sp.clamped = sp.k_used != k_cls;

    Matrix T(n_train, train.length());
    T.topRows(train.n_min()) = train.minority;
    T.bottomRows(train.n_maj()) = train.majority;
    const Index n_min_train = train.n_min();

    const Index n_test = test.n_min() + test.n_maj();
    Matrix Q(n_test, test.length());
    Q.topRows(test.n_min()) = test.minority;
    Q.bottomRows(test.n_maj()) = test.majority;

    std::vector<std::pair<double, Index>> order(static_cast<std::size_t>(n_train));
    for (Index q = 0; q < n_test; ++q) {
        for (Index t = 0; t < n_train; ++t)
            order[static_cast<std::size_t>(t)] = {(Q.row(q) - T.row(t)).norm(), t};
        std::partial_sort(order.begin(), order.begin() + sp.k_used, order.end());
        int minority_votes = 0;
        for (int r = 0; r < sp.k_used; ++r)
            if (order[static_cast<std::size_t>(r)].second < n_min_train) ++minority_votes;
        const double score = static_cast<double>(minority_votes) / sp.k_used;
        sp.scores.push_back(score);
        sp.labels.push_back(q < test.n_min() ? 1 : 0);
        sp.predictions.push_back(score >= 0.5 ? 1 : 0);
    }
    return sp;
}

inline ConfusionCounts confusion(const ScoredPredictions& sp) {
    ConfusionCounts c;
    for (std::size_t i = 0; i < sp.labels.size(); ++i) {
        if (sp.labels[i] == 1)
            (sp.predictions[i] == 1 ? c.tp : c.fn)++;
        else
            (sp.predictions[i] == 1 ? c.fp : c.tn)++;
    }
    return c;
}

inline double f1_score(double precision, double recall) {
    if (std::isnan(precision) || precision + recall == 0.0)
        return std::numeric_limits<double>::quiet_NaN();
    return 2.0 * precision * recall / (precision + recall);
}

inline double gmean_score(double recall, double specificity) {
    return std::sqrt(recall * specificity);
}

// Precision and F1 carry a NaN marker when no sample was predicted positive,
// matching how such cells are reported.
inline MetricSet metrics(const ConfusionCounts& c) {
    if (c.tp + c.fn == 0 || c.tn + c.fp == 0)
        throw DegenerateEvaluationError("test set is missing a class");

    MetricSet m;
    m.recall = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
    m.specificity = static_cast<double>(c.tn) / static_cast<double>(c.tn + c.fp);
    m.precision = c.tp + c.fp == 0
                      ? std::numeric_limits<double>::quiet_NaN()
                      : static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
    m.f1 = f1_score(m.precision, m.recall);
    m.gmean = gmean_score(m.recall, m.specificity);
    return m;
}

// Mann-Whitney form of the ROC area, with midranks for tied scores.
inline double auc(const ScoredPredictions& sp) {
    const std::size_t n = sp.scores.size();
    std::size_t n_pos = 0;
    for (int l : sp.labels) n_pos += (l == 1);
    const std::size_t n_neg = n - n_pos;
    if (n_pos == 0 || n_neg == 0)
        throw DegenerateEvaluationError("auc needs both classes present");

    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        return sp.scores[a] < sp.scores[b];
    });

    double rank_sum_pos = 0.0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && sp.scores[idx[j + 1]] == sp.scores[idx[i]]) ++j;
        const double midrank = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
        for (std::size_t t = i; t <= j; ++t)
            if (sp.labels[idx[t]] == 1) rank_sum_pos += midrank;
        i = j + 1;
    }
    const double np = static_cast<double>(n_pos);
    return (rank_sum_pos - np * (np + 1.0) / 2.0) / (np * static_cast<double>(n_neg));
}

// Two-sided Wilcoxon signed-rank p-value for paired samples. Zero differences
// are dropped; if all are zero the p-value is 1 by convention. Exact by full
// sign enumeration up to n = 20 effective pairs, normal approximation with
// tie correction beyond.
inline double wilcoxon_signed_rank(std::span<const double> a,
                                   std::span<const double> b) {
    if (a.size() != b.size())
        throw ContractViolation("wilcoxon: length mismatch");

    std::vector<double> diff;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        if (d != 0.0) diff.push_back(d);
    }
    const std::size_t n = diff.size();
    if (n == 0) return 1.0;

    // midranks of |diff|
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](std::size_t x, std::size_t y) {
        return std::abs(diff[x]) < std::abs(diff[y]);
    });
    std::vector<double> rank(n);
    std::vector<std::size_t> tie_sizes;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n &&
               std::abs(diff[idx[j + 1]]) == std::abs(diff[idx[i]]))
            ++j;
        const double midrank = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
        for (std::size_t t = i; t <= j; ++t) rank[idx[t]] = midrank;
        if (j > i) tie_sizes.push_back(j - i + 1);
        i = j + 1;
    }

    double w_pos = 0.0;
    for (std::size_t t = 0; t < n; ++t)
        if (diff[t] > 0.0) w_pos += rank[t];

    if (n <= 20) {
        const std::uint64_t total = 1ull << n;
        const double tol = 1e-9;
        std::uint64_t le = 0, ge = 0;
        for (std::uint64_t mask = 0; mask < total; ++mask) {
            double w = 0.0;
            for (std::size_t t = 0; t < n; ++t)
                if (mask & (1ull << t)) w += rank[t];
            if (w <= w_pos + tol) ++le;
            if (w >= w_pos - tol) ++ge;
        }
        const double p =
            2.0 * static_cast<double>(std::min(le, ge)) / static_cast<double>(total);
        return std::min(1.0, p);
    }

    const double nn = static_cast<double>(n);
    double tie_corr = 0.0;
    for (std::size_t t : tie_sizes) {
        const double tt = static_cast<double>(t);
        tie_corr += tt * tt * tt - tt;
    }
    const double mean = nn * (nn + 1.0) / 4.0;
    const double var = nn * (nn + 1.0) * (2.0 * nn + 1.0) / 24.0 - tie_corr / 48.0;
    if (var <= 0.0) return 1.0;
    const double z = (w_pos - mean) / std::sqrt(var);
    return std::erfc(std::abs(z) / std::numbers::sqrt2);
}

// ---------------------------------------------------------------------------
// benchmark harness

struct DatasetSpec {
    std::string name;
    std::filesystem::path train_path;
    std::filesystem::path test_path;
    std::vector<std::string> minority_tags;
};

struct BenchmarkConfig {
    std::vector<DatasetSpec> datasets;
    std::vector<std::string> methods;  // none | ros | smote | ohit[:mode]
    std::vector<std::uint64_t> seeds{0};
    int classifier_k = 5;
    std::optional<long long> eta;  // nullopt: balance
    char delimiter = ',';
    DrsnnParams drsnn;
};

struct CellResult {
    std::string dataset;
    std::string method;
    std::uint64_t seed = 0;
    bool ok = false;
    std::string error;
    ConfusionCounts counts;
    MetricSet m;
    double auc_value = std::numeric_limits<double>::quiet_NaN();
};

struct WilcoxonEntry {
    std::string reference;
    std::string method;
    std::string metric;
    int pairs = 0;
    double p = std::numeric_limits<double>::quiet_NaN();
};

struct EvaluationReport {
    std::vector<CellResult> cells;
    std::vector<WilcoxonEntry> wilcoxon;
};

// Applies a named resampling method to the training set.
inline BinaryDataset apply_method(const BinaryDataset& train,
                                  const std::string& method,
                                  std::uint64_t seed,
                                  const std::optional<long long>& eta,
                                  const DrsnnParams& drsnn_params = {}) {
    const long long eta_resolved = resolve_eta(train, eta);
    if (method == "none") return train;

    SyntheticSet syn;
    if (method == "ros") {
        syn = random_oversample(train.minority, eta_resolved, seed);
    } else if (method == "smote") {
        syn = smote(train.minority, eta_resolved, 5, seed);
    } else if (method == "ohit" || method.starts_with("ohit:")) {
        OhitConfig cfg;
        cfg.drsnn = drsnn_params;
        cfg.eta = eta;
        cfg.seed = seed;
        if (method.starts_with("ohit:")) {
            const auto mode = parse_mode(method.substr(5));
            if (!mode) throw ParameterError("unknown ohit mode in '" + method + "'");
            cfg.mode = *mode;
        }
        return resample_dataset(train, cfg);
    } else {
        throw ParameterError("unknown method '" + method + "'");
    }

    BinaryDataset out = train;
    out.minority.resize(train.n_min() + syn.size(), train.length());
    out.minority.topRows(train.n_min()) = train.minority;
    out.minority.bottomRows(syn.size()) = syn.samples;
    const std::string tag =
        train.minority_tags.empty() ? std::string("1") : train.minority_tags.front();
    for (Index r = 0; r < syn.size(); ++r) out.minority_raw_labels.push_back(tag);
    return out;
}

namespace detail {

inline double mean_or_nan(const std::vector<double>& v) {
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    double s = 0.0;
    for (double x : v) {
        if (std::isnan(x)) return std::numeric_limits<double>::quiet_NaN();
        s += x;
    }
    return s / static_cast<double>(v.size());
}

}  // namespace detail

// Runs every (dataset, method, seed) cell, isolating per-cell failures, then
// summarizes reference-vs-method Wilcoxon p-values per metric across
// datasets (pairwise deletion of NaN cells). The reference is the first
// ohit-family method, or the first method when none is present.
inline EvaluationReport benchmark(const BenchmarkConfig& cfg) {
    if (cfg.datasets.empty()) throw ParameterError("benchmark: no datasets");
    if (cfg.methods.empty()) throw ParameterError("benchmark: no methods");
    if (cfg.seeds.empty()) throw ParameterError("benchmark: no seeds");

    EvaluationReport report;
    for (const auto& ds : cfg.datasets) {
        std::optional<BinaryDataset> train, test;
        std::string load_error;
        try {
            train = binarize(load_series(ds.train_path, cfg.delimiter, ds.name),
                             ds.minority_tags);
            test = binarize(load_series(ds.test_path, cfg.delimiter, ds.name),
                            ds.minority_tags);
        } catch (const std::exception& e) {
            load_error = e.what();
        }

        for (const auto& method : cfg.methods) {
            for (const std::uint64_t seed : cfg.seeds) {
                CellResult cell;
                cell.dataset = ds.name;
                cell.method = method;
                cell.seed = seed;
                if (!load_error.empty()) {
                    cell.error = load_error;
                    report.cells.push_back(std::move(cell));
                    continue;
                }
                try {
                    const BinaryDataset resampled =
                        apply_method(*train, method, seed, cfg.eta, cfg.drsnn);
                    const ScoredPredictions sp =
                        knn_classify(resampled, *test, cfg.classifier_k);
                    cell.counts = confusion(sp);
                    cell.m = metrics(cell.counts);
                    cell.auc_value = auc(sp);
                    cell.ok = true;
                } catch (const std::exception& e) {
                    cell.error = e.what();
                }
                report.cells.push_back(std::move(cell));
            }
        }
    }

    std::string reference = cfg.methods.front();
    for (const auto& m : cfg.methods)
        if (m == "ohit" || m.starts_with("ohit:")) { reference = m; break; }

    const auto metric_of = [](const CellResult& c, const std::string& name) {
        if (name == "f1") return c.m.f1;
        if (name == "gmean") return c.m.gmean;
        return c.auc_value;
    };
    const auto method_mean = [&](const std::string& dataset, const std::string& method,
                                 const std::string& metric) {
        std::vector<double> vals;
        for (const auto& c : report.cells)
            if (c.dataset == dataset && c.method == method && c.ok)
                vals.push_back(metric_of(c, metric));
        return detail::mean_or_nan(vals);
    };

    for (const std::string metric : {"f1", "gmean", "auc"}) {
        for (const auto& method : cfg.methods) {
            if (method == reference) continue;
            std::vector<double> ref_vals, other_vals;
            for (const auto& ds : cfg.datasets) {
                const double r = method_mean(ds.name, reference, metric);
                const double o = method_mean(ds.name, method, metric);
                if (std::isnan(r) || std::isnan(o)) continue;  // pairwise deletion
                ref_vals.push_back(r);
                other_vals.push_back(o);
            }
            WilcoxonEntry entry;
            entry.reference = reference;
            entry.method = method;
            entry.metric = metric;
            entry.pairs = static_cast<int>(ref_vals.size());
            if (!ref_vals.empty())
                entry.p = wilcoxon_signed_rank(ref_vals, other_vals);
            report.wilcoxon.push_back(std::move(entry));
        }
    }
    return report;
}

// ---------------------------------------------------------------------------
// report serialization

namespace detail {

inline std::string format_metric(double v) {
    if (std::isnan(v)) return "NaN";
    return format_value(v);
}

inline double parse_metric(std::string_view token) {
    if (token == "NaN" || token == "nan") return std::numeric_limits<double>::quiet_NaN();
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec != std::errc() || ptr != token.data() + token.size())
        throw ParseError("bad numeric field '" + std::string(token) + "'");
    return v;
}

inline std::string csv_escape(const std::string& s, char delim) {
    if (s.find(delim) == std::string::npos && s.find('"') == std::string::npos &&
        s.find('\n') == std::string::npos)
        return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

inline std::vector<std::string> csv_split(const std::string& line, char delim) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == delim) {
            out.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(std::move(cur));
    return out;
}

}  // namespace detail

inline constexpr const char* kReportHeader =
    "dataset,method,seed,status,error,tp,fp,tn,fn,recall,specificity,"
    "precision,f1,gmean,auc";

inline void write_report_csv(std::ostream& out, const EvaluationReport& report) {
    out << kReportHeader << '\n';
    for (const auto& c : report.cells) {
        out << detail::csv_escape(c.dataset, ',') << ','
            << detail::csv_escape(c.method, ',') << ',' << c.seed << ','
            << (c.ok ? "ok" : "error") << ','
            << detail::csv_escape(c.error, ',') << ',' << c.counts.tp << ','
            << c.counts.fp << ',' << c.counts.tn << ',' << c.counts.fn << ','
            << detail::format_metric(c.m.recall) << ','
            << detail::format_metric(c.m.specificity) << ','
            << detail::format_metric(c.m.precision) << ','
            << detail::format_metric(c.m.f1) << ','
            << detail::format_metric(c.m.gmean) << ','
            << detail::format_metric(c.auc_value) << '\n';
    }
}

inline EvaluationReport read_report_csv(std::istream& in) {
    EvaluationReport report;
    std::string line;
    if (!std::getline(in, line) || line != kReportHeader)
        throw FormatError("missing or unexpected report header");
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = detail::csv_split(line, ',');
        if (f.size() != 15)
            throw FormatError("report row has " + std::to_string(f.size()) +
                              " fields, expected 15");
        CellResult c;
        c.dataset = f[0];
        c.method = f[1];
        c.seed = std::stoull(f[2]);
        c.ok = f[3] == "ok";
        c.error = f[4];
        c.counts.tp = std::stoll(f[5]);
        c.counts.fp = std::stoll(f[6]);
        c.counts.tn = std::stoll(f[7]);
        c.counts.fn = std::stoll(f[8]);
        c.m.recall = detail::parse_metric(f[9]);
        c.m.specificity = detail::parse_metric(f[10]);
        c.m.precision = detail::parse_metric(f[11]);
        c.m.f1 = detail::parse_metric(f[12]);
        c.m.gmean = detail::parse_metric(f[13]);
        c.auc_value = detail::parse_metric(f[14]);
        report.cells.push_back(std::move(c));
    }
    return report;
}

inline constexpr const char* kWilcoxonHeader = "reference,method,metric,pairs,p";

inline void write_wilcoxon_csv(std::ostream& out, const EvaluationReport& report) {
    out << kWilcoxonHeader << '\n';
    for (const auto& w : report.wilcoxon)
        out << detail::csv_escape(w.reference, ',') << ','
            << detail::csv_escape(w.method, ',') << ',' << w.metric << ','
            << w.pairs << ',' << detail::format_metric(w.p) << '\n';
}

inline void read_wilcoxon_csv(std::istream& in, EvaluationReport& report) {
    std::string line;
    if (!std::getline(in, line) || line != kWilcoxonHeader)
        throw FormatError("missing or unexpected wilcoxon header");
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = detail::csv_split(line, ',');
        if (f.size() != 5) throw FormatError("wilcoxon row needs 5 fields");
        WilcoxonEntry w;
        w.reference = f[0];
        w.method = f[1];
        w.metric = f[2];
        w.pairs = std::stoi(f[3]);
        w.p = detail::parse_metric(f[4]);
        report.wilcoxon.push_back(std::move(w));
    }
}

}  // namespace ohit
