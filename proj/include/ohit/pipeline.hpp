#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ohit/dataset.hpp"
#include "ohit/drsnn.hpp"
#include "ohit/errors.hpp"
#include "ohit/shrinkage.hpp"
#include "ohit/synthesis.hpp"
#include "ohit/types.hpp"

namespace ohit {

enum class OhitMode { full, no_drsnn, no_shrinkage, er };

inline std::string to_string(OhitMode mode) {
    switch (mode) {
        case OhitMode::full: return "full";
        case OhitMode::no_drsnn: return "no_drsnn";
        case OhitMode::no_shrinkage: return "no_shrinkage";
        case OhitMode::er: return "er";
    }
    return "full";
}

inline std::optional<OhitMode> parse_mode(const std::string& s) {
    if (s == "full") return OhitMode::full;
    if (s == "no_drsnn") return OhitMode::no_drsnn;
    if (s == "no_shrinkage") return OhitMode::no_shrinkage;
    if (s == "er") return OhitMode::er;
    return std::nullopt;
}

struct OhitConfig {
    DrsnnParams drsnn;
    std::optional<long long> eta;  // nullopt: balance, eta = n_maj - n_min
    std::uint64_t seed = 0;
    OhitMode mode = OhitMode::full;
};

// Synthetic set plus the intermediates useful for summaries and debugging.
struct OhitResult {
    SyntheticSet synthetic;
    ClusterLabeling labeling;
    std::vector<std::pair<int, ShrinkageEstimate>> estimates;
    long long eta_resolved = 0;
};

namespace detail {

// Per-cluster estimate honoring the ablation mode. A size-1 cluster (only
// possible when the whole minority set is a single sample) degenerates to a
// zero covariance; the ridge then yields duplication plus tiny jitter.
inline ShrinkageEstimate estimate_for_mode(const Matrix& C, OhitMode mode) {
    ShrinkageEstimate est;
    est.n = C.rows();
    if (C.rows() == 1) {
        est.mu = C.row(0).transpose();
        est.S = Matrix::Zero(C.cols(), C.cols());
        est.lambda = 1.0;
        est.S_star = ensure_positive_definite(est.S);
        return est;
    }
    std::tie(est.mu, est.S) = sample_moments(C);
    switch (mode) {
        case OhitMode::full:
        case OhitMode::no_drsnn:
            est.lambda = shrinkage_intensity(C);
            break;
        case OhitMode::no_shrinkage:
            est.lambda = 0.0;
            break;
        case OhitMode::er:
            est.lambda = std::numeric_limits<double>::quiet_NaN();
            break;
    }
    if (mode == OhitMode::er)
        est.S_star = ensure_positive_definite(regularize_er(est.S));
    else
        est.S_star = ensure_positive_definite(shrink_covariance(est.S, est.lambda));
    return est;
}

}  // namespace detail

inline long long resolve_eta(const BinaryDataset& data,
                             const std::optional<long long>& eta) {
    if (eta.has_value()) {
        if (*eta < 0) throw ParameterError("eta must be non-negative");
        return *eta;
    }
    return std::max<long long>(0, data.n_maj() - data.n_min());
}

// OHIT end to end: cluster the minority set, estimate one covariance per
// cluster, then draw proportionally allocated Gaussian samples.
inline OhitResult ohit_run(const BinaryDataset& data, const OhitConfig& cfg) {
    const Matrix& P = data.minority;
    const Index n_min = P.rows();
    if (n_min < 1) throw ParameterError("empty minority set");

    OhitResult result;
    result.eta_resolved = resolve_eta(data, cfg.eta);

    if (cfg.mode == OhitMode::no_drsnn) {
        result.labeling.assignment.assign(static_cast<std::size_t>(n_min), 1);
        result.labeling.num_clusters = 1;
        result.labeling.core_flags.assign(static_cast<std::size_t>(n_min), true);
    } else {
        result.labeling = drsnn(P, cfg.drsnn);
    }

    const auto sizes = result.labeling.cluster_sizes();
    std::vector<Matrix> members(sizes.size());
    for (std::size_t c = 0; c < sizes.size(); ++c)
        members[c].resize(sizes[c], P.cols());
    std::vector<Index> fill(sizes.size(), 0);
    for (Index i = 0; i < n_min; ++i) {
        const std::size_t c =
            static_cast<std::size_t>(result.labeling.assignment[static_cast<std::size_t>(i)] - 1);
        members[c].row(fill[c]++) = P.row(i);
    }

    for (std::size_t c = 0; c < members.size(); ++c)
        result.estimates.emplace_back(static_cast<int>(c) + 1,
                                      detail::estimate_for_mode(members[c], cfg.mode));

    const auto plan = allocate(result.eta_resolved, sizes, n_min, cfg.seed);
    result.synthetic = synthesize(plan, result.estimates);
    return result;
}

inline SyntheticSet ohit(const BinaryDataset& data, const OhitConfig& cfg) {
    return ohit_run(data, cfg).synthetic;
}

// Appends the OHIT synthetic samples to the minority side; the majority side
// is returned untouched.
inline BinaryDataset resample_dataset(const BinaryDataset& data,
                                      const OhitConfig& cfg) {
    const SyntheticSet syn = ohit(data, cfg);

    BinaryDataset out = data;
    out.minority.resize(data.n_min() + syn.size(), data.length());
    out.minority.topRows(data.n_min()) = data.minority;
    out.minority.bottomRows(syn.size()) = syn.samples;
    const std::string tag =
        data.minority_tags.empty() ? std::string("1") : data.minority_tags.front();
    for (Index r = 0; r < syn.size(); ++r)
        out.minority_raw_labels.push_back(tag);
    return out;
}

}  // namespace ohit
