#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Cholesky>

#include "ohit/errors.hpp"
#include "ohit/rng.hpp"
#include "ohit/shrinkage.hpp"
#include "ohit/types.hpp"

namespace ohit {

// Per-cluster synthetic counts: count_i = ceil(eta * |C_i| / n_min). The
// ceiling may overshoot eta by at most the number of clusters.
struct SynthesisPlan {
    std::vector<std::pair<int, long long>> per_cluster;  // (cluster_id, count)
    long long eta_total = 0;
    std::uint64_t seed = 0;

    long long total() const {
        long long t = 0;
        for (const auto& [id, c] : per_cluster) t += c;
        return t;
    }
};

struct SyntheticSet {
    Matrix samples;               // sum(count_i) x d
    std::vector<int> provenance;  // cluster id per row

    Index size() const { return samples.rows(); }
};

inline SynthesisPlan allocate(long long eta,
                              const std::vector<Index>& cluster_sizes,
                              Index n_min, std::uint64_t seed) {
    if (eta < 0) throw ParameterError("eta must be non-negative");
    Index total = 0;
    for (Index s : cluster_sizes) {
        if (s < 1) throw ContractViolation("allocate: cluster of size < 1");
        total += s;
    }
    if (total != n_min)
        throw ContractViolation("allocate: cluster sizes sum to " +
                                std::to_string(total) + ", expected " +
                                std::to_string(n_min));

    SynthesisPlan plan;
    plan.eta_total = eta;
    plan.seed = seed;
    for (std::size_t c = 0; c < cluster_sizes.size(); ++c) {
        const long long num = eta * static_cast<long long>(cluster_sizes[c]);
        const long long count = (num + n_min - 1) / n_min;  // ceil
        plan.per_cluster.emplace_back(static_cast<int>(c) + 1, count);
    }
    return plan;
}

// Draws from N(mu, S_star) as mu + L z with L the Cholesky factor and z a
// fresh standard-normal vector per row. Bit-identical for identical inputs.
inline Matrix sample_gaussian(const Vector& mu, const Matrix& S_star,
                              long long count, std::uint64_t seed) {
    if (count < 0) throw ParameterError("count must be non-negative");
    const Index d = mu.size();

    Matrix out(static_cast<Index>(count), d);
    if (count == 0) return out;

    Eigen::LLT<Matrix> llt(S_star);
    if (llt.info() != Eigen::Success)
        throw NumericalDegeneracyError(
            "sample_gaussian: covariance is not positive definite");
    const Matrix L = llt.matrixL();

    Rng rng(seed);
    Vector z(d);
    for (Index r = 0; r < out.rows(); ++r) {
        for (Index j = 0; j < d; ++j) z(j) = rng.normal();
        out.row(r) = (mu + L * z).transpose();
    }
    return out;
}

// Concatenates per-cluster draws in plan order. Each cluster's stream is
// seeded seed ^ cluster_id, so the result does not depend on the order in
// which clusters are processed.
inline SyntheticSet synthesize(
    const SynthesisPlan& plan,
    const std::vector<std::pair<int, ShrinkageEstimate>>& estimates) {
    for (const auto& [id, count] : plan.per_cluster) {
        (void)count;
        bool found = false;
        for (const auto& [eid, est] : estimates)
            if (eid == id) { found = true; break; }
        if (!found)
            throw ContractViolation("synthesize: no estimate for cluster " +
                                    std::to_string(id));
    }
    if (estimates.size() != plan.per_cluster.size())
        throw ContractViolation("synthesize: plan and estimates cover different clusters");

    Index d = 0;
    for (const auto& [id, est] : estimates) { (void)id; d = est.mu.size(); break; }

    SyntheticSet out;
    out.samples.resize(static_cast<Index>(plan.total()), d);
    Index row = 0;
    for (const auto& [id, count] : plan.per_cluster) {
        const ShrinkageEstimate* est = nullptr;
        for (const auto& [eid, e] : estimates)
            if (eid == id) { est = &e; break; }
        const Matrix draws = sample_gaussian(
            est->mu, est->S_star, count,
            plan.seed ^ static_cast<std::uint64_t>(id));
        out.samples.middleRows(row, draws.rows()) = draws;
        for (Index r = 0; r < draws.rows(); ++r) out.provenance.push_back(id);
        row += draws.rows();
    }
    return out;
}

}  // namespace ohit
