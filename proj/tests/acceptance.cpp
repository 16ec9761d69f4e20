// Acceptance suite: runs each release criterion at its stated tolerance and
// prints one pass/fail line per criterion. Exits nonzero on any failure.

#include <cmath>
#include <cstdint>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ohit/ohit.hpp"
#include "oracles.hpp"

using namespace ohit;

namespace {

int g_failures = 0;

void report(int id, const std::string& name, bool pass, const std::string& detail) {
    std::cout << (pass ? "[PASS]" : "[FAIL]") << " criterion " << id << ": "
              << name;
    if (!detail.empty()) std::cout << " (" << detail << ")";
    std::cout << '\n';
    if (!pass) ++g_failures;
}

// --- criterion 1: metric arithmetic against published table values ---------
void criterion_metric_arithmetic() {
    bool pass = true;
    std::ostringstream detail;

    const double g = gmean_score(0.771, 0.796);
    const double f = f1_score(0.561, 0.771);
    const double f_smote = f1_score(0.505, 0.868);
    pass &= std::abs(g - 0.783) <= 0.001;
    pass &= std::abs(f - 0.649) <= 0.001;
    pass &= std::abs(f_smote - 0.638) <= 0.001;
    detail << "gmean(.771,.796)=" << g << " f1(.561,.771)=" << f
           << " f1(.505,.868)=" << f_smote;
    report(1, "metric arithmetic", pass, detail.str());
}

// --- criterion 2: exact Wilcoxon p-values at n=12 ---------------------------
void criterion_wilcoxon_exact() {
    std::vector<double> a, b;
    for (int i = 1; i <= 12; ++i) {
        a.push_back(static_cast<double>(i));
        b.push_back(0.0);
    }
    const double p_all = wilcoxon_signed_rank(a, b);
    const double p_all_oracle = oracle::brute_wilcoxon_exact(a, b);

    b[0] = 2.0;  // rank-1 difference flipped negative
    const double p_one = wilcoxon_signed_rank(a, b);
    const double p_one_oracle = oracle::brute_wilcoxon_exact(a, b);

    const bool pass = p_all == 2.0 / 4096.0 && p_all == p_all_oracle &&
                      p_one == 4.0 / 4096.0 && p_one == p_one_oracle;
    std::ostringstream detail;
    detail << "all-positive p=" << p_all << ", rank-1 negative p=" << p_one;
    report(2, "Wilcoxon exactness", pass, detail.str());
}

// --- criterion 3: shrinkage matches the verbatim-formula oracle -------------
void criterion_shrinkage_oracle() {
    bool pass = true;
    Rng rng(42);
    double worst_lambda = 0.0, worst_entry = 0.0;

    for (int trial = 0; trial < 100; ++trial) {
        const Index n = 2 + static_cast<Index>(rng.below(19));
        const Index d = 2 + static_cast<Index>(rng.below(59));
        Matrix C(n, d);
        for (Index i = 0; i < n; ++i)
            for (Index j = 0; j < d; ++j) C(i, j) = rng.normal();

        const auto [mu, S] = sample_moments(C);
        const double lambda = shrinkage_intensity(C);
        const Matrix S_star = shrink_covariance(S, lambda);

        const double l_oracle = oracle::brute_lambda(C);
        const Matrix S_oracle = oracle::brute_covariance(C);
        worst_lambda = std::max(worst_lambda, std::abs(lambda - l_oracle));
        pass &= std::abs(lambda - l_oracle) <= 1e-10;
        pass &= lambda >= 0.0 && lambda <= 1.0;
        pass &= is_exactly_symmetric(S_star);
        for (Index i = 0; i < d && pass; ++i) {
            if (S_star(i, i) != S(i, i)) pass = false;
            for (Index j = 0; j < d; ++j) {
                const double expected =
                    i == j ? S_oracle(i, j) : (1.0 - l_oracle) * S_oracle(i, j);
                worst_entry = std::max(worst_entry, std::abs(S_star(i, j) - expected));
                if (std::abs(S_star(i, j) - expected) > 1e-10) pass = false;
            }
        }
    }

    // strict positive definiteness at n=5, d=50 whenever lambda > 0
    for (int trial = 0; trial < 10; ++trial) {
        Matrix C(5, 50);
        for (Index i = 0; i < 5; ++i)
            for (Index j = 0; j < 50; ++j) C(i, j) = rng.normal();
        const auto S = sample_moments(C).second;
        const double lambda = shrinkage_intensity(C);
        if (lambda > 0.0)
            pass &= oracle::min_eigenvalue(shrink_covariance(S, lambda)) > 0.0;
    }

    std::ostringstream detail;
    detail << "max |lambda - oracle| = " << worst_lambda
           << ", max |S* - oracle| = " << worst_entry;
    report(3, "shrinkage oracle equivalence", pass, detail.str());
}

// --- criterion 4: structure preservation of the sampler ---------------------
void criterion_structure_preservation() {
    const Index d = 20;
    // fixed target: two blocks of strong correlation, unit variances
    Matrix S_star = Matrix::Identity(d, d);
    for (Index i = 0; i < d; ++i)
        for (Index j = 0; j < d; ++j)
            if (i != j && (i / 10) == (j / 10)) S_star(i, j) = 0.6;
    Vector mu(d);
    for (Index j = 0; j < d; ++j)
        mu(j) = -1.0 + 2.0 * static_cast<double>(j) / static_cast<double>(d - 1);

    const long long count = 200000;
    const Matrix out = sample_gaussian(mu, S_star, count, 271828);

    const Vector mean = out.colwise().mean().transpose();
    bool pass = true;
    double worst_mu = 0.0;
    for (Index j = 0; j < d; ++j) {
        worst_mu = std::max(worst_mu, std::abs(mean(j) - mu(j)));
        pass &= std::abs(mean(j) - mu(j)) <= 0.02;
    }

    const Matrix centered = out.rowwise() - mean.transpose();
    const Matrix cov = centered.transpose() * centered / double(count - 1);
    const double floor = 0.05 * S_star.cwiseAbs().maxCoeff();
    double worst_rel = 0.0;
    for (Index i = 0; i < d; ++i)
        for (Index j = 0; j < d; ++j) {
            if (std::abs(S_star(i, j)) <= floor) continue;
            const double rel = std::abs(cov(i, j) - S_star(i, j)) / std::abs(S_star(i, j));
            worst_rel = std::max(worst_rel, rel);
            pass &= rel <= 0.05;
        }

    std::ostringstream detail;
    detail << "max |mean - mu| = " << worst_mu
           << ", max relative covariance error = " << worst_rel;
    report(4, "structure preservation", pass, detail.str());
}

// --- criterion 5: DRSNN mode discovery with defaults ------------------------
void criterion_mode_discovery() {
    bool pass = true;
    std::ostringstream detail;
    int exact = 0;

    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        std::vector<int> truth2;
        const Matrix X2 =
            oracle::planted_blobs({20, 30}, 50, 10.0, 0.5, 9000 + seed, &truth2);
        const auto lab2 = drsnn(X2);
        const bool ok2 = lab2.num_clusters == 2 &&
                         oracle::adjusted_rand_index(truth2, lab2.assignment) == 1.0;

        std::vector<int> truth3;
        const Matrix X3 = oracle::planted_blobs({20, 40, 25}, 50, 10.0, 0.5,
                                                9100 + seed, &truth3);
        const auto lab3 = drsnn(X3);
        const bool ok3 = lab3.num_clusters == 3 &&
                         oracle::adjusted_rand_index(truth3, lab3.assignment) == 1.0;

        if (ok2 && ok3) ++exact;
        pass &= ok2 && ok3;
    }
    detail << exact << "/10 seeds exact";

    // permutation invariance: reversed rows give the same partition
    std::vector<int> truth;
    const Matrix X = oracle::planted_blobs({20, 25}, 50, 10.0, 0.5, 555, &truth);
    const auto lab = drsnn(X);
    Matrix rev(X.rows(), X.cols());
    for (Index i = 0; i < X.rows(); ++i) rev.row(i) = X.row(X.rows() - 1 - i);
    const auto lab_rev = drsnn(rev);
    std::vector<int> unshuffled(lab_rev.assignment.rbegin(), lab_rev.assignment.rend());
    const bool perm_ok = oracle::adjusted_rand_index(lab.assignment, unshuffled) == 1.0;
    pass &= perm_ok;

    // positive scaling leaves the labeling exactly unchanged
    const auto lab_scaled = drsnn(Matrix(17.0 * X));
    const bool scale_ok = lab.assignment == lab_scaled.assignment;
    pass &= scale_ok;
    detail << ", permutation " << (perm_ok ? "exact" : "BROKEN") << ", scaling "
           << (scale_ok ? "exact" : "BROKEN");

    report(5, "mode discovery", pass, detail.str());
}

// --- criterion 6: end-to-end gain on an IR-10 multimodal benchmark ----------
struct E2EInstance {
    BinaryDataset train;
    BinaryDataset test;
};

// Three minority modes buried inside a broader correlated majority cloud:
// minority recall under plain 5-NN is poor until the classes are balanced.
E2EInstance make_e2e_instance(std::uint64_t seed) {
    const Index d = 100;
    Rng rng(seed);

    // smooth series-like correlation, built once per instance
    Matrix corr(d, d);
    for (Index i = 0; i < d; ++i)
        for (Index j = 0; j < d; ++j)
            corr(i, j) = std::exp(-std::abs(static_cast<double>(i - j)) / 8.0);
    const Matrix L = Eigen::LLT<Matrix>(corr).matrixL();

    std::vector<Vector> centers;
    for (int m = 0; m < 3; ++m) {
        Vector dir(d);
        for (Index j = 0; j < d; ++j) dir(j) = rng.normal();
        centers.push_back(3.0 * dir / dir.norm());
    }

    const auto draw = [&](const Vector& center, double scale) {
        Vector z(d);
        for (Index j = 0; j < d; ++j) z(j) = rng.normal();
        return Vector(center + scale * (L * z));
    };

    const auto fill_minority = [&](Index per_mode) {
        Matrix M(3 * per_mode, d);
        for (int m = 0; m < 3; ++m)
            for (Index i = 0; i < per_mode; ++i)
                M.row(m * per_mode + i) = draw(centers[static_cast<std::size_t>(m)], 1.0).transpose();
        return M;
    };
    const auto fill_majority = [&](Index n) {
        Matrix M(n, d);
        const Vector origin = Vector::Zero(d);
        for (Index i = 0; i < n; ++i) M.row(i) = draw(origin, 1.2).transpose();
        return M;
    };

    E2EInstance inst;
    inst.train.minority = fill_minority(10);   // 30 minority
    inst.train.majority = fill_majority(300);  // IR 10
    inst.train.minority_tags = {"1"};
    inst.test.minority = fill_minority(10);
    inst.test.majority = fill_majority(300);
    inst.test.minority_tags = {"1"};
    return inst;
}

double gmean_of(const BinaryDataset& train, const BinaryDataset& test) {
    const auto sp = knn_classify(train, test, 5);
    return metrics(confusion(sp)).gmean;
}

void criterion_end_to_end() {
    int wins = 0;
    double sum_none = 0.0, sum_full = 0.0;
    struct Tally {
        double f1 = 0, gmean = 0, auc_v = 0;
    };
    Tally full_tally, no_drsnn_tally, no_shrinkage_tally;

    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto inst = make_e2e_instance(7000 + seed);

        const double g_none = gmean_of(inst.train, inst.test);

        const auto eval_mode = [&](OhitMode mode, Tally& tally) {
            OhitConfig cfg;
            cfg.seed = seed;
            cfg.mode = mode;
            const auto resampled = resample_dataset(inst.train, cfg);
            const auto sp = knn_classify(resampled, inst.test, 5);
            const auto m = metrics(confusion(sp));
            tally.f1 += std::isnan(m.f1) ? 0.0 : m.f1;
            tally.gmean += m.gmean;
            tally.auc_v += auc(sp);
            return m.gmean;
        };

        const double g_full = eval_mode(OhitMode::full, full_tally);
        eval_mode(OhitMode::no_drsnn, no_drsnn_tally);
        eval_mode(OhitMode::no_shrinkage, no_shrinkage_tally);

        sum_none += g_none;
        sum_full += g_full;
        if (g_full > g_none) ++wins;
    }

    const bool pass = wins >= 9;
    std::ostringstream detail;
    detail << wins << "/10 seeds improved; mean G-mean none=" << sum_none / 10.0
           << " full=" << sum_full / 10.0;
    report(6, "end-to-end behavior", pass, detail.str());

    // variant averages over the same runs, one row per mode
    std::cout << "    variant averages (F1 / G-mean / AUC over 10 seeds):\n";
    const auto row = [](const std::string& name, const Tally& t) {
        std::cout << "      " << name << ": " << t.f1 / 10.0 << " / "
                  << t.gmean / 10.0 << " / " << t.auc_v / 10.0 << '\n';
    };
    row("ohit", full_tally);
    row("ohit:no_drsnn", no_drsnn_tally);
    row("ohit:no_shrinkage", no_shrinkage_tally);
}

// --- criterion 7: balance contract ------------------------------------------
void criterion_balance_contract() {
    bool pass = true;
    std::ostringstream detail;
    Rng rng(99);

    const auto check_shape = [&](Index n_min, Index n_maj, Index d) {
        BinaryDataset data;
        data.minority.resize(n_min, d);
        data.majority.resize(n_maj, d);
        for (Index i = 0; i < n_min; ++i)
            for (Index j = 0; j < d; ++j) data.minority(i, j) = rng.normal();
        for (Index i = 0; i < n_maj; ++i)
            for (Index j = 0; j < d; ++j) data.majority(i, j) = 2.0 + rng.normal();
        data.minority_tags = {"1"};
        for (Index i = 0; i < n_min; ++i) data.minority_raw_labels.push_back("1");
        for (Index i = 0; i < n_maj; ++i) data.majority_raw_labels.push_back("0");

        OhitConfig cfg;
        cfg.seed = 17;
        const auto run = ohit_run(data, cfg);
        const auto resampled = resample_dataset(data, cfg);
        const bool ok = resampled.n_min() >= n_maj &&
                        resampled.n_min() <= n_maj + run.labeling.num_clusters;
        if (!ok)
            detail << " [" << n_min << "/" << n_maj << " -> " << resampled.n_min()
                   << " outside bound]";
        return ok;
    };

    pass &= check_shape(97, 903, 12);
    pass &= check_shape(31, 69, 20);
    pass &= check_shape(10, 40, 8);
    pass &= check_shape(5, 80, 30);
    if (pass) detail << "minority count within [n_maj, n_maj + m] on all shapes";
    report(7, "balance contract", pass, detail.str());
}

}  // namespace

int main() {
    criterion_metric_arithmetic();
    criterion_wilcoxon_exact();
    criterion_shrinkage_oracle();
    criterion_structure_preservation();
    criterion_mode_discovery();
    criterion_end_to_end();
    criterion_balance_contract();

    if (g_failures == 0) {
        std::cout << "all acceptance criteria passed\n";
        return 0;
    }
    std::cout << g_failures << " criteria failed\n";
    return 1;
}
