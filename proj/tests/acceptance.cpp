// End-to-end acceptance gate. Each numbered check prints one PASS/FAIL line;
// the process exits nonzero if any check fails. All tolerances are pinned
// here, not configurable.
#include "oslo/bench.hpp"
#include "oslo/diagnostics.hpp"
#include "oslo/episodes.hpp"
#include "oslo/io.hpp"
#include "oslo/metrics.hpp"
#include "oslo/preprocess.hpp"
#include "oslo/rng.hpp"
#include "oslo/solver.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <vector>

using namespace oslo;

namespace {

struct CheckResult {
    int id;
    const char* title;
    bool pass;
    std::string detail;
};

std::vector<CheckResult> g_results;

void report(int id, const char* title, bool pass, std::string detail = "") {
    std::printf("criterion %d (%s): %s%s%s\n", id, title, pass ? "PASS" : "FAIL",
                detail.empty() ? "" : " -- ", detail.c_str());
    g_results.push_back({id, title, pass, std::move(detail)});
    std::fflush(stdout);
}

std::string fmt(const char* format, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
    char buffer[256];
    std::snprintf(buffer, sizeof(buffer), format, a, b, c, d);
    return buffer;
}

// ---------------------------------------------------------------------------
// 1 & 3: monotone ascent and constraint clamps over 1000 solver runs.

void check_monotone_and_clamps() {
    SyntheticSpec synth;
    synth.num_classes = 12;
    synth.dim = 64;
    synth.separation = 3.0;
    synth.samples_per_class = 30;
    synth.rng_seed = 101;
    const Dataset dataset = generate_synthetic_dataset(synth);

    SolverConfig solver;
    bool monotone = true;
    bool clamped = true;
    double worst_drop = 0.0;
    const auto start = std::chrono::steady_clock::now();

    for (int shots : {1, 5}) {
        EpisodeSpec spec;
        spec.n_shots = shots;
        spec.rng_seed = 1000 + static_cast<std::uint64_t>(shots);
        for (std::uint64_t t = 0; t < 500; ++t) {
            const Episode raw = sample_episode(dataset, spec, t);
            const Episode episode = center_normalize_episode(raw, compute_task_center(raw));

            const Eigen::Index n_support = episode.support_features.rows();
            auto observer = [&](const SolverState& state, int cycle) {
                for (Eigen::Index i = 0; i < n_support; ++i) {
                    if (state.inlierness(i) != 1.0) clamped = false;
                    for (Eigen::Index k = 0; k < state.assignments.cols(); ++k) {
                        const double expected = k == episode.support_labels(i) ? 1.0 : 0.0;
                        if (state.assignments(i, k) != expected) clamped = false;
                    }
                }
                for (Eigen::Index i = n_support; i < state.inlierness.size(); ++i) {
                    const double xi = state.inlierness(i);
                    // initialization pins query inlierness to 1; afterwards the
                    // sigmoid keeps it strictly inside (0, 1)
                    if (cycle == 0 ? !(xi > 0.0 && xi <= 1.0) : !(xi > 0.0 && xi < 1.0)) {
                        clamped = false;
                    }
                }
                for (Eigen::Index i = 0; i < state.assignments.rows(); ++i) {
                    if (std::abs(state.assignments.row(i).sum() - 1.0) > 1e-9) clamped = false;
                }
            };

            const SolveResult result = solve(episode, solver, observer);
            for (std::size_t s = 1; s < result.trace.size(); ++s) {
                const double slack = 1e-9 * std::max(1.0, std::abs(result.trace[s - 1]));
                const double drop = result.trace[s - 1] - result.trace[s];
                worst_drop = std::max(worst_drop, drop);
                if (drop > slack) monotone = false;
            }
        }
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    report(1, "monotone ascent over 1000 episodes", monotone && elapsed < 60.0,
           fmt("worst objective drop %.3g, %.1f s", worst_drop, elapsed));
    report(3, "constraint clamps in every iteration", clamped);
}

// ---------------------------------------------------------------------------
// 2: each block update beats a brute-force search of its restricted objective.

double binary_entropy(double x) {
    auto term = [](double p) { return p > 0.0 ? -p * std::log(p) : 0.0; };
    return term(x) + term(1.0 - x);
}

void check_stationarity() {
    Rng rng(2024);
    int violations = 0;
    const int n_states = 200;
    const int k = 3;
    const Eigen::Index dim = 5;
    const int n_shots = 2;
    const Eigen::Index n_query = 8;

    for (int trial = 0; trial < n_states; ++trial) {
        // random episode and a random interior point of the feasible set
        Episode episode;
        episode.n_classes = k;
        episode.support_features = Matrix(k * n_shots, dim);
        episode.support_labels = IntVector(k * n_shots);
        for (int c = 0; c < k; ++c) {
            for (int s = 0; s < n_shots; ++s) {
                Vector v(dim);
                for (Eigen::Index j = 0; j < dim; ++j) v(j) = rng.normal();
                episode.support_features.row(c * n_shots + s) = (v / v.norm()).transpose();
                episode.support_labels(c * n_shots + s) = c;
            }
        }
        episode.query_features = Matrix(n_query, dim);
        episode.ground_truth = IntVector::Zero(n_query);
        for (Eigen::Index q = 0; q < n_query; ++q) {
            Vector v(dim);
            for (Eigen::Index j = 0; j < dim; ++j) v(j) = rng.normal();
            episode.query_features.row(q) = (v / v.norm()).transpose();
        }

        SolverConfig config;
        config.lambda_z = 0.3 + 2.0 * rng.uniform01();
        config.lambda_xi = 0.3 + 2.0 * rng.uniform01();

        const Eigen::Index n_support = k * n_shots;
        const Eigen::Index n_total = n_support + n_query;
        Matrix centroids(k, dim);
        for (int c = 0; c < k; ++c) {
            Vector v(dim);
            for (Eigen::Index j = 0; j < dim; ++j) v(j) = rng.normal();
            centroids.row(c) = (v / v.norm()).transpose();
        }
        Matrix z = Matrix::Zero(n_total, k);
        Vector xi = Vector::Ones(n_total);
        for (Eigen::Index i = 0; i < n_support; ++i) z(i, episode.support_labels(i)) = 1.0;
        for (Eigen::Index i = n_support; i < n_total; ++i) {
            Vector row(k);
            for (int c = 0; c < k; ++c) row(c) = -std::log(std::max(rng.uniform01(), 1e-300));
            z.row(i) = (row / row.sum()).transpose();
            xi(i) = 0.02 + 0.96 * rng.uniform01();
        }
        const SolverState original(centroids, z, xi, episode.support_labels, true);
        const Matrix joint = log_joint_matrix(episode, centroids, config.likelihood_offset);

        // xi block: restriction is f(x) = a x + lambda_xi H_b(x) per query
        {
            SolverState updated = original;
            update_xi(updated, config, episode);
            for (Eigen::Index i = n_support; i < n_total; ++i) {
                const double a = original.assignments.row(i).dot(joint.row(i));
                auto f = [&](double x) { return a * x + config.lambda_xi * binary_entropy(x); };
                const double achieved = f(updated.inlierness(i));
                double best = 0.0;
                const int grid = 100000;
                for (int g = 0; g <= grid; ++g) {
                    best = std::max(best, f(static_cast<double>(g) / grid));
                }
                if (achieved < best - 1e-4) ++violations;
            }
        }

        // z block: restriction is g(z) = xi_i <z, L_i> + lambda_z H(z)
        {
            SolverState updated = original;
            update_z(updated, config, episode);
            for (Eigen::Index i = n_support; i < n_total; ++i) {
                auto g = [&](const Vector& row) {
                    double entropy = 0.0;
                    for (int c = 0; c < k; ++c) {
                        if (row(c) > 0.0) entropy -= row(c) * std::log(row(c));
                    }
                    return original.inlierness(i) * row.dot(joint.row(i).transpose()) +
                           config.lambda_z * entropy;
                };
                const double achieved = g(updated.assignments.row(i).transpose());
                for (int s = 0; s < 10000; ++s) {
                    Vector candidate(k);
                    for (int c = 0; c < k; ++c) {
                        candidate(c) = -std::log(std::max(rng.uniform01(), 1e-300));
                    }
                    candidate /= candidate.sum();
                    if (achieved < g(candidate) - 1e-9) ++violations;
                }
            }
        }

        // centroid block: restriction is h(mu) = -1/2 sum_i w_i ||x_i - mu||^2
        // over the unit sphere
        {
            SolverState updated = original;
            update_centroids(updated, config, episode);
            Matrix all_rows(n_total, dim);
            all_rows << episode.support_features, episode.query_features;
            for (int c = 0; c < k; ++c) {
                auto h = [&](const Vector& mu) {
                    double value = 0.0;
                    for (Eigen::Index i = 0; i < n_total; ++i) {
                        const double w = original.inlierness(i) * original.assignments(i, c);
                        value -= 0.5 * w * (all_rows.row(i).transpose() - mu).squaredNorm();
                    }
                    return value;
                };
                const double achieved = h(updated.centroids.row(c).transpose());
                for (int s = 0; s < 1000; ++s) {
                    Vector v(dim);
                    for (Eigen::Index j = 0; j < dim; ++j) v(j) = rng.normal();
                    if (achieved < h(v / v.norm()) - 1e-9) ++violations;
                }
            }
        }
    }
    report(2, "block updates beat brute-force search", violations == 0,
           fmt("%.0f violations over 200 states", static_cast<double>(violations)));
}

// ---------------------------------------------------------------------------
// 4: metric implementations against exhaustive oracles.

double brute_auroc(const std::vector<double>& scores, const std::vector<bool>& outlier) {
    double won = 0.0, n_out = 0.0, n_in = 0.0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (!outlier[i]) {
            n_in += 1.0;
            continue;
        }
        n_out += 1.0;
        for (std::size_t j = 0; j < scores.size(); ++j) {
            if (outlier[j]) continue;
            if (scores[i] > scores[j]) won += 1.0;
            else if (scores[i] == scores[j]) won += 0.5;
        }
    }
    return won / (n_out * n_in);
}

void brute_pr(const std::vector<double>& scores, const std::vector<bool>& outlier,
              double* out_aupr, double* out_prec090) {
    std::set<double, std::greater<double>> thresholds(scores.begin(), scores.end());
    double total_pos = 0.0;
    for (bool o : outlier) total_pos += o ? 1.0 : 0.0;
    double area = 0.0, prev_recall = 0.0, prec090 = 0.0;
    bool prec_found = false;
    for (double t : thresholds) {
        double tp = 0.0, fp = 0.0;
        for (std::size_t i = 0; i < scores.size(); ++i) {
            if (scores[i] < t) continue;
            (outlier[i] ? tp : fp) += 1.0;
        }
        const double recall = tp / total_pos;
        const double precision = tp / (tp + fp);
        area += (recall - prev_recall) * precision;
        prev_recall = recall;
        if (!prec_found && recall >= 0.9) {
            prec090 = precision;
            prec_found = true;
        }
    }
    *out_aupr = area;
    *out_prec090 = prec_found ? prec090 : 0.0;
}

ScoredQuerySet as_scored(const std::vector<double>& scores, const std::vector<bool>& outlier) {
    ScoredQuerySet scored;
    const Eigen::Index n = static_cast<Eigen::Index>(scores.size());
    scored.outlier_scores = Vector(n);
    scored.hard_labels = IntVector::Zero(n);
    scored.ground_truth = IntVector(n);
    scored.is_outlier = outlier;
    for (Eigen::Index i = 0; i < n; ++i) {
        scored.outlier_scores(i) = scores[static_cast<std::size_t>(i)];
        scored.ground_truth(i) = outlier[static_cast<std::size_t>(i)] ? kOutlierLabel : 0;
    }
    return scored;
}

void check_metric_oracles() {
    Rng rng(404);
    int failures = 0;
    for (int t = 0; t < 1000; ++t) {
        const std::size_t n = 2 + rng.uniform_below(199);
        std::vector<double> scores(n);
        std::vector<bool> outlier(n);
        const bool tie_prone = t % 2 == 0;
        for (std::size_t i = 0; i < n; ++i) {
            scores[i] = tie_prone ? static_cast<double>(rng.uniform_below(10)) / 10.0
                                  : rng.uniform01();
            outlier[i] = rng.uniform_below(2) == 1;
        }
        outlier[0] = false;
        outlier[n - 1] = true;

        const ScoredQuerySet scored = as_scored(scores, outlier);
        double expected_aupr = 0.0, expected_prec = 0.0;
        brute_pr(scores, outlier, &expected_aupr, &expected_prec);
        if (std::abs(auroc(scored) - brute_auroc(scores, outlier)) > 1e-12) ++failures;
        if (std::abs(aupr(scored) - expected_aupr) > 1e-12) ++failures;
        if (std::abs(precision_at_recall(scored, 0.9) - expected_prec) > 1e-12) ++failures;
    }

    // constant-score detector: AUROC 1/2, AUPR and Prec@0.9 the outlier fraction
    std::vector<double> flat(100, 0.7);
    std::vector<bool> outlier(100, false);
    for (std::size_t i = 0; i < 37; ++i) outlier[i] = true;
    const ScoredQuerySet scored = as_scored(flat, outlier);
    if (auroc(scored) != 0.5) ++failures;
    if (std::abs(aupr(scored) - 0.37) > 1e-12) ++failures;
    if (std::abs(precision_at_recall(scored, 0.9) - 0.37) > 1e-12) ++failures;

    report(4, "metric oracles on 1000 random score sets", failures == 0,
           fmt("%.0f mismatches", static_cast<double>(failures)));
}

// ---------------------------------------------------------------------------
// 5: MIF identity and behavior under label shuffling.

void check_mif() {
    // Raw Gaussian clusters rather than sphere-projected ones: the wide O(1)
    // spread of distances keeps the centroid-fitting bias of random label
    // groups negligible, so shuffled labels land near MIF 1/2.
    const Eigen::Index dim = 16;
    Rng gen(500);
    Dataset dataset;
    dataset.dim = dim;
    for (int c = 0; c < 20; ++c) {
        Vector direction(dim);
        for (Eigen::Index j = 0; j < dim; ++j) direction(j) = gen.normal();
        direction.normalize();
        for (int s = 0; s < 100; ++s) {
            Vector v(dim);
            for (Eigen::Index j = 0; j < dim; ++j) v(j) = 4.0 * direction(j) + gen.normal();
            dataset.records.push_back(
                {"m_c" + std::to_string(c) + "_" + std::to_string(s), c, v});
        }
    }

    const auto centroids = class_centroids(dataset);
    double auroc_sum = 0.0;
    for (const auto& [label, mu] : centroids) {
        std::vector<double> scores;
        std::vector<bool> outsider;
        for (const auto& rec : dataset.records) {
            scores.push_back((rec.features - mu).norm());
            outsider.push_back(rec.class_label != label);
        }
        auroc_sum += brute_auroc(scores, outsider);
    }
    const double macro_auroc = auroc_sum / static_cast<double>(centroids.size());
    const double mif = mean_imposture_factor(dataset);
    const double identity_gap = std::abs(mif - (1.0 - macro_auroc));

    Rng rng(505);
    double lo = 1.0, hi = 0.0;
    for (int t = 0; t < 50; ++t) {
        Dataset shuffled = dataset;
        std::vector<int> labels;
        labels.reserve(shuffled.records.size());
        for (const auto& rec : shuffled.records) labels.push_back(rec.class_label);
        rng.shuffle(labels);
        for (std::size_t i = 0; i < labels.size(); ++i) shuffled.records[i].class_label = labels[i];
        const double value = mean_imposture_factor(shuffled);
        lo = std::min(lo, value);
        hi = std::max(hi, value);
    }
    const bool pass = identity_gap < 1e-9 && lo >= 0.45 && hi <= 0.55;
    report(5, "MIF identity and shuffle band", pass,
           fmt("identity gap %.2g, shuffled MIF in [%.3f, %.3f]", identity_gap, lo, hi));
}

// ---------------------------------------------------------------------------
// Shared fixture for the trend checks: synthetic features where the strong
// baseline lands near AUROC 0.75, plus a class-disjoint base split for
// inductive centering.

FeatureSet trend_features() {
    SyntheticSpec test_spec;
    test_spec.num_classes = 20;
    test_spec.dim = 64;
    test_spec.separation = 4.2;
    test_spec.samples_per_class = 50;
    test_spec.rng_seed = 11;

    SyntheticSpec base_spec = test_spec;
    base_spec.num_classes = 8;
    base_spec.rng_seed = splitmix64(11 ^ 0xB5A5ULL);

    FeatureSet set;
    set.test = generate_synthetic_dataset(test_spec, Split::test);
    set.base = generate_synthetic_dataset(base_spec, Split::base, test_spec.num_classes, "b");
    set.dim = test_spec.dim;
    set.validation.dim = set.dim;
    return set;
}

SolverConfig trend_solver() {
    SolverConfig solver;
    solver.lambda_z = 0.5;
    solver.lambda_xi = 3.0;
    return solver;
}

void check_ablation_trends(const FeatureSet& data) {
    BenchConfig config;
    config.episode.rng_seed = 777;
    config.solver = trend_solver();
    config.methods = {Method::oslo, Method::oslo_no_xi, Method::strong_baseline};
    config.n_tasks = 500;
    const BenchResult converged = run_benchmark(config, data);

    BenchConfig init_config = config;
    init_config.methods = {Method::oslo};
    init_config.solver.max_iters = 0;
    const BenchResult at_init = run_benchmark(init_config, data);

    const double strong = converged.summary.at(Method::strong_baseline).auroc.mean;
    const double oslo_auroc = converged.summary.at(Method::oslo).auroc.mean;
    const double oslo_acc = converged.summary.at(Method::oslo).acc->mean;
    const double ablated = converged.summary.at(Method::oslo_no_xi).auroc.mean;
    const double init_auroc = at_init.summary.at(Method::oslo).auroc.mean;
    const double init_acc = at_init.summary.at(Method::oslo).acc->mean;

    const bool calibrated = strong >= 0.70 && strong <= 0.80;
    const bool leverage = oslo_auroc >= ablated + 0.02;
    const bool optimization_helps = oslo_auroc > init_auroc && oslo_acc > init_acc;
    report(6, "ablation trends over 500 episodes", calibrated && leverage && optimization_helps,
           fmt("strong %.3f, oslo %.3f vs ablation %.3f, init auroc %.3f", strong, oslo_auroc,
               ablated, init_auroc));
}

void check_query_sweep(const FeatureSet& data) {
    const std::vector<int> sweep = {1, 5, 15, 30};
    std::vector<double> oslo_auroc, knn_auroc;
    for (int q : sweep) {
        BenchConfig config;
        config.episode.rng_seed = 888;
        config.episode.n_query_per_class = q;
        config.solver = trend_solver();
        config.methods = {Method::oslo, Method::knn};
        config.n_tasks = 300;
        const BenchResult result = run_benchmark(config, data);
        oslo_auroc.push_back(result.summary.at(Method::oslo).auroc.mean);
        knn_auroc.push_back(result.summary.at(Method::knn).auroc.mean);
    }

    bool non_decreasing = true;
    for (std::size_t i = 1; i < oslo_auroc.size(); ++i) {
        if (oslo_auroc[i] < oslo_auroc[i - 1] - 0.01) non_decreasing = false;
    }
    double knn_lo = 1.0, knn_hi = 0.0;
    for (double v : knn_auroc) {
        knn_lo = std::min(knn_lo, v);
        knn_hi = std::max(knn_hi, v);
    }
    const bool knn_flat = knn_hi - knn_lo <= 0.03;

    // exact inductive independence: the knn score of a fixed query is
    // untouched by dropping other queries
    EpisodeSpec spec;
    spec.n_query_per_class = 30;
    spec.rng_seed = 888;
    const Episode raw = sample_episode(data.test, spec, 0);
    const Vector base_center = compute_base_center(data.base);
    const Episode centered = center_normalize_episode(raw, base_center);
    const Vector full_scores = knn_outlier_score(centered, KnnConfig{});
    bool exact = true;
    for (Eigen::Index keep : {1, 17, 150}) {
        Episode truncated = centered;
        truncated.query_features = centered.query_features.topRows(keep);
        truncated.ground_truth = centered.ground_truth.head(keep);
        const Vector partial = knn_outlier_score(truncated, KnnConfig{});
        for (Eigen::Index i = 0; i < keep; ++i) {
            if (partial(i) != full_scores(i)) exact = false;
        }
    }

    report(7, "query-size sweep trends", non_decreasing && knn_flat && exact,
           fmt("oslo auroc %.3f -> %.3f -> %.3f -> %.3f", oslo_auroc[0], oslo_auroc[1],
               oslo_auroc[2], oslo_auroc[3]) +
               fmt(", knn spread %.3f", knn_hi - knn_lo));
}

// ---------------------------------------------------------------------------
// 8: protocol fidelity through the documented file format.

void check_protocol(const FeatureSet& data) {
    const auto path = std::filesystem::temp_directory_path() / "oslo_acceptance_features.jsonl";
    save_features(path.string(), {&data.base, &data.test});
    const FeatureSet loaded = load_features(path.string());
    std::filesystem::remove(path);

    EpisodeSpec spec;  // 5-way, 1-shot, 15 queries/class, 5 open classes
    spec.rng_seed = 999;
    bool pass = true;
    for (std::uint64_t t = 0; t < 1000 && pass; ++t) {
        const Episode e = sample_episode(loaded.test, spec, t);
        try {
            audit_episode(e, spec);
        } catch (const std::exception&) {
            pass = false;
            break;
        }
        Eigen::Index inliers = 0, outliers = 0;
        for (Eigen::Index i = 0; i < e.ground_truth.size(); ++i) {
            (e.ground_truth(i) == kOutlierLabel ? outliers : inliers) += 1;
        }
        if (inliers != 75 || outliers != 75) pass = false;
    }

    // the benchmark path audits every sampled task as well
    BenchConfig config;
    config.episode = spec;
    config.methods = {Method::knn};
    config.centering_override = CenteringKind::task;
    config.n_tasks = 1000;
    config.n_workers = 4;
    const BenchResult result = run_benchmark(config, loaded);
    if (result.rows.size() != 1000) pass = false;

    report(8, "protocol fidelity over 1000 audited tasks", pass);
}

// ---------------------------------------------------------------------------
// 9: determinism across worker-pool widths.

std::vector<std::string> deterministic_fields(const std::vector<ResultRow>& rows) {
    std::vector<std::string> out;
    for (const auto& row : rows) {
        const std::string s = format_row(row);
        out.push_back(s.substr(0, s.rfind(',')));  // wall time is the only timing field
    }
    return out;
}

void check_determinism(const FeatureSet& data) {
    BenchConfig config;
    config.episode.rng_seed = 321;
    config.solver = trend_solver();
    config.methods = {Method::oslo, Method::strong_baseline, Method::knn};
    config.n_tasks = 50;

    std::vector<std::vector<std::string>> outputs;
    for (int workers : {1, 4, 7, 1}) {
        config.n_workers = workers;
        outputs.push_back(deterministic_fields(run_benchmark(config, data).rows));
    }
    bool pass = true;
    for (std::size_t i = 1; i < outputs.size(); ++i) {
        if (outputs[i] != outputs[0]) pass = false;
    }
    report(9, "byte-identical rows at any worker width", pass);
}

}  // namespace

int main() {
    check_monotone_and_clamps();
    check_stationarity();
    check_metric_oracles();
    check_mif();

    const FeatureSet trend = trend_features();
    check_ablation_trends(trend);
    check_query_sweep(trend);
    check_protocol(trend);
    check_determinism(trend);

    int failed = 0;
    for (const auto& result : g_results) failed += result.pass ? 0 : 1;
    std::printf("%zu checks, %d failed\n", g_results.size(), failed);
    return failed == 0 ? 0 : 1;
}
