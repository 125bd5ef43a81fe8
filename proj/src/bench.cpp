#include "oslo/bench.hpp"

#include "oslo/episodes.hpp"
#include "oslo/solver.hpp"

#include <nlohmann/json.hpp>

#include <atomic>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace oslo {

using nlohmann::json;

Method method_from_string(const std::string& name) {
    if (name == "oslo") return Method::oslo;
    if (name == "oslo_no_xi") return Method::oslo_no_xi;
    if (name == "simpleshot_maxprob") return Method::simpleshot_maxprob;
    if (name == "knn") return Method::knn;
    if (name == "strong_baseline") return Method::strong_baseline;
    throw std::invalid_argument("unknown method: " + name);
}

const char* to_string(Method method) {
    switch (method) {
        case Method::oslo: return "oslo";
        case Method::oslo_no_xi: return "oslo_no_xi";
        case Method::simpleshot_maxprob: return "simpleshot_maxprob";
        case Method::knn: return "knn";
        case Method::strong_baseline: return "strong_baseline";
    }
    return "?";
}

bool is_transductive(Method method) {
    return method == Method::oslo || method == Method::oslo_no_xi;
}

bool has_classifier(Method method) { return method != Method::knn; }

void BenchConfig::validate() const {
    episode.validate();
    solver.validate();
    if (methods.empty()) throw std::invalid_argument("BenchConfig: method list is empty");
    if (n_tasks < 1) throw std::invalid_argument("BenchConfig: n_tasks must be >= 1");
    if (n_workers < 1) throw std::invalid_argument("BenchConfig: n_workers must be >= 1");
}

PredictionResult run_method(Method method, const Episode& centered,
                            const SolverConfig& solver, const KnnConfig& knn) {
    switch (method) {
        case Method::oslo:
            return solve(centered, solver).prediction;
        case Method::oslo_no_xi: {
            SolverConfig ablated = solver;
            ablated.fix_xi_to_one = true;
            return solve(centered, ablated).prediction;
        }
        case Method::simpleshot_maxprob: {
            PredictionResult result;
            result.class_posteriors = nearest_centroid_classify(centered);
            result.outlierness = max_prob_outlierness(result.class_posteriors);
            result.hard_labels = hard_labels_from_posteriors(result.class_posteriors);
            return result;
        }
        case Method::knn: {
            PredictionResult result;
            Vector raw = knn_outlier_score(centered, knn);
            const double max_score = raw.maxCoeff();
            result.outlierness = max_score > 0.0 ? Vector(raw / max_score) : raw;
            result.class_posteriors = Matrix::Constant(centered.query_features.rows(),
                                                       centered.n_classes,
                                                       1.0 / centered.n_classes);
            result.hard_labels = hard_labels_from_posteriors(result.class_posteriors);
            return result;
        }
        case Method::strong_baseline:
            return strong_baseline(centered, knn);
    }
    throw std::logic_error("run_method: unreachable");
}

std::string format_row(const ResultRow& row) {
    char metrics[160];
    char acc[32] = "";
    if (row.acc.has_value()) std::snprintf(acc, sizeof(acc), "%.17g", *row.acc);
    std::snprintf(metrics, sizeof(metrics), "%d,%s,%s,%.17g,%.17g,%.17g,%.3f",
                  row.task_index, to_string(row.method), acc, row.auroc, row.aupr,
                  row.prec_at_090, row.wall_time_ms);
    return metrics;
}

namespace {

json summary_to_json(const AggregateSummary& summary) {
    auto entry = [](const MetricSummary& m) {
        return json{{"mean", m.mean}, {"ci95", m.ci95_half_width}};
    };
    json obj;
    obj["acc"] = summary.acc ? entry(*summary.acc) : json(nullptr);
    obj["auroc"] = entry(summary.auroc);
    obj["aupr"] = entry(summary.aupr);
    obj["prec_at_090"] = entry(summary.prec_at_090);
    return obj;
}

}  // namespace

BenchResult run_benchmark(const BenchConfig& config, const FeatureSet& data) {
    config.validate();
    const auto violations = validate_dataset(data.test);
    if (!violations.empty()) {
        throw std::runtime_error("test split fails validation: " + violations.front());
    }

    // Base centering needs the base split; compute the center once up front.
    std::optional<Vector> base_center;
    const bool needs_base = [&] {
        if (config.centering_override == CenteringKind::task) return false;
        if (config.centering_override == CenteringKind::base) return true;
        for (Method m : config.methods) {
            if (!is_transductive(m)) return true;
        }
        return false;
    }();
    if (needs_base) {
        if (data.base.records.empty()) {
            throw std::runtime_error("base centering requested but the base split is empty");
        }
        base_center = compute_base_center(data.base);
    }

    const std::size_t n_methods = config.methods.size();
    std::vector<std::vector<ResultRow>> per_task(static_cast<std::size_t>(config.n_tasks));
    std::vector<bool> done(static_cast<std::size_t>(config.n_tasks), false);

    std::ofstream out;
    if (!config.output_path.empty()) {
        out.open(config.output_path);
        if (!out) throw std::runtime_error("cannot open results file: " + config.output_path);
        out << kResultHeader << '\n';
        out.flush();
    }

    std::mutex mutex;
    int flush_frontier = 0;
    std::atomic<int> next_task{0};
    std::exception_ptr failure;

    auto worker = [&] {
        for (;;) {
            const int t = next_task.fetch_add(1);
            if (t >= config.n_tasks) return;
            try {
                const Episode episode = sample_episode_any(data.test, config.episode,
                                                           static_cast<std::uint64_t>(t));
                audit_episode(episode, config.episode);

                std::vector<ResultRow> rows;
                rows.reserve(n_methods);
                for (Method method : config.methods) {
                    const CenteringKind kind = config.centering_override.value_or(
                        is_transductive(method) ? CenteringKind::task : CenteringKind::base);
                    const Vector center = kind == CenteringKind::task
                                              ? compute_task_center(episode)
                                              : *base_center;
                    const auto start = std::chrono::steady_clock::now();
                    const Episode centered = center_normalize_episode(episode, center);
                    const PredictionResult prediction =
                        run_method(method, centered, config.solver, config.knn);
                    const auto stop = std::chrono::steady_clock::now();

                    const MetricsReport report =
                        score_episode(prediction, episode.ground_truth, has_classifier(method));
                    ResultRow row;
                    row.task_index = t;
                    row.method = method;
                    row.acc = report.acc;
                    row.auroc = report.auroc;
                    row.aupr = report.aupr;
                    row.prec_at_090 = report.prec_at_090;
                    row.wall_time_ms =
                        std::chrono::duration<double, std::milli>(stop - start).count();
                    rows.push_back(row);
                }

                std::lock_guard<std::mutex> lock(mutex);
                per_task[static_cast<std::size_t>(t)] = std::move(rows);
                done[static_cast<std::size_t>(t)] = true;
                while (flush_frontier < config.n_tasks &&
                       done[static_cast<std::size_t>(flush_frontier)]) {
                    if (out.is_open()) {
                        for (const auto& row : per_task[static_cast<std::size_t>(flush_frontier)]) {
                            out << format_row(row) << '\n';
                        }
                        out.flush();
                    }
                    ++flush_frontier;
                }
            } catch (...) {
                std::lock_guard<std::mutex> lock(mutex);
                if (!failure) failure = std::current_exception();
                next_task.store(config.n_tasks);
                return;
            }
        }
    };

    if (config.n_workers == 1) {
        worker();
    } else {
        std::vector<std::thread> threads;
        for (int w = 0; w < config.n_workers; ++w) threads.emplace_back(worker);
        for (auto& t : threads) t.join();
    }
    if (failure) {
        try {
            std::rethrow_exception(failure);
        } catch (const std::exception& e) {
            throw std::runtime_error(std::string("benchmark task failed: ") + e.what());
        }
    }

    BenchResult result;
    result.rows.reserve(static_cast<std::size_t>(config.n_tasks) * n_methods);
    std::map<Method, std::vector<MetricsReport>> per_method;
    for (const auto& rows : per_task) {
        for (const auto& row : rows) {
            result.rows.push_back(row);
            per_method[row.method].push_back(
                MetricsReport{row.acc, row.auroc, row.aupr, row.prec_at_090});
        }
    }
    if (config.n_tasks >= 2) {
        for (const auto& [method, reports] : per_method) {
            result.summary[method] = aggregate(reports);
        }
    }

    if (!config.output_path.empty()) {
        json obj;
        obj["n_tasks"] = config.n_tasks;
        obj["seed"] = config.episode.rng_seed;
        json methods_json;
        for (const auto& [method, summary] : result.summary) {
            methods_json[to_string(method)] = summary_to_json(summary);
        }
        obj["methods"] = std::move(methods_json);
        std::ofstream summary_out(config.output_path + ".summary.json");
        if (!summary_out) {
            throw std::runtime_error("cannot open summary file: " + config.output_path + ".summary.json");
        }
        summary_out << obj.dump(2) << '\n';
    }
    return result;
}

}  // namespace oslo
