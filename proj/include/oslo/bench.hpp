#pragma once

#include "oslo/baselines.hpp"
#include "oslo/io.hpp"
#include "oslo/metrics.hpp"
#include "oslo/preprocess.hpp"
#include "oslo/types.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace oslo {

enum class Method { oslo, oslo_no_xi, simpleshot_maxprob, knn, strong_baseline };

Method method_from_string(const std::string& name);
const char* to_string(Method method);

/// Transductive methods receive task centering, inductive ones base centering.
bool is_transductive(Method method);

/// Pure detectors carry no classifier, so their rows have no accuracy.
bool has_classifier(Method method);

struct BenchConfig {
    EpisodeSpec episode;
    std::vector<Method> methods{Method::oslo};
    SolverConfig solver;
    KnnConfig knn;
    int n_tasks = 1000;
    std::optional<CenteringKind> centering_override;
    std::string output_path;  // empty: keep results in memory only
    int n_workers = 1;

    void validate() const;
};

struct ResultRow {
    int task_index = 0;
    Method method = Method::oslo;
    std::optional<double> acc;
    double auroc = 0.0;
    double aupr = 0.0;
    double prec_at_090 = 0.0;
    double wall_time_ms = 0.0;
};

struct BenchResult {
    std::vector<ResultRow> rows;
    std::map<Method, AggregateSummary> summary;
};

/// Runs one method on an already centered episode.
PredictionResult run_method(Method method, const Episode& centered,
                            const SolverConfig& solver, const KnnConfig& knn);

inline constexpr const char* kResultHeader =
    "task_index,method,acc,auroc,aupr,prec_at_090,wall_time_ms";

/// CSV row matching kResultHeader. Every field except wall_time_ms is
/// deterministic for fixed inputs and seed.
std::string format_row(const ResultRow& row);

/// Samples n_tasks episodes from the test split, audits their composition,
/// applies per-method centering, runs every configured method and scores it.
/// Rows are written to output_path incrementally in task order (so an
/// interrupted run leaves a parseable prefix) and a JSON summary with mean
/// and 95% CI per metric lands next to it. Tasks run on n_workers threads;
/// output is identical at any width.
BenchResult run_benchmark(const BenchConfig& config, const FeatureSet& data);

}  // namespace oslo
