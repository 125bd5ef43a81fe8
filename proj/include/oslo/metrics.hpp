#pragma once

#include "oslo/types.hpp"

#include <vector>

namespace oslo {

/// Per-query detector output alongside hidden ground truth, ready to score.
struct ScoredQuerySet {
    Vector outlier_scores;          // higher = more outlier
    std::vector<bool> is_outlier;   // ground-truth outlier flags
    IntVector hard_labels;
    IntVector ground_truth;         // class in [0, K) or kOutlierLabel

    static ScoredQuerySet from_prediction(const PredictionResult& prediction,
                                          const IntVector& ground_truth);
};

/// Closed-set accuracy over inlier queries only. Throws with zero inliers.
double accuracy(const ScoredQuerySet& scored);

/// Mann-Whitney AUROC: probability a random outlier outscores a random
/// inlier, ties credited 0.5. Throws without at least one of each.
double auroc(const ScoredQuerySet& scored);

/// Average precision over descending distinct score thresholds, outliers as
/// the positive class.
double aupr(const ScoredQuerySet& scored);

/// Precision at the largest threshold (fewest predicted positives) whose
/// outlier recall reaches target_recall.
double precision_at_recall(const ScoredQuerySet& scored, double target_recall = 0.9);

MetricsReport score_episode(const PredictionResult& prediction, const IntVector& ground_truth,
                            bool with_accuracy = true);

struct MetricSummary {
    double mean = 0.0;
    double ci95_half_width = 0.0;  // 1.96 * sample std / sqrt(n)
};

struct AggregateSummary {
    std::optional<MetricSummary> acc;
    MetricSummary auroc;
    MetricSummary aupr;
    MetricSummary prec_at_090;
};

/// Per-metric mean and 95% confidence half-width. Requires >= 2 reports.
AggregateSummary aggregate(const std::vector<MetricsReport>& reports);

}  // namespace oslo
