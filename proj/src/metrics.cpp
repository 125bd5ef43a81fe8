#include "oslo/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace oslo {

namespace {

struct Counts {
    Eigen::Index n_outliers = 0;
    Eigen::Index n_inliers = 0;
};

Counts count_classes(const ScoredQuerySet& scored) {
    Counts counts;
    for (bool flag : scored.is_outlier) {
        if (flag) ++counts.n_outliers;
        else ++counts.n_inliers;
    }
    return counts;
}

void require_both_classes(const Counts& counts) {
    if (counts.n_outliers == 0 || counts.n_inliers == 0) {
        throw std::invalid_argument("metrics: need at least one inlier and one outlier");
    }
}

// (score, is_outlier) pairs sorted by descending score.
std::vector<std::pair<double, bool>> sorted_descending(const ScoredQuerySet& scored) {
    std::vector<std::pair<double, bool>> items(scored.is_outlier.size());
    for (std::size_t i = 0; i < items.size(); ++i) {
        items[i] = {scored.outlier_scores(static_cast<Eigen::Index>(i)), scored.is_outlier[i]};
    }
    std::sort(items.begin(), items.end(),
              [](const auto& a, const auto& b) { return a.first > b.first; });
    return items;
}

}  // namespace

ScoredQuerySet ScoredQuerySet::from_prediction(const PredictionResult& prediction,
                                               const IntVector& ground_truth) {
    if (prediction.outlierness.size() != ground_truth.size()) {
        throw std::invalid_argument("ScoredQuerySet: size mismatch between prediction and ground truth");
    }
    ScoredQuerySet scored;
    scored.outlier_scores = prediction.outlierness;
    scored.hard_labels = prediction.hard_labels;
    scored.ground_truth = ground_truth;
    scored.is_outlier.resize(static_cast<std::size_t>(ground_truth.size()));
    for (Eigen::Index i = 0; i < ground_truth.size(); ++i) {
        scored.is_outlier[static_cast<std::size_t>(i)] = (ground_truth(i) == kOutlierLabel);
    }
    return scored;
}

double accuracy(const ScoredQuerySet& scored) {
    Eigen::Index inliers = 0;
    Eigen::Index correct = 0;
    for (Eigen::Index i = 0; i < scored.ground_truth.size(); ++i) {
        if (scored.is_outlier[static_cast<std::size_t>(i)]) continue;
        ++inliers;
        if (scored.hard_labels(i) == scored.ground_truth(i)) ++correct;
    }
    if (inliers == 0) throw std::invalid_argument("accuracy: no inlier queries");
    return static_cast<double>(correct) / static_cast<double>(inliers);
}

double auroc(const ScoredQuerySet& scored) {
    const Counts counts = count_classes(scored);
    require_both_classes(counts);
    auto items = sorted_descending(scored);

    // Scan tie groups from the lowest score upward, counting, for every
    // outlier, the inliers strictly below it plus half the tied ones.
    double pairs_won = 0.0;
    double inliers_below = 0.0;
    std::size_t i = items.size();
    while (i > 0) {
        std::size_t j = i;
        while (j > 0 && items[j - 1].first == items[i - 1].first) --j;
        double tied_inliers = 0.0;
        double tied_outliers = 0.0;
        for (std::size_t t = j; t < i; ++t) {
            if (items[t].second) ++tied_outliers;
            else ++tied_inliers;
        }
        pairs_won += tied_outliers * (inliers_below + 0.5 * tied_inliers);
        inliers_below += tied_inliers;
        i = j;
    }
    return pairs_won / (static_cast<double>(counts.n_outliers) * static_cast<double>(counts.n_inliers));
}

double aupr(const ScoredQuerySet& scored) {
    const Counts counts = count_classes(scored);
    require_both_classes(counts);
    auto items = sorted_descending(scored);

    const double total_positives = static_cast<double>(counts.n_outliers);
    double tp = 0.0;
    double fp = 0.0;
    double prev_recall = 0.0;
    double area = 0.0;
    std::size_t i = 0;
    while (i < items.size()) {
        std::size_t j = i;
        while (j < items.size() && items[j].first == items[i].first) {
            if (items[j].second) ++tp;
            else ++fp;
            ++j;
        }
        const double recall = tp / total_positives;
        const double precision = tp / (tp + fp);
        area += (recall - prev_recall) * precision;
        prev_recall = recall;
        i = j;
    }
    return area;
}

double precision_at_recall(const ScoredQuerySet& scored, double target_recall) {
    if (!(target_recall > 0.0 && target_recall <= 1.0)) {
        throw std::invalid_argument("precision_at_recall: target must lie in (0, 1]");
    }
    const Counts counts = count_classes(scored);
    require_both_classes(counts);
    auto items = sorted_descending(scored);

    const double total_positives = static_cast<double>(counts.n_outliers);
    double tp = 0.0;
    double fp = 0.0;
    std::size_t i = 0;
    while (i < items.size()) {
        std::size_t j = i;
        while (j < items.size() && items[j].first == items[i].first) {
            if (items[j].second) ++tp;
            else ++fp;
            ++j;
        }
        if (tp / total_positives >= target_recall) {
            return tp / (tp + fp);
        }
        i = j;
    }
    // recall 1 is reached once every sample is predicted positive
    return total_positives / static_cast<double>(items.size());
}

MetricsReport score_episode(const PredictionResult& prediction, const IntVector& ground_truth,
                            bool with_accuracy) {
    const ScoredQuerySet scored = ScoredQuerySet::from_prediction(prediction, ground_truth);
    MetricsReport report;
    if (with_accuracy) report.acc = accuracy(scored);
    report.auroc = auroc(scored);
    report.aupr = aupr(scored);
    report.prec_at_090 = precision_at_recall(scored, 0.9);
    return report;
}

namespace {

MetricSummary summarize(const std::vector<double>& values) {
    const double n = static_cast<double>(values.size());
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    const double sample_std = std::sqrt(ss / (n - 1.0));
    return {mean, 1.96 * sample_std / std::sqrt(n)};
}

}  // namespace

AggregateSummary aggregate(const std::vector<MetricsReport>& reports) {
    if (reports.size() < 2) throw std::invalid_argument("aggregate: need at least 2 reports");
    AggregateSummary summary;
    std::vector<double> auroc_v, aupr_v, prec_v, acc_v;
    bool all_have_acc = true;
    for (const auto& r : reports) {
        auroc_v.push_back(r.auroc);
        aupr_v.push_back(r.aupr);
        prec_v.push_back(r.prec_at_090);
        if (r.acc.has_value()) acc_v.push_back(*r.acc);
        else all_have_acc = false;
    }
    summary.auroc = summarize(auroc_v);
    summary.aupr = summarize(aupr_v);
    summary.prec_at_090 = summarize(prec_v);
    if (all_have_acc) summary.acc = summarize(acc_v);
    return summary;
}

}  // namespace oslo
