#pragma once

#include "oslo/types.hpp"

namespace oslo {

struct KnnConfig {
    enum class Aggregation { kth_distance, mean_of_k };
    int k = 1;
    Aggregation aggregation = Aggregation::kth_distance;
};

/// SimpleShot-style posteriors: softmax over classes of the negative squared
/// distance to the renormalized support class mean.
Matrix nearest_centroid_classify(const Episode& episode);

/// 1 - max_k p_ik; an affine rescaling of negative max-probability with the
/// same ranking.
Vector max_prob_outlierness(const Matrix& posteriors);

/// Distance from each query to its k-th nearest support vector (or the mean
/// of the k nearest). Throws when k exceeds the support size.
Vector knn_outlier_score(const Episode& episode, const KnnConfig& config);

/// Nearest-centroid classification combined with the k-NN detector, whose raw
/// distances are max-normalized into [0, 1] within the episode.
PredictionResult strong_baseline(const Episode& episode, const KnnConfig& config);

}  // namespace oslo
