#include "oslo/baselines.hpp"

#include <algorithm>
#include <stdexcept>

namespace oslo {

namespace {

Matrix support_class_means(const Episode& episode, bool renormalize) {
    const Eigen::Index k = episode.n_classes;
    Matrix centroids = Matrix::Zero(k, episode.support_features.cols());
    IntVector counts = IntVector::Zero(k);
    for (Eigen::Index i = 0; i < episode.support_features.rows(); ++i) {
        const int y = episode.support_labels(i);
        if (y < 0 || y >= k) throw std::invalid_argument("support label out of range");
        centroids.row(y) += episode.support_features.row(i);
        ++counts(y);
    }
    for (Eigen::Index c = 0; c < k; ++c) {
        if (counts(c) == 0) {
            throw std::invalid_argument("class " + std::to_string(c) + " has no support rows");
        }
        centroids.row(c) /= static_cast<double>(counts(c));
        if (renormalize) {
            const double norm = centroids.row(c).norm();
            if (norm > 0.0) centroids.row(c) /= norm;
        }
    }
    return centroids;
}

}  // namespace

Matrix nearest_centroid_classify(const Episode& episode) {
    const Matrix centroids = support_class_means(episode, /*renormalize=*/true);
    Matrix posteriors(episode.query_features.rows(), episode.n_classes);
    for (Eigen::Index i = 0; i < posteriors.rows(); ++i) {
        Vector neg_sq(episode.n_classes);
        for (Eigen::Index c = 0; c < neg_sq.size(); ++c) {
            neg_sq(c) = -(episode.query_features.row(i) - centroids.row(c)).squaredNorm();
        }
        const double m = neg_sq.maxCoeff();
        Vector e = (neg_sq.array() - m).exp();
        posteriors.row(i) = (e / e.sum()).transpose();
    }
    return posteriors;
}

Vector max_prob_outlierness(const Matrix& posteriors) {
    return Vector::Ones(posteriors.rows()) - posteriors.rowwise().maxCoeff();
}

Vector knn_outlier_score(const Episode& episode, const KnnConfig& config) {
    const Eigen::Index n_support = episode.support_features.rows();
    if (config.k < 1 || config.k > n_support) {
        throw std::invalid_argument("knn_outlier_score: k must lie in [1, |S|]");
    }
    Vector scores(episode.query_features.rows());
    std::vector<double> distances(static_cast<std::size_t>(n_support));
    for (Eigen::Index i = 0; i < scores.size(); ++i) {
        for (Eigen::Index s = 0; s < n_support; ++s) {
            distances[static_cast<std::size_t>(s)] =
                (episode.query_features.row(i) - episode.support_features.row(s)).norm();
        }
        std::nth_element(distances.begin(), distances.begin() + (config.k - 1), distances.end());
        if (config.aggregation == KnnConfig::Aggregation::kth_distance) {
            scores(i) = distances[static_cast<std::size_t>(config.k - 1)];
        } else {
            double sum = 0.0;
            for (int t = 0; t < config.k; ++t) sum += distances[static_cast<std::size_t>(t)];
            scores(i) = sum / config.k;
        }
    }
    return scores;
}

PredictionResult strong_baseline(const Episode& episode, const KnnConfig& config) {
    PredictionResult result;
    result.class_posteriors = nearest_centroid_classify(episode);
    result.hard_labels = hard_labels_from_posteriors(result.class_posteriors);
    Vector raw = knn_outlier_score(episode, config);
    const double max_score = raw.maxCoeff();
    result.outlierness = max_score > 0.0 ? Vector(raw / max_score) : raw;
    return result;
}

}  // namespace oslo
