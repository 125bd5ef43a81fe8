#include "oslo/preprocess.hpp"

#include <stdexcept>

namespace oslo {

namespace {
constexpr double kDegenerateEps = 1e-12;
}

Vector compute_base_center(const Dataset& base_dataset) {
    if (base_dataset.records.empty()) {
        throw std::invalid_argument("compute_base_center: empty dataset");
    }
    Vector sum = Vector::Zero(base_dataset.dim);
    for (const auto& rec : base_dataset.records) sum += rec.features;
    return sum / static_cast<double>(base_dataset.records.size());
}

Vector compute_task_center(const Episode& episode) {
    const Eigen::Index n = episode.support_features.rows() + episode.query_features.rows();
    if (n == 0) throw std::invalid_argument("compute_task_center: empty episode");
    Vector sum = episode.support_features.colwise().sum().transpose() +
                 episode.query_features.colwise().sum().transpose();
    return sum / static_cast<double>(n);
}

Vector center_normalize(const Vector& x, const Vector& center) {
    Vector shifted = x - center;
    const double norm = shifted.norm();
    if (norm <= kDegenerateEps) {
        throw std::domain_error("center_normalize: vector coincides with the center");
    }
    return shifted / norm;
}

Episode center_normalize_episode(const Episode& episode, const Vector& center) {
    Episode out = episode;
    for (Eigen::Index i = 0; i < out.support_features.rows(); ++i) {
        out.support_features.row(i) =
            center_normalize(episode.support_features.row(i).transpose(), center).transpose();
    }
    for (Eigen::Index i = 0; i < out.query_features.rows(); ++i) {
        out.query_features.row(i) =
            center_normalize(episode.query_features.row(i).transpose(), center).transpose();
    }
    return out;
}

}  // namespace oslo
