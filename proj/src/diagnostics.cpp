#include "oslo/diagnostics.hpp"

#include <algorithm>
#include <stdexcept>

namespace oslo {

namespace {

std::map<int, std::vector<const FeatureRecord*>> group_by_class(const Dataset& dataset) {
    std::map<int, std::vector<const FeatureRecord*>> groups;
    for (const auto& rec : dataset.records) groups[rec.class_label].push_back(&rec);
    return groups;
}

Vector centroid_of(const std::vector<const FeatureRecord*>& members, Eigen::Index dim) {
    Vector sum = Vector::Zero(dim);
    for (const auto* rec : members) sum += rec->features;
    return sum / static_cast<double>(members.size());
}

}  // namespace

std::map<int, Vector> class_centroids(const Dataset& dataset) {
    const auto groups = group_by_class(dataset);
    if (groups.empty()) throw std::invalid_argument("class_centroids: empty dataset");
    std::map<int, Vector> centroids;
    for (const auto& [label, members] : groups) {
        centroids[label] = centroid_of(members, dataset.dim);
    }
    return centroids;
}

double imposture_factor(const Vector& z, int k, const Dataset& dataset) {
    const auto groups = group_by_class(dataset);
    const auto it = groups.find(k);
    if (it == groups.end() || it->second.empty()) {
        throw std::invalid_argument("imposture_factor: class " + std::to_string(k) + " is empty");
    }
    const Vector mu = centroid_of(it->second, dataset.dim);
    const double z_dist = (z - mu).norm();
    Eigen::Index farther = 0;
    for (const auto* rec : it->second) {
        if ((rec->features - mu).norm() > z_dist) ++farther;
    }
    return static_cast<double>(farther) / static_cast<double>(it->second.size());
}

double mean_imposture_factor(const Dataset& dataset) {
    const auto groups = group_by_class(dataset);
    if (groups.size() < 2) throw std::invalid_argument("mean_imposture_factor: need >= 2 classes");
    const Eigen::Index total = static_cast<Eigen::Index>(dataset.records.size());

    double class_sum = 0.0;
    for (const auto& [label, members] : groups) {
        const Vector mu = centroid_of(members, dataset.dim);

        // Sorted member distances allow counting strictly-farther members per
        // outsider by binary search instead of a full scan.
        std::vector<double> member_dists;
        member_dists.reserve(members.size());
        for (const auto* rec : members) member_dists.push_back((rec->features - mu).norm());
        std::sort(member_dists.begin(), member_dists.end());

        const Eigen::Index n_outsiders = total - static_cast<Eigen::Index>(members.size());
        if (n_outsiders == 0) {
            throw std::invalid_argument("mean_imposture_factor: class " + std::to_string(label) +
                                        " covers the whole dataset");
        }
        double outsider_sum = 0.0;
        for (const auto& rec : dataset.records) {
            if (rec.class_label == label) continue;
            const double d = (rec.features - mu).norm();
            const auto farther = member_dists.end() -
                                 std::upper_bound(member_dists.begin(), member_dists.end(), d);
            outsider_sum += static_cast<double>(farther) / static_cast<double>(members.size());
        }
        class_sum += outsider_sum / static_cast<double>(n_outsiders);
    }
    return class_sum / static_cast<double>(groups.size());
}

double variance_ratio(const Dataset& dataset) {
    const auto groups = group_by_class(dataset);
    if (groups.size() < 2) throw std::invalid_argument("variance_ratio: need >= 2 classes");

    std::map<int, Vector> centroids;
    double intra = 0.0;
    for (const auto& [label, members] : groups) {
        const Vector mu = centroid_of(members, dataset.dim);
        double scatter = 0.0;
        for (const auto* rec : members) scatter += (rec->features - mu).squaredNorm();
        intra += scatter / static_cast<double>(members.size());
        centroids[label] = mu;
    }
    intra /= static_cast<double>(groups.size());

    Vector global = Vector::Zero(dataset.dim);
    for (const auto& [label, mu] : centroids) global += mu;
    global /= static_cast<double>(centroids.size());
    double inter = 0.0;
    for (const auto& [label, mu] : centroids) inter += (mu - global).squaredNorm();
    inter /= static_cast<double>(centroids.size());

    if (inter <= 1e-15) {
        throw std::domain_error("variance_ratio: inter-class variance is degenerate");
    }
    return intra / inter;
}

}  // namespace oslo
