#include "oslo/episodes.hpp"

#include <map>
#include <stdexcept>

namespace oslo {

namespace {

// Class labels in ascending order with their member record indices in file order.
std::vector<std::pair<int, std::vector<Eigen::Index>>> classes_of(const Dataset& dataset) {
    std::map<int, std::vector<Eigen::Index>> by_class;
    for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(dataset.records.size()); ++i) {
        by_class[dataset.records[static_cast<std::size_t>(i)].class_label].push_back(i);
    }
    return {by_class.begin(), by_class.end()};
}

void require_class_sizes(const std::vector<std::pair<int, std::vector<Eigen::Index>>>& classes,
                         const EpisodeSpec& spec) {
    const std::size_t needed = static_cast<std::size_t>(spec.n_shots + spec.n_query_per_class);
    for (const auto& [label, members] : classes) {
        if (members.size() < needed) {
            throw std::invalid_argument("sample_episode: class " + std::to_string(label) + " has " +
                                        std::to_string(members.size()) + " records, needs " +
                                        std::to_string(needed));
        }
    }
}

Episode make_episode_shell(const Dataset& dataset, const EpisodeSpec& spec, Eigen::Index n_query_total) {
    Episode episode;
    episode.n_classes = spec.n_ways;
    episode.support_features = Matrix(spec.n_ways * spec.n_shots, dataset.dim);
    episode.support_labels = IntVector(spec.n_ways * spec.n_shots);
    episode.query_features = Matrix(n_query_total, dataset.dim);
    episode.ground_truth = IntVector(n_query_total);
    return episode;
}

}  // namespace

void SyntheticSpec::validate() const {
    if (num_classes < 2) throw std::invalid_argument("SyntheticSpec: num_classes must be >= 2");
    if (dim < 1) throw std::invalid_argument("SyntheticSpec: dim must be >= 1");
    if (separation < 0.0) throw std::invalid_argument("SyntheticSpec: separation must be >= 0");
    if (samples_per_class < 1) throw std::invalid_argument("SyntheticSpec: samples_per_class must be >= 1");
}

Episode sample_episode(const Dataset& dataset, const EpisodeSpec& spec, std::uint64_t episode_index) {
    spec.validate();
    const auto classes = classes_of(dataset);
    const int n_participating = spec.n_ways + spec.n_open_classes;
    if (static_cast<int>(classes.size()) < n_participating) {
        throw std::invalid_argument("sample_episode: dataset has " + std::to_string(classes.size()) +
                                    " classes, needs " + std::to_string(n_participating));
    }
    require_class_sizes(classes, spec);

    Rng rng(spec.rng_seed, episode_index);
    const auto chosen = rng.sample_indices(classes.size(), static_cast<std::size_t>(n_participating));

    Episode episode = make_episode_shell(dataset, spec,
                                         static_cast<Eigen::Index>(spec.n_query_per_class) * n_participating);
    Eigen::Index support_row = 0;
    Eigen::Index query_row = 0;
    for (int c = 0; c < n_participating; ++c) {
        const auto& members = classes[chosen[static_cast<std::size_t>(c)]].second;
        const bool closed = c < spec.n_ways;
        const std::size_t take = static_cast<std::size_t>(spec.n_query_per_class) +
                                 (closed ? static_cast<std::size_t>(spec.n_shots) : 0);
        const auto picks = rng.sample_indices(members.size(), take);
        std::size_t p = 0;
        if (closed) {
            for (int s = 0; s < spec.n_shots; ++s, ++p) {
                const auto& rec = dataset.records[static_cast<std::size_t>(members[picks[p]])];
                episode.support_features.row(support_row) = rec.features.transpose();
                episode.support_labels(support_row) = c;
                ++support_row;
            }
        }
        for (int q = 0; q < spec.n_query_per_class; ++q, ++p) {
            const auto& rec = dataset.records[static_cast<std::size_t>(members[picks[p]])];
            episode.query_features.row(query_row) = rec.features.transpose();
            episode.ground_truth(query_row) = closed ? c : kOutlierLabel;
            ++query_row;
        }
    }
    return episode;
}

Episode sample_episode_broad(const Dataset& dataset, const EpisodeSpec& spec, std::uint64_t episode_index) {
    spec.validate();
    const auto classes = classes_of(dataset);
    if (static_cast<int>(classes.size()) < spec.n_ways + 1) {
        throw std::invalid_argument("sample_episode_broad: need at least n_ways + 1 classes");
    }
    require_class_sizes(classes, spec);

    Rng rng(spec.rng_seed, episode_index);
    const auto chosen = rng.sample_indices(classes.size(), static_cast<std::size_t>(spec.n_ways));
    std::vector<bool> is_closed(classes.size(), false);
    for (auto idx : chosen) is_closed[idx] = true;

    const Eigen::Index n_outliers =
        static_cast<Eigen::Index>(spec.n_ways) * spec.n_query_per_class;
    Episode episode = make_episode_shell(
        dataset, spec, static_cast<Eigen::Index>(spec.n_ways) * spec.n_query_per_class + n_outliers);

    Eigen::Index support_row = 0;
    Eigen::Index query_row = 0;
    for (int c = 0; c < spec.n_ways; ++c) {
        const auto& members = classes[chosen[static_cast<std::size_t>(c)]].second;
        const auto picks = rng.sample_indices(
            members.size(), static_cast<std::size_t>(spec.n_shots + spec.n_query_per_class));
        std::size_t p = 0;
        for (int s = 0; s < spec.n_shots; ++s, ++p) {
            const auto& rec = dataset.records[static_cast<std::size_t>(members[picks[p]])];
            episode.support_features.row(support_row) = rec.features.transpose();
            episode.support_labels(support_row) = c;
            ++support_row;
        }
        for (int q = 0; q < spec.n_query_per_class; ++q, ++p) {
            const auto& rec = dataset.records[static_cast<std::size_t>(members[picks[p]])];
            episode.query_features.row(query_row) = rec.features.transpose();
            episode.ground_truth(query_row) = c;
            ++query_row;
        }
    }

    // Outliers come from the pooled records of every remaining class.
    std::vector<Eigen::Index> pool;
    for (std::size_t ci = 0; ci < classes.size(); ++ci) {
        if (is_closed[ci]) continue;
        pool.insert(pool.end(), classes[ci].second.begin(), classes[ci].second.end());
    }
    if (static_cast<Eigen::Index>(pool.size()) < n_outliers) {
        throw std::invalid_argument("sample_episode_broad: open-set pool too small");
    }
    const auto picks = rng.sample_indices(pool.size(), static_cast<std::size_t>(n_outliers));
    for (auto p : picks) {
        const auto& rec = dataset.records[static_cast<std::size_t>(pool[p])];
        episode.query_features.row(query_row) = rec.features.transpose();
        episode.ground_truth(query_row) = kOutlierLabel;
        ++query_row;
    }
    return episode;
}

Episode sample_episode_any(const Dataset& dataset, const EpisodeSpec& spec, std::uint64_t episode_index) {
    return spec.mode == EpisodeMode::standard ? sample_episode(dataset, spec, episode_index)
                                              : sample_episode_broad(dataset, spec, episode_index);
}

Dataset generate_synthetic_dataset(const SyntheticSpec& spec, Split split, int label_offset,
                                   const std::string& id_prefix) {
    spec.validate();
    Dataset dataset;
    dataset.split = split;
    dataset.dim = spec.dim;
    Rng rng(spec.rng_seed, 0);
    for (int c = 0; c < spec.num_classes; ++c) {
        Vector direction(spec.dim);
        for (Eigen::Index j = 0; j < spec.dim; ++j) direction(j) = rng.normal();
        direction.normalize();
        for (int s = 0; s < spec.samples_per_class; ++s) {
            Vector v(spec.dim);
            double norm = 0.0;
            do {
                for (Eigen::Index j = 0; j < spec.dim; ++j) {
                    v(j) = spec.separation * direction(j) + rng.normal();
                }
                norm = v.norm();
            } while (norm <= 1e-12);
            FeatureRecord rec;
            rec.id = id_prefix + "_c" + std::to_string(label_offset + c) + "_" + std::to_string(s);
            rec.class_label = label_offset + c;
            rec.features = v / norm;
            dataset.records.push_back(std::move(rec));
        }
    }
    return dataset;
}

void audit_episode(const Episode& episode, const EpisodeSpec& spec) {
    const int k = spec.n_ways;
    if (episode.n_classes != k) throw std::runtime_error("audit: class count mismatch");
    if (episode.support_features.rows() != static_cast<Eigen::Index>(k) * spec.n_shots) {
        throw std::runtime_error("audit: wrong support size");
    }
    std::vector<int> support_counts(static_cast<std::size_t>(k), 0);
    for (Eigen::Index i = 0; i < episode.support_labels.size(); ++i) {
        const int y = episode.support_labels(i);
        if (y < 0 || y >= k) throw std::runtime_error("audit: support label out of range");
        ++support_counts[static_cast<std::size_t>(y)];
    }
    for (int c = 0; c < k; ++c) {
        if (support_counts[static_cast<std::size_t>(c)] != spec.n_shots) {
            throw std::runtime_error("audit: class " + std::to_string(c) + " lacks n_shots support rows");
        }
    }

    const Eigen::Index expected_queries =
        spec.mode == EpisodeMode::standard
            ? static_cast<Eigen::Index>(spec.n_query_per_class) * (k + spec.n_open_classes)
            : 2 * static_cast<Eigen::Index>(spec.n_query_per_class) * k;
    if (episode.query_features.rows() != expected_queries) {
        throw std::runtime_error("audit: wrong query size");
    }
    std::vector<int> inlier_counts(static_cast<std::size_t>(k), 0);
    Eigen::Index outliers = 0;
    for (Eigen::Index i = 0; i < episode.ground_truth.size(); ++i) {
        const int y = episode.ground_truth(i);
        if (y == kOutlierLabel) {
            ++outliers;
        } else if (y >= 0 && y < k) {
            ++inlier_counts[static_cast<std::size_t>(y)];
        } else {
            throw std::runtime_error("audit: ground truth label out of range");
        }
    }
    for (int c = 0; c < k; ++c) {
        if (inlier_counts[static_cast<std::size_t>(c)] != spec.n_query_per_class) {
            throw std::runtime_error("audit: class " + std::to_string(c) + " lacks query rows");
        }
    }
    const Eigen::Index expected_outliers =
        spec.mode == EpisodeMode::standard
            ? static_cast<Eigen::Index>(spec.n_query_per_class) * spec.n_open_classes
            : static_cast<Eigen::Index>(spec.n_query_per_class) * k;
    if (outliers != expected_outliers) throw std::runtime_error("audit: wrong outlier count");

    // Sampling is without replacement, so no support row may reappear as a query.
    for (Eigen::Index s = 0; s < episode.support_features.rows(); ++s) {
        for (Eigen::Index q = 0; q < episode.query_features.rows(); ++q) {
            if (episode.support_features.row(s) == episode.query_features.row(q)) {
                throw std::runtime_error("audit: record shared between support and query");
            }
        }
    }
}

}  // namespace oslo
