#include "oslo/types.hpp"

#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace oslo {

Split split_from_string(const std::string& s) {
    if (s == "base") return Split::base;
    if (s == "validation") return Split::validation;
    if (s == "test") return Split::test;
    throw std::invalid_argument("unknown split: " + s);
}

const char* to_string(Split split) {
    switch (split) {
        case Split::base: return "base";
        case Split::validation: return "validation";
        case Split::test: return "test";
    }
    return "?";
}

std::vector<std::string> validate_dataset(const Dataset& dataset) {
    std::vector<std::string> violations;
    std::unordered_map<int, int> class_counts;
    for (const auto& rec : dataset.records) {
        if (rec.features.size() != dataset.dim) {
            std::ostringstream os;
            os << "record '" << rec.id << "': dimension " << rec.features.size()
               << " differs from dataset dimension " << dataset.dim;
            violations.push_back(os.str());
        }
        if (!rec.features.allFinite()) {
            violations.push_back("record '" + rec.id + "': non-finite feature value");
        }
        ++class_counts[rec.class_label];
    }
    for (const auto& [label, count] : class_counts) {
        if (count < 1) {
            violations.push_back("class " + std::to_string(label) + " has no records");
        }
    }
    return violations;
}

void EpisodeSpec::validate() const {
    if (n_ways < 2) throw std::invalid_argument("EpisodeSpec: n_ways must be >= 2");
    if (n_shots < 1) throw std::invalid_argument("EpisodeSpec: n_shots must be >= 1");
    if (n_query_per_class < 1) throw std::invalid_argument("EpisodeSpec: n_query_per_class must be >= 1");
    if (mode == EpisodeMode::standard && n_open_classes < 1) {
        throw std::invalid_argument("EpisodeSpec: standard mode requires n_open_classes >= 1");
    }
}

void SolverConfig::validate() const {
    if (!(lambda_z > 0.0)) throw std::invalid_argument("SolverConfig: lambda_z must be positive");
    if (!(lambda_xi > 0.0)) throw std::invalid_argument("SolverConfig: lambda_xi must be positive");
    if (max_iters < 0) throw std::invalid_argument("SolverConfig: max_iters must be nonnegative");
    if (rel_tol < 0.0) throw std::invalid_argument("SolverConfig: rel_tol must be nonnegative");
    if (!std::isfinite(likelihood_offset)) throw std::invalid_argument("SolverConfig: likelihood_offset must be finite");
}

namespace {
constexpr double kSimplexTol = 1e-9;
constexpr double kUnitNormTol = 1e-9;
}  // namespace

SolverState::SolverState(Matrix centroids_in, Matrix assignments_in, Vector inlierness_in,
                         const IntVector& support_labels, bool unit_centroids)
    : centroids(std::move(centroids_in)),
      assignments(std::move(assignments_in)),
      inlierness(std::move(inlierness_in)) {
    check(support_labels, unit_centroids);
}

void SolverState::check(const IntVector& support_labels, bool unit_centroids) const {
    const Eigen::Index n = assignments.rows();
    const Eigen::Index k = assignments.cols();
    if (inlierness.size() != n) throw std::invalid_argument("SolverState: inlierness length mismatch");
    if (centroids.rows() != k) throw std::invalid_argument("SolverState: centroid count mismatch");
    if (support_labels.size() > n) throw std::invalid_argument("SolverState: more support labels than rows");

    for (Eigen::Index i = 0; i < n; ++i) {
        if (assignments.row(i).minCoeff() < 0.0) {
            throw std::invalid_argument("SolverState: negative assignment at row " + std::to_string(i));
        }
        if (std::abs(assignments.row(i).sum() - 1.0) > kSimplexTol) {
            throw std::invalid_argument("SolverState: assignment row " + std::to_string(i) + " off the simplex");
        }
        if (inlierness(i) < 0.0 || inlierness(i) > 1.0) {
            throw std::invalid_argument("SolverState: inlierness out of [0,1] at row " + std::to_string(i));
        }
    }
    for (Eigen::Index i = 0; i < support_labels.size(); ++i) {
        if (inlierness(i) != 1.0) {
            throw std::invalid_argument("SolverState: support inlierness not clamped to 1 at row " + std::to_string(i));
        }
        const int y = support_labels(i);
        if (y < 0 || y >= k) throw std::invalid_argument("SolverState: support label out of range");
        for (Eigen::Index c = 0; c < k; ++c) {
            if (assignments(i, c) != (c == y ? 1.0 : 0.0)) {
                throw std::invalid_argument("SolverState: support row " + std::to_string(i) + " not one-hot");
            }
        }
    }
    if (unit_centroids) {
        for (Eigen::Index c = 0; c < k; ++c) {
            if (std::abs(centroids.row(c).norm() - 1.0) > kUnitNormTol) {
                throw std::invalid_argument("SolverState: centroid " + std::to_string(c) + " not unit norm");
            }
        }
    }
}

IntVector hard_labels_from_posteriors(const Matrix& posteriors) {
    IntVector labels(posteriors.rows());
    for (Eigen::Index i = 0; i < posteriors.rows(); ++i) {
        int best = 0;
        for (Eigen::Index c = 1; c < posteriors.cols(); ++c) {
            if (posteriors(i, c) > posteriors(i, best)) best = static_cast<int>(c);
        }
        labels(i) = best;
    }
    return labels;
}

}  // namespace oslo
