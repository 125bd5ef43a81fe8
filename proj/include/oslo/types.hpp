#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace oslo {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using IntVector = Eigen::VectorXi;

/// Ground-truth label carried by open-set queries. Always outside [0, K).
inline constexpr int kOutlierLabel = -1;

enum class Split { base, validation, test };

Split split_from_string(const std::string& s);
const char* to_string(Split split);

/// One precomputed feature vector with its class label.
struct FeatureRecord {
    std::string id;
    int class_label = 0;
    Vector features;
};

/// A labeled collection of feature vectors belonging to one split.
struct Dataset {
    std::vector<FeatureRecord> records;
    Split split = Split::test;
    Eigen::Index dim = 0;
};

/// Every invariant violation found, empty when the dataset is well formed.
/// Checks fixed dimension, finite coordinates, and non-empty classes.
std::vector<std::string> validate_dataset(const Dataset& dataset);

enum class EpisodeMode { standard, broad };

struct EpisodeSpec {
    int n_ways = 5;
    int n_shots = 1;
    int n_query_per_class = 15;
    int n_open_classes = 5;
    EpisodeMode mode = EpisodeMode::standard;
    std::uint64_t rng_seed = 0;

    void validate() const;  // throws std::invalid_argument
};

/// One sampled task. Ground truth is visible to metrics only, never to solvers.
struct Episode {
    Matrix support_features;   // |S| x d, one row per support instance
    IntVector support_labels;  // values in [0, K)
    Matrix query_features;     // |Q| x d
    IntVector ground_truth;    // class in [0, K) or kOutlierLabel
    int n_classes = 0;         // K
};

struct SolverConfig {
    double lambda_z = 1.0;
    double lambda_xi = 1.0;
    int max_iters = 100;
    double rel_tol = 1e-6;
    double likelihood_offset = 0.0;
    bool fix_xi_to_one = false;
    bool normalize_centroids = true;

    void validate() const;  // throws std::invalid_argument
};

/// Solver iterate: centroids, soft assignments, inlierness scores.
///
/// The checked constructor rejects any state violating the class invariants:
/// assignment rows on the simplex (sum within 1e-9), inlierness in [0, 1],
/// support rows clamped to one-hot labels with inlierness 1, and unit-norm
/// centroids (within 1e-9) when unit_centroids is set.
struct SolverState {
    Matrix centroids;    // K x d
    Matrix assignments;  // (|S|+|Q|) x K
    Vector inlierness;   // |S|+|Q|
    int iteration = 0;
    double objective = 0.0;

    SolverState() = default;
    SolverState(Matrix centroids, Matrix assignments, Vector inlierness,
                const IntVector& support_labels, bool unit_centroids);

    /// Throws std::invalid_argument on the first violated invariant.
    void check(const IntVector& support_labels, bool unit_centroids) const;
};

struct PredictionResult {
    Matrix class_posteriors;  // |Q| x K, rows on the simplex
    Vector outlierness;       // |Q|, values in [0, 1]
    IntVector hard_labels;    // argmax of posteriors, ties -> lowest index
};

/// Row-wise argmax with lowest-index tie-break.
IntVector hard_labels_from_posteriors(const Matrix& posteriors);

struct MetricsReport {
    std::optional<double> acc;  // absent for pure detectors
    double auroc = 0.0;
    double aupr = 0.0;
    double prec_at_090 = 0.0;
};

}  // namespace oslo
