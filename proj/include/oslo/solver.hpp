#pragma once

#include "oslo/types.hpp"

#include <functional>
#include <vector>

namespace oslo {

/// Log of the unnormalized joint under a unit-variance Gaussian centered at
/// the centroid: -||x - mu||^2 / 2 + offset. The uniform class prior and the
/// Gaussian normalizer are constant across samples and classes and are folded
/// into the offset.
double log_joint(const Vector& x, const Vector& centroid, double offset);

/// All-pairs log-joint values: row i, column k for sample i and centroid k.
/// Rows cover support then query samples.
Matrix log_joint_matrix(const Episode& episode, const Matrix& centroids, double offset);

/// Deterministic starting point: centroids from support class means
/// (renormalized when configured), support rows clamped, query inlierness 1,
/// query assignments from a temperature-lambda_z softmax of the log-joint.
SolverState init_state(const Episode& episode, const SolverConfig& config);

/// Inlierness block update. Support entries stay 1; query entries become
/// sigmoid of the assignment-weighted log-joint scaled by 1/lambda_xi.
/// No-op when config.fix_xi_to_one.
void update_xi(SolverState& state, const SolverConfig& config, const Episode& episode);

/// Assignment block update. Support rows stay one-hot; query row i becomes
/// softmax over k of (xi_i / lambda_z) * log_joint(x_i, mu_k).
void update_z(SolverState& state, const SolverConfig& config, const Episode& episode);

/// Centroid block update: inlierness-and-assignment weighted mean of all
/// samples, projected back to the unit sphere when configured. A class whose
/// total weight falls below 1e-12 keeps its previous centroid.
void update_centroids(SolverState& state, const SolverConfig& config, const Episode& episode);

/// Weighted log-likelihood plus entropy penalties on the query block.
double objective(const SolverState& state, const SolverConfig& config, const Episode& episode);

struct SolveResult {
    PredictionResult prediction;
    std::vector<double> trace;  // objective at initialization, then after each full cycle
    SolverState state;
};

/// Called after initialization (cycle 0) and after every full update cycle.
using SolveObserver = std::function<void(const SolverState&, int cycle)>;

/// Block-coordinate ascent: cycles xi -> Z -> mu updates until max_iters or
/// the relative objective change drops below rel_tol. Outlierness is
/// 1 - xi. When xi was never optimized (fix_xi_to_one or max_iters == 0) it
/// is computed post-hoc by a single inlierness pass on the final state.
SolveResult solve(const Episode& episode, const SolverConfig& config,
                  const SolveObserver& observer = {});

}  // namespace oslo
