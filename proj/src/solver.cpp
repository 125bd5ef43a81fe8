#include "oslo/solver.hpp"

#include <cmath>
#include <stdexcept>

namespace oslo {

namespace {

constexpr double kDegenerateWeight = 1e-12;

double sigmoid(double t) {
    if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
    const double e = std::exp(t);
    return e / (1.0 + e);
}

Vector softmax(const Vector& logits) {
    const double m = logits.maxCoeff();
    Vector e = (logits.array() - m).exp();
    return e / e.sum();
}

double entropy_term(double p) { return p > 0.0 ? -p * std::log(p) : 0.0; }

double binary_entropy(double xi) { return entropy_term(xi) + entropy_term(1.0 - xi); }

Matrix stack_features(const Episode& episode) {
    Matrix x(episode.support_features.rows() + episode.query_features.rows(),
             episode.support_features.cols());
    x.topRows(episode.support_features.rows()) = episode.support_features;
    x.bottomRows(episode.query_features.rows()) = episode.query_features;
    return x;
}

}  // namespace

double log_joint(const Vector& x, const Vector& centroid, double offset) {
    return -0.5 * (x - centroid).squaredNorm() + offset;
}

Matrix log_joint_matrix(const Episode& episode, const Matrix& centroids, double offset) {
    const Matrix x = stack_features(episode);
    // -||x - mu||^2/2 = x.mu - ||x||^2/2 - ||mu||^2/2
    Matrix l = x * centroids.transpose();
    l.colwise() -= 0.5 * x.rowwise().squaredNorm();
    l.rowwise() -= 0.5 * centroids.rowwise().squaredNorm().transpose();
    return l.array() + offset;
}

SolverState init_state(const Episode& episode, const SolverConfig& config) {
    config.validate();
    const Eigen::Index n_support = episode.support_features.rows();
    const Eigen::Index n_query = episode.query_features.rows();
    const Eigen::Index k = episode.n_classes;
    const Eigen::Index d = episode.support_features.cols();

    SolverState state;
    state.centroids = Matrix::Zero(k, d);
    IntVector counts = IntVector::Zero(k);
    for (Eigen::Index i = 0; i < n_support; ++i) {
        const int y = episode.support_labels(i);
        if (y < 0 || y >= k) throw std::invalid_argument("init_state: support label out of range");
        state.centroids.row(y) += episode.support_features.row(i);
        ++counts(y);
    }
    for (Eigen::Index c = 0; c < k; ++c) {
        if (counts(c) == 0) {
            throw std::invalid_argument("init_state: class " + std::to_string(c) + " has no support rows");
        }
        state.centroids.row(c) /= static_cast<double>(counts(c));
        if (config.normalize_centroids) {
            const double norm = state.centroids.row(c).norm();
            if (norm <= kDegenerateWeight) {
                throw std::invalid_argument("init_state: degenerate support mean for class " + std::to_string(c));
            }
            state.centroids.row(c) /= norm;
        }
    }

    state.assignments = Matrix::Zero(n_support + n_query, k);
    for (Eigen::Index i = 0; i < n_support; ++i) {
        state.assignments(i, episode.support_labels(i)) = 1.0;
    }
    state.inlierness = Vector::Ones(n_support + n_query);

    const Matrix l = log_joint_matrix(episode, state.centroids, config.likelihood_offset);
    for (Eigen::Index i = n_support; i < n_support + n_query; ++i) {
        state.assignments.row(i) = softmax(l.row(i).transpose() / config.lambda_z).transpose();
    }
    state.iteration = 0;
    state.objective = objective(state, config, episode);
    return state;
}

void update_xi(SolverState& state, const SolverConfig& config, const Episode& episode) {
    if (config.fix_xi_to_one) return;
    const Eigen::Index n_support = episode.support_features.rows();
    const Matrix l = log_joint_matrix(episode, state.centroids, config.likelihood_offset);
    for (Eigen::Index i = 0; i < n_support; ++i) state.inlierness(i) = 1.0;
    for (Eigen::Index i = n_support; i < l.rows(); ++i) {
        const double weighted = state.assignments.row(i).dot(l.row(i));
        state.inlierness(i) = sigmoid(weighted / config.lambda_xi);
    }
}

void update_z(SolverState& state, const SolverConfig& config, const Episode& episode) {
    const Eigen::Index n_support = episode.support_features.rows();
    const Matrix l = log_joint_matrix(episode, state.centroids, config.likelihood_offset);
    for (Eigen::Index i = 0; i < n_support; ++i) {
        state.assignments.row(i).setZero();
        state.assignments(i, episode.support_labels(i)) = 1.0;
    }
    for (Eigen::Index i = n_support; i < l.rows(); ++i) {
        const Vector logits = (state.inlierness(i) / config.lambda_z) * l.row(i).transpose();
        state.assignments.row(i) = softmax(logits).transpose();
    }
}

void update_centroids(SolverState& state, const SolverConfig& config, const Episode& episode) {
    const Matrix x = stack_features(episode);
    const Matrix weights = state.assignments.array().colwise() * state.inlierness.array();
    const Vector totals = weights.colwise().sum().transpose();
    const Matrix weighted_sums = weights.transpose() * x;
    for (Eigen::Index c = 0; c < state.centroids.rows(); ++c) {
        if (totals(c) < kDegenerateWeight) continue;  // keep previous centroid
        state.centroids.row(c) = weighted_sums.row(c) / totals(c);
        if (config.normalize_centroids) {
            const double norm = state.centroids.row(c).norm();
            if (norm > kDegenerateWeight) state.centroids.row(c) /= norm;
        }
    }
}

double objective(const SolverState& state, const SolverConfig& config, const Episode& episode) {
    const Eigen::Index n_support = episode.support_features.rows();
    const Matrix l = log_joint_matrix(episode, state.centroids, config.likelihood_offset);
    double value = 0.0;
    for (Eigen::Index i = 0; i < l.rows(); ++i) {
        value += state.inlierness(i) * state.assignments.row(i).dot(l.row(i));
    }
    for (Eigen::Index i = n_support; i < l.rows(); ++i) {
        double row_entropy = 0.0;
        for (Eigen::Index c = 0; c < l.cols(); ++c) row_entropy += entropy_term(state.assignments(i, c));
        value += config.lambda_z * row_entropy;
        value += config.lambda_xi * binary_entropy(state.inlierness(i));
    }
    return value;
}

SolveResult solve(const Episode& episode, const SolverConfig& config, const SolveObserver& observer) {
    config.validate();
    SolveResult result;
    SolverState state = init_state(episode, config);
    result.trace.push_back(state.objective);
    if (observer) observer(state, 0);

    for (int cycle = 1; cycle <= config.max_iters; ++cycle) {
        update_xi(state, config, episode);
        update_z(state, config, episode);
        update_centroids(state, config, episode);
        const double previous = state.objective;
        state.objective = objective(state, config, episode);
        state.iteration = cycle;
        result.trace.push_back(state.objective);
        if (observer) observer(state, cycle);
        if (std::abs(state.objective - previous) / std::max(1.0, std::abs(state.objective)) < config.rel_tol) {
            break;
        }
    }

    // Ablations that never optimize xi still report a principled score,
    // from one inlierness pass on the final model.
    if (config.fix_xi_to_one || config.max_iters == 0) {
        SolverConfig post = config;
        post.fix_xi_to_one = false;
        update_xi(state, post, episode);
    }

    const Eigen::Index n_support = episode.support_features.rows();
    const Eigen::Index n_query = episode.query_features.rows();
    result.prediction.class_posteriors = state.assignments.bottomRows(n_query);
    result.prediction.outlierness = Vector::Ones(n_query) - state.inlierness.segment(n_support, n_query);
    result.prediction.hard_labels = hard_labels_from_posteriors(result.prediction.class_posteriors);
    result.state = std::move(state);
    return result;
}

}  // namespace oslo
