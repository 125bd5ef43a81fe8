#pragma once

#include "oslo/rng.hpp"
#include "oslo/types.hpp"

namespace oslo {

/// Parameters of the synthetic feature generator used for desk-scale checks.
/// Class directions are drawn approximately uniformly on the unit sphere;
/// each sample is normalize(separation * direction + isotropic noise), so
/// large separation collapses classes to points and separation 0 removes all
/// class structure.
struct SyntheticSpec {
    int num_classes = 2;
    Eigen::Index dim = 64;
    double separation = 1.0;
    int samples_per_class = 100;
    std::uint64_t rng_seed = 0;

    void validate() const;
};

/// Samples one standard-mode task: n_ways closed-set classes plus
/// n_open_classes disjoint open-set classes, n_shots support rows per closed
/// class and n_query_per_class queries per participating class, all without
/// replacement. Episode index selects the random sub-stream, so distinct
/// indices are independent and the same (dataset, spec, index) always yields
/// the same episode.
Episode sample_episode(const Dataset& dataset, const EpisodeSpec& spec,
                       std::uint64_t episode_index = 0);

/// Broad-mode variant: outlier queries are drawn uniformly without
/// replacement from the pooled records of every non-closed-set class.
Episode sample_episode_broad(const Dataset& dataset, const EpisodeSpec& spec,
                             std::uint64_t episode_index = 0);

/// Dispatches on spec.mode.
Episode sample_episode_any(const Dataset& dataset, const EpisodeSpec& spec,
                           std::uint64_t episode_index = 0);

Dataset generate_synthetic_dataset(const SyntheticSpec& spec, Split split = Split::test,
                                   int label_offset = 0, const std::string& id_prefix = "s");

/// Throws unless the episode matches the spec's composition exactly:
/// per-class support and query counts, inlier/outlier totals, and no
/// support/query overlap. Used by the benchmark auditor and acceptance suite.
void audit_episode(const Episode& episode, const EpisodeSpec& spec);

}  // namespace oslo
