#pragma once

#include "oslo/types.hpp"

#include <string>

namespace oslo {

/// A feature file split into its three class-disjoint partitions.
/// Splits may be empty; dim is shared by all records.
struct FeatureSet {
    Dataset base;
    Dataset validation;
    Dataset test;
    Eigen::Index dim = 0;
};

/// Reads the line-oriented feature format: one JSON object per line with
/// fields id (string), class (integer), split (base|validation|test) and
/// features (array of reals). Throws std::runtime_error naming the offending
/// line on malformed input, dimension drift, non-finite values, or class
/// sets shared between splits.
FeatureSet load_features(const std::string& path);

/// Writes datasets back in the same line format, one record per line, with
/// round-trippable floating point values.
void save_features(const std::string& path, const std::vector<const Dataset*>& datasets);

}  // namespace oslo
