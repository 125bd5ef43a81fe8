#pragma once

#include "oslo/types.hpp"

#include <map>

namespace oslo {

/// Arithmetic mean of each class's feature vectors. Keyed by class label.
std::map<int, Vector> class_centroids(const Dataset& dataset);

/// Fraction of class-k members lying strictly farther from the class
/// centroid than z does. z must not belong to class k.
double imposture_factor(const Vector& z, int k, const Dataset& dataset);

/// Double average of the imposture factor over classes and non-members.
/// 0 means every member sits closer to its centroid than any outsider.
double mean_imposture_factor(const Dataset& dataset);

/// Mean within-class squared scatter divided by the mean squared distance of
/// class centroids to their common mean. Throws when the inter-class scatter
/// is degenerate.
double variance_ratio(const Dataset& dataset);

}  // namespace oslo
