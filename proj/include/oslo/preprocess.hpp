#pragma once

#include "oslo/types.hpp"

#include <optional>

namespace oslo {

enum class CenteringKind { base, task };

/// Which center a method subtracts before unit-normalizing.
/// base_center is required for base centering and ignored otherwise.
struct CenteringMode {
    CenteringKind kind = CenteringKind::task;
    std::optional<Vector> base_center;
};

/// Arithmetic mean of all base feature vectors.
Vector compute_base_center(const Dataset& base_dataset);

/// Mean over the union of support and query vectors of one episode.
Vector compute_task_center(const Episode& episode);

/// (x - center) / ||x - center||. Throws when ||x - center|| <= 1e-12.
Vector center_normalize(const Vector& x, const Vector& center);

/// Applies center_normalize to every support and query row.
Episode center_normalize_episode(const Episode& episode, const Vector& center);

}  // namespace oslo
