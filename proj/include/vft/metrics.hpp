#pragma once

#include "vft/geometry.hpp"
#include "vft/ray.hpp"

namespace vft {

/// Nodes whose reference magnitude falls below 1e-12 times the field maximum
/// are excluded from the averaged metrics; the count is reported.
struct MetricValue {
    double value = 0.0;
    int excluded = 0;
};

/// Mean over nodes of |rec_i| / |truth_i| (1 for a perfect reconstruction).
MetricValue magnitude_ratio(const NodalField& rec, const NodalField& truth);

/// Mean over nodes of cos(angle(rec_i, truth_i)); near-zero nodes of either
/// field are excluded.
MetricValue cosine_similarity(const NodalField& rec, const NodalField& truth);

/// Node with the largest reconstructed magnitude (ties broken by the lowest
/// node index) and its distance to the true source location.
struct Localization {
    int node = -1;
    double error = 0.0;
};

Localization localize(const TriMesh& mesh, const NodalField& rec,
                      Point2 true_location);

struct EvalResult {
    double mr = 0.0;
    double cs = 0.0;
    int loc_node = -1;
    double loc_error = 0.0;
    double max_mag_ratio = 0.0;
    int excluded_mr = 0;
    int excluded_cs = 0;
};

EvalResult evaluate_fields(const TriMesh& mesh, const NodalField& rec,
                           const NodalField& truth, Point2 true_location);

}  // namespace vft
