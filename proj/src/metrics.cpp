#include "vft/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace vft {

namespace {

constexpr double kZeroFraction = 1e-12;

void check_sizes(const NodalField& rec, const NodalField& truth) {
    if (rec.values.size() != truth.values.size() || rec.values.size() == 0) {
        throw std::invalid_argument("metrics: field size mismatch");
    }
}

double max_magnitude(const NodalField& f) {
    double m = 0.0;
    for (int i = 0; i < f.num_nodes(); ++i) m = std::max(m, f.magnitude(i));
    return m;
}

}  // namespace

MetricValue magnitude_ratio(const NodalField& rec, const NodalField& truth) {
    check_sizes(rec, truth);
    const double cut = kZeroFraction * max_magnitude(truth);
    double sum = 0.0;
    int used = 0, excluded = 0;
    for (int i = 0; i < truth.num_nodes(); ++i) {
        const double t = truth.magnitude(i);
        if (t <= cut) {
            ++excluded;
            continue;
        }
        sum += rec.magnitude(i) / t;
        ++used;
    }
    if (used == 0) throw std::runtime_error("magnitude_ratio: no usable nodes");
    return {sum / used, excluded};
}

MetricValue cosine_similarity(const NodalField& rec, const NodalField& truth) {
    check_sizes(rec, truth);
    const double cut_t = kZeroFraction * max_magnitude(truth);
    const double cut_r = kZeroFraction * max_magnitude(rec);
    double sum = 0.0;
    int used = 0, excluded = 0;
    for (int i = 0; i < truth.num_nodes(); ++i) {
        const double t = truth.magnitude(i);
        const double r = rec.magnitude(i);
        if (t <= cut_t || r <= cut_r) {
            ++excluded;
            continue;
        }
        sum += (rec.ex(i) * truth.ex(i) + rec.ey(i) * truth.ey(i)) / (r * t);
        ++used;
    }
    if (used == 0) {
        throw std::runtime_error("cosine_similarity: no usable nodes");
    }
    return {sum / used, excluded};
}

Localization localize(const TriMesh& mesh, const NodalField& rec,
                      Point2 true_location) {
    if (rec.num_nodes() != mesh.num_nodes()) {
        throw std::invalid_argument("localize: field does not match mesh");
    }
    int best = 0;
    double best_mag = rec.magnitude(0);
    for (int i = 1; i < rec.num_nodes(); ++i) {
        const double m = rec.magnitude(i);
        if (m > best_mag) {
            best_mag = m;
            best = i;
        }
    }
    if (!(best_mag > 0.0)) throw std::runtime_error("localize: zero field");
    return {best, norm(mesh.nodes[best] - true_location)};
}

EvalResult evaluate_fields(const TriMesh& mesh, const NodalField& rec,
                           const NodalField& truth, Point2 true_location) {
    EvalResult out;
    const auto mr = magnitude_ratio(rec, truth);
    const auto cs = cosine_similarity(rec, truth);
    const auto loc = localize(mesh, rec, true_location);
    out.mr = mr.value;
    out.excluded_mr = mr.excluded;
    out.cs = cs.value;
    out.excluded_cs = cs.excluded;
    out.loc_node = loc.node;
    out.loc_error = loc.error;
    const double tmax = max_magnitude(truth);
    if (!(tmax > 0.0)) {
        throw std::runtime_error("evaluate_fields: zero reference field");
    }
    out.max_mag_ratio = max_magnitude(rec) / tmax;
    return out;
}

}  // namespace vft
