#pragma once

#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "vft/geometry.hpp"
#include "vft/ray.hpp"

namespace vft {

/// Point dipole current source: location x0 and moment q (|q| > 0).
struct DipoleSource {
    Point2 location;
    Point2 moment;
};

/// Nodal potential with its defining mesh size.
struct PotentialField {
    Eigen::VectorXd u;
};

/// P1 stiffness matrix of div(sigma grad u); symmetric, rows sum to zero.
Eigen::SparseMatrix<double> assemble_stiffness(const TriMesh& mesh);

/// Partial-integration dipole load: b_i = q . grad(phi_i)(x0) on the element
/// containing x0. A location on a shared vertex or edge averages the
/// contributions of all containing elements, which keeps the load symmetric
/// there. Entries sum to zero.
Eigen::VectorXd dipole_rhs(const TriMesh& mesh, const DipoleSource& src);

/// Solve the grounded Neumann system, then shift so the arc-length weighted
/// boundary mean is zero. Verifies |K u - b| <= 1e-10 |b| and that the
/// source sits inside the mesh, at least one local edge length away from
/// the boundary.
PotentialField solve_potential(const TriMesh& mesh, const DipoleSource& src);

/// e = -grad u. Interior nodes average the adjacent elements' constant
/// gradients, weighted by area. Boundary nodes instead evaluate an
/// area-weighted linear fit over an adjacent interior node's element patch:
/// their one-sided patches bias the plain average by O(h), which would
/// dominate chord integrals near the rim. Both paths are exact for affine u.
NodalField gradient_field(const TriMesh& mesh, const PotentialField& u);

/// Barycentric interpolation weights of every coarse node inside the fine
/// mesh (location ties broken by lowest fine element id).
struct ProjectionMap {
    struct Entry {
        int element = -1;
        double d1 = 0.0, d2 = 0.0;
    };
    std::vector<Entry> entries;  // one per coarse node
};

ProjectionMap build_projection(const TriMesh& fine, const TriMesh& coarse);

/// Sample a fine nodal field at the coarse nodes.
NodalField project(const ProjectionMap& map, const TriMesh& fine,
                   const NodalField& fine_field);

/// Per-chord potential differences u[a] - u[b] at the chord's electrode
/// endpoints (a is the lower electrode index).
Eigen::VectorXd longitudinal_data(const PotentialField& u,
                                  const ElectrodeLayout& layout,
                                  const std::vector<Chord>& chords);

/// Additive Gaussian noise scaled so 20*log10(|data| / |eps|) equals snr_db
/// exactly. The generator is seeded and fully specified (mt19937_64 +
/// Box-Muller), so results are reproducible across platforms.
/// Returns (noisy data, noise).
std::pair<Eigen::VectorXd, Eigen::VectorXd> add_noise(
    const Eigen::VectorXd& data, double snr_db, unsigned long long seed);

}  // namespace vft
