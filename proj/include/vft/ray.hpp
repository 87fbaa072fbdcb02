#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "vft/geometry.hpp"

namespace vft {

/// Piecewise-linear nodal vector field, stored as [e_1x..e_Nx, e_1y..e_Ny].
struct NodalField {
    Eigen::VectorXd values;

    NodalField() = default;
    explicit NodalField(int num_nodes)
        : values(Eigen::VectorXd::Zero(2 * num_nodes)) {}

    int num_nodes() const { return static_cast<int>(values.size() / 2); }
    double ex(int i) const { return values[i]; }
    double ey(int i) const { return values[num_nodes() + i]; }
    double magnitude(int i) const { return std::hypot(ex(i), ey(i)); }
};

enum class RayFlavor { Longitudinal, Transverse };

/// Sparse m x 2N operator mapping a nodal field to per-chord line integrals
/// of its projection onto s_hat (longitudinal) or s_perp (transverse).
struct RayMatrix {
    Eigen::SparseMatrix<double, Eigen::RowMajor> mat;
    RayFlavor flavor = RayFlavor::Longitudinal;

    int rows() const { return static_cast<int>(mat.rows()); }
    int cols() const { return static_cast<int>(mat.cols()); }
};

/// Exact line integral of dir . e over one segment of the linear interpolant:
/// |xb - xa| * dir . e(midpoint). Returns six (column, coefficient) pairs,
/// the x-components at the vertex ids and the y-components offset by N.
std::array<std::pair<int, double>, 6> segment_coefficients(
    const TriMesh& mesh, const Segment& seg, Point2 dir);

/// Clip every chord and accumulate segment coefficients row by row.
/// Entries within a row are stored in ascending column order.
RayMatrix assemble(const TriMesh& mesh, const std::vector<Chord>& chords,
                   RayFlavor flavor);

/// R * e with a dimension check.
Eigen::VectorXd apply(const RayMatrix& R, const NodalField& e);

/// Text format: header "m 2N nnz", then one "row col value" line per entry,
/// rows ascending then columns ascending, values with 17 significant digits.
void write_ray_matrix(std::ostream& out, const RayMatrix& R);
void write_ray_matrix_file(const std::string& path, const RayMatrix& R);
RayMatrix read_ray_matrix(std::istream& in, RayFlavor flavor);
RayMatrix read_ray_matrix_file(const std::string& path, RayFlavor flavor);

}  // namespace vft
