#include "vft/ray.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "vft/io.hpp"

namespace vft {

std::array<std::pair<int, double>, 6> segment_coefficients(
    const TriMesh& mesh, const Segment& seg, Point2 dir) {
    const auto& tri = mesh.elements[seg.element_id];
    const Point2 mid = seg.xa + 0.5 * (seg.xb - seg.xa);
    const auto c = barycentric(mesh, seg.element_id, mid);
    const double len = norm(seg.xb - seg.xa);
    const double w[3] = {1.0 - c[0] - c[1], c[0], c[1]};
    const int n = mesh.num_nodes();
    std::array<std::pair<int, double>, 6> out;
    for (int k = 0; k < 3; ++k) {
        out[k] = {tri[k], len * dir.x * w[k]};
        out[3 + k] = {tri[k] + n, len * dir.y * w[k]};
    }
    return out;
}

RayMatrix assemble(const TriMesh& mesh, const std::vector<Chord>& chords,
                   RayFlavor flavor) {
    const int n = mesh.num_nodes();
    const int m = static_cast<int>(chords.size());
    std::vector<Eigen::Triplet<double>> triplets;
    std::map<int, double> row;  // sorted accumulator, reused per chord
    for (int i = 0; i < m; ++i) {
        const Chord& chord = chords[i];
        const Point2 dir =
            flavor == RayFlavor::Longitudinal ? chord.s_hat : chord.s_perp;
        row.clear();
        for (const Segment& seg : clip_chord(mesh, chord)) {
            for (const auto& [col, coef] : segment_coefficients(mesh, seg, dir)) {
                row[col] += coef;
            }
        }
        for (const auto& [col, val] : row) triplets.emplace_back(i, col, val);
    }
    RayMatrix R;
    R.flavor = flavor;
    R.mat.resize(m, 2 * n);
    R.mat.setFromTriplets(triplets.begin(), triplets.end());
    R.mat.makeCompressed();
    return R;
}

Eigen::VectorXd apply(const RayMatrix& R, const NodalField& e) {
    if (e.values.size() != R.mat.cols()) {
        throw std::invalid_argument(
            "apply: field length " + std::to_string(e.values.size()) +
            " does not match ray matrix columns " + std::to_string(R.mat.cols()));
    }
    return R.mat * e.values;
}

void write_ray_matrix(std::ostream& out, const RayMatrix& R) {
    out << R.rows() << ' ' << R.cols() << ' ' << R.mat.nonZeros() << '\n';
    for (int r = 0; r < R.mat.outerSize(); ++r) {
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(
                 R.mat, r);
             it; ++it) {
            out << it.row() << ' ' << it.col() << ' '
                << format_sig17(it.value()) << '\n';
        }
    }
}

void write_ray_matrix_file(const std::string& path, const RayMatrix& R) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_ray_matrix: cannot open " + path);
    write_ray_matrix(out, R);
    if (!out) throw std::runtime_error("write_ray_matrix: write failed for " + path);
}

RayMatrix read_ray_matrix(std::istream& in, RayFlavor flavor) {
    long long rows = 0, cols = 0, nnz = 0;
    if (!(in >> rows >> cols >> nnz) || rows < 0 || cols < 0 || nnz < 0) {
        throw std::runtime_error("ray matrix parse: bad header");
    }
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(nnz);
    for (long long k = 0; k < nnz; ++k) {
        long long r = 0, c = 0;
        std::string tok;
        if (!(in >> r >> c >> tok)) {
            throw std::runtime_error("ray matrix parse: truncated entry " +
                                     std::to_string(k));
        }
        if (r < 0 || r >= rows || c < 0 || c >= cols) {
            throw std::runtime_error("ray matrix parse: entry " +
                                     std::to_string(k) + " out of range");
        }
        triplets.emplace_back(static_cast<int>(r), static_cast<int>(c),
                              parse_double(tok));
    }
    RayMatrix R;
    R.flavor = flavor;
    R.mat.resize(rows, cols);
    R.mat.setFromTriplets(triplets.begin(), triplets.end());
    R.mat.makeCompressed();
    return R;
}

RayMatrix read_ray_matrix_file(const std::string& path, RayFlavor flavor) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_ray_matrix: cannot open " + path);
    return read_ray_matrix(in, flavor);
}

}  // namespace vft
