#include "vft/forward.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include <Eigen/SparseCholesky>

namespace vft {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::runtime_error(msg); }

// Constant gradients of the three P1 basis functions on element e.
std::array<Point2, 3> basis_gradients(const TriMesh& mesh, int e) {
    const auto& t = mesh.elements[e];
    const Point2 u = mesh.nodes[t[1]] - mesh.nodes[t[0]];
    const Point2 v = mesh.nodes[t[2]] - mesh.nodes[t[0]];
    const double det = cross(u, v);
    const double scale = std::max(norm(u), norm(v));
    if (std::abs(det) <= 1e-14 * scale * scale) {
        fail("basis_gradients: element " + std::to_string(e) + " is degenerate");
    }
    const Point2 g1{v.y / det, -v.x / det};   // grad of barycentric d1
    const Point2 g2{-u.y / det, u.x / det};   // grad of barycentric d2
    return {Point2{-g1.x - g2.x, -g1.y - g2.y}, g1, g2};
}

std::vector<int> containing_elements(const TriMesh& mesh, Point2 p,
                                     double tol) {
    std::vector<int> found;
    for (int e = 0; e < mesh.num_elements(); ++e) {
        const auto c = barycentric(mesh, e, p);
        if (c[0] >= -tol && c[1] >= -tol && c[0] + c[1] <= 1.0 + tol) {
            found.push_back(e);
        }
    }
    return found;
}

// Shortest distance from p to the boundary polygon.
double boundary_distance(const TriMesh& mesh, Point2 p) {
    const auto& b = mesh.boundary_nodes;
    double best = std::numeric_limits<double>::infinity();
    const int nb = static_cast<int>(b.size());
    for (int i = 0; i < nb; ++i) {
        const Point2 v0 = mesh.nodes[b[i]];
        const Point2 v1 = mesh.nodes[b[(i + 1) % nb]];
        const Point2 d = v1 - v0;
        const double len2 = dot(d, d);
        double t = len2 > 0.0 ? dot(p - v0, d) / len2 : 0.0;
        t = std::clamp(t, 0.0, 1.0);
        best = std::min(best, norm(p - (v0 + t * d)));
    }
    return best;
}

}  // namespace

Eigen::SparseMatrix<double> assemble_stiffness(const TriMesh& mesh) {
    const int n = mesh.num_nodes();
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(static_cast<size_t>(mesh.num_elements()) * 9);
    for (int e = 0; e < mesh.num_elements(); ++e) {
        const auto g = basis_gradients(mesh, e);
        const double w = mesh.conductivity * mesh.element_area(e);
        const auto& t = mesh.elements[e];
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                triplets.emplace_back(t[i], t[j], w * dot(g[i], g[j]));
            }
        }
    }
    Eigen::SparseMatrix<double> K(n, n);
    K.setFromTriplets(triplets.begin(), triplets.end());
    K.makeCompressed();
    return K;
}

Eigen::VectorXd dipole_rhs(const TriMesh& mesh, const DipoleSource& src) {
    if (!(norm(src.moment) > 0.0)) {
        throw std::invalid_argument("dipole_rhs: zero moment");
    }
    const auto elems = containing_elements(mesh, src.location, 1e-10);
    if (elems.empty()) {
        fail("dipole_rhs: source location lies outside the mesh");
    }
    Eigen::VectorXd b = Eigen::VectorXd::Zero(mesh.num_nodes());
    const double w = 1.0 / static_cast<double>(elems.size());
    for (int e : elems) {
        const auto g = basis_gradients(mesh, e);
        const auto& t = mesh.elements[e];
        for (int i = 0; i < 3; ++i) b[t[i]] += w * dot(src.moment, g[i]);
    }
    return b;
}

PotentialField solve_potential(const TriMesh& mesh, const DipoleSource& src) {
    const auto elems = containing_elements(mesh, src.location, 1e-10);
    if (elems.empty()) fail("solve_potential: source outside the mesh");
    double local_edge = 0.0;
    for (int k = 0; k < 3; ++k) {
        const auto& t = mesh.elements[elems.front()];
        local_edge = std::max(
            local_edge, norm(mesh.nodes[t[(k + 1) % 3]] - mesh.nodes[t[k]]));
    }
    if (boundary_distance(mesh, src.location) <= local_edge) {
        fail("solve_potential: source closer than one local edge length "
             "to the boundary");
    }

    const Eigen::SparseMatrix<double> K = assemble_stiffness(mesh);
    const Eigen::VectorXd b = dipole_rhs(mesh, src);

    // Ground node 0 to fix the Neumann nullspace; the ungrounded residual
    // still vanishes because both row sums and the load sum to zero.
    Eigen::SparseMatrix<double> Kg = K;
    for (int k = 0; k < Kg.outerSize(); ++k) {
        for (Eigen::SparseMatrix<double>::InnerIterator it(Kg, k); it; ++it) {
            if (it.row() == 0 || it.col() == 0) {
                it.valueRef() = it.row() == it.col() ? 1.0 : 0.0;
            }
        }
    }
    Eigen::VectorXd bg = b;
    bg[0] = 0.0;

    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(Kg);
    if (ldlt.info() != Eigen::Success) {
        fail("solve_potential: factorization failed");
    }
    Eigen::VectorXd u = ldlt.solve(bg);
    if (ldlt.info() != Eigen::Success) fail("solve_potential: solve failed");

    const double resid = (K * u - b).norm();
    const double bnorm = b.norm();
    if (!(resid <= 1e-10 * bnorm)) {
        fail("solve_potential: residual " + std::to_string(resid) +
             " exceeds tolerance");
    }

    // Zero the arc-length weighted boundary mean.
    const auto& bn = mesh.boundary_nodes;
    const int nb = static_cast<int>(bn.size());
    double wsum = 0.0, usum = 0.0;
    for (int i = 0; i < nb; ++i) {
        const Point2 prev = mesh.nodes[bn[(i + nb - 1) % nb]];
        const Point2 next = mesh.nodes[bn[(i + 1) % nb]];
        const Point2 cur = mesh.nodes[bn[i]];
        const double w = 0.5 * (norm(cur - prev) + norm(next - cur));
        wsum += w;
        usum += w * u[bn[i]];
    }
    u.array() -= usum / wsum;
    return PotentialField{std::move(u)};
}

NodalField gradient_field(const TriMesh& mesh, const PotentialField& u) {
    const int n = mesh.num_nodes();
    if (u.u.size() != n) {
        throw std::invalid_argument("gradient_field: potential length mismatch");
    }
    std::vector<Point2> grads(mesh.num_elements());
    std::vector<double> areas(mesh.num_elements());
    std::vector<std::vector<int>> node_elements(n);
    for (int e = 0; e < mesh.num_elements(); ++e) {
        const auto g = basis_gradients(mesh, e);
        const auto& t = mesh.elements[e];
        Point2 grad{0.0, 0.0};
        for (int i = 0; i < 3; ++i) grad = grad + u.u[t[i]] * g[i];
        grads[e] = grad;
        areas[e] = mesh.element_area(e);
        for (int i = 0; i < 3; ++i) node_elements[t[i]].push_back(e);
    }

    NodalField field(n);
    Eigen::VectorXd wsum = Eigen::VectorXd::Zero(n);
    for (int e = 0; e < mesh.num_elements(); ++e) {
        const auto& t = mesh.elements[e];
        for (int i = 0; i < 3; ++i) {
            field.values[t[i]] += areas[e] * grads[e].x;
            field.values[n + t[i]] += areas[e] * grads[e].y;
            wsum[t[i]] += areas[e];
        }
    }
    for (int i = 0; i < n; ++i) {
        if (!(wsum[i] > 0.0)) fail("gradient_field: isolated node");
        field.values[i] /= wsum[i];
        field.values[n + i] /= wsum[i];
    }

    // Boundary nodes see only inward elements, which biases the plain
    // average by O(h). Refit: an area-weighted linear model of the patch
    // gradients around an adjacent interior node, evaluated at the boundary
    // node. Exact for affine potentials like the plain average.
    std::vector<char> is_boundary(n, 0);
    for (int id : mesh.boundary_nodes) is_boundary[id] = 1;
    std::vector<std::vector<int>> neighbors(n);
    for (const auto& t : mesh.elements) {
        for (int i = 0; i < 3; ++i) {
            neighbors[t[i]].push_back(t[(i + 1) % 3]);
            neighbors[t[i]].push_back(t[(i + 2) % 3]);
        }
    }
    for (int b : mesh.boundary_nodes) {
        int anchor = -1;
        for (int nb : neighbors[b]) {
            if (is_boundary[nb]) continue;
            if (anchor < 0 ||
                node_elements[nb].size() > node_elements[anchor].size() ||
                (node_elements[nb].size() == node_elements[anchor].size() &&
                 nb < anchor)) {
                anchor = nb;
            }
        }
        if (anchor < 0) continue;  // no interior neighbor: keep the average
        const Point2 xb = mesh.nodes[b];
        double scale = 0.0;
        for (int e : node_elements[anchor]) {
            const auto& t = mesh.elements[e];
            Point2 c = (1.0 / 3.0) * (mesh.nodes[t[0]] + mesh.nodes[t[1]] +
                                      mesh.nodes[t[2]]);
            scale = std::max(scale, norm(c - xb));
        }
        if (!(scale > 0.0)) continue;
        Eigen::Matrix3d M = Eigen::Matrix3d::Zero();
        Eigen::Vector3d rx = Eigen::Vector3d::Zero(), ry = rx;
        for (int e : node_elements[anchor]) {
            const auto& t = mesh.elements[e];
            Point2 c = (1.0 / 3.0) * (mesh.nodes[t[0]] + mesh.nodes[t[1]] +
                                      mesh.nodes[t[2]]);
            Eigen::Vector3d row((c.x - xb.x) / scale, (c.y - xb.y) / scale,
                                1.0);
            M += areas[e] * row * row.transpose();
            rx += areas[e] * grads[e].x * row;
            ry += areas[e] * grads[e].y * row;
        }
        Eigen::FullPivLU<Eigen::Matrix3d> lu(M);
        if (!lu.isInvertible()) continue;  // collinear patch: keep the average
        field.values[b] = lu.solve(rx)[2];
        field.values[n + b] = lu.solve(ry)[2];
    }

    field.values = -field.values;
    return field;
}

ProjectionMap build_projection(const TriMesh& fine, const TriMesh& coarse) {
    constexpr double tol = 1e-9;
    ProjectionMap map;
    map.entries.resize(coarse.num_nodes());
    for (int i = 0; i < coarse.num_nodes(); ++i) {
        const Point2 p = coarse.nodes[i];
        bool found = false;
        for (int e = 0; e < fine.num_elements() && !found; ++e) {
            const auto c = barycentric(fine, e, p);
            if (c[0] >= -tol && c[1] >= -tol && c[0] + c[1] <= 1.0 + tol) {
                map.entries[i] = {e, c[0], c[1]};
                found = true;
            }
        }
        if (!found) {
            fail("build_projection: coarse node " + std::to_string(i) +
                 " not located in the fine mesh");
        }
    }
    return map;
}

NodalField project(const ProjectionMap& map, const TriMesh& fine,
                   const NodalField& fine_field) {
    const int nf = fine.num_nodes();
    if (fine_field.values.size() != 2 * nf) {
        throw std::invalid_argument("project: field length mismatch");
    }
    const int nc = static_cast<int>(map.entries.size());
    NodalField out(nc);
    for (int i = 0; i < nc; ++i) {
        const auto& en = map.entries[i];
        const auto& t = fine.elements[en.element];
        const double w[3] = {1.0 - en.d1 - en.d2, en.d1, en.d2};
        for (int k = 0; k < 3; ++k) {
            out.values[i] += w[k] * fine_field.values[t[k]];
            out.values[nc + i] += w[k] * fine_field.values[nf + t[k]];
        }
    }
    return out;
}

Eigen::VectorXd longitudinal_data(const PotentialField& u,
                                  const ElectrodeLayout& layout,
                                  const std::vector<Chord>& chords) {
    Eigen::VectorXd data(static_cast<Eigen::Index>(chords.size()));
    for (size_t i = 0; i < chords.size(); ++i) {
        const auto [ea, eb] = chords[i].endpoints;
        if (ea < 0 || eb >= layout.size()) {
            throw std::invalid_argument("longitudinal_data: electrode index "
                                        "out of range");
        }
        data[static_cast<Eigen::Index>(i)] =
            u.u[layout.node_ids[ea]] - u.u[layout.node_ids[eb]];
    }
    return data;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> add_noise(
    const Eigen::VectorXd& data, double snr_db, unsigned long long seed) {
    if (!std::isfinite(snr_db)) {
        throw std::invalid_argument("add_noise: snr_db must be finite");
    }
    const double dnorm = data.norm();
    if (!(dnorm > 0.0)) {
        throw std::invalid_argument("add_noise: zero data vector");
    }
    const auto m = data.size();
    std::mt19937_64 rng(seed);
    auto uniform = [&rng]() {
        // (0, 1]: keeps log() finite. Mapping is fixed, not library-defined.
        return (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53;
    };
    Eigen::VectorXd g(m);
    for (Eigen::Index i = 0; i < m; i += 2) {
        const double u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * std::numbers::pi * u2;
        g[i] = r * std::cos(a);
        if (i + 1 < m) g[i + 1] = r * std::sin(a);
    }
    const double gnorm = g.norm();
    if (!(gnorm > 0.0)) fail("add_noise: degenerate noise draw");
    const Eigen::VectorXd eps =
        (dnorm / gnorm) * std::pow(10.0, -snr_db / 20.0) * g;
    return {data + eps, eps};
}

}  // namespace vft
