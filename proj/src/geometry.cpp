#include "vft/geometry.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "vft/io.hpp"

namespace vft {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

[[noreturn]] void fail(const std::string& msg) { throw std::runtime_error(msg); }

[[noreturn]] void fail_arg(const std::string& msg) {
    throw std::invalid_argument(msg);
}

}  // namespace

double polar_angle(Point2 p) {
    double a = std::atan2(p.y, p.x);
    if (a < 0.0) a += kTwoPi;
    if (a >= kTwoPi) a = 0.0;
    return a;
}

double TriMesh::signed_area(int e) const {
    const auto& t = elements[e];
    const Point2 u = nodes[t[1]] - nodes[t[0]];
    const Point2 v = nodes[t[2]] - nodes[t[0]];
    return 0.5 * cross(u, v);
}

double total_area(const TriMesh& mesh) {
    double a = 0.0;
    for (int e = 0; e < mesh.num_elements(); ++e) a += mesh.element_area(e);
    return a;
}

double max_edge_length(const TriMesh& mesh) {
    double m = 0.0;
    for (const auto& t : mesh.elements) {
        for (int k = 0; k < 3; ++k) {
            const Point2 d = mesh.nodes[t[(k + 1) % 3]] - mesh.nodes[t[k]];
            m = std::max(m, norm(d));
        }
    }
    return m;
}

void validate_mesh(const TriMesh& mesh) {
    const int n = mesh.num_nodes();
    if (n < 3) fail("mesh: fewer than 3 nodes");
    if (mesh.elements.empty()) fail("mesh: no elements");
    if (mesh.boundary_nodes.empty()) fail("mesh: no boundary nodes");
    for (int e = 0; e < mesh.num_elements(); ++e) {
        for (int v : mesh.elements[e]) {
            if (v < 0 || v >= n) fail("mesh: element vertex index out of range");
        }
        if (mesh.signed_area(e) <= 0.0) {
            fail("mesh: element " + std::to_string(e) +
                 " is degenerate or clockwise");
        }
    }
    for (int b : mesh.boundary_nodes) {
        if (b < 0 || b >= n) fail("mesh: boundary node index out of range");
    }
}

TriMesh build_disk_mesh(double radius, double target_h) {
    if (!std::isfinite(radius) || !std::isfinite(target_h) || radius <= 0.0 ||
        target_h <= 0.0 || target_h >= radius) {
        fail_arg("build_disk_mesh: requires 0 < target_h < radius");
    }
    const int rings = std::max<int>(1, static_cast<int>(std::llround(radius / target_h)));

    TriMesh mesh;
    mesh.nodes.push_back({0.0, 0.0});
    std::vector<int> ring_start(rings + 1, 0);
    for (int k = 1; k <= rings; ++k) {
        ring_start[k] = mesh.num_nodes();
        const int m = 6 * k;
        const double r = radius * static_cast<double>(k) / rings;
        for (int j = 0; j < m; ++j) {
            const double a = (kTwoPi * j) / m;
            mesh.nodes.push_back({r * std::cos(a), r * std::sin(a)});
        }
    }

    // Center fan.
    for (int j = 0; j < 6; ++j) {
        mesh.elements.push_back({0, ring_start[1] + j, ring_start[1] + (j + 1) % 6});
    }
    // Zipper strip between consecutive rings: advance whichever ring has the
    // strictly smaller next angle (ties advance the inner ring), emitting
    // counter-clockwise triangles. Tie-breaking inward keeps every diagonal
    // within one outer-ring spacing of radial.
    for (int k = 1; k < rings; ++k) {
        const int si = ring_start[k], mi = 6 * k;
        const int so = ring_start[k + 1], mo = 6 * (k + 1);
        int i = 0, o = 0;
        while (i < mi || o < mo) {
            bool advance_outer;
            if (i == mi) advance_outer = true;
            else if (o == mo) advance_outer = false;
            // (o+1)/mo < (i+1)/mi as exact integers; angle ties must
            // advance inward or the diagonal skips a full inner spacing.
            else advance_outer = (o + 1) * mi < (i + 1) * mo;
            if (advance_outer) {
                mesh.elements.push_back(
                    {so + o % mo, so + (o + 1) % mo, si + i % mi});
                ++o;
            } else {
                mesh.elements.push_back(
                    {si + i % mi, so + o % mo, si + (i + 1) % mi});
                ++i;
            }
        }
    }

    mesh.boundary_nodes.resize(6 * rings);
    for (int j = 0; j < 6 * rings; ++j) mesh.boundary_nodes[j] = ring_start[rings] + j;
    return mesh;
}

ElectrodeLayout place_electrodes_at_angles(const TriMesh& mesh,
                                           const std::vector<double>& targets) {
    const int nb = static_cast<int>(mesh.boundary_nodes.size());
    if (nb == 0) fail("place_electrodes: mesh has no boundary nodes");
    if (static_cast<int>(targets.size()) > nb) {
        fail_arg("place_electrodes: more electrodes than boundary nodes");
    }

    // Angles about the boundary centroid so that imported, non-centered
    // convex meshes still order sensibly. For the built-in disk the centroid
    // is numerically the origin.
    Point2 c{0.0, 0.0};
    for (int b : mesh.boundary_nodes) c = c + mesh.nodes[b];
    c = (1.0 / nb) * c;
    std::vector<double> bang(nb);
    for (int i = 0; i < nb; ++i) {
        bang[i] = polar_angle(mesh.nodes[mesh.boundary_nodes[i]] - c);
    }

    auto circ_dist = [](double a, double b) {
        double d = std::abs(a - b);
        return std::min(d, kTwoPi - d);
    };

    std::vector<std::pair<double, int>> picked;  // (angle, node id)
    picked.reserve(targets.size());
    for (double t : targets) {
        double tn = std::fmod(t, kTwoPi);
        if (tn < 0.0) tn += kTwoPi;
        int best = 0;
        double best_d = circ_dist(bang[0], tn);
        for (int i = 1; i < nb; ++i) {
            const double d = circ_dist(bang[i], tn);
            if (d < best_d) {
                best_d = d;
                best = i;
            }
        }
        picked.emplace_back(bang[best], mesh.boundary_nodes[best]);
    }

    std::sort(picked.begin(), picked.end());
    for (size_t i = 1; i < picked.size(); ++i) {
        if (picked[i].second == picked[i - 1].second) {
            fail("place_electrodes: two target angles snapped to the same "
                 "boundary node " + std::to_string(picked[i].second));
        }
    }

    ElectrodeLayout layout;
    for (const auto& [a, id] : picked) {
        layout.angles.push_back(a);
        layout.node_ids.push_back(id);
    }
    return layout;
}

ElectrodeLayout place_electrodes(const TriMesh& mesh, int n) {
    if (n < 3) fail_arg("place_electrodes: need at least 3 electrodes");
    if (static_cast<int>(mesh.boundary_nodes.size()) < n) {
        fail_arg("place_electrodes: mesh has only " +
                 std::to_string(mesh.boundary_nodes.size()) +
                 " boundary nodes for " + std::to_string(n) + " electrodes");
    }
    std::vector<double> targets(n);
    for (int k = 0; k < n; ++k) targets[k] = (kTwoPi * k) / n;
    return place_electrodes_at_angles(mesh, targets);
}

Chord make_chord(Point2 a, Point2 b, int ea, int eb) {
    const Point2 d = b - a;
    const double len = norm(d);
    if (!(len > 0.0)) fail_arg("make_chord: coincident endpoints");
    Chord c;
    c.a = a;
    c.b = b;
    c.s_hat = (1.0 / len) * d;
    c.s_perp = {-c.s_hat.y, c.s_hat.x};
    c.l = dot(a, c.s_perp);
    c.endpoints = {std::min(ea, eb), std::max(ea, eb)};
    return c;
}

std::vector<Chord> enumerate_chords(const ElectrodeLayout& layout,
                                    const TriMesh& mesh) {
    const int n = layout.size();
    if (n < 2) fail_arg("enumerate_chords: need at least 2 electrodes");
    std::vector<Chord> chords;
    chords.reserve(static_cast<size_t>(n) * (n - 1) / 2);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            chords.push_back(make_chord(mesh.nodes[layout.node_ids[i]],
                                        mesh.nodes[layout.node_ids[j]], i, j));
        }
    }
    return chords;
}

std::vector<Segment> clip_chord(const TriMesh& mesh, const Chord& chord) {
    const Point2 d = chord.b - chord.a;
    const double len = norm(d);
    if (!(len > 0.0)) fail_arg("clip_chord: zero-length chord");

    struct Interval {
        double lo, hi;
        int elem;
    };
    constexpr double kRel = 1e-12;   // on-line / parallel tolerance
    constexpr double kMinT = 1e-12;  // minimum kept fraction of the chord

    std::vector<Interval> accepted;
    std::vector<Interval> offside;  // collinear-edge runs on the far side
    for (int e = 0; e < mesh.num_elements(); ++e) {
        const auto& tri = mesh.elements[e];
        double lo = 0.0, hi = 1.0;
        bool empty = false;
        bool on_edge = false;
        bool interior_on_perp_side = false;
        for (int k = 0; k < 3 && !empty; ++k) {
            const Point2 v0 = mesh.nodes[tri[k]];
            const Point2 v1 = mesh.nodes[tri[(k + 1) % 3]];
            const Point2 edge = v1 - v0;
            const double elen = norm(edge);
            // Inside the CCW triangle means left of every edge:
            // g(t) = c0 + t*c1 >= 0.
            const double c1 = cross(edge, d);
            const double c0 = cross(edge, chord.a - v0);
            if (std::abs(c1) <= kRel * elen * len) {
                const double scale = std::max(len, norm(chord.a - v0));
                if (std::abs(c0) <= kRel * elen * scale) {
                    // Chord runs along this edge's line.
                    on_edge = true;
                    const Point2 vopp = mesh.nodes[tri[(k + 2) % 3]];
                    interior_on_perp_side = dot(vopp - v0, chord.s_perp) > 0.0;
                } else if (c0 < 0.0) {
                    empty = true;
                }
            } else {
                const double tstar = -c0 / c1;
                if (c1 > 0.0) lo = std::max(lo, tstar);
                else hi = std::min(hi, tstar);
            }
        }
        if (empty || !(hi - lo > 0.0)) continue;
        const Interval iv{lo, hi, e};
        if (on_edge && !interior_on_perp_side) offside.push_back(iv);
        else accepted.push_back(iv);
    }

    auto by_lo = [](const Interval& a, const Interval& b) {
        return a.lo < b.lo || (a.lo == b.lo && a.elem < b.elem);
    };
    std::sort(accepted.begin(), accepted.end(), by_lo);

    // An edge run rejected above leaves a hole only when the edge lies on the
    // mesh boundary (single neighbor). Re-admit off-side candidates that
    // cover such holes so the pieces still tile the chord.
    if (!offside.empty()) {
        std::vector<std::pair<double, double>> holes;
        double covered = 0.0;
        for (const auto& iv : accepted) {
            if (iv.lo > covered + kMinT) holes.emplace_back(covered, iv.lo);
            covered = std::max(covered, iv.hi);
        }
        if (covered < 1.0 - kMinT) holes.emplace_back(covered, 1.0);
        for (const auto& iv : offside) {
            for (const auto& [g0, g1] : holes) {
                if (std::min(iv.hi, g1) - std::max(iv.lo, g0) > kMinT) {
                    accepted.push_back(iv);
                    break;
                }
            }
        }
        std::sort(accepted.begin(), accepted.end(), by_lo);
    }

    std::vector<Segment> segs;
    segs.reserve(accepted.size());
    for (const auto& iv : accepted) {
        if (iv.hi - iv.lo < kMinT) continue;
        segs.push_back({iv.elem, chord.a + iv.lo * d, chord.a + iv.hi * d});
    }
    if (segs.empty()) {
        fail("clip_chord: chord between electrodes " +
             std::to_string(chord.endpoints.first) + " and " +
             std::to_string(chord.endpoints.second) + " lies outside the mesh");
    }
    return segs;
}

std::array<double, 2> barycentric(const TriMesh& mesh, int element_id,
                                  Point2 p) {
    const auto& t = mesh.elements[element_id];
    const Point2 u = mesh.nodes[t[1]] - mesh.nodes[t[0]];
    const Point2 v = mesh.nodes[t[2]] - mesh.nodes[t[0]];
    const double det = cross(u, v);
    const double scale = std::max(norm(u), norm(v));
    if (std::abs(det) <= 1e-14 * scale * scale) {
        fail("barycentric: element " + std::to_string(element_id) +
             " is degenerate");
    }
    const Point2 r = p - mesh.nodes[t[0]];
    return {cross(r, v) / det, cross(u, r) / det};
}

void write_mesh(std::ostream& out, const TriMesh& mesh) {
    out << mesh.num_nodes() << ' ' << mesh.num_elements() << ' '
        << mesh.boundary_nodes.size() << '\n';
    for (const Point2& p : mesh.nodes) {
        out << format_sig17(p.x) << ' ' << format_sig17(p.y) << '\n';
    }
    for (const auto& t : mesh.elements) {
        out << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
    }
    for (int b : mesh.boundary_nodes) out << b << '\n';
}

void write_mesh_file(const std::string& path, const TriMesh& mesh) {
    std::ofstream out(path);
    if (!out) fail("write_mesh: cannot open " + path);
    write_mesh(out, mesh);
    if (!out) fail("write_mesh: write failed for " + path);
}

namespace {

// Lines of non-comment tokens; '#' cuts a line short.
class TokenReader {
  public:
    explicit TokenReader(std::istream& in) : in_(in) {}

    std::string next(const char* what) {
        while (queue_i_ >= queue_.size()) {
            std::string line;
            if (!std::getline(in_, line)) {
                fail(std::string("mesh parse: unexpected end of file, expected ") +
                     what + " (line " + std::to_string(lineno_) + ")");
            }
            ++lineno_;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            queue_.clear();
            queue_i_ = 0;
            std::istringstream ls(line);
            std::string tok;
            while (ls >> tok) queue_.push_back(tok);
        }
        return queue_[queue_i_++];
    }

    long long next_int(const char* what) {
        const std::string tok = next(what);
        long long v = 0;
        const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (res.ec != std::errc() || res.ptr != tok.data() + tok.size()) {
            fail("mesh parse: bad integer '" + tok + "' for " + what +
                 " (line " + std::to_string(lineno_) + ")");
        }
        return v;
    }

    double next_double(const char* what) {
        const std::string tok = next(what);
        try {
            return parse_double(tok);
        } catch (const std::exception&) {
            fail("mesh parse: bad number '" + tok + "' for " + what +
                 " (line " + std::to_string(lineno_) + ")");
        }
    }

  private:
    std::istream& in_;
    std::vector<std::string> queue_;
    size_t queue_i_ = 0;
    long lineno_ = 0;
};

}  // namespace

TriMesh read_mesh(std::istream& in, double conductivity) {
    TokenReader tr(in);
    const long long n = tr.next_int("node count");
    const long long ne = tr.next_int("element count");
    const long long nb = tr.next_int("boundary count");
    if (n < 3 || ne < 1 || nb < 1 || n > 50'000'000 || ne > 100'000'000) {
        fail("mesh parse: implausible header counts");
    }
    TriMesh mesh;
    mesh.conductivity = conductivity;
    mesh.nodes.resize(n);
    for (long long i = 0; i < n; ++i) {
        mesh.nodes[i].x = tr.next_double("node x");
        mesh.nodes[i].y = tr.next_double("node y");
    }
    mesh.elements.resize(ne);
    for (long long e = 0; e < ne; ++e) {
        for (int k = 0; k < 3; ++k) {
            const long long v = tr.next_int("element vertex");
            if (v < 0 || v >= n) fail("mesh parse: element vertex out of range");
            mesh.elements[e][k] = static_cast<int>(v);
        }
    }
    mesh.boundary_nodes.resize(nb);
    for (long long i = 0; i < nb; ++i) {
        const long long v = tr.next_int("boundary node id");
        if (v < 0 || v >= n) fail("mesh parse: boundary id out of range");
        mesh.boundary_nodes[i] = static_cast<int>(v);
    }
    validate_mesh(mesh);
    return mesh;
}

TriMesh read_mesh_file(const std::string& path, double conductivity) {
    std::ifstream in(path);
    if (!in) fail("read_mesh: cannot open " + path);
    return read_mesh(in, conductivity);
}

}  // namespace vft
