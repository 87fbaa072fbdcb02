#pragma once

#include <array>
#include <cmath>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace vft {

struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

inline Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
inline Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
inline Point2 operator*(double s, Point2 p) { return {s * p.x, s * p.y}; }
inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point2 a) { return std::hypot(a.x, a.y); }

/// Angle of p about the origin, normalized to [0, 2*pi).
double polar_angle(Point2 p);

/// Triangulated planar domain. Elements are counter-clockwise vertex index
/// triples; boundary_nodes walk the outer boundary once, counter-clockwise.
struct TriMesh {
    std::vector<Point2> nodes;
    std::vector<std::array<int, 3>> elements;
    std::vector<int> boundary_nodes;
    double conductivity = 1.0;

    int num_nodes() const { return static_cast<int>(nodes.size()); }
    int num_elements() const { return static_cast<int>(elements.size()); }

    /// Signed area of element e (positive for counter-clockwise vertices).
    double signed_area(int e) const;
    double element_area(int e) const { return std::abs(signed_area(e)); }
};

/// Sum of element areas.
double total_area(const TriMesh& mesh);

/// Longest edge over all elements.
double max_edge_length(const TriMesh& mesh);

/// Structural validation: index ranges, positive element areas, non-empty
/// boundary. Throws std::runtime_error on the first violation.
void validate_mesh(const TriMesh& mesh);

/// Structured disk mesh: concentric rings of nodes (ring k holds 6k nodes)
/// joined by a fan triangulation, centered at the origin. The ring count is
/// chosen so no edge exceeds 1.5 * target_h. Deterministic.
/// Requires 0 < target_h < radius.
TriMesh build_disk_mesh(double radius, double target_h);

/// Boundary nodes chosen as measurement sites, in increasing angular order.
struct ElectrodeLayout {
    std::vector<int> node_ids;
    std::vector<double> angles;

    int size() const { return static_cast<int>(node_ids.size()); }
};

/// Snap the n ideal angles 2*pi*k/n to the nearest boundary nodes.
/// Requires n >= 3, at least n boundary nodes, and distinct snaps.
ElectrodeLayout place_electrodes(const TriMesh& mesh, int n);

/// Snap arbitrary target angles to the nearest boundary nodes (same rules).
ElectrodeLayout place_electrodes_at_angles(const TriMesh& mesh,
                                           const std::vector<double>& targets);

/// Oriented measurement line between two electrodes.
/// s_hat points from a to b; s_perp is s_hat rotated +90 degrees; l is the
/// signed offset of the line from the origin (a . s_perp).
struct Chord {
    Point2 a, b;
    Point2 s_hat, s_perp;
    double l = 0.0;
    std::pair<int, int> endpoints;  // electrode indices, first < second
};

Chord make_chord(Point2 a, Point2 b, int ea, int eb);

/// All electrode pairs (i < j) in lexicographic order: n*(n-1)/2 chords.
std::vector<Chord> enumerate_chords(const ElectrodeLayout& layout,
                                    const TriMesh& mesh);

/// Maximal straight piece of a chord inside one element.
struct Segment {
    int element_id = -1;
    Point2 xa, xb;  // ordered along the chord direction
};

/// Intersect a chord with every element and return the pieces ordered from
/// chord.a to chord.b. Pieces shorter than 1e-12 * |b - a| are dropped.
/// When the chord runs along a mesh edge the overlap is assigned to exactly
/// one adjacent element (the one whose interior lies on the s_perp side;
/// a boundary edge falls back to its only neighbor). An empty result means
/// the chord misses the mesh and is an error.
std::vector<Segment> clip_chord(const TriMesh& mesh, const Chord& chord);

/// Barycentric coordinates (d1, d2) of p in element e, defined by
/// p = x1 + J d with J = [x2 - x1, x3 - x1]. Throws on degenerate elements
/// (|det J| <= 1e-14 * scale^2).
std::array<double, 2> barycentric(const TriMesh& mesh, int element_id,
                                  Point2 p);

/// Text format: header "N N_E n_boundary", then N node lines "x y", N_E
/// element lines "i1 i2 i3", then n_boundary boundary ids, one per line.
/// '#' starts a comment. Coordinates are written with 17 significant digits
/// so the round-trip is bit exact.
void write_mesh(std::ostream& out, const TriMesh& mesh);
void write_mesh_file(const std::string& path, const TriMesh& mesh);
TriMesh read_mesh(std::istream& in, double conductivity = 1.0);
TriMesh read_mesh_file(const std::string& path, double conductivity = 1.0);

}  // namespace vft
