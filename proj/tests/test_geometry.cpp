#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "vft/geometry.hpp"

using namespace vft;

namespace {

constexpr double kPi = std::numbers::pi;

TriMesh unit_triangle() {
    TriMesh mesh;
    mesh.nodes = {{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}};
    mesh.elements = {{0, 1, 2}};
    mesh.boundary_nodes = {0, 1, 2};
    return mesh;
}

}  // namespace

TEST_CASE("disk mesh counts follow the ring construction") {
    struct Case {
        double radius, h;
        int rings;
    };
    for (Case c : {Case{1.0, 0.5, 2}, Case{1.0, 1.0 / 15, 15},
                   Case{2.0, 0.5, 4}, Case{0.7, 0.1, 7}}) {
        TriMesh mesh = build_disk_mesh(c.radius, c.h);
        int k = c.rings;
        CHECK(mesh.num_nodes() == 1 + 3 * k * (k + 1));
        CHECK(mesh.num_elements() == 6 * k * k);
        CHECK(static_cast<int>(mesh.boundary_nodes.size()) == 6 * k);
        CHECK(max_edge_length(mesh) <= 1.5 * c.h * (1 + 1e-12));
    }
}

TEST_CASE("disk mesh rejects bad sizing") {
    CHECK_THROWS_AS(build_disk_mesh(1.0, 0.0), std::exception);
    CHECK_THROWS_AS(build_disk_mesh(1.0, -0.1), std::exception);
    CHECK_THROWS_AS(build_disk_mesh(1.0, 1.5), std::exception);
}

TEST_CASE("disk mesh area converges to the disk area") {
    // The boundary polygon of a K-ring mesh has 6K sides, so the area
    // deficit matches the inscribed-polygon formula.
    for (int k : {2, 5, 15}) {
        TriMesh mesh = build_disk_mesh(1.0, 1.0 / k);
        double sides = 6.0 * k;
        double polygon = 0.5 * sides * std::sin(2 * kPi / sides);
        CHECK(total_area(mesh) == doctest::Approx(polygon).epsilon(1e-12));
        CHECK(total_area(mesh) < kPi);
    }
}

TEST_CASE("boundary nodes sit on the circle in counter-clockwise order") {
    TriMesh mesh = build_disk_mesh(1.5, 0.25);
    double prev = -1.0;
    for (int id : mesh.boundary_nodes) {
        Point2 p = mesh.nodes[id];
        CHECK(std::abs(norm(p) - 1.5) < 1e-12);
        double ang = polar_angle(p);
        CHECK(ang > prev);
        prev = ang;
    }
}

TEST_CASE("all elements are counter-clockwise") {
    TriMesh mesh = build_disk_mesh(1.0, 0.2);
    for (int e = 0; e < mesh.num_elements(); ++e) {
        CHECK(mesh.signed_area(e) > 0.0);
    }
}

TEST_CASE("validate_mesh flags structural damage") {
    TriMesh good = build_disk_mesh(1.0, 0.5);
    CHECK_NOTHROW(validate_mesh(good));

    TriMesh bad = good;
    bad.elements[0][1] = 999;
    CHECK_THROWS_AS(validate_mesh(bad), std::runtime_error);

    bad = good;
    std::swap(bad.elements[3][0], bad.elements[3][1]);  // clockwise
    CHECK_THROWS_AS(validate_mesh(bad), std::runtime_error);

    bad = good;
    bad.boundary_nodes.clear();
    CHECK_THROWS_AS(validate_mesh(bad), std::runtime_error);
}

TEST_CASE("electrodes snap to nearby distinct boundary nodes") {
    TriMesh mesh = build_disk_mesh(1.0, 1.0 / 15);  // 90 boundary nodes
    ElectrodeLayout layout = place_electrodes(mesh, 32);
    REQUIRE(layout.size() == 32);
    double node_spacing = 2 * kPi / 90;
    for (int k = 0; k < 32; ++k) {
        double ideal = 2 * kPi * k / 32;
        CHECK(std::abs(layout.angles[k] - ideal) <= 0.5 * node_spacing + 1e-12);
        CHECK(layout.angles[k] ==
              doctest::Approx(polar_angle(mesh.nodes[layout.node_ids[k]])));
        for (int j = 0; j < k; ++j) {
            CHECK(layout.node_ids[k] != layout.node_ids[j]);
        }
    }
}

TEST_CASE("electrode placement rejects impossible requests") {
    TriMesh mesh = build_disk_mesh(1.0, 0.5);  // 12 boundary nodes
    CHECK_THROWS_AS(place_electrodes(mesh, 2), std::exception);
    CHECK_THROWS_AS(place_electrodes(mesh, 13), std::exception);
    // 24 targets on 12 nodes collide pairwise.
    std::vector<double> crowded(24);
    for (int i = 0; i < 24; ++i) crowded[i] = 2 * kPi * i / 24;
    CHECK_THROWS_AS(place_electrodes_at_angles(mesh, crowded), std::exception);
}

TEST_CASE("place_electrodes_at_angles picks the nearest node") {
    TriMesh mesh = build_disk_mesh(1.0, 0.5);  // nodes every 30 degrees
    ElectrodeLayout layout = place_electrodes_at_angles(mesh, {0.1, 2.0, 4.0});
    REQUIRE(layout.size() == 3);
    CHECK(layout.angles[0] == doctest::Approx(0.0));
    CHECK(layout.angles[1] == doctest::Approx(2 * kPi * 4 / 12));
    CHECK(layout.angles[2] == doctest::Approx(2 * kPi * 8 / 12));
}

TEST_CASE("chord enumeration covers all electrode pairs") {
    TriMesh mesh = build_disk_mesh(1.0, 1.0 / 8);
    for (int n : {3, 5, 8, 16, 32}) {
        ElectrodeLayout layout = place_electrodes(mesh, n);
        std::vector<Chord> chords = enumerate_chords(layout, mesh);
        CHECK(static_cast<int>(chords.size()) == n * (n - 1) / 2);
        int expect_i = 0, expect_j = 1;
        for (const Chord& c : chords) {
            CHECK(c.endpoints.first == expect_i);
            CHECK(c.endpoints.second == expect_j);
            if (++expect_j == n) {
                ++expect_i;
                expect_j = expect_i + 1;
            }
        }
    }
}

TEST_CASE("chord frame is orthonormal and the offset is consistent") {
    TriMesh mesh = build_disk_mesh(1.0, 1.0 / 8);
    ElectrodeLayout layout = place_electrodes(mesh, 16);
    for (const Chord& c : enumerate_chords(layout, mesh)) {
        CHECK(std::abs(norm(c.s_hat) - 1.0) < 1e-12);
        CHECK(c.s_perp.x == doctest::Approx(-c.s_hat.y));
        CHECK(c.s_perp.y == doctest::Approx(c.s_hat.x));
        CHECK(std::abs(dot(c.b - c.a, c.s_perp)) < 1e-12);
        CHECK(c.l == doctest::Approx(dot(c.a, c.s_perp)));
        CHECK(c.l == doctest::Approx(dot(c.b, c.s_perp)));
    }
}

TEST_CASE("clipping conserves chord length") {
    TriMesh mesh = build_disk_mesh(1.0, 1.0 / 3);
    ElectrodeLayout layout = place_electrodes(mesh, 8);
    for (const Chord& c : enumerate_chords(layout, mesh)) {
        std::vector<Segment> segs = clip_chord(mesh, c);
        REQUIRE(!segs.empty());
        double covered = 0.0;
        double t_prev = -1e-12;
        for (const Segment& s : segs) {
            covered += norm(s.xb - s.xa);
            double ta = dot(s.xa - c.a, c.s_hat);
            double tb = dot(s.xb - c.a, c.s_hat);
            CHECK(tb > ta);           // ordered within the segment
            CHECK(ta >= t_prev - 1e-9);  // ordered along the chord
            t_prev = tb;
            // Midpoint lies inside the assigned element.
            auto [d1, d2] = barycentric(mesh, s.element_id,
                                        0.5 * (s.xa + s.xb));
            CHECK(d1 > -1e-9);
            CHECK(d2 > -1e-9);
            CHECK(d1 + d2 < 1 + 1e-9);
        }
        CHECK(covered == doctest::Approx(norm(c.b - c.a)).epsilon(1e-9));
    }
}

TEST_CASE("a diameter chord is clipped to full length") {
    TriMesh mesh = build_disk_mesh(1.0, 0.25);
    ElectrodeLayout layout = place_electrodes_at_angles(mesh, {0.0, kPi});
    Chord diameter = make_chord(mesh.nodes[layout.node_ids[0]],
                                mesh.nodes[layout.node_ids[1]], 0, 1);
    double covered = 0.0;
    for (const Segment& s : clip_chord(mesh, diameter)) {
        covered += norm(s.xb - s.xa);
    }
    CHECK(covered == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("a chord missing the mesh is an error") {
    TriMesh mesh = unit_triangle();
    Chord miss = make_chord({5.0, 5.0}, {6.0, 5.0}, 0, 1);
    CHECK_THROWS_AS(clip_chord(mesh, miss), std::exception);
}

TEST_CASE("barycentric coordinates on a known element") {
    TriMesh mesh = unit_triangle();
    auto at = [&](double x, double y) { return barycentric(mesh, 0, {x, y}); };
    CHECK(at(0, 0)[0] == doctest::Approx(0.0));
    CHECK(at(0, 0)[1] == doctest::Approx(0.0));
    CHECK(at(1, 0)[0] == doctest::Approx(1.0));
    CHECK(at(1, 0)[1] == doctest::Approx(0.0));
    CHECK(at(0, 1)[0] == doctest::Approx(0.0));
    CHECK(at(0, 1)[1] == doctest::Approx(1.0));
    CHECK(at(1.0 / 3, 1.0 / 3)[0] == doctest::Approx(1.0 / 3));
    CHECK(at(1.0 / 3, 1.0 / 3)[1] == doctest::Approx(1.0 / 3));
}

TEST_CASE("barycentric rejects degenerate elements") {
    TriMesh mesh;
    mesh.nodes = {{0.0, 0.0}, {1.0, 0.0}, {2.0, 0.0}};  // collinear
    mesh.elements = {{0, 1, 2}};
    mesh.boundary_nodes = {0, 1, 2};
    CHECK_THROWS_AS(barycentric(mesh, 0, {0.5, 0.0}), std::exception);
}

TEST_CASE("mesh text round-trip is bit exact") {
    TriMesh mesh = build_disk_mesh(std::sqrt(2.0), 0.7);
    mesh.conductivity = 2.5;
    std::stringstream buf;
    write_mesh(buf, mesh);
    TriMesh back = read_mesh(buf, 2.5);
    REQUIRE(back.num_nodes() == mesh.num_nodes());
    REQUIRE(back.num_elements() == mesh.num_elements());
    for (int i = 0; i < mesh.num_nodes(); ++i) {
        CHECK(back.nodes[i].x == mesh.nodes[i].x);
        CHECK(back.nodes[i].y == mesh.nodes[i].y);
    }
    CHECK(back.elements == mesh.elements);
    CHECK(back.boundary_nodes == mesh.boundary_nodes);
    CHECK(back.conductivity == 2.5);
}

TEST_CASE("mesh reader rejects malformed input") {
    auto read_str = [](const std::string& text) {
        std::stringstream buf(text);
        return read_mesh(buf);
    };
    CHECK_THROWS_AS(read_str(""), std::runtime_error);
    CHECK_THROWS_AS(read_str("not a header\n"), std::runtime_error);
    CHECK_THROWS_AS(read_str("3 1 3\n0 0\n1 0\n"), std::runtime_error);
    // Element index out of range.
    CHECK_THROWS_AS(read_str("3 1 3\n0 0\n1 0\n0 1\n0 1 7\n0\n1\n2\n"),
                    std::runtime_error);
}

TEST_CASE("polar_angle maps into [0, 2pi)") {
    CHECK(polar_angle({1.0, 0.0}) == doctest::Approx(0.0));
    CHECK(polar_angle({0.0, 1.0}) == doctest::Approx(kPi / 2));
    CHECK(polar_angle({-1.0, 0.0}) == doctest::Approx(kPi));
    CHECK(polar_angle({0.0, -1.0}) == doctest::Approx(3 * kPi / 2));
    double wrap = polar_angle({1.0, -1e-9});
    CHECK(wrap < 2 * kPi);
    CHECK(wrap > 2 * kPi - 1e-8);
}
