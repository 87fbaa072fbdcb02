#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "vft/geometry.hpp"

TEST_CASE("disk mesh basic counts") {
    vft::TriMesh mesh = vft::build_disk_mesh(1.0, 0.5);
    CHECK(mesh.num_nodes() == 19);
    CHECK(mesh.num_elements() == 24);
    CHECK(mesh.boundary_nodes.size() == 12);
}
