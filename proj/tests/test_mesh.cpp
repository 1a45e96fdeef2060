#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "helpers.hpp"
#include "msgfem/mesh.hpp"

using namespace msgfem;

TEST_CASE("mesh counts and numbering") {
  SECTION("2x2 mesh") {
    Mesh m(2, 2);
    CHECK(m.n_cells() == 4);
    CHECK(m.n_vertical_edges() == 6);
    CHECK(m.n_horizontal_edges() == 6);
    CHECK(m.n_edges() == 12);
    CHECK(m.n_nodes() == 9);
  }
  SECTION("240x240 mesh matches the reference experiment's fine DOF total") {
    Mesh m(240, 240);
    CHECK(m.n_cells() == 57600);
    CHECK(m.n_edges() == 115680);
    CHECK(m.n_edges() + m.n_cells() == 173280);
  }
  SECTION("1x1 mesh: all edges on the boundary") {
    Mesh m(1, 1);
    CHECK(m.n_cells() == 1);
    CHECK(m.n_edges() == 4);
    CHECK(m.boundary_edges().size() == 4);
  }
  SECTION("rejects nonpositive sizes") {
    CHECK_THROWS_AS(Mesh(0, 2), ConfigError);
    CHECK_THROWS_AS(Mesh(2, -1), ConfigError);
  }
}

TEST_CASE("edge incidence is consistent with cell edge lists") {
  Mesh m(5, 3);
  // Every (cell, edge) adjacency appears exactly once in each direction.
  for (int c = 0; c < m.n_cells(); ++c) {
    auto edges = m.cell_edges(c);
    for (int e : edges) {
      auto cells = m.edge_cells(e);
      CHECK((cells[0] == c || cells[1] == c));
    }
  }
  int interior = 0, boundary = 0;
  for (int e = 0; e < m.n_edges(); ++e) {
    auto cells = m.edge_cells(e);
    int adj = (cells[0] >= 0) + (cells[1] >= 0);
    CHECK((adj == 1 || adj == 2));
    (adj == 2 ? interior : boundary)++;
  }
  CHECK(boundary == 2 * (m.nx() + m.ny()));
  CHECK(interior == m.n_edges() - boundary);
}

TEST_CASE("edge endpoints follow the tangent convention") {
  Mesh m(3, 4);
  // Vertical edges run +y.
  int ev = m.vertical_edge_id(1, 2);
  auto nv = m.edge_nodes(ev);
  CHECK(m.node_x(nv[0]) == Catch::Approx(m.node_x(nv[1])));
  CHECK(m.node_y(nv[1]) - m.node_y(nv[0]) == Catch::Approx(m.hy()));
  // Horizontal edges run +x.
  int eh = m.horizontal_edge_id(2, 3);
  auto nh = m.edge_nodes(eh);
  CHECK(m.node_y(nh[0]) == Catch::Approx(m.node_y(nh[1])));
  CHECK(m.node_x(nh[1]) - m.node_x(nh[0]) == Catch::Approx(m.hx()));
}

TEST_CASE("region boundary split, hand-enumerated oracle") {
  // Bottom-left 2x2 block of a 4x4 mesh. Edge ids enumerated by hand from
  // the numbering convention (vertical edges j*5+i, horizontal 20+j*4+i).
  Mesh m(4, 4);
  CellRegion region = CellRegion::rectangle(m, 0, 0, 2, 2);

  std::set<int> domain_expected = {m.vertical_edge_id(0, 0),
                                   m.vertical_edge_id(0, 1),
                                   m.horizontal_edge_id(0, 0),
                                   m.horizontal_edge_id(1, 0)};
  std::set<int> interface_expected = {m.vertical_edge_id(2, 0),
                                      m.vertical_edge_id(2, 1),
                                      m.horizontal_edge_id(0, 2),
                                      m.horizontal_edge_id(1, 2)};
  CHECK(domain_expected == std::set<int>{0, 5, 20, 21});
  CHECK(interface_expected == std::set<int>{2, 7, 28, 29});

  auto [domain, interface] = region_boundary_split(region);
  CHECK(std::set<int>(domain.begin(), domain.end()) == domain_expected);
  CHECK(std::set<int>(interface.begin(), interface.end()) ==
        interface_expected);
  CHECK(region.interior_edges().size() == 4);
}

TEST_CASE("region boundary split edge cases") {
  Mesh m(4, 4);
  SECTION("whole mesh has no interface edges") {
    CellRegion region = CellRegion::whole(m);
    CHECK(region.boundary_edges_interface().empty());
    CHECK(region.boundary_edges_domain().size() == 16);
  }
  SECTION("single interior cell has 4 interface edges") {
    CellRegion region = CellRegion::rectangle(m, 1, 1, 1, 1);
    CHECK(region.boundary_edges_domain().empty());
    CHECK(region.boundary_edges_interface().size() == 4);
  }
  SECTION("empty region rejected") {
    CHECK_THROWS_AS(CellRegion(m, {}), ConfigError);
  }
  SECTION("disconnected region rejected") {
    CHECK_THROWS_AS(CellRegion(m, {m.cell_id(0, 0), m.cell_id(3, 3)}),
                    ConfigError);
  }
}

TEST_CASE("region boundary split is disjoint and exhaustive, random rectangles") {
  auto g = testing::rng(2024);
  for (int trial = 0; trial < 50; ++trial) {
    Mesh m(testing::rand_int(g, 1, 9), testing::rand_int(g, 1, 9));
    CellRegion region = testing::random_rectangle(g, m);

    std::set<int> domain(region.boundary_edges_domain().begin(),
                         region.boundary_edges_domain().end());
    std::set<int> interface(region.boundary_edges_interface().begin(),
                            region.boundary_edges_interface().end());
    std::set<int> interior(region.interior_edges().begin(),
                           region.interior_edges().end());

    std::set<int> all;
    all.insert(domain.begin(), domain.end());
    all.insert(interface.begin(), interface.end());
    all.insert(interior.begin(), interior.end());
    CHECK(all.size() ==
          domain.size() + interface.size() + interior.size());
    CHECK(all == std::set<int>(region.edges().begin(), region.edges().end()));

    // Adjacency identity: |boundary| + 2|interior| = 4 * #cells.
    CHECK(static_cast<int>(domain.size() + interface.size() +
                           2 * interior.size()) == 4 * region.n_cells());
  }
}

TEST_CASE("region node split, hand-enumerated oracle") {
  Mesh m(4, 4);
  CellRegion region = CellRegion::rectangle(m, 0, 0, 2, 2);
  RegionNodeSplit split = region_node_split(region);
  // 3x3 node patch: 5 nodes touch the domain boundary, 3 sit on the
  // interface (including the outer corner), 1 is interior.
  CHECK(split.domain_boundary.size() == 5);
  CHECK(split.interface.size() == 3);
  CHECK(split.interior.size() == 1);
  CHECK(split.interior[0] == m.node_id(1, 1));
  std::set<int> interface(split.interface.begin(), split.interface.end());
  CHECK(interface == std::set<int>{m.node_id(2, 1), m.node_id(1, 2),
                                   m.node_id(2, 2)});
}

TEST_CASE("local index maps are inverse to the id lists") {
  auto g = testing::rng(7);
  Mesh m(6, 5);
  CellRegion region = testing::random_rectangle(g, m);
  for (int lc = 0; lc < region.n_cells(); ++lc)
    CHECK(region.local_cell(region.cells()[lc]) == lc);
  for (int le = 0; le < region.n_edges(); ++le)
    CHECK(region.local_edge(region.edges()[le]) == le);
  for (int lv = 0; lv < region.n_nodes(); ++lv)
    CHECK(region.local_node(region.nodes()[lv]) == lv);
  CHECK(region.local_edge(-5) == -1);
}
