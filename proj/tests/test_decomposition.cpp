#include <catch2/catch_amalgamated.hpp>

#include <set>
#include <vector>

#include "helpers.hpp"
#include "msgfem/decomposition.hpp"

using namespace msgfem;
using Catch::Approx;

namespace {

bool region_contains(const CellRegion& big, const CellRegion& small) {
  for (int c : small.cells())
    if (big.local_cell(c) < 0) return false;
  return true;
}

}  // namespace

TEST_CASE("decomposition geometry") {
  SECTION("n=100, m=4: 25x25 blocks, interior overlapped blocks 29x29") {
    Mesh mesh(100, 100);
    Decomposition d = build_decomposition(mesh, 4, 6);
    REQUIRE(d.n_subdomains() == 16);
    for (const auto& r : d.omega0) CHECK(r.n_cells() == 25 * 25);
    // Subdomain (1,1) is interior: index 1*4+1 = 5.
    CHECK(d.omega[5].n_cells() == 29 * 29);
    CHECK(d.omega_star[5].n_cells() == 41 * 41);
    // Corner subdomain 0 is clipped on two sides.
    CHECK(d.omega[0].n_cells() == 27 * 27);
    CHECK(d.omega_star[0].n_cells() == 33 * 33);
  }
  SECTION("omega0 partitions the cells") {
    Mesh mesh(20, 20);
    Decomposition d = build_decomposition(mesh, 4, 2);
    std::vector<int> count(mesh.n_cells(), 0);
    for (const auto& r : d.omega0)
      for (int c : r.cells()) ++count[c];
    for (int c : count) CHECK(c == 1);
  }
  SECTION("nestedness and oversampling gap") {
    Mesh mesh(24, 24);
    Decomposition d = build_decomposition(mesh, 3, 3);
    for (int s = 0; s < d.n_subdomains(); ++s) {
      CHECK(region_contains(d.omega[s], d.omega0[s]));
      CHECK(region_contains(d.omega_star[s], d.omega[s]));
      // Cells adjacent to the oversampling interface stay out of omega_i.
      auto [domain, interface] = region_boundary_split(d.omega_star[s]);
      for (int e : interface)
        for (int c : mesh.edge_cells(e))
          if (c >= 0 && d.omega_star[s].local_cell(c) >= 0)
            CHECK(d.omega[s].local_cell(c) < 0);
    }
  }
  SECTION("regions never extend past the domain") {
    Mesh mesh(16, 16);
    Decomposition d = build_decomposition(mesh, 2, 7);
    // ell=7 pushes every omega_star to the full domain.
    for (const auto& r : d.omega_star) CHECK(r.n_cells() == mesh.n_cells());
  }
  SECTION("error cases") {
    Mesh mesh(10, 10);
    CHECK_THROWS_AS(build_decomposition(mesh, 3, 2), ConfigError);
    CHECK_THROWS_AS(build_decomposition(mesh, 2, 0), ConfigError);
    CHECK_THROWS_AS(build_decomposition(Mesh(8, 8), 4, 1), ConfigError);
    CHECK_THROWS_AS(build_decomposition(mesh, 0, 1), ConfigError);
  }
}

TEST_CASE("partition of unity") {
  auto check_pu = [](int n, int m, int ell) {
    Mesh mesh(n, n);
    Decomposition d = build_decomposition(mesh, m, ell);
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(mesh.n_nodes());
    for (int s = 0; s < d.n_subdomains(); ++s) {
      const auto& chi = d.chi[s];
      REQUIRE(chi.size() == mesh.n_nodes());
      CHECK(chi.minCoeff() >= 0.0);
      CHECK(chi.maxCoeff() <= 1.0 + 1e-15);
      sum += chi;
      // Support: zero off omega_i, zero on its interface with the interior.
      for (int v = 0; v < mesh.n_nodes(); ++v)
        if (d.omega[s].local_node(v) < 0) CHECK(chi[v] == 0.0);
      auto split = region_node_split(d.omega[s]);
      for (int v : split.interface) CHECK(chi[v] == 0.0);
    }
    for (int v = 0; v < mesh.n_nodes(); ++v)
      CHECK(sum[v] == Approx(1.0).margin(1e-14));
  };
  check_pu(20, 4, 2);
  check_pu(16, 2, 3);
  check_pu(25, 5, 1);
  check_pu(12, 1, 1);
}

TEST_CASE("overlap counts") {
  SECTION("every cell lies in at most 4 overlapped subdomains") {
    for (auto [n, m] : std::vector<std::pair<int, int>>{{16, 2}, {20, 4}, {30, 5}}) {
      Mesh mesh(n, n);
      Decomposition d = build_decomposition(mesh, m, 2);
      std::vector<int> count(mesh.n_cells(), 0);
      for (const auto& r : d.omega)
        for (int c : r.cells()) ++count[c];
      CHECK(*std::max_element(count.begin(), count.end()) <= 4);
      CHECK(d.kappa == *std::max_element(count.begin(), count.end()));
      CHECK(d.kappa >= (m > 1 ? 2 : 1));
    }
  }
  SECTION("single subdomain has kappa 1 and chi identically 1") {
    Mesh mesh(8, 8);
    Decomposition d = build_decomposition(mesh, 1, 2);
    CHECK(d.kappa == 1);
    CHECK(d.kappa_star == 1);
    CHECK((d.chi[0].array() - 1.0).abs().maxCoeff() == 0.0);
  }
}

TEST_CASE("partition-of-unity gradient bound") {
  SECTION("matches 1/(overlap width * h) within a factor of two") {
    Mesh mesh(100, 100);
    Decomposition d = build_decomposition(mesh, 4, 2);
    double bound = pou_gradient_bound(d);
    double nominal = 1.0 / (4.0 * mesh.hx());  // width = 2*overlap = 4 cells
    CHECK(bound >= 0.5 * nominal);
    CHECK(bound <= 2.0 * nominal);
  }
  SECTION("doubling the resolution doubles the bound") {
    Mesh coarse(100, 100), fine(200, 200);
    Decomposition d1 = build_decomposition(coarse, 4, 2);
    Decomposition d2 = build_decomposition(fine, 4, 2);
    CHECK(pou_gradient_bound(d2) / pou_gradient_bound(d1) ==
          Approx(2.0).epsilon(1e-10));
  }
  SECTION("single subdomain has zero gradient") {
    Mesh mesh(12, 12);
    Decomposition d = build_decomposition(mesh, 1, 2);
    CHECK(pou_gradient_bound(d) == 0.0);
  }
}
