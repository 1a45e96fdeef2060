#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <fstream>
#include <string>

#include "helpers.hpp"
#include "msgfem/coefficient.hpp"
#include "msgfem/raster_io.hpp"

using namespace msgfem;
using Catch::Approx;

namespace {

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& contents) {
    static int counter = 0;
    path = "/tmp/msgfem_raster_test_" + std::to_string(counter++) + ".txt";
    std::ofstream out(path);
    out << contents;
  }
  ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("raster parsing") {
  SECTION("reads a well-formed field, rows bottom-to-top") {
    TempFile f("3 2\n1 2 3\n4 5 6\n");
    RasterField r = load_raster(f.path);
    CHECK(r.nx == 3);
    CHECK(r.ny == 2);
    CHECK(r.at(0, 0) == 1.0);
    CHECK(r.at(2, 0) == 3.0);
    CHECK(r.at(0, 1) == 4.0);
    CHECK(r.at(2, 1) == 6.0);
  }
  SECTION("tolerates blank lines and CRLF endings") {
    TempFile f("2 2\r\n\r\n1 2\r\n3 4\r\n\r\n");
    RasterField r = load_raster(f.path);
    CHECK(r.at(1, 1) == 4.0);
  }
  SECTION("malformed header") {
    TempFile f("3 banana\n1 2 3\n");
    CHECK_THROWS_AS(load_raster(f.path), ConfigError);
    TempFile g("0 2\n\n");
    CHECK_THROWS_AS(load_raster(g.path), ConfigError);
  }
  SECTION("row width mismatch names the offending line") {
    TempFile f("3 2\n1 2 3\n4 5\n");
    CHECK_THROWS_WITH(load_raster(f.path),
                      Catch::Matchers::ContainsSubstring("line 3"));
  }
  SECTION("missing and extra rows rejected") {
    TempFile f("3 2\n1 2 3\n");
    CHECK_THROWS_AS(load_raster(f.path), ConfigError);
    TempFile g("3 1\n1 2 3\n4 5 6\n");
    CHECK_THROWS_AS(load_raster(g.path), ConfigError);
  }
  SECTION("nonpositive values rejected only when positivity is required") {
    TempFile f("2 1\n1 -3\n");
    CHECK_THROWS_AS(load_raster(f.path, true), ConfigError);
    RasterField r = load_raster(f.path, false);
    CHECK(r.at(1, 0) == -3.0);
  }
  SECTION("missing file") {
    CHECK_THROWS_AS(load_raster("/tmp/definitely_not_here_msgfem.txt"),
                    ConfigError);
  }
}

TEST_CASE("raster round-trip is bit-exact") {
  auto g = testing::rng(7);
  RasterField r;
  r.nx = 5;
  r.ny = 3;
  r.values.resize(15);
  for (int k = 0; k < 15; ++k) r.values[k] = testing::rand_real(g, 1e-7, 1e7);
  r.values[4] = 1.0 / 3.0;
  TempFile f("");
  save_raster(f.path, r);
  RasterField back = load_raster(f.path);
  REQUIRE(back.nx == r.nx);
  REQUIRE(back.ny == r.ny);
  for (int k = 0; k < 15; ++k) CHECK(back.values[k] == r.values[k]);
}

TEST_CASE("high-contrast generator") {
  SECTION("deterministic for a fixed seed") {
    RasterField a = generate_highcontrast(32, 32, RasterPattern::channels, 1e4, 7);
    RasterField b = generate_highcontrast(32, 32, RasterPattern::channels, 1e4, 7);
    REQUIRE(a.values.size() == b.values.size());
    for (size_t k = 0; k < a.values.size(); ++k) CHECK(a.values[k] == b.values[k]);
    RasterField c = generate_highcontrast(32, 32, RasterPattern::channels, 1e4, 8);
    bool any_diff = false;
    for (size_t k = 0; k < a.values.size(); ++k)
      if (a.values[k] != c.values[k]) any_diff = true;
    CHECK(any_diff);
  }
  SECTION("values are exactly {1, contrast} and both occur") {
    for (RasterPattern p : {RasterPattern::channels, RasterPattern::inclusions,
                            RasterPattern::checkerboard}) {
      RasterField r = generate_highcontrast(64, 64, p, 1e3, 3);
      CHECK(r.min() == 1.0);
      CHECK(r.max() == 1e3);
      for (double v : r.values) CHECK((v == 1.0 || v == 1e3));
    }
  }
  SECTION("checkerboard alternates") {
    RasterField r = generate_highcontrast(4, 4, RasterPattern::checkerboard, 10.0, 0);
    CHECK(r.at(0, 0) == 1.0);
    CHECK(r.at(1, 0) == 10.0);
    CHECK(r.at(0, 1) == 10.0);
    CHECK(r.at(1, 1) == 1.0);
  }
  SECTION("channels span the full width") {
    RasterField r = generate_highcontrast(48, 48, RasterPattern::channels, 100.0, 5);
    // Every column must contain at least one feature cell: channels are
    // painted as left-to-right walks.
    for (int i = 0; i < 48; ++i) {
      bool hit = false;
      for (int j = 0; j < 48; ++j)
        if (r.at(i, j) == 100.0) hit = true;
      CHECK(hit);
    }
  }
  SECTION("contrast below 1 rejected") {
    CHECK_THROWS_AS(generate_highcontrast(8, 8, RasterPattern::channels, 0.5, 1),
                    ConfigError);
  }
  SECTION("pattern names parse") {
    CHECK(parse_raster_pattern("channels") == RasterPattern::channels);
    CHECK(parse_raster_pattern("inclusions") == RasterPattern::inclusions);
    CHECK(parse_raster_pattern("checkerboard") == RasterPattern::checkerboard);
    CHECK_THROWS_AS(parse_raster_pattern("swirls"), ConfigError);
  }
}

TEST_CASE("raster-to-mesh mapping") {
  SECTION("same resolution copies values in cell order") {
    Mesh mesh(4, 4);
    RasterField r;
    r.nx = r.ny = 4;
    r.values.resize(16);
    for (int k = 0; k < 16; ++k) r.values[k] = k + 1.0;
    Eigen::VectorXd cells = raster_to_cells(mesh, r);
    for (int c = 0; c < 16; ++c) CHECK(cells[c] == r.values[c]);
  }
  SECTION("coarser raster is block-replicated") {
    Mesh mesh(4, 4);
    RasterField r;
    r.nx = r.ny = 2;
    r.values = {1.0, 2.0, 3.0, 4.0};
    Eigen::VectorXd cells = raster_to_cells(mesh, r);
    CHECK(cells[mesh.cell_id(0, 0)] == 1.0);
    CHECK(cells[mesh.cell_id(1, 1)] == 1.0);
    CHECK(cells[mesh.cell_id(2, 0)] == 2.0);
    CHECK(cells[mesh.cell_id(3, 1)] == 2.0);
    CHECK(cells[mesh.cell_id(0, 2)] == 3.0);
    CHECK(cells[mesh.cell_id(2, 3)] == 4.0);
  }
  SECTION("non-divisible resolution rejected") {
    Mesh mesh(6, 6);
    RasterField r;
    r.nx = r.ny = 4;
    r.values.assign(16, 1.0);
    CHECK_THROWS_AS(raster_to_cells(mesh, r), ConfigError);
  }
  SECTION("coefficient_from_raster produces a positive field with the raster's range") {
    Mesh mesh(8, 8);
    RasterField r = generate_highcontrast(8, 8, RasterPattern::inclusions, 50.0, 2);
    CoefficientField A = coefficient_from_raster(mesh, r);
    CHECK(A.alpha0() == 1.0);
    CHECK(A.alpha1() == 50.0);
    CHECK(A.contrast() == Approx(50.0));
  }
}
