#ifndef MSGFEM_RASTER_IO_HPP
#define MSGFEM_RASTER_IO_HPP

#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "msgfem/coefficient.hpp"
#include "msgfem/core.hpp"
#include "msgfem/mesh.hpp"

namespace msgfem {

/// Cell-centered scalar raster. Storage is y-major from the bottom:
/// values[j*nx + i] is column i of row j, row 0 at the bottom, matching the
/// file format and the mesh cell numbering.
struct RasterField {
  int nx = 0, ny = 0;
  std::vector<double> values;

  double at(int i, int j) const { return values[static_cast<size_t>(j) * nx + i]; }
  double min() const {
    double v = values[0];
    for (double x : values) v = std::min(v, x);
    return v;
  }
  double max() const {
    double v = values[0];
    for (double x : values) v = std::max(v, x);
    return v;
  }
};

/// Loads the ASCII raster format: first content line "nx ny", then ny lines
/// of nx space-separated reals, bottom row first. Lines starting with '#'
/// are comments. When require_positive is set (permeability use) any
/// nonpositive value is rejected; source-term rasters may carry signs.
inline RasterField load_raster(const std::string& path,
                               bool require_positive = true) {
  std::ifstream in(path);
  require(in.good(), "raster: cannot open '" + path + "'");

  RasterField field;
  int line_no = 0;
  int rows_read = 0;
  bool have_header = false;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    size_t first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream tokens(line);
    if (!have_header) {
      if (!(tokens >> field.nx >> field.ny) || field.nx < 1 || field.ny < 1)
        throw ConfigError("raster: malformed header at line " +
                          std::to_string(line_no) + " of '" + path + "'");
      std::string extra;
      if (tokens >> extra)
        throw ConfigError("raster: trailing tokens in header at line " +
                          std::to_string(line_no));
      field.values.reserve(static_cast<size_t>(field.nx) * field.ny);
      have_header = true;
      continue;
    }
    if (rows_read == field.ny)
      throw ConfigError("raster: more than " + std::to_string(field.ny) +
                        " data rows, extra row at line " +
                        std::to_string(line_no));
    int count = 0;
    double v;
    while (tokens >> v) {
      if (count == field.nx) break;
      if (require_positive && v <= 0.0)
        throw ConfigError("raster: nonpositive value " + std::to_string(v) +
                          " at line " + std::to_string(line_no));
      field.values.push_back(v);
      ++count;
    }
    if (count != field.nx || !tokens.eof())
      throw ConfigError("raster: row at line " + std::to_string(line_no) +
                        " has wrong width, expected " +
                        std::to_string(field.nx) + " values, got " +
                        std::to_string(count) + (tokens.eof() ? "" : "+"));
    ++rows_read;
  }
  require(have_header, "raster: '" + path + "' has no header line");
  if (rows_read != field.ny)
    throw ConfigError("raster: expected " + std::to_string(field.ny) +
                      " data rows, found only " + std::to_string(rows_read));
  return field;
}

/// Writes the raster in the same format with round-trip-exact precision.
inline void save_raster(const std::string& path, const RasterField& field) {
  std::ofstream out(path);
  require(out.good(), "raster: cannot write '" + path + "'");
  out << field.nx << " " << field.ny << "\n";
  char buf[32];
  for (int j = 0; j < field.ny; ++j) {
    for (int i = 0; i < field.nx; ++i) {
      std::snprintf(buf, sizeof(buf), "%.17g", field.at(i, j));
      out << buf << (i + 1 == field.nx ? "" : " ");
    }
    out << "\n";
  }
  require(out.good(), "raster: write failed for '" + path + "'");
}

enum class RasterPattern { channels, inclusions, checkerboard };

inline RasterPattern parse_raster_pattern(const std::string& name) {
  if (name == "channels") return RasterPattern::channels;
  if (name == "inclusions") return RasterPattern::inclusions;
  if (name == "checkerboard") return RasterPattern::checkerboard;
  throw ConfigError("raster: unknown generator pattern '" + name + "'");
}

/// Deterministic synthetic high-contrast permeability: background value 1,
/// features at the requested contrast. Channel patterns connect the left and
/// right boundaries; the top raster row is kept as background so the
/// realized contrast is exact.
inline RasterField generate_highcontrast(int nx, int ny, RasterPattern pattern,
                                         double contrast, uint64_t seed) {
  require(nx >= 1 && ny >= 1, "raster: generator dimensions must be positive");
  require(contrast >= 1.0, "raster: contrast must be >= 1");
  RasterField field;
  field.nx = nx;
  field.ny = ny;
  field.values.assign(static_cast<size_t>(nx) * ny, 1.0);
  if (contrast == 1.0) return field;

  std::mt19937_64 gen(seed);
  auto pick = [&gen](int bound) {
    return static_cast<int>(gen() % static_cast<uint64_t>(bound));
  };
  auto paint = [&field, nx](int i, int j, double v) {
    field.values[static_cast<size_t>(j) * nx + i] = v;
  };

  switch (pattern) {
    case RasterPattern::checkerboard: {
      require(nx * ny >= 2, "raster: checkerboard needs at least 2 cells");
      for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i)
          if ((i + j) % 2 == 1) paint(i, j, contrast);
      break;
    }
    case RasterPattern::channels: {
      int thickness = std::max(1, ny / 40);
      // Keep the top `thickness` rows unpainted so background survives.
      int top = ny - thickness - 1;
      require(top >= 0, "raster: too few rows for a channel pattern");
      int n_channels = std::max(1, ny / 16);
      for (int k = 0; k < n_channels; ++k) {
        int r = pick(top + 1);
        for (int i = 0; i < nx; ++i) {
          for (int t = 0; t < thickness; ++t) paint(i, r + t, contrast);
          int step = pick(3) - 1;
          r = std::min(std::max(r + step, 0), top);
        }
      }
      break;
    }
    case RasterPattern::inclusions: {
      int count = std::max(3, nx * ny / 64);
      for (int k = 0; k < count; ++k) {
        int w = 1 + pick(std::max(1, nx / 8));
        int h = 1 + pick(std::max(1, ny / 8));
        w = std::min(w, nx);
        h = std::min(h, ny);
        int i0 = pick(nx - w + 1);
        int j0 = pick(ny - h + 1);
        for (int j = j0; j < j0 + h; ++j)
          for (int i = i0; i < i0 + w; ++i) paint(i, j, contrast);
      }
      // Inclusions carry no connectivity promise, so background can be
      // restored directly if the blobs covered everything.
      bool has_background = false;
      for (double v : field.values) has_background |= (v == 1.0);
      if (!has_background) field.values[0] = 1.0;
      break;
    }
  }
  require(field.min() == 1.0 && field.max() == contrast,
          "raster: generator failed to realize the requested contrast");
  return field;
}

/// Maps a raster onto mesh cells. Raster dimensions must match the mesh or
/// integer-divide it, in which case each raster cell covers a uniform block.
inline Eigen::VectorXd raster_to_cells(const Mesh& mesh,
                                       const RasterField& raster) {
  require(raster.nx >= 1 && raster.ny >= 1 && !raster.values.empty(),
          "raster: empty field");
  require(mesh.nx() % raster.nx == 0 && mesh.ny() % raster.ny == 0,
          "raster: dimensions " + std::to_string(raster.nx) + "x" +
              std::to_string(raster.ny) + " do not divide mesh " +
              std::to_string(mesh.nx()) + "x" + std::to_string(mesh.ny()));
  int fx = mesh.nx() / raster.nx;
  int fy = mesh.ny() / raster.ny;
  Eigen::VectorXd cells(mesh.n_cells());
  for (int c = 0; c < mesh.n_cells(); ++c)
    cells[c] = raster.at(mesh.cell_i(c) / fx, mesh.cell_j(c) / fy);
  return cells;
}

inline CoefficientField coefficient_from_raster(const Mesh& mesh,
                                                const RasterField& raster) {
  return CoefficientField(mesh, raster_to_cells(mesh, raster));
}

}  // namespace msgfem

#endif  // MSGFEM_RASTER_IO_HPP
