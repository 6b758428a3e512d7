#include "hotspot/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "hotspot/errors.hpp"

namespace hotspot::geom {

namespace {

constexpr double kHalfPi = 1.57079632679489661923;

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

}  // namespace

StudyRegion StudyRegion::from_bbox(double min_x, double min_y, double max_x, double max_y) {
  StudyRegion r{min_x, min_y, max_x, max_y, (max_x - min_x) * (max_y - min_y)};
  r.validate();
  return r;
}

void StudyRegion::validate() const {
  if (!(max_x > min_x) || !(max_y > min_y)) {
    throw ValidationError("study region must have max_x > min_x and max_y > min_y");
  }
  if (!(total_area_sqft > 0.0) || total_area_sqft > bbox_area_sqft() * (1.0 + 1e-12)) {
    throw ValidationError("study region total_area_sqft must be positive and at most the bbox area");
  }
}

Point GridSpec::to_lattice(double x, double y) const {
  const double c = std::cos(rotation_rad);
  const double s = std::sin(rotation_rad);
  const double dx = x - origin_x;
  const double dy = y - origin_y;
  return {c * dx + s * dy, -s * dx + c * dy};
}

Point GridSpec::to_world(double u, double v) const {
  const double c = std::cos(rotation_rad);
  const double s = std::sin(rotation_rad);
  return {origin_x + c * u - s * v, origin_y + s * u + c * v};
}

CellIndex make_cell(const GridSpec& grid, int col, int row) {
  if (col < 0 || col >= grid.n_cols || row < 0 || row >= grid.n_rows) {
    throw ValidationError("cell index (" + std::to_string(col) + "," + std::to_string(row) +
                          ") outside grid " + std::to_string(grid.n_cols) + "x" +
                          std::to_string(grid.n_rows));
  }
  return CellIndex{col, row, static_cast<std::int64_t>(row) * grid.n_cols + col};
}

CellIndex cell_from_flat(const GridSpec& grid, std::int64_t flat_id) {
  if (flat_id < 0 || flat_id >= grid.n_cells()) {
    throw ValidationError("flat cell id " + std::to_string(flat_id) + " outside grid with " +
                          std::to_string(grid.n_cells()) + " cells");
  }
  const int row = static_cast<int>(flat_id / grid.n_cols);
  const int col = static_cast<int>(flat_id % grid.n_cols);
  return CellIndex{col, row, flat_id};
}

GridSpec build_grid(const StudyRegion& region, double cell_w_ft, double cell_h_ft,
                    double rotation_rad, bool allow_out_of_bounds) {
  region.validate();
  if (!(cell_w_ft > 0.0) || !(cell_h_ft > 0.0)) {
    throw ValidationError("cell dimensions must be positive");
  }
  if (!(rotation_rad >= 0.0) || !(rotation_rad < kHalfPi)) {
    throw ValidationError("grid rotation must lie in [0, pi/2)");
  }
  const double area = cell_w_ft * cell_h_ft;
  if (!allow_out_of_bounds && (area < kMinCellAreaSqft || area > kMaxCellAreaSqft)) {
    throw ValidationError("cell area " + fmt(area) + " sq ft outside the competition bounds [" +
                          fmt(kMinCellAreaSqft) + ", " + fmt(kMaxCellAreaSqft) +
                          "]; pass the override flag to permit it");
  }

  const Point pivot = region.centroid();
  const double c = std::cos(rotation_rad);
  const double s = std::sin(rotation_rad);
  // Bounding box corners in the lattice frame (rotated by -theta about the pivot).
  const std::array<Point, 4> corners = {Point{region.min_x, region.min_y},
                                        Point{region.max_x, region.min_y},
                                        Point{region.max_x, region.max_y},
                                        Point{region.min_x, region.max_y}};
  double lu_min = 1e300, lu_max = -1e300, lv_min = 1e300, lv_max = -1e300;
  for (const auto& p : corners) {
    const double dx = p.x - pivot.x;
    const double dy = p.y - pivot.y;
    const double u = pivot.x + c * dx + s * dy;
    const double v = pivot.y - s * dx + c * dy;
    lu_min = std::min(lu_min, u);
    lu_max = std::max(lu_max, u);
    lv_min = std::min(lv_min, v);
    lv_max = std::max(lv_max, v);
  }
  const auto cover = [](double extent, double cell) {
    return std::max(1, static_cast<int>(std::ceil(extent / cell - 1e-9)));
  };
  GridSpec grid;
  grid.cell_w_ft = cell_w_ft;
  grid.cell_h_ft = cell_h_ft;
  grid.rotation_rad = rotation_rad;
  grid.n_cols = cover(lu_max - lu_min, cell_w_ft);
  grid.n_rows = cover(lv_max - lv_min, cell_h_ft);
  // Center the lattice on the pivot (the rotated bbox is symmetric about it),
  // then express the lattice corner in world coordinates.
  const double anchor_u = pivot.x - 0.5 * grid.n_cols * cell_w_ft;
  const double anchor_v = pivot.y - 0.5 * grid.n_rows * cell_h_ft;
  grid.origin_x = pivot.x + c * (anchor_u - pivot.x) - s * (anchor_v - pivot.y);
  grid.origin_y = pivot.y + s * (anchor_u - pivot.x) + c * (anchor_v - pivot.y);
  return grid;
}

std::optional<CellIndex> try_point_to_cell(const GridSpec& grid, double x_ft, double y_ft) {
  const Point l = grid.to_lattice(x_ft, y_ft);
  const auto locate = [](double coord, double cell, int n) -> int {
    int idx = static_cast<int>(std::floor(coord / cell));
    if (idx == -1 && coord >= -kEdgeTolFt) idx = 0;
    if (idx == n && coord <= n * cell + kEdgeTolFt) idx = n - 1;
    return idx;
  };
  const int col = locate(l.x, grid.cell_w_ft, grid.n_cols);
  const int row = locate(l.y, grid.cell_h_ft, grid.n_rows);
  if (col < 0 || col >= grid.n_cols || row < 0 || row >= grid.n_rows) return std::nullopt;
  return CellIndex{col, row, static_cast<std::int64_t>(row) * grid.n_cols + col};
}

CellIndex point_to_cell(const GridSpec& grid, double x_ft, double y_ft) {
  const auto cell = try_point_to_cell(grid, x_ft, y_ft);
  if (!cell) {
    throw ValidationError("point (" + fmt(x_ft) + ", " + fmt(y_ft) + ") outside grid coverage");
  }
  return *cell;
}

Point cell_centroid(const GridSpec& grid, const CellIndex& cell) {
  make_cell(grid, cell.col, cell.row);  // bounds check
  return grid.to_world((cell.col + 0.5) * grid.cell_w_ft, (cell.row + 0.5) * grid.cell_h_ft);
}

std::array<Point, 4> cell_polygon(const GridSpec& grid, const CellIndex& cell) {
  make_cell(grid, cell.col, cell.row);
  const double u0 = cell.col * grid.cell_w_ft;
  const double v0 = cell.row * grid.cell_h_ft;
  const double u1 = u0 + grid.cell_w_ft;
  const double v1 = v0 + grid.cell_h_ft;
  return {grid.to_world(u0, v0), grid.to_world(u1, v0), grid.to_world(u1, v1),
          grid.to_world(u0, v1)};
}

namespace {

// Separating-axis test for two convex quads; touching counts as intersecting.
bool quads_intersect(const std::array<Point, 4>& a, const std::array<Point, 4>& b) {
  const auto separated_on = [](const std::array<Point, 4>& p, const std::array<Point, 4>& q,
                               double ax, double ay) {
    double p_lo = 1e300, p_hi = -1e300, q_lo = 1e300, q_hi = -1e300;
    for (const auto& v : p) {
      const double t = ax * v.x + ay * v.y;
      p_lo = std::min(p_lo, t);
      p_hi = std::max(p_hi, t);
    }
    for (const auto& v : q) {
      const double t = ax * v.x + ay * v.y;
      q_lo = std::min(q_lo, t);
      q_hi = std::max(q_hi, t);
    }
    return p_hi < q_lo || q_hi < p_lo;
  };
  for (const auto* quad : {&a, &b}) {
    for (int i = 0; i < 4; ++i) {
      const Point& p0 = (*quad)[i];
      const Point& p1 = (*quad)[(i + 1) % 4];
      const double ex = p1.x - p0.x;
      const double ey = p1.y - p0.y;
      if (separated_on(a, b, -ey, ex)) return false;
    }
  }
  return true;
}

}  // namespace

std::vector<bool> active_cells(const GridSpec& grid, const StudyRegion& region) {
  const std::array<Point, 4> region_quad = {Point{region.min_x, region.min_y},
                                            Point{region.max_x, region.min_y},
                                            Point{region.max_x, region.max_y},
                                            Point{region.min_x, region.max_y}};
  std::vector<bool> active(static_cast<size_t>(grid.n_cells()), false);
  for (int row = 0; row < grid.n_rows; ++row) {
    for (int col = 0; col < grid.n_cols; ++col) {
      const CellIndex cell{col, row, static_cast<std::int64_t>(row) * grid.n_cols + col};
      active[static_cast<size_t>(cell.flat_id)] =
          quads_intersect(cell_polygon(grid, cell), region_quad);
    }
  }
  return active;
}

std::string polygon_wkt(const std::array<Point, 4>& poly) {
  char buf[256];
  std::string out = "POLYGON ((";
  for (int i = 0; i < 5; ++i) {
    const Point& p = poly[static_cast<size_t>(i % 4)];
    std::snprintf(buf, sizeof(buf), "%.6f %.6f", p.x, p.y);
    out += buf;
    if (i < 4) out += ", ";
  }
  out += "))";
  return out;
}

}  // namespace hotspot::geom
