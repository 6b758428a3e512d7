#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace hotspot::geom {

inline constexpr double kSqftPerSqMile = 27878400.0;
inline constexpr double kMinCellAreaSqft = 62500.0;   // competition lower bound
inline constexpr double kMaxCellAreaSqft = 360000.0;  // competition upper bound

struct Point {
  double x = 0.0;
  double y = 0.0;
};

// Planar study window, coordinates in feet (already projected; no geodesy).
// total_area_sqft may be smaller than the bounding box when the true service
// area does not fill the box; it is what PAI uses as A by default.
struct StudyRegion {
  double min_x = 0.0;
  double min_y = 0.0;
  double max_x = 0.0;
  double max_y = 0.0;
  double total_area_sqft = 0.0;

  double width() const { return max_x - min_x; }
  double height() const { return max_y - min_y; }
  double bbox_area_sqft() const { return width() * height(); }
  Point centroid() const { return {0.5 * (min_x + max_x), 0.5 * (min_y + max_y)}; }

  static StudyRegion from_bbox(double min_x, double min_y, double max_x, double max_y);
  void validate() const;  // throws ValidationError
};

// Rotated rectangular tessellation. `origin` is the world position of the
// lower-left corner of cell (0,0); rotating lattice axes by rotation_rad about
// that corner gives world axes. Cell (col,row) spans
//   [col*w, (col+1)*w) x [row*h, (row+1)*h)
// in the lattice frame (half-open edges).
struct GridSpec {
  double cell_w_ft = 0.0;
  double cell_h_ft = 0.0;
  double rotation_rad = 0.0;  // [0, pi/2)
  double origin_x = 0.0;
  double origin_y = 0.0;
  int n_cols = 0;
  int n_rows = 0;

  std::int64_t n_cells() const { return static_cast<std::int64_t>(n_cols) * n_rows; }
  double cell_area_sqft() const { return cell_w_ft * cell_h_ft; }

  Point to_lattice(double x, double y) const;
  Point to_world(double u, double v) const;
};

struct CellIndex {
  int col = 0;
  int row = 0;
  std::int64_t flat_id = 0;  // row * n_cols + col

  bool operator==(const CellIndex&) const = default;
};

CellIndex make_cell(const GridSpec& grid, int col, int row);
CellIndex cell_from_flat(const GridSpec& grid, std::int64_t flat_id);

// Minimal lattice covering the region's bounding box, centered on the region
// centroid (the rotation pivot while constructing; the stored origin is the
// lattice corner). Cell area must lie in the competition bounds unless
// allow_out_of_bounds is set.
GridSpec build_grid(const StudyRegion& region, double cell_w_ft, double cell_h_ft,
                    double rotation_rad, bool allow_out_of_bounds = false);

// Half-open cells; points within kEdgeTolFt of the outer hull clamp into the
// nearest edge cell so the closed region stays fully covered.
inline constexpr double kEdgeTolFt = 1e-6;
std::optional<CellIndex> try_point_to_cell(const GridSpec& grid, double x_ft, double y_ft);
CellIndex point_to_cell(const GridSpec& grid, double x_ft, double y_ft);  // throws if outside

Point cell_centroid(const GridSpec& grid, const CellIndex& cell);

// Counterclockwise world-frame corners, starting at the cell's lattice
// lower-left corner.
std::array<Point, 4> cell_polygon(const GridSpec& grid, const CellIndex& cell);

// active[flat_id] = cell polygon intersects the region rectangle. Cells wholly
// outside are excluded from training and selection.
std::vector<bool> active_cells(const GridSpec& grid, const StudyRegion& region);

std::string polygon_wkt(const std::array<Point, 4>& poly);

}  // namespace hotspot::geom
