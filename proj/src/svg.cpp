#include "hotspot/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

namespace hotspot::io {

namespace {

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

}  // namespace

std::string render_hotspot_map(const geom::GridSpec& grid,
                               std::span<const std::int64_t> chosen,
                               const std::vector<std::int64_t>* truth_counts,
                               std::span<const events::EventRecord> evs,
                               const std::vector<bool>* active) {
  // World-frame hull over every cell corner.
  double min_x = 1e300, min_y = 1e300, max_x = -1e300, max_y = -1e300;
  for (const int col : {0, grid.n_cols}) {
    for (const int row : {0, grid.n_rows}) {
      const geom::Point p = grid.to_world(col * grid.cell_w_ft, row * grid.cell_h_ft);
      min_x = std::min(min_x, p.x);
      min_y = std::min(min_y, p.y);
      max_x = std::max(max_x, p.x);
      max_y = std::max(max_y, p.y);
    }
  }
  const double pad = 0.02 * std::max(max_x - min_x, max_y - min_y);
  min_x -= pad;
  min_y -= pad;
  max_x += pad;
  max_y += pad;
  const double scale = 900.0 / std::max(max_x - min_x, max_y - min_y);
  const double width = (max_x - min_x) * scale;
  const double height = (max_y - min_y) * scale;
  const auto sx = [&](double x) { return (x - min_x) * scale; };
  const auto sy = [&](double y) { return height - (y - min_y) * scale; };  // y up

  const std::set<std::int64_t> selected(chosen.begin(), chosen.end());
  std::set<std::int64_t> hot;
  if (truth_counts) {
    std::vector<std::int64_t> order;
    for (std::int64_t c = 0; c < grid.n_cells(); ++c) {
      if (active && !(*active)[static_cast<size_t>(c)]) continue;
      order.push_back(c);
    }
    std::stable_sort(order.begin(), order.end(), [&](std::int64_t l, std::int64_t r) {
      const std::int64_t cl = (*truth_counts)[static_cast<size_t>(l)];
      const std::int64_t cr = (*truth_counts)[static_cast<size_t>(r)];
      if (cl != cr) return cl > cr;
      return l < r;
    });
    for (size_t i = 0; i < std::min(order.size(), selected.size()); ++i) hot.insert(order[i]);
  }

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width) + "\" height=\"" +
         num(height) + "\" viewBox=\"0 0 " + num(width) + " " + num(height) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (std::int64_t c = 0; c < grid.n_cells(); ++c) {
    const bool is_active = !active || (*active)[static_cast<size_t>(c)];
    const bool sel = selected.count(c) > 0;
    const bool is_hot = hot.count(c) > 0;
    std::string fill = "none";
    if (truth_counts) {
      if (sel && is_hot) {
        fill = "#2e8b57";  // correct forecast
      } else if (sel) {
        fill = "#4169e1";  // false positive
      } else if (is_hot) {
        fill = "#d22b2b";  // false negative
      }
    } else if (sel) {
      fill = "#4169e1";
    }
    const auto poly = geom::cell_polygon(grid, geom::cell_from_flat(grid, c));
    svg += "<polygon points=\"";
    for (const auto& p : poly) {
      svg += num(sx(p.x)) + "," + num(sy(p.y)) + " ";
    }
    svg += "\" fill=\"" + fill + "\" fill-opacity=\"0.6\" stroke=\"" +
           (is_active ? std::string("#999999") : std::string("#dddddd")) +
           "\" stroke-width=\"0.5\"/>\n";
  }
  for (const auto& ev : evs) {
    svg += "<circle cx=\"" + num(sx(ev.x_ft)) + "\" cy=\"" + num(sy(ev.y_ft)) +
           "\" r=\"1.5\" fill=\"black\"/>\n";
  }
  svg += "</svg>\n";
  return svg;
}

std::string render_error_curve(std::span<const rff::ApproximationRow> rows,
                               const std::string& title) {
  const double width = 640.0, height = 420.0, margin = 60.0;
  double max_err = 1e-12;
  double max_d = 1.0;
  for (const auto& r : rows) {
    max_err = std::max(max_err, r.max_abs_err);
    max_d = std::max(max_d, static_cast<double>(r.d));
  }
  const auto px = [&](double d) {
    return margin + (std::log10(d) / std::log10(max_d)) * (width - 2 * margin);
  };
  const auto py = [&](double e) {
    return height - margin - (e / max_err) * (height - 2 * margin);
  };
  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width) + "\" height=\"" +
         num(height) + "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<text x=\"" + num(width / 2) + "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" +
         title + "</text>\n";
  svg += "<line x1=\"" + num(margin) + "\" y1=\"" + num(height - margin) + "\" x2=\"" +
         num(width - margin) + "\" y2=\"" + num(height - margin) +
         "\" stroke=\"black\"/>\n";
  svg += "<line x1=\"" + num(margin) + "\" y1=\"" + num(margin) + "\" x2=\"" + num(margin) +
         "\" y2=\"" + num(height - margin) + "\" stroke=\"black\"/>\n";
  for (const char* which : {"mean", "max"}) {
    const bool mean = std::string(which) == "mean";
    std::string path = "M ";
    for (const auto& r : rows) {
      path += num(px(r.d)) + " " + num(py(mean ? r.mean_abs_err : r.max_abs_err)) + " L ";
    }
    if (path.size() > 3) path.erase(path.size() - 3);
    svg += "<path d=\"" + path + "\" fill=\"none\" stroke=\"" +
           (mean ? std::string("#4169e1") : std::string("#d22b2b")) +
           "\" stroke-width=\"2\"/>\n";
  }
  for (const auto& r : rows) {
    svg += "<text x=\"" + num(px(r.d)) + "\" y=\"" + num(height - margin + 18) +
           "\" text-anchor=\"middle\" font-size=\"12\">d=" + std::to_string(r.d) + "</text>\n";
  }
  svg += "<text x=\"" + num(width - margin) + "\" y=\"" + num(margin) +
         "\" text-anchor=\"end\" font-size=\"12\" fill=\"#4169e1\">mean abs err</text>\n";
  svg += "<text x=\"" + num(width - margin) + "\" y=\"" + num(margin + 16) +
         "\" text-anchor=\"end\" font-size=\"12\" fill=\"#d22b2b\">max abs err</text>\n";
  svg += "</svg>\n";
  return svg;
}

}  // namespace hotspot::io
