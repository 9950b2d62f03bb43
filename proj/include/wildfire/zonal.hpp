#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <stdexcept>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include "wildfire/format.hpp"

namespace wildfire::zonal {

// Raster header: enough to place every pixel center in map coordinates
// without reading a single value. (x_origin, y_origin) is the lower-left
// corner; row 0 of the value array is the northernmost row.
struct RasterMetadata {
  int n_rows = 0;
  int n_cols = 0;
  double x_origin = 0.0;
  double y_origin = 0.0;
  double cell_size = 1.0;
  double nodata = -9999.0;

  bool valid() const { return n_rows >= 1 && n_cols >= 1 && cell_size > 0.0; }

  double center_x(int col) const { return x_origin + (col + 0.5) * cell_size; }
  double center_y(int row) const { return y_origin + (n_rows - row - 0.5) * cell_size; }
};

struct RasterGrid {
  RasterMetadata meta;
  std::vector<double> values;  // row-major, row 0 at the top

  double at(int row, int col) const {
    return values[static_cast<std::size_t>(row) * meta.n_cols + col];
  }
};

struct Point {
  double x = 0.0;
  double y = 0.0;
  bool operator==(const Point&) const = default;
};

// Single closed ring: first vertex equals the last, at least 3 distinct
// vertices.
struct Polygon {
  long long id = 0;
  std::vector<Point> ring;
};

struct PolygonSet {
  std::vector<Polygon> polygons;
};

// One run of pixels covered by a polygon on one raster row; both column
// bounds inclusive.
struct IntersectionEntry {
  long long polygon_id = 0;
  int row = 0;
  int col_start = 0;
  int col_end = 0;
};

// Intermediate structure between the vector and raster worlds: every pixel
// range each polygon covers, sorted by (row, col_start), built from the
// polygons and the raster header alone.
struct IntersectionsFile {
  int n_rows = 0;
  int n_cols = 0;
  std::vector<long long> polygon_ids;  // full id universe, including empty polygons
  std::vector<IntersectionEntry> entries;
};

struct ZonalStats {
  std::uint64_t count = 0;  // non-nodata pixels; the other fields are
  double min = 0.0;         // meaningful only when count > 0
  double max = 0.0;
  double median = 0.0;
  double sum = 0.0;
  double mode = 0.0;
};

struct ZonalResult {
  std::map<long long, ZonalStats> by_id;
};

namespace detail {

// Crossing of the polygon edge (a, b) with the horizontal line at y.
// An edge participates iff exactly one endpoint lies strictly above the
// line, which gives each vertex to exactly one of its edges.
inline bool edge_crosses(const Point& a, const Point& b, double y) {
  return (a.y > y) != (b.y > y);
}

inline double edge_crossing_x(const Point& a, const Point& b, double y) {
  return (b.x - a.x) * (y - a.y) / (b.y - a.y) + a.x;
}

inline double ring_area2(const std::vector<Point>& ring) {
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < ring.size(); ++i)
    acc += ring[i].x * ring[i + 1].y - ring[i + 1].x * ring[i].y;
  return acc;
}

}  // namespace detail

// Builds the intersections file with a scanline over polygon edges: for
// each raster row, the even-odd spans at the row's center height become
// half-open pixel-center column ranges [enter, exit). A center exactly on
// a span boundary belongs to the span opening there, so abutting polygons
// partition shared pixels instead of double-counting them. Raster values
// are never touched. Degenerate (zero-area) rings contribute nothing and
// are reported through `warnings` when given.
inline IntersectionsFile build_intersections(const PolygonSet& polys, const RasterMetadata& meta,
                                             std::vector<std::string>* warnings = nullptr) {
  if (!meta.valid()) throw std::invalid_argument("invalid raster metadata");

  IntersectionsFile out;
  out.n_rows = meta.n_rows;
  out.n_cols = meta.n_cols;

  std::vector<double> crossings;
  for (const Polygon& poly : polys.polygons) {
    out.polygon_ids.push_back(poly.id);
    if (poly.ring.size() < 4 || poly.ring.front() != poly.ring.back())
      throw std::invalid_argument("polygon " + std::to_string(poly.id) +
                                  ": ring must be closed with at least 3 vertices");
    if (detail::ring_area2(poly.ring) == 0.0) {
      if (warnings)
        warnings->push_back("polygon " + std::to_string(poly.id) +
                            " has zero area; skipped");
      continue;
    }

    double y_min = poly.ring.front().y, y_max = y_min;
    for (const Point& p : poly.ring) {
      y_min = std::min(y_min, p.y);
      y_max = std::max(y_max, p.y);
    }
    // rows whose center heights can fall inside [y_min, y_max]
    int row_lo = static_cast<int>(
        std::floor((meta.y_origin + meta.n_rows * meta.cell_size - y_max) / meta.cell_size - 0.5));
    int row_hi = static_cast<int>(
        std::ceil((meta.y_origin + meta.n_rows * meta.cell_size - y_min) / meta.cell_size - 0.5));
    row_lo = std::max(row_lo, 0);
    row_hi = std::min(row_hi, meta.n_rows - 1);

    for (int row = row_lo; row <= row_hi; ++row) {
      const double y = meta.center_y(row);
      crossings.clear();
      for (std::size_t i = 0; i + 1 < poly.ring.size(); ++i) {
        const Point& a = poly.ring[i];
        const Point& b = poly.ring[i + 1];
        if (detail::edge_crosses(a, b, y)) crossings.push_back(detail::edge_crossing_x(a, b, y));
      }
      std::sort(crossings.begin(), crossings.end());
      for (std::size_t i = 0; i + 1 < crossings.size(); i += 2) {
        const double x_enter = crossings[i];
        const double x_exit = crossings[i + 1];
        // first center >= x_enter, last center < x_exit; nudge against the
        // canonical center formula so both routes agree at exact boundaries
        int c0 = static_cast<int>(std::ceil((x_enter - meta.x_origin) / meta.cell_size - 0.5));
        while (c0 > 0 && meta.center_x(c0 - 1) >= x_enter) --c0;
        while (c0 < meta.n_cols && meta.center_x(c0) < x_enter) ++c0;
        int c1 = static_cast<int>(std::floor((x_exit - meta.x_origin) / meta.cell_size - 0.5));
        while (c1 + 1 < meta.n_cols && meta.center_x(c1 + 1) < x_exit) ++c1;
        while (c1 >= 0 && meta.center_x(c1) >= x_exit) --c1;
        c0 = std::max(c0, 0);
        c1 = std::min(c1, meta.n_cols - 1);
        if (c0 <= c1) out.entries.push_back({poly.id, row, c0, c1});
      }
    }
  }

  std::sort(out.entries.begin(), out.entries.end(),
            [](const IntersectionEntry& a, const IntersectionEntry& b) {
              if (a.row != b.row) return a.row < b.row;
              if (a.col_start != b.col_start) return a.col_start < b.col_start;
              return a.polygon_id < b.polygon_id;
            });
  std::sort(out.polygon_ids.begin(), out.polygon_ids.end());
  return out;
}

namespace detail {

struct Accumulator {
  std::uint64_t count = 0;
  double min = 0.0;
  double max = 0.0;
  double sum = 0.0;
  std::map<double, std::uint64_t> freq;

  void add(double v) {
    if (count == 0) {
      min = max = v;
    } else {
      min = std::min(min, v);
      max = std::max(max, v);
    }
    sum += v;
    ++count;
    ++freq[v];
  }

  void merge(const Accumulator& other) {
    if (other.count == 0) return;
    if (count == 0) {
      min = other.min;
      max = other.max;
    } else {
      min = std::min(min, other.min);
      max = std::max(max, other.max);
    }
    sum += other.sum;
    count += other.count;
    for (const auto& [v, c] : other.freq) freq[v] += c;
  }

  ZonalStats finish() const {
    ZonalStats s;
    s.count = count;
    if (count == 0) return s;
    s.min = min;
    s.max = max;
    s.sum = sum;
    // lower median: the ceil(n/2)-th smallest value
    const std::uint64_t target = (count + 1) / 2;
    std::uint64_t seen = 0;
    std::uint64_t best_count = 0;
    for (const auto& [v, c] : freq) {
      if (seen < target && seen + c >= target) s.median = v;
      seen += c;
      if (c > best_count) {  // mode ties break toward the smallest value
        best_count = c;
        s.mode = v;
      }
    }
    return s;
  }
};

}  // namespace detail

// Aggregates the six summary statistics per polygon in one pass over the
// raster rows. Rows are partitioned across workers; per-worker partial
// accumulators merge deterministically, so the result does not depend on
// the worker count.
inline ZonalResult zonal_stats(const IntersectionsFile& ix, const RasterGrid& raster,
                               int n_workers = 0) {
  if (ix.n_rows != raster.meta.n_rows || ix.n_cols != raster.meta.n_cols)
    throw std::invalid_argument("intersections file does not match raster dimensions");
  if (n_workers <= 0) {
    n_workers = static_cast<int>(std::thread::hardware_concurrency());
    if (n_workers <= 0) n_workers = 1;
  }

  // entries are sorted by row: locate each worker's slice by binary search
  const auto row_begin = [&](int row) {
    return std::lower_bound(ix.entries.begin(), ix.entries.end(), row,
                            [](const IntersectionEntry& e, int r) { return e.row < r; });
  };

  using PartialMap = std::unordered_map<long long, detail::Accumulator>;
  std::vector<PartialMap> partials(static_cast<std::size_t>(n_workers));

  const int rows_per_worker = (ix.n_rows + n_workers - 1) / n_workers;
  std::vector<std::thread> threads;
  for (int w = 0; w < n_workers; ++w) {
    const int lo = w * rows_per_worker;
    const int hi = std::min(ix.n_rows, lo + rows_per_worker);
    if (lo >= hi) break;
    threads.emplace_back([&, w, lo, hi] {
      PartialMap& mine = partials[static_cast<std::size_t>(w)];
      auto it = row_begin(lo);
      const auto end = row_begin(hi);
      for (; it != end; ++it) {
        detail::Accumulator& acc = mine[it->polygon_id];
        for (int col = it->col_start; col <= it->col_end; ++col) {
          const double v = raster.at(it->row, col);
          if (v == raster.meta.nodata) continue;
          acc.add(v);
        }
      }
    });
  }
  for (std::thread& t : threads) t.join();

  std::map<long long, detail::Accumulator> merged;
  for (long long id : ix.polygon_ids) merged[id];  // keep empty polygons in the result
  for (const PartialMap& pm : partials)
    for (const auto& [id, acc] : pm) merged[id].merge(acc);

  ZonalResult result;
  for (const auto& [id, acc] : merged) result.by_id[id] = acc.finish();
  return result;
}

namespace detail {

inline int orient_sign(const Point& a, const Point& b, const Point& c) {
  const double v = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
  return v > 0.0 ? 1 : (v < 0.0 ? -1 : 0);
}

inline bool on_segment(const Point& a, const Point& b, const Point& p) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) &&
         std::min(a.y, b.y) <= p.y && p.y <= std::max(a.y, b.y);
}

// Closed-segment intersection, including touching endpoints and collinear
// overlap.
inline bool segments_intersect(const Point& p1, const Point& p2, const Point& q1,
                               const Point& q2) {
  const int o1 = orient_sign(p1, p2, q1);
  const int o2 = orient_sign(p1, p2, q2);
  const int o3 = orient_sign(q1, q2, p1);
  const int o4 = orient_sign(q1, q2, p2);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(p1, p2, q1)) return true;
  if (o2 == 0 && on_segment(p1, p2, q2)) return true;
  if (o3 == 0 && on_segment(q1, q2, p1)) return true;
  if (o4 == 0 && on_segment(q1, q2, p2)) return true;
  return false;
}

// Even-odd point-in-polygon; boundary points are not guaranteed either way
// (callers handle the boundary with segment tests first).
inline bool point_in_ring(const std::vector<Point>& ring, const Point& p) {
  bool inside = false;
  for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
    const Point& a = ring[i];
    const Point& b = ring[i + 1];
    if (edge_crosses(a, b, p.y) && p.x < edge_crossing_x(a, b, p.y)) inside = !inside;
  }
  return inside;
}

struct Box {
  double x0, y0, x1, y1;
};

inline Box bounding_box(const std::vector<Point>& ring) {
  Box b{ring[0].x, ring[0].y, ring[0].x, ring[0].y};
  for (const Point& p : ring) {
    b.x0 = std::min(b.x0, p.x);
    b.y0 = std::min(b.y0, p.y);
    b.x1 = std::max(b.x1, p.x);
    b.y1 = std::max(b.y1, p.y);
  }
  return b;
}

inline bool polygons_intersect(const Polygon& a, const Polygon& b) {
  for (std::size_t i = 0; i + 1 < a.ring.size(); ++i)
    for (std::size_t j = 0; j + 1 < b.ring.size(); ++j)
      if (segments_intersect(a.ring[i], a.ring[i + 1], b.ring[j], b.ring[j + 1])) return true;
  if (point_in_ring(b.ring, a.ring.front())) return true;
  if (point_in_ring(a.ring, b.ring.front())) return true;
  return false;
}

}  // namespace detail

// Spatial self-join with the `intersects` predicate: every pair of
// polygons that share boundary or interior, reported once as (lower id,
// higher id). Touching corners count.
inline std::vector<std::pair<long long, long long>> neighbor_join(const PolygonSet& polys) {
  struct Indexed {
    detail::Box box;
    const Polygon* poly;
  };
  std::vector<Indexed> items;
  items.reserve(polys.polygons.size());
  for (const Polygon& p : polys.polygons) {
    if (p.ring.size() < 4) throw std::invalid_argument("polygon ring too short");
    items.push_back({detail::bounding_box(p.ring), &p});
  }
  std::sort(items.begin(), items.end(),
            [](const Indexed& a, const Indexed& b) { return a.box.x0 < b.box.x0; });

  std::vector<std::pair<long long, long long>> pairs;
  for (std::size_t i = 0; i < items.size(); ++i) {
    for (std::size_t j = i + 1; j < items.size(); ++j) {
      if (items[j].box.x0 > items[i].box.x1) break;  // sweep: no further x-overlap
      if (items[j].box.y0 > items[i].box.y1 || items[j].box.y1 < items[i].box.y0) continue;
      if (!detail::polygons_intersect(*items[i].poly, *items[j].poly)) continue;
      const long long a = items[i].poly->id;
      const long long b = items[j].poly->id;
      pairs.emplace_back(std::min(a, b), std::max(a, b));
    }
  }
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
  return pairs;
}

inline const std::vector<std::string>& all_stat_names() {
  static const std::vector<std::string> names = {"min", "max", "median", "sum", "mode", "count"};
  return names;
}

// Joins one ZonalResult per raster layer into a single covariate CSV: one
// row per polygon id, one column per (layer, statistic). Every layer must
// cover exactly the same ids. Returns the number of data rows written.
// Polygons with no pixels get empty statistic fields.
inline std::size_t export_covariates(
    const std::vector<std::pair<std::string, ZonalResult>>& layers, const std::string& out_path,
    const std::vector<std::string>& stats = all_stat_names()) {
  for (const std::string& s : stats)
    if (std::find(all_stat_names().begin(), all_stat_names().end(), s) == all_stat_names().end())
      throw std::invalid_argument("unknown statistic: " + s);

  std::vector<long long> ids;
  if (!layers.empty())
    for (const auto& [id, st] : layers.front().second.by_id) ids.push_back(id);

  for (std::size_t l = 1; l < layers.size(); ++l) {
    std::string missing;
    for (long long id : ids)
      if (!layers[l].second.by_id.count(id)) missing += " " + std::to_string(id);
    for (const auto& [id, st] : layers[l].second.by_id)
      if (!std::binary_search(ids.begin(), ids.end(), id)) missing += " " + std::to_string(id);
    if (!missing.empty())
      throw std::invalid_argument("layer '" + layers[l].first +
                                  "' id mismatch; offending ids:" + missing);
  }

  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + out_path);

  out << "id";
  for (const auto& [name, result] : layers)
    for (const std::string& s : stats) out << ',' << name << '_' << s;
  out << '\n';

  for (long long id : ids) {
    out << id;
    for (const auto& [name, result] : layers) {
      const ZonalStats& st = result.by_id.at(id);
      for (const std::string& s : stats) {
        out << ',';
        if (s == "count") {
          out << st.count;
        } else if (st.count > 0) {
          double v = 0.0;
          if (s == "min") v = st.min;
          else if (s == "max") v = st.max;
          else if (s == "median") v = st.median;
          else if (s == "sum") v = st.sum;
          else v = st.mode;
          out << format_double(v);
        }
      }
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + out_path);
  return ids.size();
}

}  // namespace wildfire::zonal
