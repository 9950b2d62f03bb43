// Test-only zonal statistics oracle: naive per-pixel rasterization written
// independently of the scanline/intersections path under test.
#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include "wildfire/rng.hpp"
#include "wildfire/zonal.hpp"

namespace testoracle {

// Classic even-odd crossing test with the same boundary convention as the
// engine: a point on a span's opening edge is inside, on its closing edge
// outside.
inline bool pnpoly(const std::vector<wildfire::zonal::Point>& ring, double x, double y) {
  bool inside = false;
  for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
    const auto& a = ring[i];
    const auto& b = ring[i + 1];
    if (((a.y > y) != (b.y > y)) && (x < (b.x - a.x) * (y - a.y) / (b.y - a.y) + a.x))
      inside = !inside;
  }
  return inside;
}

// Visits every pixel center of the raster for every polygon and aggregates
// the six statistics directly.
inline std::map<long long, wildfire::zonal::ZonalStats> naive_zonal(
    const wildfire::zonal::PolygonSet& polys, const wildfire::zonal::RasterGrid& raster) {
  std::map<long long, wildfire::zonal::ZonalStats> out;
  for (const auto& poly : polys.polygons) {
    std::vector<double> values;
    for (int r = 0; r < raster.meta.n_rows; ++r) {
      for (int c = 0; c < raster.meta.n_cols; ++c) {
        if (!pnpoly(poly.ring, raster.meta.center_x(c), raster.meta.center_y(r))) continue;
        const double v = raster.at(r, c);
        if (v == raster.meta.nodata) continue;
        values.push_back(v);
      }
    }
    wildfire::zonal::ZonalStats st;
    st.count = values.size();
    if (!values.empty()) {
      std::sort(values.begin(), values.end());
      st.min = values.front();
      st.max = values.back();
      st.median = values[(values.size() + 1) / 2 - 1];  // lower median
      st.sum = 0;
      for (double v : values) st.sum += v;
      std::map<double, std::uint64_t> freq;
      for (double v : values) ++freq[v];
      std::uint64_t best = 0;
      for (const auto& [v, n] : freq) {
        if (n > best) {
          best = n;
          st.mode = v;
        }
      }
    }
    out[poly.id] = st;
  }
  return out;
}

inline bool stats_equal(const wildfire::zonal::ZonalStats& a,
                        const wildfire::zonal::ZonalStats& b) {
  if (a.count != b.count) return false;
  if (a.count == 0) return true;
  return a.min == b.min && a.max == b.max && a.median == b.median && a.sum == b.sum &&
         a.mode == b.mode;
}

// star-shaped simple polygon around a random center
inline wildfire::zonal::Polygon random_polygon(long long id, wildfire::Rng& rng, double extent) {
  const double cx = rng.uniform(0.0, extent);
  const double cy = rng.uniform(0.0, extent);
  const int k = 3 + rng.index(6);
  std::vector<double> angles;
  for (int i = 0; i < k; ++i) angles.push_back(rng.uniform(0.0, 2 * 3.14159265358979));
  std::sort(angles.begin(), angles.end());
  wildfire::zonal::Polygon p;
  p.id = id;
  for (double a : angles) {
    const double r = rng.uniform(0.5, extent / 3);
    p.ring.push_back({cx + r * std::cos(a), cy + r * std::sin(a)});
  }
  p.ring.push_back(p.ring.front());
  return p;
}

}  // namespace testoracle
