#include <catch2/catch.hpp>

#include <chrono>
#include <cmath>

#include "wildfire/rng.hpp"
#include "wildfire/zonal.hpp"

using namespace wildfire::zonal;
using wildfire::Rng;

namespace {

PolygonSet small_random_polygons(int n, Rng& rng, double extent) {
  PolygonSet set;
  for (int i = 0; i < n; ++i) {
    const double cx = rng.uniform(0.0, extent);
    const double cy = rng.uniform(0.0, extent);
    const double w = rng.uniform(0.3, 2.0);
    const double h = rng.uniform(0.3, 2.0);
    set.polygons.push_back(
        Polygon{i, {{cx, cy}, {cx + w, cy}, {cx + w, cy + h}, {cx, cy + h}, {cx, cy}}});
  }
  return set;
}

// Repeats the body enough times for a stable reading and takes the best of
// three outer passes, so one-shot scheduler noise cannot dominate.
template <typename F>
double stable_ms(int inner_reps, F&& f) {
  double best = 1e100;
  for (int outer = 0; outer < 3; ++outer) {
    const auto t0 = std::chrono::steady_clock::now();
    for (int r = 0; r < inner_reps; ++r) f();
    const auto t1 = std::chrono::steady_clock::now();
    best = std::min(best,
                    std::chrono::duration<double, std::milli>(t1 - t0).count() / inner_reps);
  }
  return best;
}

}  // namespace

TEST_CASE("intersections construction scales near n log n in the polygon count", "[perf]") {
  RasterMetadata meta;
  meta.n_rows = 512;
  meta.n_cols = 512;
  meta.cell_size = 1.0;

  const std::vector<int> sizes = {1000, 10000, 100000};
  std::vector<double> normalized;
  Rng rng(2024);
  for (int n : sizes) {
    const PolygonSet polys = small_random_polygons(n, rng, 512.0);
    const int reps = n >= 100000 ? 3 : (n >= 10000 ? 20 : 200);
    const double ms = stable_ms(reps, [&] {
      const auto ix = build_intersections(polys, meta);
      REQUIRE(ix.polygon_ids.size() == static_cast<std::size_t>(n));
    });
    normalized.push_back(ms / (n * std::log2(static_cast<double>(n))));
  }

  double mean = 0;
  for (double v : normalized) mean += v;
  mean /= static_cast<double>(normalized.size());
  for (std::size_t i = 0; i < normalized.size(); ++i) {
    INFO("n=" << sizes[i] << " time/(n log n)=" << normalized[i] << " mean=" << mean);
    CHECK(std::abs(normalized[i] - mean) <= 0.35 * mean);
  }
}
