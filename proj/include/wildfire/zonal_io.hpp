#pragma once

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "wildfire/zonal.hpp"

namespace wildfire::zonal {

namespace detail {

inline std::string trimmed(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

inline std::string upper(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  return s;
}

}  // namespace detail

// Parses `POLYGON ((x y, x y, ...))` with a single ring.
inline std::vector<Point> parse_wkt_polygon(const std::string& wkt_in) {
  std::string wkt = detail::trimmed(wkt_in);
  if (wkt.size() >= 2 && wkt.front() == '"' && wkt.back() == '"')
    wkt = detail::trimmed(wkt.substr(1, wkt.size() - 2));
  const std::string up = detail::upper(wkt);
  if (up.rfind("POLYGON", 0) != 0) throw std::invalid_argument("not a POLYGON: " + wkt);

  const std::size_t open = wkt.find('(');
  const std::size_t close = wkt.rfind(')');
  if (open == std::string::npos || close == std::string::npos || close <= open)
    throw std::invalid_argument("malformed POLYGON: " + wkt);
  std::string body = detail::trimmed(wkt.substr(open + 1, close - open - 1));
  if (body.empty() || body.front() != '(' || body.back() != ')')
    throw std::invalid_argument("malformed POLYGON ring: " + wkt);
  if (body.find(')') != body.size() - 1)
    throw std::invalid_argument("multi-ring polygons are not supported: " + wkt);
  body = body.substr(1, body.size() - 2);

  std::vector<Point> ring;
  std::stringstream ss(body);
  std::string pair;
  while (std::getline(ss, pair, ',')) {
    std::istringstream ps(pair);
    Point p;
    if (!(ps >> p.x >> p.y)) throw std::invalid_argument("bad coordinate pair: " + pair);
    ring.push_back(p);
  }
  if (ring.size() < 4 || !(ring.front() == ring.back()))
    throw std::invalid_argument("ring must be closed with at least 3 vertices");
  return ring;
}

// Polygon file: CSV of `id,wkt`, one polygon per line, optional header.
// The wkt field may be quoted; everything after the first comma belongs
// to it.
inline PolygonSet load_polygons_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open polygon file: " + path);
  PolygonSet set;
  std::string line;
  std::size_t line_no = 0;
  std::vector<long long> seen;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string t = detail::trimmed(line);
    if (t.empty()) continue;
    if (line_no == 1 && detail::upper(t).rfind("ID,", 0) == 0) continue;  // header
    const std::size_t comma = t.find(',');
    if (comma == std::string::npos)
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": expected 'id,wkt'");
    Polygon poly;
    try {
      poly.id = std::stoll(t.substr(0, comma));
      poly.ring = parse_wkt_polygon(t.substr(comma + 1));
    } catch (const std::exception& e) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
    seen.push_back(poly.id);
    set.polygons.push_back(std::move(poly));
  }
  std::sort(seen.begin(), seen.end());
  if (std::adjacent_find(seen.begin(), seen.end()) != seen.end())
    throw std::runtime_error(path + ": duplicate polygon id");
  return set;
}

// Raster file: six header lines (ncols, nrows, xllcorner, yllcorner,
// cellsize, nodata_value) followed by row-major values, northern row
// first.
inline RasterGrid load_ascii_raster(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open raster file: " + path);

  RasterGrid grid;
  const char* keys[6] = {"ncols", "nrows", "xllcorner", "yllcorner", "cellsize", "nodata_value"};
  double vals[6];
  for (int i = 0; i < 6; ++i) {
    std::string key;
    if (!(in >> key >> vals[i]))
      throw std::runtime_error(path + ": truncated header, expected " + keys[i]);
    std::string lower = key;
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (lower != keys[i])
      throw std::runtime_error(path + ": expected header line '" + keys[i] + "', got '" + key +
                               "'");
  }
  grid.meta.n_cols = static_cast<int>(vals[0]);
  grid.meta.n_rows = static_cast<int>(vals[1]);
  grid.meta.x_origin = vals[2];
  grid.meta.y_origin = vals[3];
  grid.meta.cell_size = vals[4];
  grid.meta.nodata = vals[5];
  if (!grid.meta.valid()) throw std::runtime_error(path + ": invalid raster header");

  const std::size_t n = static_cast<std::size_t>(grid.meta.n_rows) * grid.meta.n_cols;
  grid.values.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    if (!(in >> grid.values[i]))
      throw std::runtime_error(path + ": truncated values after " + std::to_string(i) +
                               " entries");
  return grid;
}

inline void save_ascii_raster(const RasterGrid& grid, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write raster file: " + path);
  out << "ncols " << grid.meta.n_cols << "\n";
  out << "nrows " << grid.meta.n_rows << "\n";
  out << "xllcorner " << format_double(grid.meta.x_origin) << "\n";
  out << "yllcorner " << format_double(grid.meta.y_origin) << "\n";
  out << "cellsize " << format_double(grid.meta.cell_size) << "\n";
  out << "nodata_value " << format_double(grid.meta.nodata) << "\n";
  for (int r = 0; r < grid.meta.n_rows; ++r) {
    for (int c = 0; c < grid.meta.n_cols; ++c) {
      if (c) out << ' ';
      out << format_double(grid.at(r, c));
    }
    out << '\n';
  }
}

}  // namespace wildfire::zonal
