#include "flowcritic/analysis/error_maps.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace flowcritic::analysis {

GridMap evaluate_grid(int n, double lo, double hi,
                      const std::function<double(double, double)>& fn) {
  if (n < 2) throw std::invalid_argument("evaluate_grid: need n >= 2");
  GridMap map;
  map.n = n;
  map.lo = lo;
  map.hi = hi;
  map.values.resize(static_cast<std::size_t>(n) * n);
  for (int iy = 0; iy < n; ++iy) {
    const double y = map.coord(iy);
    for (int ix = 0; ix < n; ++ix)
      map.values[static_cast<std::size_t>(iy) * n + ix] = fn(map.coord(ix), y);
  }
  return map;
}

bool in_toy_region(double x, double y, ToyRegionKind region) {
  const bool in_disk = std::sqrt(x * x + y * y) <= 1.0;
  const bool in_train = std::abs(x) <= 2.0 && std::abs(y) <= 2.0;
  switch (region) {
    case ToyRegionKind::kDisk:
      return in_disk;
    case ToyRegionKind::kTrainOutsideDisk:
      return in_train && !in_disk;
    case ToyRegionKind::kOutsideTrain:
      return !in_train;
  }
  return false;
}

RegionStats region_stats(const GridMap& map, ToyRegionKind region) {
  RegionStats stats;
  double sum = 0.0;
  for (int iy = 0; iy < map.n; ++iy) {
    const double y = map.coord(iy);
    for (int ix = 0; ix < map.n; ++ix) {
      const double x = map.coord(ix);
      if (!in_toy_region(x, y, region)) continue;
      const double v = std::abs(map.at(ix, iy));
      sum += v;
      stats.max = std::max(stats.max, v);
      stats.cells += 1;
    }
  }
  if (stats.cells > 0) stats.mean = sum / stats.cells;
  return stats;
}

void write_grid_csv(const std::string& path, const GridMap& map,
                    const std::string& value_name) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_grid_csv: cannot open " + path);
  out << "x,y," << value_name << "\n";
  char line[96];
  for (int iy = 0; iy < map.n; ++iy) {
    const double y = map.coord(iy);
    for (int ix = 0; ix < map.n; ++ix) {
      const double x = map.coord(ix);
      std::snprintf(line, sizeof(line), "%.10g,%.10g,%.10g\n", x, y,
                    map.at(ix, iy));
      out << line;
    }
  }
}

}  // namespace flowcritic::analysis
