#pragma once

#include <functional>
#include <string>
#include <vector>

namespace flowcritic::analysis {

// Uniform square grid over [lo, hi]^2 with n points per axis.
struct GridMap {
  int n = 0;
  double lo = 0.0;
  double hi = 0.0;
  std::vector<double> values;  // row-major, index = iy * n + ix

  double coord(int i) const {
    return lo + (hi - lo) * static_cast<double>(i) / (n - 1);
  }
  double at(int ix, int iy) const { return values[static_cast<std::size_t>(iy) * n + ix]; }
};

GridMap evaluate_grid(int n, double lo, double hi,
                      const std::function<double(double, double)>& fn);

// The three report regions of the toy experiment: the noisy disk |s| <= 1,
// the rest of the training square [-2,2]^2, and everything outside it.
enum class ToyRegionKind { kDisk, kTrainOutsideDisk, kOutsideTrain };

bool in_toy_region(double x, double y, ToyRegionKind region);

struct RegionStats {
  double mean = 0.0;
  double max = 0.0;
  int cells = 0;
};

RegionStats region_stats(const GridMap& map, ToyRegionKind region);

// Header "x,y,<name>", one row per grid cell.
void write_grid_csv(const std::string& path, const GridMap& map,
                    const std::string& value_name);

}  // namespace flowcritic::analysis
