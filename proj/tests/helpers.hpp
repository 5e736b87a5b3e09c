#ifndef GRIDPACK_TESTS_HELPERS_HPP
#define GRIDPACK_TESTS_HELPERS_HPP

#include <vector>

#include "gridpack/grid.hpp"
#include "gridpack/rng.hpp"

namespace gridpack::test {

inline ImageGrid random_grid(int height, int width, int channels, Rng& rng,
                             float lo = -1.0f, float hi = 1.0f) {
  ImageGrid g = grid_create(height, width, channels, 0.0f);
  for (float& v : g.data) v = rng.uniform_float(lo, hi);
  return g;
}

inline ImageGrid random_grid(Rng& rng, int max_h = 8, int max_w = 12,
                             int channels = 1) {
  return random_grid(rng.randint(1, max_h), rng.randint(1, max_w), channels,
                     rng);
}

inline std::vector<ImageGrid> random_grid_list(Rng& rng, int count, int min_h,
                                               int max_h, int min_w, int max_w,
                                               int channels) {
  std::vector<ImageGrid> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    out.push_back(random_grid(rng.randint(min_h, max_h),
                              rng.randint(min_w, max_w), channels, rng));
  }
  return out;
}

// Grid from nested init lists, channels = 1.
inline ImageGrid grid_from(const std::vector<std::vector<float>>& rows) {
  ImageGrid g = grid_create(static_cast<int>(rows.size()),
                            static_cast<int>(rows.front().size()), 1, 0.0f);
  for (int r = 0; r < g.height; ++r) {
    for (int c = 0; c < g.width; ++c) {
      g.at(r, c) = rows[r][c];
    }
  }
  return g;
}

}  // namespace gridpack::test

#endif
