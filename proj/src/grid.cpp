#include "gridpack/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <string>

#include "gridpack/errors.hpp"

namespace gridpack {

namespace {

void check_dims(int height, int width, int channels) {
  if (height < 1 || width < 1 || channels < 1) {
    throw ShapeError("grid dimensions must be >= 1, got " +
                     std::to_string(height) + "x" + std::to_string(width) +
                     "x" + std::to_string(channels));
  }
}

}  // namespace

std::size_t MaskGrid::sum() const {
  return std::accumulate(bits.begin(), bits.end(), std::size_t{0});
}

ImageGrid grid_create(int height, int width, int channels, float fill_value) {
  check_dims(height, width, channels);
  ImageGrid g;
  g.height = height;
  g.width = width;
  g.channels = channels;
  g.data.assign(static_cast<std::size_t>(height) * width * channels,
                fill_value);
  return g;
}

MaskGrid mask_create(int height, int width, std::uint8_t fill_value) {
  check_dims(height, width, 1);
  MaskGrid m;
  m.height = height;
  m.width = width;
  m.bits.assign(static_cast<std::size_t>(height) * width, fill_value);
  return m;
}

void validate(const ImageGrid& g) {
  check_dims(g.height, g.width, g.channels);
  if (g.data.size() !=
      static_cast<std::size_t>(g.height) * g.width * g.channels) {
    throw ShapeError("grid payload size does not match dimensions");
  }
}

void validate(const MaskGrid& m) {
  check_dims(m.height, m.width, 1);
  if (m.bits.size() != static_cast<std::size_t>(m.height) * m.width) {
    throw ShapeError("mask payload size does not match dimensions");
  }
  for (std::uint8_t b : m.bits) {
    if (b > 1) throw ShapeError("mask holds a value other than 0/1");
  }
}

ImageGrid flip_horizontal(const ImageGrid& g) {
  validate(g);
  ImageGrid out = g;
  for (int r = 0; r < g.height; ++r) {
    for (int c = 0; c < g.width; ++c) {
      for (int ch = 0; ch < g.channels; ++ch) {
        out.at(r, c, ch) = g.at(r, g.width - 1 - c, ch);
      }
    }
  }
  return out;
}

ImageGrid flip_vertical(const ImageGrid& g) {
  validate(g);
  ImageGrid out = g;
  for (int r = 0; r < g.height; ++r) {
    for (int c = 0; c < g.width; ++c) {
      for (int ch = 0; ch < g.channels; ++ch) {
        out.at(r, c, ch) = g.at(g.height - 1 - r, c, ch);
      }
    }
  }
  return out;
}

bool same_shape(const ImageGrid& a, const ImageGrid& b) {
  return a.height == b.height && a.width == b.width &&
         a.channels == b.channels;
}

float max_abs_diff(const ImageGrid& a, const ImageGrid& b) {
  if (!same_shape(a, b)) {
    throw ShapeError("max_abs_diff: shape mismatch");
  }
  float m = 0.0f;
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    m = std::max(m, std::abs(a.data[i] - b.data[i]));
  }
  return m;
}

}  // namespace gridpack
