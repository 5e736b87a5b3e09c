#include "gridpack/skew.hpp"

#include <string>

#include "gridpack/errors.hpp"

namespace gridpack {

SkewedGrid skew(const ImageGrid& g) {
  validate(g);
  SkewedGrid s;
  s.height = g.height;
  s.original_width = g.width;
  s.skewed_width = g.width + g.height - 1;
  s.channels = g.channels;
  s.data.assign(
      static_cast<std::size_t>(s.height) * s.skewed_width * s.channels, 0.0f);
  s.mask = mask_create(s.height, s.skewed_width, 0);
  for (int r = 0; r < g.height; ++r) {
    for (int c = 0; c < g.width; ++c) {
      for (int ch = 0; ch < g.channels; ++ch) {
        s.at(r, c + r, ch) = g.at(r, c, ch);
      }
      s.mask.at(r, c + r) = 1;
    }
  }
  return s;
}

ImageGrid unskew(const SkewedGrid& s) {
  if (s.height < 1 || s.original_width < 1 || s.channels < 1) {
    throw LayoutError("unskew: non-positive skewed grid dimensions");
  }
  if (s.skewed_width != s.original_width + s.height - 1) {
    throw LayoutError(
        "unskew: skewed_width " + std::to_string(s.skewed_width) +
        " != original_width + height - 1 = " +
        std::to_string(s.original_width + s.height - 1));
  }
  if (s.data.size() !=
      static_cast<std::size_t>(s.height) * s.skewed_width * s.channels) {
    throw LayoutError("unskew: payload size does not match dimensions");
  }
  ImageGrid g = grid_create(s.height, s.original_width, s.channels, 0.0f);
  for (int r = 0; r < g.height; ++r) {
    for (int c = 0; c < g.width; ++c) {
      for (int ch = 0; ch < g.channels; ++ch) {
        g.at(r, c, ch) = s.at(r, c + r, ch);
      }
    }
  }
  return g;
}

MaskGrid skew_mask(const MaskGrid& m) {
  validate(m);
  MaskGrid out = mask_create(m.height, m.width + m.height - 1, 0);
  for (int r = 0; r < m.height; ++r) {
    for (int c = 0; c < m.width; ++c) {
      out.at(r, c + r) = m.at(r, c);
    }
  }
  return out;
}

}  // namespace gridpack
