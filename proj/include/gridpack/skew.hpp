#ifndef GRIDPACK_SKEW_HPP
#define GRIDPACK_SKEW_HPP

#include "gridpack/grid.hpp"

namespace gridpack {

// Row r shifted right by r pixels, so both recurrent predecessors of every
// cell land in the previous skewed column. The mask marks valid cells; for a
// plain skewed grid it is the diagonal band, for a skewed packed batch it
// additionally excludes separator and fill pixels.
struct SkewedGrid {
  int height = 0;
  int skewed_width = 0;
  int original_width = 0;
  int channels = 0;
  std::vector<float> data;  // height x skewed_width x channels, row-major
  MaskGrid mask;            // height x skewed_width

  float& at(int r, int c, int ch = 0) {
    return data[(static_cast<std::size_t>(r) * skewed_width + c) * channels +
                ch];
  }
  float at(int r, int c, int ch = 0) const {
    return data[(static_cast<std::size_t>(r) * skewed_width + c) * channels +
                ch];
  }
};

SkewedGrid skew(const ImageGrid& g);
ImageGrid unskew(const SkewedGrid& s);

// Same shift pattern applied to a mask (used for packed-batch masks).
MaskGrid skew_mask(const MaskGrid& m);

}  // namespace gridpack

#endif
