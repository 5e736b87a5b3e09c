#ifndef GRIDPACK_GRID_HPP
#define GRIDPACK_GRID_HPP

#include <cstddef>
#include <cstdint>
#include <vector>

namespace gridpack {

// Dense H x W x C grid of 32-bit reals, row-major, channel-last.
// Carries both input images and layer activations.
struct ImageGrid {
  int height = 0;
  int width = 0;
  int channels = 0;
  std::vector<float> data;

  float& at(int r, int c, int ch = 0) {
    return data[(static_cast<std::size_t>(r) * width + c) * channels + ch];
  }
  float at(int r, int c, int ch = 0) const {
    return data[(static_cast<std::size_t>(r) * width + c) * channels + ch];
  }
  std::size_t size() const { return data.size(); }
};

// Binary validity mask; dimensions match the grid it governs.
struct MaskGrid {
  int height = 0;
  int width = 0;
  std::vector<std::uint8_t> bits;

  std::uint8_t& at(int r, int c) {
    return bits[static_cast<std::size_t>(r) * width + c];
  }
  std::uint8_t at(int r, int c) const {
    return bits[static_cast<std::size_t>(r) * width + c];
  }
  // Number of valid (1) cells.
  std::size_t sum() const;
};

ImageGrid grid_create(int height, int width, int channels, float fill_value);
MaskGrid mask_create(int height, int width, std::uint8_t fill_value);

// Throws ShapeError if fields and payload size disagree.
void validate(const ImageGrid& g);
void validate(const MaskGrid& m);

// Mirror along the given axis; channels preserved. Involutions.
ImageGrid flip_horizontal(const ImageGrid& g);
ImageGrid flip_vertical(const ImageGrid& g);

bool same_shape(const ImageGrid& a, const ImageGrid& b);
// Max absolute elementwise difference; shapes must match.
float max_abs_diff(const ImageGrid& a, const ImageGrid& b);

}  // namespace gridpack

#endif
