#ifndef GRIDPACK_PACK_HPP
#define GRIDPACK_PACK_HPP

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "gridpack/grid.hpp"
#include "gridpack/skew.hpp"

namespace gridpack {

struct GridExtent {
  int height = 0;
  int width = 0;
};

struct Placement {
  int example_index = 0;
  int width = 0;
  int column_offset = 0;
};

struct LayoutRow {
  int row_height = 0;
  int top_offset = 0;
  std::vector<Placement> placements;
};

// Where every example landed in the packed composite. Rows are separated by
// exactly one pixel row, placements within a row by at least one column.
struct PackingLayout {
  int total_height = 0;
  int total_width = 0;
  std::vector<LayoutRow> rows;

  std::size_t example_count() const;
};

struct PackedBatch {
  ImageGrid grid;
  MaskGrid mask;  // 1 on example pixels, 0 on separators and fill
  PackingLayout layout;
};

struct PackedSkewed {
  SkewedGrid grid;  // mask excludes separators, fill and the skew triangles
  PackingLayout layout;
};

// Exact integer per-axis scale for unpacking activations of strided layers.
struct Scale {
  int num = 1;
  int den = 1;
};

// Greedy tiling: bucket by height, ascending; fill rows widest-first against
// a row capacity equal to the widest example in the batch; one separator
// pixel between neighbours both ways.
PackingLayout plan_packing(const std::vector<GridExtent>& sizes);

PackedBatch pack_examples(const std::vector<ImageGrid>& examples);
PackedSkewed pack_and_skew(const std::vector<ImageGrid>& examples);

std::vector<ImageGrid> unpack_activations(const ImageGrid& packed_activations,
                                          const PackingLayout& layout,
                                          Scale height_scale,
                                          Scale width_scale);

// Longest-processing-time split on pixel count. Sort descending (ties by
// index), assign each to the lightest sublist (ties by sublist index).
std::vector<std::vector<std::size_t>> split_balanced_indices(
    const std::vector<std::size_t>& pixel_counts, int k);
std::vector<std::vector<ImageGrid>> split_balanced(
    const std::vector<ImageGrid>& examples, int k);

std::string layout_to_json(const PackingLayout& layout);
PackingLayout layout_from_json(const std::string& text);

}  // namespace gridpack

#endif
