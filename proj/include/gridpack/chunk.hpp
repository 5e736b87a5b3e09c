#ifndef GRIDPACK_CHUNK_HPP
#define GRIDPACK_CHUNK_HPP

#include <cstddef>
#include <string>
#include <vector>

#include "gridpack/conv.hpp"
#include "gridpack/grid.hpp"

namespace gridpack {

struct ChunkRecord {
  int example_index = 0;
  int orig_height = 0;
  int orig_width = 0;
  int padded_height = 0;
  int padded_width = 0;
  int blocks_per_col = 0;  // vertical block count
  int blocks_per_row = 0;  // horizontal block count
  std::size_t block_begin = 0;
  std::size_t block_end = 0;  // exclusive
};

// Provenance of every block in the stacked batch; ranges are disjoint and
// cover the stack exactly.
struct ChunkLayout {
  int block_h = 0;
  int block_w = 0;
  std::vector<ChunkRecord> records;
};

struct ChunkedBatch {
  std::vector<ImageGrid> blocks;  // each block_h x block_w x C
  ChunkLayout layout;
};

// Zero-pad each tensor bottom/right to block multiples, cut into disjoint
// blocks in row-major block order, stack all blocks on the batch axis.
ChunkedBatch chunk_tensor_list(const std::vector<ImageGrid>& tensors,
                               int block_h, int block_w);

// Reassemble per-example grids from per-block outputs (each
// out_block_h x out_block_w), cropping rows/columns that arose purely from
// padding.
std::vector<ImageGrid> dechunk(const std::vector<ImageGrid>& block_outputs,
                               const ChunkLayout& layout, int out_block_h,
                               int out_block_w);

// Block-strided convolution served to a whole list through one chunked pass:
// chunk with the kernel as block size, map every block, de-chunk. Equal to
// running block_strided_conv per tensor.
std::vector<ImageGrid> conv_tensor_list(const ConvParams& p,
                                        const std::vector<ImageGrid>& tensors);

std::string chunk_layout_to_json(const ChunkLayout& layout);

}  // namespace gridpack

#endif
