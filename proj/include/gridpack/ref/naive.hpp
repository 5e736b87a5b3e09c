#ifndef GRIDPACK_REF_NAIVE_HPP
#define GRIDPACK_REF_NAIVE_HPP

#include "gridpack/cells.hpp"
#include "gridpack/conv.hpp"
#include "gridpack/grid.hpp"

// Serial reference implementations. Deliberately plain cell-by-cell /
// group-by-group loops with no skewing, no batching and no OpenMP; the fast
// kernels are tested and benchmarked against these.
namespace gridpack::ref {

// Walks the unskewed grid in raster order; predecessors are the left and top
// neighbours (zero outside the grid or where the mask is 0).
ImageGrid naive_cell_scan(CellKind kind, const CellParams& params,
                          const ImageGrid& input,
                          const MaskGrid* mask = nullptr);

// One small dense map per output group, run sequentially.
ImageGrid grouped_conv_loop(const ConvParams& params, const ImageGrid& input);

// Direct triple loop over output pixels of a kernel==stride convolution,
// zero-padding bottom/right to block multiples.
ImageGrid block_conv_direct(const ConvParams& params, const ImageGrid& input);

}  // namespace gridpack::ref

#endif
