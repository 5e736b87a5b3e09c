#include "gridpack/chunk.hpp"

#include <string>

#include "json.hpp"

#include "gridpack/errors.hpp"

namespace gridpack {

namespace {

int ceil_div(int a, int b) { return (a + b - 1) / b; }

}  // namespace

ChunkedBatch chunk_tensor_list(const std::vector<ImageGrid>& tensors,
                               int block_h, int block_w) {
  if (block_h < 1 || block_w < 1) {
    throw ShapeError("chunk_tensor_list: block dimensions must be >= 1");
  }
  ChunkedBatch out;
  out.layout.block_h = block_h;
  out.layout.block_w = block_w;
  for (std::size_t i = 0; i < tensors.size(); ++i) {
    const ImageGrid& t = tensors[i];
    validate(t);
    ChunkRecord rec;
    rec.example_index = static_cast<int>(i);
    rec.orig_height = t.height;
    rec.orig_width = t.width;
    rec.blocks_per_col = ceil_div(t.height, block_h);
    rec.blocks_per_row = ceil_div(t.width, block_w);
    rec.padded_height = rec.blocks_per_col * block_h;
    rec.padded_width = rec.blocks_per_row * block_w;
    rec.block_begin = out.blocks.size();
    for (int br = 0; br < rec.blocks_per_col; ++br) {
      for (int bc = 0; bc < rec.blocks_per_row; ++bc) {
        ImageGrid block = grid_create(block_h, block_w, t.channels, 0.0f);
        for (int r = 0; r < block_h; ++r) {
          const int src_r = br * block_h + r;
          if (src_r >= t.height) break;
          for (int c = 0; c < block_w; ++c) {
            const int src_c = bc * block_w + c;
            if (src_c >= t.width) break;
            for (int ch = 0; ch < t.channels; ++ch) {
              block.at(r, c, ch) = t.at(src_r, src_c, ch);
            }
          }
        }
        out.blocks.push_back(std::move(block));
      }
    }
    rec.block_end = out.blocks.size();
    out.layout.records.push_back(rec);
  }
  return out;
}

std::vector<ImageGrid> dechunk(const std::vector<ImageGrid>& block_outputs,
                               const ChunkLayout& layout, int out_block_h,
                               int out_block_w) {
  if (out_block_h < 1 || out_block_w < 1) {
    throw ShapeError("dechunk: output block dimensions must be >= 1");
  }
  std::size_t expected = 0;
  for (const auto& rec : layout.records) {
    expected += rec.block_end - rec.block_begin;
  }
  if (block_outputs.size() != expected) {
    throw LayoutError("dechunk: block count " +
                      std::to_string(block_outputs.size()) +
                      " does not match layout (" + std::to_string(expected) +
                      ")");
  }
  std::vector<ImageGrid> out;
  out.reserve(layout.records.size());
  for (const auto& rec : layout.records) {
    const int channels =
        rec.block_begin < block_outputs.size()
            ? block_outputs[rec.block_begin].channels
            : 1;
    // Crop away rows/columns produced purely by block padding.
    const int out_h = ceil_div(rec.orig_height * out_block_h, layout.block_h);
    const int out_w = ceil_div(rec.orig_width * out_block_w, layout.block_w);
    ImageGrid g = grid_create(out_h, out_w, channels, 0.0f);
    std::size_t b = rec.block_begin;
    for (int br = 0; br < rec.blocks_per_col; ++br) {
      for (int bc = 0; bc < rec.blocks_per_row; ++bc, ++b) {
        const ImageGrid& blk = block_outputs[b];
        if (blk.height != out_block_h || blk.width != out_block_w ||
            blk.channels != channels) {
          throw LayoutError("dechunk: block output shape mismatch");
        }
        for (int r = 0; r < out_block_h; ++r) {
          const int dst_r = br * out_block_h + r;
          if (dst_r >= out_h) break;
          for (int c = 0; c < out_block_w; ++c) {
            const int dst_c = bc * out_block_w + c;
            if (dst_c >= out_w) break;
            for (int ch = 0; ch < channels; ++ch) {
              g.at(dst_r, dst_c, ch) = blk.at(r, c, ch);
            }
          }
        }
      }
    }
    out.push_back(std::move(g));
  }
  return out;
}

std::vector<ImageGrid> conv_tensor_list(const ConvParams& p,
                                        const std::vector<ImageGrid>& tensors) {
  validate(p);
  if (p.kernel_h != p.stride_h || p.kernel_w != p.stride_w) {
    throw ShapeError("conv_tensor_list: kernel must equal stride");
  }
  for (const auto& t : tensors) {
    if (t.channels != p.in_channels) {
      throw ShapeError("conv_tensor_list: channel mismatch");
    }
  }
  ChunkedBatch chunked = chunk_tensor_list(tensors, p.kernel_h, p.kernel_w);
  // Every stacked block is exactly one kernel application: a dense dot
  // product over the whole block, no bounds checks, validated once above.
  const int in_per_group = p.in_channels / p.groups_in;
  const int out_per_in_group = p.out_channels / p.groups_in;
  std::vector<ImageGrid> mapped(chunked.blocks.size());
  const long long work = static_cast<long long>(chunked.blocks.size()) *
                         p.out_channels * in_per_group * p.kernel_h *
                         p.kernel_w;
#pragma omp parallel for schedule(static) if (work >= (1 << 18))
  for (std::ptrdiff_t b = 0;
       b < static_cast<std::ptrdiff_t>(chunked.blocks.size()); ++b) {
    const float* in = chunked.blocks[b].data.data();
    ImageGrid out = grid_create(1, 1, p.out_channels, 0.0f);
    for (int o = 0; o < p.out_channels; ++o) {
      const int base = (o / out_per_in_group) * in_per_group;
      float acc = p.bias[o];
      for (int k = 0; k < in_per_group; ++k) {
        for (int kr = 0; kr < p.kernel_h; ++kr) {
          for (int kc = 0; kc < p.kernel_w; ++kc) {
            acc += p.weight(o, k, kr, kc) *
                   in[(static_cast<std::size_t>(kr) * p.kernel_w + kc) *
                          p.in_channels +
                      base + k];
          }
        }
      }
      out.at(0, 0, o) = acc;
    }
    mapped[b] = std::move(out);
  }
  return dechunk(mapped, chunked.layout, 1, 1);
}

std::string chunk_layout_to_json(const ChunkLayout& layout) {
  nlohmann::json records = nlohmann::json::array();
  for (const auto& r : layout.records) {
    records.push_back({{"example_index", r.example_index},
                       {"orig_height", r.orig_height},
                       {"orig_width", r.orig_width},
                       {"padded_height", r.padded_height},
                       {"padded_width", r.padded_width},
                       {"blocks_per_col", r.blocks_per_col},
                       {"blocks_per_row", r.blocks_per_row},
                       {"block_begin", r.block_begin},
                       {"block_end", r.block_end}});
  }
  nlohmann::json j = {{"block_h", layout.block_h},
                      {"block_w", layout.block_w},
                      {"records", records}};
  return j.dump(2);
}

}  // namespace gridpack
