#include "gridpack/conv.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "gridpack/errors.hpp"

namespace gridpack {

namespace {

int ceil_div(int a, int b) { return (a + b - 1) / b; }

}  // namespace

ConvParams zero_conv_params(int in_channels, int out_channels, int kernel_h,
                            int kernel_w, int groups_in, int groups_out) {
  ConvParams p;
  p.in_channels = in_channels;
  p.out_channels = out_channels;
  p.kernel_h = kernel_h;
  p.kernel_w = kernel_w;
  p.stride_h = kernel_h;
  p.stride_w = kernel_w;
  p.groups_in = groups_in;
  p.groups_out = groups_out;
  validate(p);
  p.weights.assign(static_cast<std::size_t>(out_channels) *
                       (in_channels / groups_in) * kernel_h * kernel_w,
                   0.0f);
  p.bias.assign(out_channels, 0.0f);
  return p;
}

ConvParams random_conv_params(int in_channels, int out_channels, int kernel_h,
                              int kernel_w, Rng& rng, int groups_in,
                              int groups_out) {
  ConvParams p = zero_conv_params(in_channels, out_channels, kernel_h,
                                  kernel_w, groups_in, groups_out);
  for (float& x : p.weights) x = rng.uniform_float(-0.5f, 0.5f);
  for (float& x : p.bias) x = rng.uniform_float(-0.5f, 0.5f);
  return p;
}

void validate(const ConvParams& p) {
  if (p.in_channels < 1 || p.out_channels < 1 || p.kernel_h < 1 ||
      p.kernel_w < 1 || p.stride_h < 1 || p.stride_w < 1) {
    throw ShapeError("conv params: dimensions must be >= 1");
  }
  if (p.groups_in < 1 || p.groups_out < 1) {
    throw ShapeError("conv params: group counts must be >= 1");
  }
  if (p.groups_out % p.groups_in != 0) {
    throw ShapeError("conv params: output groups " +
                     std::to_string(p.groups_out) +
                     " not a multiple of input groups " +
                     std::to_string(p.groups_in));
  }
  if (p.in_channels % p.groups_in != 0) {
    throw ShapeError("conv params: in_channels not divisible by input groups");
  }
  if (p.out_channels % p.groups_out != 0) {
    throw ShapeError(
        "conv params: out_channels not divisible by output groups");
  }
  const std::size_t want = static_cast<std::size_t>(p.out_channels) *
                           (p.in_channels / p.groups_in) * p.kernel_h *
                           p.kernel_w;
  if (!p.weights.empty() || !p.bias.empty()) {
    if (p.weights.size() != want ||
        p.bias.size() != static_cast<std::size_t>(p.out_channels)) {
      throw ShapeError("conv params: weight/bias sizes do not match shape");
    }
  }
  for (float x : p.weights) {
    if (!std::isfinite(x)) throw ArgumentError("conv params: non-finite weight");
  }
  for (float x : p.bias) {
    if (!std::isfinite(x)) throw ArgumentError("conv params: non-finite bias");
  }
}

ImageGrid grouped_pointwise_conv(const ConvParams& p, const ImageGrid& g) {
  validate(p);
  validate(g);
  if (p.kernel_h != 1 || p.kernel_w != 1 || p.stride_h != 1 ||
      p.stride_w != 1) {
    throw ShapeError("grouped_pointwise_conv: kernel and stride must be 1x1");
  }
  if (g.channels != p.in_channels) {
    throw ShapeError("grouped_pointwise_conv: channel mismatch");
  }
  const int in_per_group = p.in_channels / p.groups_in;
  const int out_per_in_group = p.out_channels / p.groups_in;
  ImageGrid out = grid_create(g.height, g.width, p.out_channels, 0.0f);
  const std::size_t pixels =
      static_cast<std::size_t>(g.height) * g.width;
  const long long work = static_cast<long long>(pixels) * p.out_channels *
                         in_per_group;
#pragma omp parallel for schedule(static) if (work >= (1 << 18))
  for (std::ptrdiff_t px = 0; px < static_cast<std::ptrdiff_t>(pixels); ++px) {
    const float* in = g.data.data() + px * p.in_channels;
    float* dst = out.data.data() + px * p.out_channels;
    for (int o = 0; o < p.out_channels; ++o) {
      const int in_group = o / out_per_in_group;
      const float* src = in + static_cast<std::size_t>(in_group) * in_per_group;
      float acc = p.bias[o];
      const float* w =
          p.weights.data() + static_cast<std::size_t>(o) * in_per_group;
      for (int k = 0; k < in_per_group; ++k) acc += w[k] * src[k];
      dst[o] = acc;
    }
  }
  return out;
}

ImageGrid replicate_inputs_for_groups(const ImageGrid& g,
                                      const std::vector<int>& replication) {
  validate(g);
  if (replication.empty()) {
    throw ArgumentError("replicate_inputs_for_groups: empty replication list");
  }
  if (g.channels % static_cast<int>(replication.size()) != 0) {
    throw ShapeError(
        "replicate_inputs_for_groups: channels not divisible into " +
        std::to_string(replication.size()) + " blocks");
  }
  for (int r : replication) {
    if (r < 1) {
      throw ArgumentError(
          "replicate_inputs_for_groups: replication counts must be >= 1");
    }
  }
  const int block = g.channels / static_cast<int>(replication.size());
  const int total_blocks =
      std::accumulate(replication.begin(), replication.end(), 0);
  ImageGrid out = grid_create(g.height, g.width, block * total_blocks, 0.0f);
  for (int r = 0; r < g.height; ++r) {
    for (int c = 0; c < g.width; ++c) {
      int dst_ch = 0;
      for (std::size_t b = 0; b < replication.size(); ++b) {
        for (int rep = 0; rep < replication[b]; ++rep) {
          for (int k = 0; k < block; ++k) {
            out.at(r, c, dst_ch++) = g.at(r, c, static_cast<int>(b) * block + k);
          }
        }
      }
    }
  }
  return out;
}

ImageGrid block_strided_conv(const ConvParams& p, const ImageGrid& g) {
  validate(p);
  validate(g);
  if (p.kernel_h != p.stride_h || p.kernel_w != p.stride_w) {
    throw ShapeError("block_strided_conv: kernel must equal stride");
  }
  if (g.channels != p.in_channels) {
    throw ShapeError("block_strided_conv: channel mismatch");
  }
  const int out_h = ceil_div(g.height, p.kernel_h);
  const int out_w = ceil_div(g.width, p.kernel_w);
  const int in_per_group = p.in_channels / p.groups_in;
  const int out_per_in_group = p.out_channels / p.groups_in;
  ImageGrid out = grid_create(out_h, out_w, p.out_channels, 0.0f);
  const long long work = static_cast<long long>(out_h) * out_w *
                         p.out_channels * in_per_group * p.kernel_h *
                         p.kernel_w;
#pragma omp parallel for collapse(2) schedule(static) if (work >= (1 << 18))
  for (int br = 0; br < out_h; ++br) {
    for (int bc = 0; bc < out_w; ++bc) {
      for (int o = 0; o < p.out_channels; ++o) {
        const int base = (o / out_per_in_group) * in_per_group;
        float acc = p.bias[o];
        for (int k = 0; k < in_per_group; ++k) {
          for (int kr = 0; kr < p.kernel_h; ++kr) {
            const int r = br * p.kernel_h + kr;
            if (r >= g.height) continue;  // zero pad
            for (int kc = 0; kc < p.kernel_w; ++kc) {
              const int c = bc * p.kernel_w + kc;
              if (c >= g.width) continue;
              acc += p.weight(o, k, kr, kc) * g.at(r, c, base + k);
            }
          }
        }
        out.at(br, bc, o) = acc;
      }
    }
  }
  return out;
}

}  // namespace gridpack
